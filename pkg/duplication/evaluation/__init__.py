"""Model comparison: ROC/AUC, Youden thresholds, bootstrap intervals, confusion matrices, benchmarks."""

"""Message and account duplication graphs, clusters, method mixes and themes."""

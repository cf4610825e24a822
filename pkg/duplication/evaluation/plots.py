from __future__ import annotations

from typing import Mapping

import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from duplication.evaluation.processing import RocCurve, youden_optimal

TRUTH_COLOR_MAP = {
    "control": "#7f7f7f",
    "copy_pasta": "#1f77b4",
    "rewording": "#ff7f0e",
    "translation": "#2ca02c",
}


def plot_roc(curves: Mapping[str, RocCurve], rate_bars: Mapping[str, dict] | None = None) -> go.Figure:
    """ROC per algorithm with its Youden point; optional TPR/FPR intervals as error bars."""
    figure = go.Figure()
    for name, curve in curves.items():
        figure.add_trace(go.Scatter(x=curve.fpr, y=curve.tpr, mode="lines", name=f"{name} (AUC {curve.auc:.3f})"))
        threshold, j = youden_optimal(curve)
        best = int(abs(curve.thresholds - threshold).argmin())
        marker = {"x": [curve.fpr[best]], "y": [curve.tpr[best]]}
        if rate_bars and name in rate_bars:
            tpr, fpr = rate_bars[name]["tpr"], rate_bars[name]["fpr"]
            marker["error_y"] = {"type": "data", "symmetric": False, "array": [tpr["hi"] - tpr["value"]], "arrayminus": [tpr["value"] - tpr["lo"]]}
            marker["error_x"] = {"type": "data", "symmetric": False, "array": [fpr["hi"] - fpr["value"]], "arrayminus": [fpr["value"] - fpr["lo"]]}
        figure.add_trace(
            go.Scatter(mode="markers", name=f"{name} J={j:.3f} @ {threshold:.3f}", marker={"size": 9}, **marker)
        )
    figure.add_trace(go.Scatter(x=[0, 1], y=[0, 1], mode="lines", line={"dash": "dot", "color": "gray"}, showlegend=False))
    figure.update_layout(
        xaxis_title="False positive rate",
        yaxis_title="True positive rate",
        title="ROC Curves of Grapheme Distances",
        height=520,
    )
    return figure


def plot_delta_space(table: pd.DataFrame, grapheme_column: str = "lv") -> go.Figure:
    return px.scatter_3d(
        table,
        x=grapheme_column,
        y="d_semantic",
        z="d_language",
        color="truth",
        color_discrete_map=TRUTH_COLOR_MAP,
        labels={grapheme_column: "grapheme distance", "d_semantic": "semantic distance", "d_language": "language distance"},
        title="Labeled Pairs in Distance Space",
    )


__all__ = ["plot_roc", "plot_delta_space"]

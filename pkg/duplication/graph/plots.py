from __future__ import annotations

import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from duplication.config import LABEL_COLOR_MAP


def plot_method_mix_ternary(mix: pd.DataFrame) -> go.Figure:
    figure = go.Figure(
        go.Scatterternary(
            a=mix["copy_pasta"],
            b=mix["rewording"],
            c=mix["translation"],
            mode="markers",
            text=mix["account_id"],
            marker={"size": 6 + 2 * mix["total"].clip(upper=10), "opacity": 0.7},
        )
    )
    figure.update_layout(
        ternary={
            "aaxis": {"title": "Copy-Pasta"},
            "baxis": {"title": "Rewording"},
            "caxis": {"title": "Translation"},
        },
        title="Duplication Methods per Account",
        height=520,
    )
    return figure


def plot_sunburst(frame: pd.DataFrame) -> go.Figure:
    figure = px.sunburst(
        frame,
        path=["cluster", "method", "theme"],
        values="count",
        color="method",
        color_discrete_map=LABEL_COLOR_MAP,
        title="Duplication Methods per Topic and Account Cluster",
    )
    figure.update_layout(height=560)
    return figure


def plot_component_sizes(report: list[dict]) -> go.Figure:
    figure = go.Figure()
    for method, color in LABEL_COLOR_MAP.items():
        figure.add_trace(
            go.Bar(
                x=[f"#{c['component']}" for c in report],
                y=[c["label_histogram"][method] for c in report],
                name=method,
                marker_color=color,
            )
        )
    figure.update_layout(
        barmode="stack",
        xaxis_title="Component",
        yaxis_title="Edges",
        title="Duplicate Edges per Component",
        height=420,
    )
    return figure


__all__ = [
    "plot_method_mix_ternary",
    "plot_sunburst",
    "plot_component_sizes",
]

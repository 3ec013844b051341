"""
Plotting Utility
Static plotly figures for experiment tables, exported as SVG through kaleido
"""

from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go
from loguru import logger


def passive_scan_figure(table: pd.DataFrame) -> go.Figure:
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=table["N"], y=table["hxp"], mode="markers", name="h(x,p)", marker_color="#FF6B6B"))
    fig.add_trace(go.Scatter(x=table["N"], y=table["hx_plus_hp"], mode="markers", name="h(x)+h(p)", marker_color="#4C78A8"))
    fig.add_trace(go.Scatter(x=table["N"], y=table["bound"], mode="lines", name="ln(pi e hbar)", line={"dash": "dash"}))
    fig.update_layout(
        title="Extremal passive states",
        xaxis_title="Photon number N",
        yaxis_title="Entropy (nats)",
    )
    return fig


def random_scan_figure(table: pd.DataFrame) -> go.Figure:
    fig = px.scatter(
        table,
        x="rho",
        y="hx_plus_hp",
        title="Random states against the covariance-corrected bound",
        labels={"rho": "Correlation coefficient", "hx_plus_hp": "h(x)+h(p) (nats)"},
    )
    if len(table):
        hbar = float(table["hbar"].iloc[0])
        rho = np.linspace(-0.999, 0.999, 400)
        bound = np.log(np.pi * np.e * hbar) - 0.5 * np.log(1.0 - rho ** 2)
        fig.add_trace(go.Scatter(x=rho, y=bound, mode="lines", name="bound", line={"dash": "dash"}))
    return fig


def neighborhood_figure(table: pd.DataFrame) -> go.Figure:
    fig = px.histogram(table, x="tight_slack", nbins=40, title="Slack of states near a squeezed vacuum")
    fig.update_layout(xaxis_title="Slack (nats)", yaxis_title="Trials")
    return fig


def concavity_figure(table: pd.DataFrame) -> go.Figure:
    fig = px.line(
        table,
        x="lam",
        y="defect",
        color="label",
        markers=True,
        title="Concavity defect of the uncertainty functional",
    )
    fig.update_layout(xaxis_title="lambda", yaxis_title="F(mix) - linear interpolation (nats)")
    return fig


def gaussian_saturation_figure(table: pd.DataFrame) -> go.Figure:
    fig = px.scatter(
        table,
        x="r",
        y="bbm_slack",
        color="theta",
        title="Marginal-entropy gap of rotated squeezed vacua",
        labels={"r": "Squeezing r", "bbm_slack": "h(x)+h(p) - ln(pi e hbar)"},
    )
    fig.add_trace(go.Scatter(x=table["r"], y=table["tight_slack"], mode="markers", name="tight slack"))
    return fig


def counterexample_figure(table: pd.DataFrame) -> go.Figure:
    fig = px.bar(table, x="restart", y="final_slack", title="Best slack per restart")
    fig.update_layout(xaxis_title="Restart", yaxis_title="Slack (nats)")
    return fig


def multimode_figure(table: pd.DataFrame) -> go.Figure:
    closed = table[table["kind"] != "random"]
    fig = px.line(
        closed,
        x="r",
        y="nmode_bbm_slack",
        color="kind",
        markers=True,
        title="Two-mode Gaussian states",
    )
    fig.update_layout(xaxis_title="Squeezing r", yaxis_title="n-mode marginal slack (nats)")
    return fig


def hygiene_figure(table: pd.DataFrame) -> go.Figure:
    fig = px.bar(
        table,
        x="state",
        y=["grid_drift", "nmax_drift"],
        barmode="group",
        log_y=True,
        title="Entropy drift under refinement",
    )
    return fig


def check_figure(table: pd.DataFrame) -> go.Figure:
    applicable = table[table["applicable"]]
    fig = px.bar(applicable, x="relation", y="slack", title="Relation slacks")
    fig.update_layout(yaxis_title="lhs - rhs")
    return fig


FIGURES: Dict[str, Callable[[pd.DataFrame], go.Figure]] = {
    "passive-scan": passive_scan_figure,
    "random-scan": random_scan_figure,
    "neighborhood": neighborhood_figure,
    "concavity": concavity_figure,
    "gaussian-saturation": gaussian_saturation_figure,
    "counterexample": counterexample_figure,
    "multimode": multimode_figure,
    "hygiene": hygiene_figure,
    "check": check_figure,
}


def figure_for(command: str, table: pd.DataFrame) -> Optional[go.Figure]:
    builder = FIGURES.get(command)
    if builder is None or table.empty:
        return None
    return builder(table)


def save_svg(fig: go.Figure, path: Union[str, Path]) -> Path:
    """Export a figure as SVG (requires kaleido)"""
    path = Path(path)
    fig.write_image(str(path), format="svg")
    logger.info(f"🖼️  Wrote figure {path}")
    return path

import json
from dataclasses import dataclass, field
from fractions import Fraction

import pandas as pd
import plotly.graph_objects as go

from utils.color_mapper import ColorMapper


EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


@dataclass
class Report:
    """What a command hands back to the entry point: a payload for --json, text for humans."""

    payload: dict
    text: str
    exit_code: int = EXIT_OK
    figure: go.Figure | None = field(default=None, repr=False)

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(to_jsonable(self.payload), indent=2)
        return self.text


def to_jsonable(value):
    """Fractions become "p/q" strings; sets become sorted lists."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (set, frozenset)):
        return [to_jsonable(item) for item in sorted(value)]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    return value


def frame_text(frame: pd.DataFrame, title: str | None = None) -> str:
    body = frame.to_string()
    return f"{title}\n{body}" if title else body


def build_bar_figure(labels: list[str], series: dict[str, list], title: str, chart_key: str) -> go.Figure:
    """Bars per outcome, one trace per series; a single series is coloured by tier."""
    fig = go.Figure()
    for name, values in series.items():
        marker = None
        if len(series) == 1:
            ColorMapper.calibrate(values, chart_key=chart_key)
            marker = dict(color=[ColorMapper.get_color(value) for value in values],
                          line=dict(width=1, color="#0A1628"))
        fig.add_trace(go.Bar(
            x=labels, y=values, name=name, marker=marker,
            hovertemplate="<b>%{x}</b><br>" + name + ": %{y}<extra></extra>",
        ))
    fig.update_layout(
        title=title,
        barmode="group",
        margin=dict(t=48, b=24, l=24, r=24),
        paper_bgcolor="#0A1628", plot_bgcolor="#0A1628",
        font=dict(family="DM Sans", color="white"),
        showlegend=len(series) > 1,
    )
    return fig

"""Deterministic SVG rendering of 2-D box models."""

from __future__ import annotations

from .boxes import volume
from .errors import DimensionMismatch
from .model import Model

_CANVAS = 560
_MARGIN = 30
_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def render_svg(model: Model) -> str:
    """One labeled rectangle per concept inside the support-square frame.

    Fill opacity is proportional to the concept's marginal probability;
    output is a pure function of the model, so identical models render
    byte-identical documents.  The y axis points up.
    """
    if model.dim != 2:
        raise DimensionMismatch(f"plotting needs a 2-D model, got {model.dim}-D")
    lo, hi = model.measure.support
    span = hi - lo
    side = _CANVAS - 2 * _MARGIN

    def sx(x):
        return _MARGIN + (x - lo) / span * side

    def sy(y):
        return _CANVAS - _MARGIN - (y - lo) / span * side

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_CANVAS}" height="{_CANVAS}" '
        f'viewBox="0 0 {_CANVAS} {_CANVAS}">',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{side}" height="{side}" '
        'fill="none" stroke="#000000" stroke-width="1"/>',
    ]
    for i, name in enumerate(model.names()):
        box = model.boxes[name]
        color = _PALETTE[i % len(_PALETTE)]
        p = volume(box, model.measure)
        x = sx(box.min[0])
        y = sy(box.max[1])
        w = box.delta[0] / span * side
        h = box.delta[1] / span * side
        parts.append(
            f'<rect x="{x:.3f}" y="{y:.3f}" width="{w:.3f}" height="{h:.3f}" '
            f'fill="{color}" fill-opacity="{0.9 * p:.4f}" '
            f'stroke="{color}" stroke-width="1.2"/>'
        )
        parts.append(
            f'<text x="{x + 3:.3f}" y="{y + 12:.3f}" font-size="11" '
            f'font-family="sans-serif" fill="#000000">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Dependency-free SVG figures: a 2x2 confusion matrix and CV accuracy lines."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .metrics import ConfusionMatrix

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _f(x):
    return f"{x:.2f}"


def _doc(width, height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">\n'
        f"<!-- pdmvote {__version__} -->\n"
        + "\n".join(body)
        + "\n</svg>\n"
    )


def confusion_svg(cm: ConfusionMatrix, title="Confusion Matrix (Testing Set)") -> str:
    cell, left, top = 120, 110, 60
    cells = [[cm.tn, cm.fp], [cm.fn, cm.tp]]
    peak = max(max(r) for r in cells) or 1
    body = [f'<text x="{left + cell}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>']
    for i, row in enumerate(cells):
        for j, v in enumerate(row):
            x, y = left + j * cell, top + i * cell
            shade = int(235 - 175 * v / peak)
            fill = f"rgb({shade},{shade},255)"
            ink = "#ffffff" if shade < 140 else "#000000"
            body.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="#333"/>')
            body.append(
                f'<text x="{x + cell // 2}" y="{y + cell // 2 + 7}" text-anchor="middle" '
                f'font-size="20" fill="{ink}">{v}</text>'
            )
    for k, label in enumerate(("0", "1")):
        body.append(f'<text x="{left + k * cell + cell // 2}" y="{top + 2 * cell + 22}" text-anchor="middle" font-size="13">{label}</text>')
        body.append(f'<text x="{left - 12}" y="{top + k * cell + cell // 2 + 5}" text-anchor="end" font-size="13">{label}</text>')
    body.append(f'<text x="{left + cell}" y="{top + 2 * cell + 44}" text-anchor="middle" font-size="14">Predicted label</text>')
    body.append(
        f'<text x="30" y="{top + cell}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 30 {top + cell})">True label</text>'
    )
    return _doc(left + 2 * cell + 30, top + 2 * cell + 60, body)


def cv_svg(grid, title="K-Fold Cross Validation") -> str:
    """One polyline per repetition, fold number on x, accuracy on y."""
    grid = np.asarray(grid, dtype=np.float64)
    reps, k = grid.shape
    width, height = 560, 360
    left, right, top, bottom = 70, 130, 40, 50
    pw, ph = width - left - right, height - top - bottom
    lo, hi = float(grid.min()), float(grid.max())
    pad = max((hi - lo) * 0.1, 0.005)
    lo, hi = max(0.0, lo - pad), min(1.0, hi + pad)
    if hi <= lo:
        lo, hi = max(0.0, lo - 0.01), min(1.0, hi + 0.01)

    def px(j):
        return left + (pw * j / (k - 1) if k > 1 else pw / 2)

    def py(v):
        return top + ph * (1.0 - (v - lo) / (hi - lo))

    body = [
        f'<text x="{left + pw / 2:.2f}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="#000"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="#000"/>',
    ]
    for t in np.linspace(lo, hi, 5):
        y = py(t)
        body.append(f'<line x1="{left - 4}" y1="{_f(y)}" x2="{left}" y2="{_f(y)}" stroke="#000"/>')
        body.append(f'<text x="{left - 8}" y="{_f(y + 4)}" text-anchor="end" font-size="11">{t:.4f}</text>')
    step = max(1, k // 10)
    for j in range(0, k, step):
        body.append(f'<text x="{_f(px(j))}" y="{top + ph + 18}" text-anchor="middle" font-size="11">{j + 1}</text>')
    body.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" text-anchor="middle" font-size="13">Fold</text>')
    body.append(
        f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {top + ph / 2:.2f})">Accuracy</text>'
    )
    for r in range(reps):
        color = PALETTE[r % len(PALETTE)]
        pts = " ".join(f"{_f(px(j))},{_f(py(v))}" for j, v in enumerate(grid[r]))
        body.append(f'<polyline class="repetition" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = top + 14 + 18 * r
        body.append(f'<line x1="{left + pw + 14}" y1="{ly}" x2="{left + pw + 34}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{left + pw + 40}" y="{ly + 4}" font-size="11">Run {r + 1}</text>')
    return _doc(width, height, body)

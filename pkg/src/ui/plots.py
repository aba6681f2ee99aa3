"""Standalone SVG plots of result tables, written by hand so no renderer is needed.

Every number in the markup is formatted with a fixed precision, so the same table always gives the
same bytes.
"""
import math
from pathlib import Path

import numpy as np

from src.core.errors import PlotError
from src.diagnostics.fitting import rate_reference
from src.utils.parsers import ResultTable
from .logging import Logger

PLOT_CODENAME = 'PLOTTER'

logger = Logger()
plot_logger = logger.get_logger(f'[magenta][{PLOT_CODENAME}][/]', False)

PLOT_KINDS = ("loglog_gradnorm", "bias_vs_T", "cost_axis")
PANEL_WIDTH = 640
PANEL_HEIGHT = 400
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
  return f"{v:.2f}"


def _positive(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
  keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
  return x[keep], y[keep]


class _LogPanel:
  """One log-log frame at horizontal offset ``left``; series are added as <path> elements."""

  def __init__(self, left: float, xs: list[np.ndarray], ys: list[np.ndarray]):
    lx = np.log10(np.concatenate(xs))
    ly = np.log10(np.concatenate(ys))
    self.left = left
    self.x_lo, self.x_hi = math.floor(lx.min()), max(math.ceil(lx.max()), math.floor(lx.min()) + 1)
    self.y_lo, self.y_hi = math.floor(ly.min()), max(math.ceil(ly.max()), math.floor(ly.min()) + 1)

  def px(self, x: np.ndarray) -> np.ndarray:
    t = (np.log10(x) - self.x_lo) / (self.x_hi - self.x_lo)
    return self.left + MARGIN + t * (PANEL_WIDTH - 2 * MARGIN)

  def py(self, y: np.ndarray) -> np.ndarray:
    t = (np.log10(y) - self.y_lo) / (self.y_hi - self.y_lo)
    return PANEL_HEIGHT - MARGIN - t * (PANEL_HEIGHT - 2 * MARGIN)

  def frame(self, title: str, xlabel: str, ylabel: str) -> list[str]:
    x0, x1 = self.left + MARGIN, self.left + PANEL_WIDTH - MARGIN
    y0, y1 = PANEL_HEIGHT - MARGIN, MARGIN
    out = [
      f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="black"/>',
      f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="black"/>',
      f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(MARGIN / 2)}" text-anchor="middle">{title}</text>',
      f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(PANEL_HEIGHT - 15)}" text-anchor="middle">{xlabel}</text>',
      f'<text x="{_fmt(self.left + 15)}" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" '
      f'transform="rotate(-90 {_fmt(self.left + 15)} {_fmt((y0 + y1) / 2)})">{ylabel}</text>',
    ]
    for k in range(self.x_lo, self.x_hi + 1):
      x = float(self.px(np.array([10.0 ** k]))[0])
      out.append(f'<text x="{_fmt(x)}" y="{_fmt(y0 + 18)}" text-anchor="middle" font-size="11">1e{k}</text>')
    for k in range(self.y_lo, self.y_hi + 1):
      y = float(self.py(np.array([10.0 ** k]))[0])
      out.append(f'<text x="{_fmt(x0 - 6)}" y="{_fmt(y + 4)}" text-anchor="end" font-size="11">1e{k}</text>')
    return out

  def path(self, x: np.ndarray, y: np.ndarray, color: str, dashed: bool = False) -> str:
    points = " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in zip(self.px(x), self.py(y)))
    dash = ' stroke-dasharray="6 4"' if dashed else ""
    return f'<path d="M {points}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'


def _require(table: ResultTable, kind: str, *columns: str) -> None:
  if len(table) == 0:
    raise PlotError(f"{kind}: the table has no rows")
  if not table.has_columns(*columns):
    raise PlotError(f"{kind}: needs columns {list(columns)}, table has {table.header}")


def _points(table: ResultTable, kind: str, xcol: str, ycol: str, min_x: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
  x, y = _positive(table.column(xcol), table.column(ycol))
  keep = x >= min_x
  x, y = x[keep], y[keep]
  if x.size == 0:
    raise PlotError(f"{kind}: no positive points to draw for {ycol} against {xcol}")
  return x, y


def _loglog_gradnorm(table: ResultTable) -> tuple[int, list[str]]:
  _require(table, "loglog_gradnorm", "n", "grad_sq_norm")
  x, y = _points(table, "loglog_gradnorm", "n", "grad_sq_norm", min_x=2)
  # reference curve anchored on the first drawn point
  ref = rate_reference(x)
  ref = ref * (y[0] / ref[0])
  panel = _LogPanel(0, [x, x], [y, ref])
  body = panel.frame("squared gradient norm", "iteration n", "|grad V|^2")
  body += [panel.path(x, y, COLORS[0]), panel.path(x, ref, "black", dashed=True)]
  return PANEL_WIDTH, body


def _bias_vs_T(table: ResultTable) -> tuple[int, list[str]]:
  _require(table, "bias_vs_T", "T")
  series = [c for c in table.header if c == "bias_norm" or c.endswith("_bias")]
  if not series:
    raise PlotError(f"bias_vs_T: no bias column in {table.header}")
  curves = [_points(table, "bias_vs_T", "T", name) for name in series]
  panel = _LogPanel(0, [c[0] for c in curves], [c[1] for c in curves])
  body = panel.frame("bias", "truncation bound T", "|bias|")
  for i, ((x, y), name) in enumerate(zip(curves, series)):
    color = COLORS[i % len(COLORS)]
    body.append(panel.path(x, y, color))
    body.append(f'<text x="{_fmt(PANEL_WIDTH - MARGIN)}" y="{_fmt(MARGIN + 16 * i)}" text-anchor="end" '
                f'fill="{color}" font-size="12">{name}</text>')
  return PANEL_WIDTH, body


def _cost_axis(table: ResultTable) -> tuple[int, list[str]]:
  _require(table, "cost_axis", "n", "cumulative_cost", "grad_sq_norm")
  body = []
  for i, (xcol, xlabel) in enumerate((("n", "iteration n"), ("cumulative_cost", "simulated states"))):
    x, y = _points(table, "cost_axis", xcol, "grad_sq_norm")
    panel = _LogPanel(i * PANEL_WIDTH, [x], [y])
    body += panel.frame(f"|grad V|^2 against {xlabel}", xlabel, "|grad V|^2")
    body.append(panel.path(x, y, COLORS[0]))
  return 2 * PANEL_WIDTH, body


def emit_plot(table: ResultTable, kind: str, path: str | Path) -> Path:
  """
  Write ``table`` as a standalone SVG.

  Args:
      table (ResultTable): experiment output
      kind (str): "loglog_gradnorm" (data plus a dashed (log N)^2 / sqrt(N) reference),
          "bias_vs_T" (every bias column against T) or "cost_axis" (the same curve against
          iterations and against simulated states)
      path: file to write

  Raises:
      PlotError: unknown kind, empty table or missing columns; nothing is written then
  """
  builders = {"loglog_gradnorm": _loglog_gradnorm, "bias_vs_T": _bias_vs_T, "cost_axis": _cost_axis}
  if kind not in builders:
    raise PlotError(f"unknown plot kind {kind!r}, expected one of {', '.join(PLOT_KINDS)}")
  width, body = builders[kind](table)

  svg = "\n".join([
    f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_HEIGHT}" '
    f'viewBox="0 0 {width} {PANEL_HEIGHT}" font-family="sans-serif">',
    f'<rect width="{width}" height="{PANEL_HEIGHT}" fill="white"/>',
    *body,
    "</svg>",
    "",
  ])
  path = Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  path.write_text(svg, encoding="utf-8")
  plot_logger.debug(f"{kind} -> {path}")
  return path

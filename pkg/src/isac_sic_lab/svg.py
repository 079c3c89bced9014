"""Minimal deterministic SVG line charts from CSV files.

Same CSV and chart spec always give byte-identical SVG: no timestamps, no
random ids, fixed number formatting.
"""
import csv
import math
from dataclasses import dataclass, field
from html import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
DASHES = ("", "6,4", "2,3", "8,3,2,3")


class ChartError(ValueError):
    """CSV does not carry the columns the chart needs."""


@dataclass
class ChartSpec:
    """What to draw.

    kind: ``line`` (one polyline per y column), ``region`` (one closed
    lower-left region per value of `group_by`, y column ``series[0]``), or
    ``table`` (render the CSV as a text table).
    """

    x: str = None
    series: list = field(default_factory=list)
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    log_y: bool = False
    kind: str = "line"
    group_by: str = None
    dashed: list = field(default_factory=list)


def _fmt(v):
    return f"{v:.6g}"


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ChartError(f"{path}: empty file, no header row")
    return rows[0], rows[1:]


def _require(header, cols):
    for c in cols:
        if c not in header:
            raise ChartError(f"missing column {c!r}")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _to_float(s):
    try:
        v = float(s)
    except ValueError:
        return math.nan
    return v


class _Canvas:
    def __init__(self, title):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        ]
        if title:
            self.text(WIDTH / 2, 22, title, anchor="middle", size=14)

    def text(self, x, y, s, anchor="start", size=11, rotate=None):
        tr = f' transform="rotate({rotate} {_fmt(x)} {_fmt(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
            f'font-size="{size}" text-anchor="{anchor}"{tr}>{escape(str(s))}</text>'
        )

    def line(self, x1, y1, x2, y2, color="black", width=1):
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )

    def poly(self, pts, color, closed=False, dash=""):
        if not pts:
            return
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        tag = "polygon" if closed else "polyline"
        fill = f'fill="{color}" fill-opacity="0.12"' if closed else 'fill="none"'
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<{tag} points="{coords}" {fill} stroke="{color}" stroke-width="1.8"{d}/>'
        )

    def render(self):
        return "\n".join(self.parts + ["</svg>", ""])


def _axes(cv, xr, yr, spec):
    x0, x1 = xr
    y0, y1 = yr
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    cv.line(LEFT, TOP + ph, LEFT + pw, TOP + ph)
    cv.line(LEFT, TOP, LEFT, TOP + ph)
    for t in _ticks(x0, x1):
        cv.line(sx(t), TOP + ph, sx(t), TOP + ph + 4)
        cv.text(sx(t), TOP + ph + 16, _fmt(t), anchor="middle")
    if spec.log_y:
        yt = list(range(math.ceil(y0 - 1e-9), math.floor(y1 + 1e-9) + 1))
        labels = [f"1e{t}" for t in yt]
    else:
        yt = _ticks(y0, y1)
        labels = [_fmt(t) for t in yt]
    for t, lab in zip(yt, labels):
        cv.line(LEFT - 4, sy(t), LEFT, sy(t))
        cv.text(LEFT - 7, sy(t) + 4, lab, anchor="end")
    cv.text(LEFT + pw / 2, HEIGHT - 12, spec.x_label, anchor="middle")
    cv.text(18, TOP + ph / 2, spec.y_label, anchor="middle", rotate=-90)
    return sx, sy


def _range(vals, pad_zero=False):
    vals = [v for v in vals if math.isfinite(v)]
    if not vals:
        return (0.0, 1.0)
    lo, hi = min(vals), max(vals)
    if pad_zero:
        lo = min(lo, 0.0)
    if hi == lo:
        hi = lo + 1.0
    return lo, hi


def _legend(cv, names):
    for i, name in enumerate(names):
        y = TOP + 12 + 18 * i
        x = WIDTH - RIGHT + 14
        cv.line(x, y, x + 22, y, color=PALETTE[i % len(PALETTE)], width=2)
        cv.text(x + 28, y + 4, name)


def _render_line(header, rows, spec):
    _require(header, [spec.x] + list(spec.series))
    xi = header.index(spec.x)
    xs = [_to_float(r[xi]) for r in rows]
    data = {}
    for s in spec.series:
        col = [_to_float(r[header.index(s)]) for r in rows]
        if spec.log_y:
            col = [math.log10(v) if v > 0 else math.nan for v in col]
        data[s] = col
    xr = _range(xs)
    allv = [v for c in data.values() for v in c]
    yr = _range(allv)
    if spec.log_y:
        yr = (math.floor(yr[0]), math.ceil(yr[1]) if yr[1] > math.floor(yr[0]) else yr[0] + 1)
    cv = _Canvas(spec.title)
    sx, sy = _axes(cv, xr, yr, spec)
    for i, s in enumerate(spec.series):
        seg = []
        dash = "6,4" if s in spec.dashed else ""
        for x, y in zip(xs, data[s]):
            if math.isfinite(x) and math.isfinite(y):
                seg.append((sx(x), sy(y)))
            elif seg:
                cv.poly(seg, PALETTE[i % len(PALETTE)], dash=dash)
                seg = []
        cv.poly(seg, PALETTE[i % len(PALETTE)], dash=dash)
    _legend(cv, spec.series)
    return cv.render()


def _render_region(header, rows, spec):
    ycol = spec.series[0] if spec.series else None
    _require(header, [spec.x, ycol, spec.group_by])
    xi, yi, gi = header.index(spec.x), header.index(ycol), header.index(spec.group_by)
    groups = {}
    for r in rows:
        groups.setdefault(r[gi], []).append((_to_float(r[xi]), _to_float(r[yi])))
    xr = _range([p[0] for g in groups.values() for p in g], pad_zero=True)
    yr = _range([p[1] for g in groups.values() for p in g], pad_zero=True)
    cv = _Canvas(spec.title)
    sx, sy = _axes(cv, xr, yr, spec)
    names = list(groups)
    for i, name in enumerate(names):
        pts = sorted(p for p in groups[name] if all(map(math.isfinite, p)))
        if not pts:
            continue
        outline = [(0.0, 0.0), (0.0, pts[0][1])] + pts + [(pts[-1][0], 0.0)]
        cv.poly([(sx(x), sy(y)) for x, y in outline], PALETTE[i % len(PALETTE)], closed=True)
    _legend(cv, names)
    return cv.render()


def _render_table(header, rows, spec):
    cv = _Canvas(spec.title)
    ncol = max(1, len(header))
    colw = (WIDTH - 40) / ncol
    for j, h in enumerate(header):
        cv.text(20 + j * colw, 60, h, size=11)
    cv.line(20, 66, WIDTH - 20, 66)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            f = _to_float(v)
            cv.text(20 + j * colw, 84 + 18 * i, _fmt(f) if math.isfinite(f) else v)
    return cv.render()


def render_chart(csv_path, spec, svg_path=None):
    """Render `csv_path` per `spec`; write to `svg_path` (default: .svg beside it).

    Returns the SVG path. Raises :class:`ChartError` naming a missing column.
    """
    header, rows = read_csv(csv_path)
    if spec.kind == "line":
        svg = _render_line(header, rows, spec)
    elif spec.kind == "region":
        svg = _render_region(header, rows, spec)
    elif spec.kind == "table":
        svg = _render_table(header, rows, spec)
    else:
        raise ChartError(f"unknown chart kind {spec.kind!r}")
    if svg_path is None:
        svg_path = str(csv_path).rsplit(".", 1)[0] + ".svg"
    with open(svg_path, "w", newline="\n") as fh:
        fh.write(svg)
    return svg_path

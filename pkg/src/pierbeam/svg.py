"""Static SVG charts for grid CSVs, byte-stable for identical input.

Two shapes are understood: a stability grid (columns delta_lam2, ratio,
trace, stable) becomes a heatmap of the unstable cells, and threshold
sweeps become line charts.  No external renderer is involved; the files
are written tag by tag with fixed formatting so that re-rendering the
same CSV reproduces the same bytes.
"""

import io

from .errors import FormatError

_W, _H = 560.0, 420.0
_ML, _MR, _MT, _MB = 64.0, 18.0, 22.0, 46.0

_BG = "#ffffff"
_FG = "#333333"
_UNSTABLE = "#8c2d2d"
_SERIES = ("#2d5f8c", "#8c642d", "#3f8c2d", "#6f2d8c", "#8c2d5f",
           "#2d8c86", "#5f5f5f")


def _fmt(v):
    out = f"{v:.2f}".rstrip("0").rstrip(".")
    return out if out not in ("-0", "") else "0"


def _tick(v):
    out = f"{v:.4g}"
    return "0" if out == "-0" else out


class _Canvas:
    def __init__(self):
        self.buf = io.StringIO()
        w = _ML + _W + _MR
        h = _MT + _H + _MB
        self.buf.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" viewBox="0 0 {_fmt(w)} {_fmt(h)}">\n')
        self.rect(0.0, 0.0, w, h, _BG)

    def rect(self, x, y, w, h, fill):
        self.buf.write(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" w'
                       f'idth="{_fmt(w)}" height="{_fmt(h)}" '
                       f'fill="{fill}"/>\n')

    def line(self, x1, y1, x2, y2, color=_FG, width=1.0):
        self.buf.write(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" '
                       f'x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                       f'stroke="{color}" stroke-width="{_fmt(width)}"/>\n')

    def poly(self, pts, color):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self.buf.write(f'<polyline points="{coords}" fill="none" '
                       f'stroke="{color}" stroke-width="1.5"/>\n')

    def text(self, x, y, s, anchor="middle", size=11.0):
        self.buf.write(f'<text x="{_fmt(x)}" y="{_fmt(y)}" '
                       f'font-family="monospace" font-size="{_fmt(size)}" '
                       f'fill="{_FG}" text-anchor="{anchor}">{s}</text>\n')

    def done(self):
        self.buf.write("</svg>\n")
        return self.buf.getvalue()


class _Scale:
    def __init__(self, lo, hi, pix0, pix1):
        self.lo, self.hi = lo, hi
        self.pix0, self.pix1 = pix0, pix1
        self.span = (hi - lo) if hi > lo else 1.0

    def __call__(self, v):
        return self.pix0 + (v - self.lo) / self.span * (self.pix1 - self.pix0)


def _axes(cv, xs_scale, ys_scale, xlabel, ylabel):
    x0, x1 = _ML, _ML + _W
    y0, y1 = _MT + _H, _MT
    cv.line(x0, y0, x1, y0)
    cv.line(x0, y0, x0, y1)
    for i in range(5):
        fx = xs_scale.lo + i * xs_scale.span / 4.0
        px = xs_scale(fx)
        cv.line(px, y0, px, y0 + 4.0)
        cv.text(px, y0 + 17.0, _tick(fx))
        fy = ys_scale.lo + i * ys_scale.span / 4.0
        py = ys_scale(fy)
        cv.line(x0 - 4.0, py, x0, py)
        cv.text(x0 - 7.0, py + 3.5, _tick(fy), anchor="end")
    cv.text(x0 + _W / 2.0, y0 + 34.0, xlabel)
    cv.text(14.0, _MT - 8.0, ylabel, anchor="start")


def heatmap(cells, xlabel, ylabel):
    """Cells are (x, y, on); the lattice is inferred from the coordinates."""
    xs = sorted({c[0] for c in cells})
    ys = sorted({c[1] for c in cells})
    if not xs or not ys:
        raise FormatError("empty chart grid")
    dx = min((b - a for a, b in zip(xs, xs[1:])), default=1.0)
    dy = min((b - a for a, b in zip(ys, ys[1:])), default=1.0)
    sx = _Scale(xs[0] - dx / 2.0, xs[-1] + dx / 2.0, _ML, _ML + _W)
    sy = _Scale(ys[0] - dy / 2.0, ys[-1] + dy / 2.0, _MT + _H, _MT)
    cv = _Canvas()
    wpix = abs(sx(dx) - sx(0.0))
    hpix = abs(sy(dy) - sy(0.0))
    for x, y, on in cells:
        if on:
            cv.rect(sx(x) - wpix / 2.0, sy(y) - hpix / 2.0, wpix, hpix,
                    _UNSTABLE)
    _axes(cv, sx, sy, xlabel, ylabel)
    return cv.done()


def line_chart(series, xlabel, ylabel):
    """Series is a list of (name, [(x, y), ...]) drawn in listed order."""
    pts = [p for _, seq in series for p in seq]
    if not pts:
        raise FormatError("no rows to chart")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad = 0.05 * ((max(ys) - min(ys)) or 1.0)
    sx = _Scale(min(xs), max(xs), _ML, _ML + _W)
    sy = _Scale(min(ys) - pad, max(ys) + pad, _MT + _H, _MT)
    cv = _Canvas()
    for i, (name, seq) in enumerate(series):
        color = _SERIES[i % len(_SERIES)]
        cv.poly([(sx(x), sy(y)) for x, y in sorted(seq)], color)
        cv.text(_ML + _W - 4.0, _MT + 14.0 + 13.0 * i, name, anchor="end")
    _axes(cv, sx, sy, xlabel, ylabel)
    return cv.done()


def _parse_csv(text):
    header = None
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if header is None:
            header = parts
            continue
        if len(parts) != len(header):
            raise FormatError(f"row width {len(parts)} != header width "
                              f"{len(header)}")
        rows.append(parts)
    if header is None:
        raise FormatError("no header row found")
    return header, rows


def _floats(row, cols, header):
    try:
        return [float(row[header.index(c)]) for c in cols]
    except ValueError as exc:
        raise FormatError(f"non-numeric cell: {exc}") from None


def render_chart(text):
    """CSV text in, SVG text out; the header row picks the chart shape."""
    header, rows = _parse_csv(text)
    if {"delta_lam2", "ratio", "stable"} <= set(header):
        cells = []
        for row in rows:
            x, y, on = _floats(row, ("delta_lam2", "ratio", "stable"), header)
            cells.append((x, y, on == 0.0))
        return heatmap(cells, "delta_lam2", "ratio")
    if {"a", "j", "E_j"} <= set(header):
        best = {}
        for row in rows:
            cell = row[header.index("E_j")]
            if not cell:
                continue
            av, ev = _floats(row, ("a", "E_j"), header)
            if av not in best or ev < best[av]:
                best[av] = ev
        if not best:
            raise FormatError("no detected rows to chart")
        return line_chart([("min E_j", sorted(best.items()))], "a", "E_j")
    if {"a", "sigma", "delta_lin"} <= set(header):
        groups = {}
        for row in rows:
            av, sv, dv = _floats(row, ("a", "sigma", "delta_lin"), header)
            groups.setdefault(av, []).append((sv, dv))
        series = [(f"a={_tick(av)}", seq) for av, seq in
                  sorted(groups.items())]
        return line_chart(series, "sigma", "delta_lin")
    raise FormatError("unrecognized chart columns: " + ",".join(header))

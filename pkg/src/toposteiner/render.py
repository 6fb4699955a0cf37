"""SVG drawings in the usual style: dotted unit grid, terminals as filled
squares, Steiner points as hollow circles, edges drawn as L-shaped
rectilinear polylines (horizontal leg first)."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr, escape

from .model import Embedding, Instance

SCALE = 40  # pixels per real unit
MARGIN = 30


def render_svg(inst: Instance, emb: Embedding | None = None) -> bytes:
    points = [t.position for t in inst.terminals.values()]
    if emb is not None:
        points += list(emb.positions.values())
    xmin = min(p.x2 for p in points) // 2 - 1
    xmax = -(-max(p.x2 for p in points) // 2) + 1
    ymin = min(p.y2 for p in points) // 2 - 1
    ymax = -(-max(p.y2 for p in points) // 2) + 1
    width = (xmax - xmin) * SCALE + 2 * MARGIN
    height = (ymax - ymin) * SCALE + 2 * MARGIN

    def sx(x2: int) -> str:
        return f"{MARGIN + (x2 / 2 - xmin) * SCALE:g}"

    def sy(y2: int) -> str:
        return f"{MARGIN + (ymax - y2 / 2) * SCALE:g}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(inst.name or 'instance')}</title>",
        '<g class="grid" stroke="#999" stroke-width="0.5" stroke-dasharray="1,3">',
    ]
    for x in range(xmin, xmax + 1):
        out.append(f'<line x1="{sx(2 * x)}" y1="{sy(2 * ymin)}" x2="{sx(2 * x)}" y2="{sy(2 * ymax)}"/>')
    for y in range(ymin, ymax + 1):
        out.append(f'<line x1="{sx(2 * xmin)}" y1="{sy(2 * y)}" x2="{sx(2 * xmax)}" y2="{sy(2 * y)}"/>')
    out.append("</g>")

    if emb is not None:
        out.append('<g class="edges" fill="none" stroke="black" stroke-width="2">')
        for a, b in inst.edges:
            p, q = emb[a], emb[b]
            pts = f"{sx(p.x2)},{sy(p.y2)} {sx(q.x2)},{sy(p.y2)} {sx(q.x2)},{sy(q.y2)}"
            out.append(f"<polyline data-edge={quoteattr(a + ' ' + b)} points=\"{pts}\"/>")
        out.append("</g>")
        out.append('<g class="steiner" fill="white" stroke="black" stroke-width="1.5">')
        for v in inst.steiner_points:
            p = emb[v]
            out.append(f'<circle data-id={quoteattr(v)} cx="{sx(p.x2)}" cy="{sy(p.y2)}" r="4"/>')
        out.append("</g>")

    out.append('<g class="terminals" fill="black">')
    for t, term in inst.terminals.items():
        p = term.position
        out.append(
            f'<rect data-id={quoteattr(t)} x="{float(sx(p.x2)) - 5:g}" y="{float(sy(p.y2)) - 5:g}" width="10" height="10"/>'
        )
    out.append("</g>")
    out.append('<g class="labels" font-family="sans-serif" font-size="11">')
    for t, term in inst.terminals.items():
        p = term.position
        out.append(f'<text x="{float(sx(p.x2)) + 7:g}" y="{float(sy(p.y2)) - 7:g}">{escape(t)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")

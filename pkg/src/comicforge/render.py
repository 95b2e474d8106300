"""Self-contained HTML export.

Each story piece becomes one tier; panel boxes are absolutely positioned from
the tier-fraction cells. Charts are embedded as JSON specs for a client-side
renderer rather than rasterized here.
"""

from __future__ import annotations

import html
import json
import re

from .chart_model import ChartEnsemble, serialize_ensemble
from .document import ComicDocument

PALETTES = {
    "light": {
        "bg": "#ffffff",
        "fg": "#1c1c1c",
        "panel": "#f7f6f2",
        "border": "#c9c4b8",
        "accent": "#9a4a1f",
    },
    "dark": {
        "bg": "#14161a",
        "fg": "#e8e6e0",
        "panel": "#1e2126",
        "border": "#3a3f47",
        "accent": "#e0a458",
    },
}


def _pct(frac) -> str:
    return f"{float(frac) * 100:.4f}".rstrip("0").rstrip(".") + "%"


def _caption_html(caption) -> str:
    text = html.escape(caption.text)
    for term, url in caption.term_links:
        pattern = re.compile(re.escape(html.escape(term)), re.IGNORECASE)
        text = pattern.sub(
            lambda m: f'<a href="{html.escape(url, quote=True)}" target="_blank">{m.group(0)}</a>',
            text,
            count=1,
        )
    pin = '<span class="pin" title="caption edited by hand">&#9998;</span> ' if caption.pinned else ""
    pinned_attr = ' data-pinned="true"' if caption.pinned else ""
    return f'<p class="caption"{pinned_attr}>{pin}{text}</p>'


def export_html(doc: ComicDocument, ensemble: ChartEnsemble) -> str:
    """Render one self-contained HTML page for the document."""
    palette = PALETTES[doc.style.theme]
    ar_w, ar_h = doc.style.aspect_ratio
    charts_by_id = {c.id: c for c in ensemble.charts}
    ensemble_doc = serialize_ensemble(ensemble)

    tiers = []
    for piece in doc.pieces:
        panels = []
        for cell in piece.layout.cells:
            chart = charts_by_id.get(cell.chart_id)
            spec = next(
                (c for c in ensemble_doc["charts"] if c["id"] == cell.chart_id), None
            )
            title = html.escape((chart.title if chart and chart.title else cell.chart_id))
            mark = html.escape(chart.mark.value) if chart else "?"
            caption = piece.captions.get(cell.chart_id)
            caption_html = _caption_html(caption) if caption else ""
            spec_json = html.escape(
                json.dumps(spec, sort_keys=True, separators=(",", ":")), quote=False
            )
            style = (
                f"left:{_pct(cell.x)};top:{_pct(cell.y)};"
                f"width:{_pct(cell.w)};height:{_pct(cell.h)};"
            )
            panels.append(
                f'<div class="panel" data-chart="{html.escape(cell.chart_id, quote=True)}" style="{style}">'
                f'<div class="chart-box"><span class="mark-badge">{mark}</span>'
                f'<span class="chart-title">{title}</span>'
                f'<script type="application/json" class="chart-spec">{spec_json}</script></div>'
                f"{caption_html}</div>"
            )
        tiers.append(
            f'<section class="tier" data-piece="{piece.index}" '
            f'data-pattern="{piece.layout.pattern.value}">{"".join(panels)}</section>'
        )

    dataset_json = html.escape(
        json.dumps(ensemble_doc["dataset"]["inline"], sort_keys=True, separators=(",", ":")),
        quote=False,
    )
    css = f"""
body {{ margin: 0; background: {palette['bg']}; color: {palette['fg']};
  font-family: {doc.style.font_family}; font-size: {doc.style.font_size}pt; }}
.comic {{ max-width: 960px; margin: 0 auto; padding: 16px; }}
.tier {{ position: relative; width: 100%; aspect-ratio: {ar_w} / {ar_h}; margin-bottom: 14px; }}
.panel {{ position: absolute; box-sizing: border-box; padding: 6px;
  border: 2px solid {palette['border']}; background: {palette['panel']};
  display: flex; flex-direction: column; overflow: hidden; }}
.chart-box {{ flex: 1; position: relative; min-height: 0; }}
.mark-badge {{ font-size: 0.7em; text-transform: uppercase; letter-spacing: 0.08em;
  color: {palette['accent']}; }}
.chart-title {{ display: block; font-weight: bold; }}
.caption {{ margin: 4px 0 0 0; font-size: 0.82em; line-height: 1.35; }}
.caption a {{ color: {palette['accent']}; }}
.pin {{ color: {palette['accent']}; }}
"""
    return (
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<title>Data comic</title>\n<style>{css}</style>\n</head>\n<body>\n"
        f'<script type="application/json" id="dataset">{dataset_json}</script>\n'
        f'<main class="comic" data-revision="{doc.revision}">\n'
        + "\n".join(tiers)
        + "\n</main>\n</body>\n</html>\n"
    )

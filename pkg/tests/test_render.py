from comicforge import apply_edit, compose, export_html
from comicforge.compose import EditCaptionText, SetStyle
from comicforge.document import StyleConfig
from comicforge.render import PALETTES


def test_single_piece_full_width_panel(marketing_ensemble):
    doc = compose(marketing_ensemble, included_chart_ids=["c1"])
    html = export_html(doc, marketing_ensemble)
    assert html.count('class="panel"') == 1
    assert "left:0%" in html and "width:100%" in html


def test_every_chart_panel_and_spec_embedded(marketing_ensemble):
    doc = compose(marketing_ensemble)
    html = export_html(doc, marketing_ensemble)
    assert html.count('class="panel"') == 9
    assert html.count('class="chart-spec"') == 9
    assert 'id="dataset"' in html
    for piece in doc.pieces:
        assert f'data-pattern="{piece.layout.pattern.value}"' in html


def test_dark_theme_palette_applied(marketing_ensemble):
    doc = compose(marketing_ensemble, style=StyleConfig(theme="dark"))
    html = export_html(doc, marketing_ensemble)
    assert PALETTES["dark"]["bg"] in html
    assert PALETTES["light"]["bg"] not in html


def test_pinned_caption_rendered_verbatim(marketing_ensemble):
    doc = compose(marketing_ensemble)
    doc2, _ = apply_edit(
        doc, EditCaptionText("c1", "Small sizes sell best."), marketing_ensemble
    )
    html = export_html(doc2, marketing_ensemble)
    assert "Small sizes sell best." in html
    assert 'data-pinned="true"' in html


def test_caption_escaped_and_linked(marketing_ensemble):
    doc = compose(marketing_ensemble)
    doc2, _ = apply_edit(
        doc, EditCaptionText("c1", "Sizes <M> & friends"), marketing_ensemble
    )
    html = export_html(doc2, marketing_ensemble)
    assert "Sizes &lt;M&gt; &amp; friends" in html


def test_aspect_ratio_css(marketing_ensemble):
    doc = compose(marketing_ensemble, style=StyleConfig(aspect_ratio=(4, 3)))
    html = export_html(doc, marketing_ensemble)
    assert "aspect-ratio: 4 / 3" in html

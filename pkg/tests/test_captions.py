import random
from pathlib import Path

from comicforge.captions import (
    CachedHttpTermProvider,
    Caption,
    StaticTermProvider,
    StitchPattern,
    humanize,
    lower_entity,
    plan_stitches,
    realize,
    term_candidates,
    term_context,
)
from comicforge.facts import DataFact, FactForm, fmt_number

from conftest import TABLE1_DISPLAY, table1_facts

GOLDEN_DIR = Path(__file__).parent / "goldens"


def _golden(name):
    return (GOLDEN_DIR / name).read_text(encoding="utf-8")


def test_table1_pattern_selection():
    coref, subord, conj = table1_facts()
    assert plan_stitches(coref).pairs == [(0, 1, StitchPattern.COREFERENCE)]
    assert plan_stitches(subord).pairs == [(0, 1, StitchPattern.SUBORDINATION)]
    assert plan_stitches(conj).pairs == [(0, 1, StitchPattern.CONJUNCTION)]


def test_table1_coreference_golden():
    facts = table1_facts()[0]
    caption = realize(plan_stitches(facts), facts, TABLE1_DISPLAY)
    assert caption.text == _golden("stitch_coreference.txt")


def test_table1_subordination_golden():
    facts = table1_facts()[1]
    caption = realize(plan_stitches(facts), facts, TABLE1_DISPLAY)
    assert caption.text == _golden("stitch_subordination.txt")


def test_table1_conjunction_golden():
    facts = table1_facts()[2]
    caption = realize(plan_stitches(facts), facts, TABLE1_DISPLAY)
    assert caption.text == _golden("stitch_conjunction.txt")


def _fact(form, subject, payload, attrs=("v",), level=1, chart="c"):
    return DataFact(form, level, frozenset(attrs), subject, payload, chart)


def test_single_fact_verbatim_sentence():
    fact = _fact(
        FactForm.MAXIMUM,
        "2015",
        {"value_attr": "attack_count", "value": 938, "subject_attr": "iyear"},
    )
    caption = realize(plan_stitches([fact]), [fact], {"iyear": "year"})
    assert caption.text == "The year of 2015 has the highest attack count of 938."
    assert caption.segments == [(fact.fact_id, 0, len(caption.text))]


def test_four_unrelated_facts_stay_plain_in_order():
    facts = [
        _fact(FactForm.MEAN, "a", {"value_attr": "a", "value": 1.5}, attrs=("a",)),
        _fact(FactForm.SHARE, "red", {"attr": "color", "percent": 40.0}, attrs=("color",)),
        _fact(
            FactForm.TREND,
            "b",
            {"value_attr": "b", "over_attr": "t", "direction": "decreasing"},
            attrs=("b", "t"),
            level=2,
        ),
        _fact(
            FactForm.CORRELATION,
            "x and y",
            {"x_attr": "x", "y_attr": "y", "r": 0.8},
            attrs=("x", "y"),
            level=2,
        ),
    ]
    plan = plan_stitches(facts)
    assert plan.pairs == []
    caption = realize(plan, facts)
    sentences = caption.text.split(". ")
    assert len(sentences) == 4
    assert sentences[0].startswith("The average a")
    assert "accounts for 40% of all records" in caption.text
    assert "shows a decreasing trend over t" in caption.text
    assert "have a correlation of 0.8" in caption.text


def test_realize_total_and_idempotent():
    rng = random.Random(53)
    forms = list(FactForm)
    for _ in range(50):
        n = rng.randint(1, 4)
        facts = []
        for k in range(n):
            form = rng.choice(forms)
            payload = {
                "value_attr": "v",
                "value": rng.randint(0, 100),
                "subject_attr": "k",
                "low": 0,
                "high": 10,
                "span": 10.0,
                "attr": "k",
                "percent": 12.5,
                "group_attr": "k",
                "top": "alpha",
                "bottom": "beta",
                "ratio": 2.5,
                "over_attr": "t",
                "direction": rng.choice(["increasing", "decreasing"]),
                "x_attr": "v",
                "y_attr": "w",
                "r": 0.5,
            }
            facts.append(_fact(form, f"s{k}", payload, level=rng.randint(1, 3), chart=f"c{k}"))
        plan = plan_stitches(facts)
        first = realize(plan, facts)
        second = realize(plan, facts)
        assert first.text
        assert first.text == second.text
        assert len(first.segments) == len(facts)
        spans = sorted((s, e) for _, s, e in first.segments)
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2


def test_numeric_payload_values_appear_verbatim():
    coref, subord, conj = table1_facts()
    for facts in (coref, subord, conj):
        caption = realize(plan_stitches(facts), facts, TABLE1_DISPLAY)
        for fact in facts:
            for key, value in fact.value_payload.items():
                if key in ("value", "ratio", "percent", "low", "high", "span", "r"):
                    assert fmt_number(value) in caption.text


def test_humanize_and_lowercase():
    assert humanize("Miles_per_Gallon") == "miles per gallon"
    assert humanize("attack_count") == "attack count"
    assert humanize("weaptype1", {"weaptype1": "weapon type"}) == "weapon type"
    assert lower_entity("Private Citizens & Property") == "private citizens & property"
    assert lower_entity("US") == "US"
    assert lower_entity("2004") == "2004"


def test_term_candidates_length_filter():
    terms = term_candidates(["US", "Explosives", "Explosives"], ["iyear", "attack_count"])
    assert "US" not in terms
    assert terms == ["Explosives", "iyear", "attack_count"]


def test_term_context_links_and_unresolved():
    caption = Caption(text="The weapon type of explosives has the highest attack count.")
    provider = StaticTermProvider({"explosives": "https://wiki.example/Explosives"})
    out = term_context(caption, provider, ["Explosives", "Miles_per_Gallon"])
    assert out.term_links == [("Explosives", "https://wiki.example/Explosives")]
    assert caption.term_links == []  # original untouched


def test_term_context_cache_hit_avoids_network(tmp_path):
    calls = []

    def fetch(url, timeout):
        calls.append(url)
        return 200, b'{"content_urls": {"desktop": {"page": "https://wiki.example/T"}}}'

    provider = CachedHttpTermProvider(cache_path=tmp_path / "term_cache.json", fetch=fetch)
    assert provider.resolve("Tourists") == "https://wiki.example/T"
    assert provider.resolve("Tourists") == "https://wiki.example/T"
    assert len(calls) == 1

    again = CachedHttpTermProvider(cache_path=tmp_path / "term_cache.json", fetch=fetch)
    assert again.resolve("tourists") == "https://wiki.example/T"
    assert len(calls) == 1  # disk cache survives new instances


def test_term_context_provider_unavailable_degrades():
    from comicforge.errors import ProviderUnavailable

    class DeadProvider:
        def resolve(self, term):
            raise ProviderUnavailable("timeout")

    caption = Caption(text="The explosives story.")
    out = term_context(caption, DeadProvider(), ["explosives"])
    assert out.text == caption.text
    assert out.term_links == []


def test_http_provider_404_caches_none(tmp_path):
    def fetch(url, timeout):
        return 404, b""

    provider = CachedHttpTermProvider(cache_path=tmp_path / "cache.json", fetch=fetch)
    assert provider.resolve("Nonesuch") is None
    assert provider.resolve("Nonesuch") is None
    assert provider.network_calls == 1

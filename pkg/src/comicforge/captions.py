"""Realize a chart's selected facts as one flowing caption.

Facts are greedily paired by pattern (coreference when subjects repeat,
subordination when one fact's subject appears inside another's payload,
conjunction for opposing extremes or trends) and rendered through fixed
templates; leftovers become plain sentences. Term lookups go through an
injected provider with an on-disk cache.
"""

from __future__ import annotations

import json
import logging
import re
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .facts import DataFact, FactForm, fmt_number
from .errors import ProviderUnavailable

logger = logging.getLogger("comicforge.captions")


class StitchPattern(str, Enum):
    COREFERENCE = "coreference"
    SUBORDINATION = "subordination"
    CONJUNCTION = "conjunction"
    PLAIN = "plain"


@dataclass
class StitchPlan:
    pairs: list[tuple[int, int, StitchPattern]]

    def paired_indices(self) -> set[int]:
        out: set[int] = set()
        for i, j, _ in self.pairs:
            out.add(i)
            out.add(j)
        return out


@dataclass
class Caption:
    text: str
    segments: list[tuple[str, int, int]] = field(default_factory=list)
    term_links: list[tuple[str, str]] = field(default_factory=list)
    pinned: bool = False


_EXTREMUM_WORD = {
    FactForm.MINIMUM: "lowest",
    FactForm.MAXIMUM: "highest",
    FactForm.SECOND_MAXIMUM: "second highest",
}
_ACRONYM = re.compile(r"^[^a-z]*[A-Z]{2,}[^a-z]*$")


def humanize(attr: str, display_names: dict[str, str] | None = None) -> str:
    """Attribute name for prose: display-name lookup, else underscores to
    spaces and lowercase (all-caps acronyms keep their case)."""
    if display_names and attr in display_names:
        return display_names[attr]
    words = attr.replace("_", " ").split(" ")
    return " ".join(w if _ACRONYM.match(w) else w.lower() for w in words if w)


def lower_entity(text: str) -> str:
    """Lowercase a data value for prose, keeping all-caps acronyms."""
    return " ".join(w if _ACRONYM.match(w) else w.lower() for w in text.split(" "))


def _entities(fact: DataFact) -> list[str]:
    return [
        fact.value_payload[k]
        for k in ("top", "bottom")
        if isinstance(fact.value_payload.get(k), str)
    ]


def _same_value_attr(a: DataFact, b: DataFact) -> bool:
    va = a.value_payload.get("value_attr")
    return va is not None and va == b.value_payload.get("value_attr")


def classify_pair(a: DataFact, b: DataFact) -> StitchPattern:
    if a.subject and a.subject == b.subject:
        return StitchPattern.COREFERENCE
    if b.subject in _entities(a) or a.subject in _entities(b):
        return StitchPattern.SUBORDINATION
    forms = {a.form, b.form}
    if forms == {FactForm.MINIMUM, FactForm.MAXIMUM} and _same_value_attr(a, b):
        return StitchPattern.CONJUNCTION
    if (
        forms == {FactForm.TREND}
        and _same_value_attr(a, b)
        and {a.value_payload.get("direction"), b.value_payload.get("direction")}
        == {"increasing", "decreasing"}
    ):
        return StitchPattern.CONJUNCTION
    return StitchPattern.PLAIN


def plan_stitches(facts: Sequence[DataFact]) -> StitchPlan:
    """Greedy disjoint pairing in rank order; each fact joins at most one pair."""
    pairs: list[tuple[int, int, StitchPattern]] = []
    used: set[int] = set()
    for i in range(len(facts)):
        if i in used:
            continue
        for j in range(i + 1, len(facts)):
            if j in used:
                continue
            pattern = classify_pair(facts[i], facts[j])
            if pattern is not StitchPattern.PLAIN:
                pairs.append((i, j, pattern))
                used.update((i, j))
                break
    return StitchPlan(pairs=pairs)


def _subject_predicate(fact: DataFact, names: dict[str, str] | None) -> tuple[str, str]:
    """(subject phrase, predicate); a plain sentence is their join plus a period."""
    p = fact.value_payload
    form = fact.form
    if form in _EXTREMUM_WORD:
        word = _EXTREMUM_WORD[form]
        attr = humanize(p["value_attr"], names)
        pred = f"has the {word} {attr} of {fmt_number(p['value'])}"
        if p.get("qualifier_attr") is not None:
            qattr = humanize(p["qualifier_attr"], names)
            qval = lower_entity(fmt_number(p["qualifier_value"]))
            pred += f" for the {qattr} of {qval}"
        if p.get("subject_attr"):
            subj = f"The {humanize(p['subject_attr'], names)} of {lower_entity(fact.subject)}"
        else:
            return f"The {word} {attr}", f"is {fmt_number(p['value'])}"
        return subj, pred
    if form is FactForm.MEAN:
        return f"The average {humanize(p['value_attr'], names)}", f"is {fmt_number(p['value'])}"
    if form is FactForm.RANGE:
        return (
            f"The {humanize(p['value_attr'], names)}",
            f"ranges from {fmt_number(p['low'])} to {fmt_number(p['high'])}, "
            f"a spread of {fmt_number(p['span'])}",
        )
    if form is FactForm.SHARE:
        return (
            f"The {humanize(p['attr'], names)} of {lower_entity(fact.subject)}",
            f"accounts for {fmt_number(p['percent'])}% of all records",
        )
    if form is FactForm.RATIO_COMPARISON:
        return (
            f"The {humanize(p['value_attr'], names)} for {lower_entity(p['top'])}",
            f"is {fmt_number(p['ratio'])} times that for {lower_entity(p['bottom'])}",
        )
    if form is FactForm.TREND:
        direction = p["direction"]
        article = "an" if direction[0] in "aeiou" else "a"
        return (
            f"The {humanize(p['value_attr'], names)}",
            f"shows {article} {direction} trend over {humanize(p['over_attr'], names)}",
        )
    if form is FactForm.CORRELATION:
        return (
            f"{humanize(p['x_attr'], names)} and {humanize(p['y_attr'], names)}",
            f"have a correlation of {fmt_number(p['r'])}",
        )
    # outlier
    attr = humanize(p["value_attr"], names)
    if p.get("subject_attr"):
        subj = f"The {humanize(p['subject_attr'], names)} of {lower_entity(fact.subject)}"
        return subj, f"is an outlier with {attr} of {fmt_number(p['value'])}"
    return f"A value of {fmt_number(p['value'])}", f"is an outlier on {attr}"


def _relative_clause(fact: DataFact, names: dict[str, str] | None) -> str:
    if fact.form in _EXTREMUM_WORD:
        return f"is {fmt_number(fact.value_payload['value'])} as the {_EXTREMUM_WORD[fact.form]}"
    return _subject_predicate(fact, names)[1]


def _reduced_clause(fact: DataFact, names: dict[str, str] | None) -> str:
    """Second clause of a conjunction, with the shared attribute elided."""
    p = fact.value_payload
    if fact.form in _EXTREMUM_WORD:
        return (
            f"{lower_entity(fact.subject)} has the {_EXTREMUM_WORD[fact.form]} "
            f"of that as {fmt_number(p['value'])}"
        )
    if fact.form is FactForm.TREND:
        article = "an" if p["direction"][0] in "aeiou" else "a"
        return f"{humanize(p['value_attr'], names)} shows {article} {p['direction']} trend"
    subj, pred = _subject_predicate(fact, names)
    return f"{lower_entity(subj)} {pred}"


def realize(
    plan: StitchPlan,
    facts: Sequence[DataFact],
    display_names: dict[str, str] | None = None,
) -> Caption:
    """Render the plan as one paragraph; every fact owns one character span."""
    pair_for = {}
    for i, j, pattern in plan.pairs:
        pair_for[i] = (j, pattern)
    skip = {j for _, j, _ in plan.pairs}

    parts: list[str] = []
    segments: list[tuple[str, int, int]] = []
    offset = 0

    def emit(text: str, spans: list[tuple[str, int, int]]):
        nonlocal offset
        if parts:
            parts.append(" ")
            offset += 1
        sentence = text[0].upper() + text[1:] if text else text
        parts.append(sentence)
        segments.extend((fid, offset + s, offset + e) for fid, s, e in spans)
        offset += len(sentence)

    for i, fact in enumerate(facts):
        if i in skip:
            continue
        if i in pair_for:
            j, pattern = pair_for[i]
            other = facts[j]
            if pattern is StitchPattern.COREFERENCE:
                subj, pred1 = _subject_predicate(fact, display_names)
                pred2 = _subject_predicate(other, display_names)[1]
                first = f"{subj} {pred1}"
                text = f"{first} and also {pred2}."
                spans = [
                    (fact.fact_id, 0, len(first)),
                    (other.fact_id, len(first) + 10, len(first) + 10 + len(pred2)),
                ]
            elif pattern is StitchPattern.SUBORDINATION:
                base, embedded = fact, other
                if base.subject in _entities(other) and embedded.subject not in _entities(fact):
                    base, embedded = other, fact
                subj, pred = _subject_predicate(base, display_names)
                rel = _relative_clause(embedded, display_names)
                text = f"{subj}, which {rel}, {pred}."
                rel_start = len(subj) + 8
                spans = [
                    (base.fact_id, 0, len(subj)),
                    (embedded.fact_id, rel_start, rel_start + len(rel)),
                ]
            else:  # conjunction: lead with the maximum of an extremum pair
                first_fact, second_fact = fact, other
                if {fact.form, other.form} == {FactForm.MINIMUM, FactForm.MAXIMUM}:
                    if fact.form is FactForm.MINIMUM:
                        first_fact, second_fact = other, fact
                subj, pred = _subject_predicate(first_fact, display_names)
                lead = f"{subj} {pred}"
                reduced = _reduced_clause(second_fact, display_names)
                text = f"{lead}, in contrast, {reduced}."
                red_start = len(lead) + 15
                spans = [
                    (first_fact.fact_id, 0, len(lead)),
                    (second_fact.fact_id, red_start, red_start + len(reduced)),
                ]
            emit(text, spans)
        else:
            subj, pred = _subject_predicate(fact, display_names)
            text = f"{subj} {pred}."
            emit(text, [(fact.fact_id, 0, len(text))])

    segments.sort(key=lambda seg: seg[1])
    return Caption(text="".join(parts), segments=segments)


class TermProvider(Protocol):
    def resolve(self, term: str) -> str | None: ...


class StaticTermProvider:
    """In-memory provider; handy for tests and offline demos."""

    def __init__(self, links: dict[str, str]):
        self._links = {k.strip().lower(): v for k, v in links.items()}
        self.calls = 0

    def resolve(self, term: str) -> str | None:
        self.calls += 1
        return self._links.get(term.strip().lower())


def _default_fetch(url: str, timeout: float) -> tuple[int, bytes]:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, b""
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        raise ProviderUnavailable(f"term lookup failed: {exc}") from exc


class CachedHttpTermProvider:
    """Resolve terms against an encyclopedia summary endpoint, at most one
    request per term; results persist in a JSON cache file."""

    def __init__(
        self,
        url_template: str = "https://en.wikipedia.org/api/rest_v1/page/summary/{term}",
        cache_path: str | Path | None = None,
        timeout: float = 3.0,
        fetch=None,
    ):
        self.url_template = url_template
        self.cache_path = Path(cache_path) if cache_path else None
        self.timeout = timeout
        self._fetch = fetch or _default_fetch
        self.network_calls = 0
        self._cache: dict[str, str | None] = {}
        if self.cache_path and self.cache_path.exists():
            try:
                self._cache = json.loads(self.cache_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                self._cache = {}

    def _persist(self):
        if self.cache_path:
            self.cache_path.parent.mkdir(parents=True, exist_ok=True)
            self.cache_path.write_text(
                json.dumps(self._cache, sort_keys=True, indent=1), encoding="utf-8"
            )

    def resolve(self, term: str) -> str | None:
        key = term.strip().lower()
        if key in self._cache:
            return self._cache[key]
        url = self.url_template.format(term=urllib.parse.quote(term.strip().replace(" ", "_")))
        self.network_calls += 1
        status, body = self._fetch(url, self.timeout)
        result: str | None = None
        if status == 200:
            try:
                doc = json.loads(body.decode("utf-8"))
                result = doc.get("content_urls", {}).get("desktop", {}).get("page") or url
            except (json.JSONDecodeError, AttributeError, UnicodeDecodeError):
                result = url
        self._cache[key] = result
        self._persist()
        return result


def term_candidates(nominal_values: Iterable[str], column_names: Iterable[str]) -> list[str]:
    """Linkable terms: nominal values and column names of 4+ characters."""
    seen: list[str] = []
    for term in list(nominal_values) + list(column_names):
        if isinstance(term, str) and len(term) >= 4 and term not in seen:
            seen.append(term)
    return seen


def term_context(caption: Caption, provider: TermProvider | None, terms: Iterable[str]) -> Caption:
    """Attach encyclopedia links for terms appearing in the caption.

    Unresolvable terms stay unlinked; a dead provider downgrades to the
    unlinked caption with a logged warning.
    """
    if provider is None:
        return caption
    lowered = caption.text.lower()
    links: list[tuple[str, str]] = []
    try:
        for term in terms:
            if term.lower() not in lowered:
                continue
            url = provider.resolve(term)
            if url:
                links.append((term, url))
    except ProviderUnavailable as exc:
        logger.warning("term context skipped: %s", exc)
        return caption
    if not links:
        return caption
    return replace(caption, term_links=list(caption.term_links) + links)

"""Extract typed data facts from a chart's data and rank them by how related
they are to the facts of neighboring charts in the story backbone.

Lower weight means more related; ranking is ascending. Duplicates of facts
already shown earlier in a piece are discounted multiplicatively.
"""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .chart_model import Channel, ChartSpec, Dataset, FieldType, TransformKind, attribute_set
from .errors import EmptyAfterFiltering
from .rational import to_fraction

DEFAULT_ALPHA = Fraction(1, 3)
DEFAULT_BETA = Fraction(1, 3)
DEFAULT_GAMMA = Fraction(1, 3)
DEFAULT_DELTA = Fraction(4)
DUP_EPSILON = Fraction(1, 10**6)

_CHANNEL_ORDER = [
    Channel.X,
    Channel.Y,
    Channel.COLOR,
    Channel.SIZE,
    Channel.SHAPE,
    Channel.ROW,
    Channel.COLUMN,
]
_SUBJECT_PRIORITY = [
    Channel.COLOR,
    Channel.SHAPE,
    Channel.ROW,
    Channel.COLUMN,
    Channel.X,
    Channel.Y,
    Channel.SIZE,
]


class FactForm(str, Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    SECOND_MAXIMUM = "second_maximum"
    MEAN = "mean"
    RANGE = "range"
    SHARE = "share"
    RATIO_COMPARISON = "ratio_comparison"
    TREND = "trend"
    CORRELATION = "correlation"
    OUTLIER = "outlier"


_FORM_LEVEL = {
    FactForm.MINIMUM: 1,
    FactForm.MAXIMUM: 1,
    FactForm.SECOND_MAXIMUM: 1,
    FactForm.MEAN: 1,
    FactForm.RANGE: 1,
    FactForm.SHARE: 1,
    FactForm.RATIO_COMPARISON: 2,
    FactForm.TREND: 2,
    FactForm.CORRELATION: 2,
    FactForm.OUTLIER: 3,
}


@dataclass
class DataFact:
    form: FactForm
    level: int
    attributes: frozenset[str]
    subject: str
    value_payload: dict
    source_chart: str

    @property
    def fact_id(self) -> str:
        blob = json.dumps(
            [
                self.form.value,
                self.level,
                sorted(self.attributes),
                self.subject,
                {k: self.value_payload[k] for k in sorted(self.value_payload)},
                self.source_chart,
            ],
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha1(blob.encode("utf-8")).hexdigest()[:12]

    def dup_key(self) -> tuple:
        return (self.form, self.level, self.attributes, self.subject)


@dataclass
class RankedFacts:
    ranked: list[tuple[DataFact, Fraction]]
    selected: list[DataFact] = field(default_factory=list)


def fmt_number(v) -> str:
    """Canonical display form for a data value: `9`, `0.5`, `328.67`."""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


def _round2(v: float) -> float:
    return round(v + 0.0, 2)


def _mk(form: FactForm, attrs: Iterable[str], subject, payload: dict, chart_id: str) -> DataFact:
    return DataFact(
        form=form,
        level=_FORM_LEVEL[form],
        attributes=frozenset(attrs),
        subject=fmt_number(subject) if not isinstance(subject, str) else subject,
        value_payload=payload,
        source_chart=chart_id,
    )


def _aggregate(values: list, op: str):
    if op == "count":
        return len(values)
    if op == "sum":
        return sum(values)
    if op == "mean":
        return statistics.fmean(values)
    if op == "median":
        return statistics.median(values)
    if op == "min":
        return min(values)
    if op == "max":
        return max(values)
    return statistics.fmean(values)


def _table_view(chart: ChartSpec, rows: list[dict]) -> list[dict]:
    """The rows the chart effectively displays: raw rows, or the grouped
    aggregate when the chart carries an aggregate transform. Grouping keys
    are every bound field that is not an aggregated measure."""
    slot_fields = {b.channel.value: b.field for b in chart.channels}
    agg = [t for t in chart.transforms if t.kind is TransformKind.AGGREGATE]
    if not agg:
        return rows

    measures = []
    for tr in agg:
        target = slot_fields.get(tr.target, tr.target)
        measures.append((target, tr.param or "mean"))
    measure_fields = {target for target, _ in measures}
    keys: list[str] = []
    for ch in _CHANNEL_ORDER:
        for b in chart.channels:
            if b.channel is ch and b.field not in measure_fields and b.field not in keys:
                keys.append(b.field)

    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = tuple(row[k] for k in keys)
        groups.setdefault(key, []).append(row)

    out = []
    for key in sorted(groups, key=lambda k: tuple(str(v) for v in k)):
        rec = dict(zip(keys, key))
        for target, op in measures:
            values = [r[target] for r in groups[key]]
            rec[target] = _aggregate(values, op)
        out.append(rec)
    return out


def _field_lists(chart: ChartSpec) -> tuple[list[str], list[str]]:
    quants: list[str] = []
    cats: list[str] = []
    for ch in _CHANNEL_ORDER:
        for b in chart.channels:
            if b.channel is not ch:
                continue
            bucket = quants if b.type is FieldType.QUANTITATIVE else cats
            if b.field not in bucket:
                bucket.append(b.field)
    return quants, cats


def _subject_fields(chart: ChartSpec, value_field: str) -> tuple[str | None, str | None]:
    """Pick the attribute that names extremum subjects, plus a qualifier.

    Categorical channels win (color/row/... before x), then another
    quantitative field; the second categorical becomes the qualifier.
    """
    cats = []
    for ch in _SUBJECT_PRIORITY:
        for b in chart.channels:
            if b.channel is ch and b.type is not FieldType.QUANTITATIVE and b.field != value_field:
                if b.field not in cats:
                    cats.append(b.field)
    if cats:
        return cats[0], (cats[1] if len(cats) > 1 else None)
    for ch in _CHANNEL_ORDER:
        for b in chart.channels:
            if b.channel is ch and b.type is FieldType.QUANTITATIVE and b.field != value_field:
                return b.field, None
    return None, None


def extract_facts(chart: ChartSpec, dataset: Dataset) -> list[DataFact]:
    """Every applicable fact for one chart, in a fixed deterministic order.

    Rows with a null in any attribute the chart uses are excluded first.
    Charts with only categorical bindings yield share facts only.
    """
    used = attribute_set(chart)
    rows = [r for r in dataset.rows if all(r.get(a) is not None for a in used)]
    if not rows:
        raise EmptyAfterFiltering(f"chart {chart.id!r} has no rows after null exclusion")

    table = _table_view(chart, rows)
    quants, cats = _field_lists(chart)
    facts: list[DataFact] = []

    for v in quants:
        subj_attr, qual_attr = _subject_fields(chart, v)
        attrs = {v} | ({subj_attr} if subj_attr else set()) | ({qual_attr} if qual_attr else set())

        def entry(row):
            payload = {"value_attr": v, "value": row[v], "subject_attr": subj_attr}
            subject = row[subj_attr] if subj_attr and subj_attr in row else row[v]
            if qual_attr and qual_attr in row:
                payload["qualifier_attr"] = qual_attr
                payload["qualifier_value"] = row[qual_attr]
            return subject, payload

        ordered = sorted(table, key=lambda r: (r[v], str(r.get(subj_attr, ""))))
        lo_subject, lo_payload = entry(ordered[0])
        facts.append(_mk(FactForm.MINIMUM, attrs, lo_subject, lo_payload, chart.id))
        hi_subject, hi_payload = entry(ordered[-1])
        facts.append(_mk(FactForm.MAXIMUM, attrs, hi_subject, hi_payload, chart.id))
        if len(ordered) >= 2:
            s2_subject, s2_payload = entry(ordered[-2])
            facts.append(_mk(FactForm.SECOND_MAXIMUM, attrs, s2_subject, s2_payload, chart.id))

        values = [r[v] for r in table]
        facts.append(
            _mk(
                FactForm.MEAN,
                {v},
                v,
                {"value_attr": v, "value": _round2(statistics.fmean(values))},
                chart.id,
            )
        )
        lo, hi = min(values), max(values)
        facts.append(
            _mk(
                FactForm.RANGE,
                {v},
                v,
                {"value_attr": v, "low": lo, "high": hi, "span": _round2(float(hi - lo))},
                chart.id,
            )
        )

    for c in cats:
        counts: dict[str, int] = {}
        for r in rows:
            key = fmt_number(r[c]) if not isinstance(r[c], str) else r[c]
            counts[key] = counts.get(key, 0) + 1
        top = max(sorted(counts), key=lambda k: counts[k])
        pct = _round2(100.0 * counts[top] / len(rows))
        facts.append(
            _mk(FactForm.SHARE, {c}, top, {"attr": c, "percent": pct}, chart.id)
        )

    if quants and cats:
        v, c = quants[0], cats[0]
        agg_op = next(
            (t.param or "mean" for t in chart.transforms if t.kind is TransformKind.AGGREGATE),
            "mean",
        )
        by_cat: dict[str, list] = {}
        for r in rows:
            key = fmt_number(r[c]) if not isinstance(r[c], str) else r[c]
            by_cat.setdefault(key, []).append(r[v])
        if len(by_cat) >= 2:
            totals = {k: _aggregate(vals, agg_op) for k, vals in by_cat.items()}
            top = max(sorted(totals), key=lambda k: totals[k])
            bottom = min(sorted(totals), key=lambda k: totals[k])
            if totals[bottom] != 0:
                ratio = _round2(totals[top] / totals[bottom])
                facts.append(
                    _mk(
                        FactForm.RATIO_COMPARISON,
                        {v, c},
                        v,
                        {
                            "value_attr": v,
                            "group_attr": c,
                            "top": top,
                            "bottom": bottom,
                            "ratio": ratio,
                        },
                        chart.id,
                    )
                )

    x_binding = next((b for b in chart.channels if b.channel is Channel.X), None)
    if x_binding is not None:
        y_field = next((q for q in quants if q != x_binding.field), None)
        if y_field is not None:
            if x_binding.type is FieldType.QUANTITATIVE:
                xs = [float(r[x_binding.field]) for r in table]
            else:
                levels = sorted({str(r[x_binding.field]) for r in table})
                rank = {lvl: i for i, lvl in enumerate(levels)}
                xs = [float(rank[str(r[x_binding.field])]) for r in table]
            ys = [float(r[y_field]) for r in table]
            if len(xs) >= 2 and len(set(xs)) > 1:
                slope = statistics.linear_regression(xs, ys).slope
                direction = "flat"
                if slope > 1e-12:
                    direction = "increasing"
                elif slope < -1e-12:
                    direction = "decreasing"
                facts.append(
                    _mk(
                        FactForm.TREND,
                        {x_binding.field, y_field},
                        y_field,
                        {
                            "value_attr": y_field,
                            "over_attr": x_binding.field,
                            "direction": direction,
                        },
                        chart.id,
                    )
                )

    for i in range(len(quants)):
        for j in range(i + 1, len(quants)):
            a, b = quants[i], quants[j]
            xs = [float(r[a]) for r in table]
            ys = [float(r[b]) for r in table]
            if len(xs) < 2 or len(set(xs)) < 2 or len(set(ys)) < 2:
                continue
            r = _round2(statistics.correlation(xs, ys))
            facts.append(
                _mk(
                    FactForm.CORRELATION,
                    {a, b},
                    f"{a} and {b}",
                    {"x_attr": a, "y_attr": b, "r": r},
                    chart.id,
                )
            )

    for v in quants:
        values = [r[v] for r in table]
        if len(values) < 3:
            continue
        mu = statistics.fmean(values)
        sigma = statistics.stdev(values)
        if sigma == 0:
            continue
        subj_attr, _ = _subject_fields(chart, v)
        flagged = [r for r in table if abs(r[v] - mu) > 2 * sigma]
        flagged.sort(key=lambda r: (-abs(r[v] - mu), str(r.get(subj_attr, ""))))
        for r in flagged:
            subject = r[subj_attr] if subj_attr and subj_attr in r else r[v]
            facts.append(
                _mk(
                    FactForm.OUTLIER,
                    {v} | ({subj_attr} if subj_attr else set()),
                    subject,
                    {"value_attr": v, "value": r[v], "subject_attr": subj_attr},
                    chart.id,
                )
            )
    return facts


def jaccard_distance(a: frozenset, b: frozenset) -> Fraction:
    if not a and not b:
        return Fraction(0)
    union = len(a | b)
    return Fraction(union - len(a & b), union)


def fact_weight(
    fact: DataFact,
    neighbor_facts: Sequence[Sequence[DataFact]],
    alpha=DEFAULT_ALPHA,
    beta=DEFAULT_BETA,
    gamma=DEFAULT_GAMMA,
) -> Fraction:
    """Relatedness weight: per neighboring chart, the mean dissimilarity of
    this fact to that chart's facts (form indicator, level gap, Jaccard
    distance of attribute sets), summed over neighbors. Zero when a piece has
    no neighbors."""
    alpha, beta, gamma = to_fraction(alpha), to_fraction(beta), to_fraction(gamma)
    total = Fraction(0)
    for facts_t in neighbor_facts:
        if not facts_t:
            continue
        inner = Fraction(0)
        for g in facts_t:
            inner += (
                alpha * (0 if g.form is fact.form else 1)
                + beta * abs(g.level - fact.level)
                + gamma * jaccard_distance(g.attributes, fact.attributes)
            )
        total += inner / len(facts_t)
    return total


def rank_and_select(
    reading_order: Sequence[str],
    facts_by_chart: Mapping[str, Sequence[DataFact]],
    neighbors_of: Mapping[str, Sequence[str]],
    alpha=DEFAULT_ALPHA,
    beta=DEFAULT_BETA,
    gamma=DEFAULT_GAMMA,
    delta=DEFAULT_DELTA,
) -> dict[str, RankedFacts]:
    """Rank each chart's facts ascending by weight and select the top four.

    Charts are processed in reading order; a fact whose (form, level,
    attributes, subject) already appeared in an earlier chart's selection gets
    its weight multiplied by `delta` plus a small epsilon so exact-duplicate
    ties stay deterministic.
    """
    delta = to_fraction(delta)
    out: dict[str, RankedFacts] = {}
    seen: set[tuple] = set()
    for chart_id in reading_order:
        facts = list(facts_by_chart[chart_id])
        neighbor_lists = [facts_by_chart[n] for n in neighbors_of.get(chart_id, [])]
        weighted = []
        for f in facts:
            w = fact_weight(f, neighbor_lists, alpha, beta, gamma)
            if f.dup_key() in seen:
                w = w * delta + DUP_EPSILON
            weighted.append((f, w))
        ranked = sorted(weighted, key=lambda fw: fw[1])  # stable: extraction order on ties
        selected = [f for f, _ in ranked[:4]]
        seen.update(f.dup_key() for f in selected)
        out[chart_id] = RankedFacts(ranked=ranked, selected=selected)
    return out

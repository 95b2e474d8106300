import random

import pytest

from comicforge.chart_model import (
    ChannelBinding,
    Channel,
    ChartSpec,
    Dataset,
    FieldType,
    Mark,
    Transformation,
    TransformKind,
    parse_ensemble,
)
from comicforge.facts import DataFact, FactForm


def marketing_rows():
    sizes = ["S", "M", "L", "XL"]
    colors = ["yellow", "black", "blue", "grey", "red"]
    genders = ["female", "female", "male"]
    countries = ["US", "US", "US", "UK", "Germany", "Canada"]
    devices = ["mobile", "desktop", "tablet"]
    channels = ["search", "social"]
    rows = []
    for i in range(48):
        rows.append(
            {
                "gender": genders[i % 3],
                "country": countries[i % 6],
                "cloth_size": sizes[i % 4],
                "preferred_color": colors[i % 5],
                "device_type": devices[i % 3],
                "referrer_channel": channels[i % 2],
                "product_views": 3 + (i % 7),
                "purchase_count": 1 + (i % 5) + (3 if i % 2 == 0 else 0),
                "hour_of_day": (5 * i) % 24,
                "visits": 1,
            }
        )
    return rows


def _profile_bar(idx, cat):
    return {
        "id": f"c{idx}",
        "mark": "bar",
        "title": f"Visits by {cat}",
        "channels": [
            {"channel": "x", "field": cat, "type": "nominal"},
            {"channel": "y", "field": "visits", "type": "quantitative"},
        ],
        "transforms": [{"kind": "aggregate", "target": "visits", "param": "sum"}],
    }


def marketing_ensemble_doc():
    """Nine charts over one retail dataset: four customer-profile bars, a
    gender-by-device breakdown, two purchase bars, two hour-of-day scatters."""
    charts = [_profile_bar(i, cat) for i, cat in enumerate(
        ["cloth_size", "preferred_color", "gender", "country"], start=1)]
    charts.append(
        {
            "id": "c5",
            "mark": "rect",
            "title": "Visits by gender and device",
            "channels": [
                {"channel": "x", "field": "gender", "type": "nominal"},
                {"channel": "y", "field": "device_type", "type": "nominal"},
                {"channel": "color", "field": "visits", "type": "quantitative"},
            ],
            "transforms": [{"kind": "aggregate", "target": "visits", "param": "sum"}],
        }
    )
    for idx, cat, ctype in ((6, "referrer_channel", "nominal"), (7, "product_views", "ordinal")):
        charts.append(
            {
                "id": f"c{idx}",
                "mark": "bar",
                "title": f"Purchases by {cat}",
                "channels": [
                    {"channel": "x", "field": cat, "type": ctype},
                    {"channel": "y", "field": "purchase_count", "type": "quantitative"},
                ],
                "transforms": [
                    {"kind": "aggregate", "target": "purchase_count", "param": "sum"}
                ],
            }
        )
    for idx, yfield, ytype in ((8, "referrer_channel", "nominal"), (9, "product_views", "ordinal")):
        charts.append(
            {
                "id": f"c{idx}",
                "mark": "point",
                "title": f"{yfield} by hour",
                "channels": [
                    {"channel": "x", "field": "hour_of_day", "type": "quantitative"},
                    {"channel": "y", "field": yfield, "type": ytype},
                    {"channel": "size", "field": "purchase_count", "type": "quantitative"},
                ],
                "transforms": [],
            }
        )
    return {"dataset": {"inline": marketing_rows()}, "charts": charts}


MARKETING_PIECES = [
    {"c1", "c2", "c3", "c4"},
    {"c5"},
    {"c6", "c7"},
    {"c8", "c9"},
]


@pytest.fixture
def marketing_ensemble():
    return parse_ensemble(marketing_ensemble_doc())


def cars_rows():
    rows = [
        {"Horsepower": 130, "Miles_per_Gallon": 18.0, "Origin": "USA"},
        {"Horsepower": 165, "Miles_per_Gallon": 15.0, "Origin": "USA"},
        {"Horsepower": 95, "Miles_per_Gallon": 24.0, "Origin": "Japan"},
        {"Horsepower": 88, "Miles_per_Gallon": 27.0, "Origin": "Japan"},
        {"Horsepower": 193, "Miles_per_Gallon": 9.0, "Origin": "USA"},
        {"Horsepower": 115, "Miles_per_Gallon": 22.0, "Origin": "Europe"},
        {"Horsepower": 70, "Miles_per_Gallon": 32.0, "Origin": "Japan"},
        {"Horsepower": 105, "Miles_per_Gallon": 20.5, "Origin": "Europe"},
    ]
    return rows


def fig4_ensemble_doc():
    """Two cars charts: an aggregated line and a colored scatter."""
    return {
        "dataset": {"inline": cars_rows()},
        "charts": [
            {
                "id": "left",
                "mark": "line",
                "channels": [
                    {"channel": "x", "field": "Horsepower", "type": "quantitative"},
                    {"channel": "y", "field": "Miles_per_Gallon", "type": "quantitative"},
                ],
                "transforms": [
                    {"kind": "aggregate", "target": "Miles_per_Gallon", "param": "mean"}
                ],
            },
            {
                "id": "right",
                "mark": "point",
                "channels": [
                    {"channel": "x", "field": "Horsepower", "type": "quantitative"},
                    {"channel": "y", "field": "Miles_per_Gallon", "type": "quantitative"},
                    {"channel": "color", "field": "Origin", "type": "nominal"},
                ],
                "transforms": [],
            },
        ],
    }


@pytest.fixture
def fig4_ensemble():
    return parse_ensemble(fig4_ensemble_doc())


def mk_chart(
    chart_id,
    mark=Mark.POINT,
    channels=(),
    transforms=(),
    created_at=0.0,
    title=None,
):
    """Terse ChartSpec builder: channels as (slot, field, type) triples,
    transforms as (kind, target, param)."""
    bindings = frozenset(
        ChannelBinding(Channel(slot), fname, FieldType(ftype)) for slot, fname, ftype in channels
    )
    trs = frozenset(
        Transformation(TransformKind(kind), target, param) for kind, target, param in transforms
    )
    return ChartSpec(
        id=chart_id,
        mark=Mark(mark),
        channels=bindings,
        transforms=trs,
        created_at=created_at,
        title=title,
    )


_FIELDS = ["alpha", "beta", "delta", "epsilon", "kappa"]
_TYPES = [t.value for t in FieldType]
_MARKS = [m.value for m in Mark]
_SLOTS = [c.value for c in Channel]
_TKINDS = [k.value for k in TransformKind]


def random_spec(rng: random.Random, chart_id: str) -> ChartSpec:
    slots = rng.sample(_SLOTS, rng.randint(1, 4))
    channels = [(slot, rng.choice(_FIELDS), rng.choice(_TYPES)) for slot in slots]
    transforms = {}
    for _ in range(rng.randint(0, 3)):
        kind = rng.choice(_TKINDS)
        target = rng.choice(_FIELDS)
        param = rng.choice([None, "mean", "sum", "asc"])
        transforms[(kind, target)] = (kind, target, param)
    transforms = list(transforms.values())
    return mk_chart(
        chart_id,
        mark=rng.choice(_MARKS),
        channels=channels,
        transforms=transforms,
        created_at=rng.random() * 100,
    )


def random_matrix(rng: random.Random, n: int, scale: int = 20):
    """Random symmetric zero-diagonal matrix of small exact fractions."""
    from fractions import Fraction

    matrix = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = Fraction(rng.randint(1, scale * 10), 10)
            matrix[i][j] = d
            matrix[j][i] = d
    return matrix


def table1_facts():
    """The three stitched pairs, built as extracted facts would be."""
    coref = [
        DataFact(
            FactForm.MAXIMUM,
            1,
            frozenset({"weaptype1", "iyear", "attack_count"}),
            "Explosives/ Bombs/ Dynamite",
            {
                "value_attr": "attack_count",
                "value": 938,
                "subject_attr": "weaptype1",
                "qualifier_attr": "iyear",
                "qualifier_value": 2015,
            },
            "g1",
        ),
        DataFact(
            FactForm.SECOND_MAXIMUM,
            1,
            frozenset({"weaptype1", "iyear", "attack_count"}),
            "Explosives/ Bombs/ Dynamite",
            {
                "value_attr": "attack_count",
                "value": 840,
                "subject_attr": "weaptype1",
                "qualifier_attr": "iyear",
                "qualifier_value": 2014,
            },
            "g1",
        ),
    ]
    subord = [
        DataFact(
            FactForm.RATIO_COMPARISON,
            2,
            frozenset({"targtype1", "attack_count"}),
            "attack_count",
            {
                "value_attr": "attack_count",
                "group_attr": "targtype1",
                "top": "Private Citizens & Property",
                "bottom": "Tourists",
                "ratio": 328.67,
            },
            "g2",
        ),
        DataFact(
            FactForm.MAXIMUM,
            1,
            frozenset({"targtype1", "attack_count"}),
            "Private Citizens & Property",
            {"value_attr": "attack_count", "value": 989, "subject_attr": "targtype1"},
            "g2",
        ),
    ]
    conj = [
        DataFact(
            FactForm.MINIMUM,
            1,
            frozenset({"iyear", "attack_count"}),
            "2004",
            {"value_attr": "attack_count", "value": 319, "subject_attr": "iyear"},
            "g3",
        ),
        DataFact(
            FactForm.MAXIMUM,
            1,
            frozenset({"iyear", "attack_count"}),
            "2014",
            {"value_attr": "attack_count", "value": 3925, "subject_attr": "iyear"},
            "g3",
        ),
    ]
    return coref, subord, conj


TABLE1_DISPLAY = {"weaptype1": "weapon type", "iyear": "year", "targtype1": "target type"}


def tiny_dataset():
    return Dataset(
        schema={
            "alpha": FieldType.QUANTITATIVE,
            "beta": FieldType.QUANTITATIVE,
            "delta": FieldType.NOMINAL,
            "epsilon": FieldType.NOMINAL,
            "kappa": FieldType.QUANTITATIVE,
        },
        rows=[
            {"alpha": 1 + i, "beta": 10 - i, "delta": "ab"[i % 2], "epsilon": "xyz"[i % 3], "kappa": i * i}
            for i in range(6)
        ],
    )

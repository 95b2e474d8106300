"""Chart ensemble model: parse and validate chart specs plus their shared dataset.

A chart is characterized by its mark, channel bindings, and transformations;
that triple is what the transition-distance and fact modules consume.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DuplicateChartId, MalformedSpec, UnknownAttribute


class Mark(str, Enum):
    BAR = "bar"
    LINE = "line"
    POINT = "point"
    AREA = "area"
    RECT = "rect"
    TICK = "tick"


class Channel(str, Enum):
    X = "x"
    Y = "y"
    COLOR = "color"
    SIZE = "size"
    SHAPE = "shape"
    ROW = "row"
    COLUMN = "column"


class FieldType(str, Enum):
    QUANTITATIVE = "quantitative"
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    TEMPORAL = "temporal"


class TransformKind(str, Enum):
    AGGREGATE = "aggregate"
    BIN = "bin"
    SORT = "sort"
    FILTER = "filter"
    TIME_UNIT = "timeUnit"


@dataclass(frozen=True)
class ChannelBinding:
    channel: Channel
    field: str
    type: FieldType


@dataclass(frozen=True)
class Transformation:
    kind: TransformKind
    target: str
    param: str | None = None


@dataclass(frozen=True)
class ChartSpec:
    id: str
    mark: Mark
    channels: frozenset[ChannelBinding]
    transforms: frozenset[Transformation]
    created_at: float
    title: str | None = None

    def __post_init__(self):
        # Slot-wise diffing needs unique channel slots and (kind, target) keys.
        slots = [b.channel for b in self.channels]
        if len(slots) != len(set(slots)):
            raise MalformedSpec(f"chart {self.id!r} binds a channel slot twice")
        keys = [(t.kind, t.target) for t in self.transforms]
        if len(keys) != len(set(keys)):
            raise MalformedSpec(f"chart {self.id!r} repeats a (kind, target) transform")

    @property
    def spec_count(self) -> int:
        """Number of specifications: one mark plus every channel and transform."""
        return 1 + len(self.channels) + len(self.transforms)


@dataclass
class Dataset:
    schema: dict[str, FieldType]
    rows: list[dict]
    display_names: dict[str, str] = field(default_factory=dict)


@dataclass
class ChartEnsemble:
    dataset: Dataset
    charts: list[ChartSpec]
    warnings: list[str] = field(default_factory=list, compare=False)

    def chart_by_id(self, chart_id: str) -> ChartSpec:
        for c in self.charts:
            if c.id == chart_id:
                return c
        raise KeyError(chart_id)

    def index_of(self, chart_id: str) -> int:
        for i, c in enumerate(self.charts):
            if c.id == chart_id:
                return i
        raise KeyError(chart_id)


_KNOWN_CHART_KEYS = {"id", "mark", "channels", "transforms", "created_at", "title"}
_TEMPORAL_RE = re.compile(r"^\d{4}-\d{2}-\d{2}")
_MAX_RECOMMENDED_ATTRS = 3


def _load_json(doc, what: str):
    if isinstance(doc, (dict, list)):
        return doc
    if isinstance(doc, bytes):
        doc = doc.decode("utf-8")
    try:
        return json.loads(doc)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedSpec(f"{what} is not valid JSON: {exc}") from exc


def _coerce_cell(raw):
    if raw is None:
        return None
    if isinstance(raw, (int, float, bool)):
        return raw
    text = raw.strip()
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv_rows(text: str) -> list[dict]:
    """CSV with a header row; empty cells become null, numerics are coerced."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise MalformedSpec("CSV dataset has no header row")
    return [{k: _coerce_cell(v) for k, v in row.items()} for row in reader]


def infer_schema(rows: list[dict]) -> dict[str, FieldType]:
    """Infer attribute types: all-numeric columns are quantitative, ISO-date
    strings temporal, everything else nominal."""
    if not rows:
        raise MalformedSpec("dataset has no rows")
    names: list[str] = []
    for row in rows:
        for k in row:
            if k not in names:
                names.append(k)
    schema: dict[str, FieldType] = {}
    for name in names:
        values = [r.get(name) for r in rows if r.get(name) is not None]
        if values and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            schema[name] = FieldType.QUANTITATIVE
        elif values and all(isinstance(v, str) and _TEMPORAL_RE.match(v) for v in values):
            schema[name] = FieldType.TEMPORAL
        else:
            schema[name] = FieldType.NOMINAL
    return schema


def _parse_dataset(ds_doc, data_doc, base_dir: Path | None) -> Dataset:
    rows = None
    explicit_schema = None
    display_names: dict[str, str] = {}

    if isinstance(ds_doc, dict):
        if "schema" in ds_doc:
            explicit_schema = {
                k: _parse_enum(FieldType, v, f"schema type for {k!r}")
                for k, v in ds_doc["schema"].items()
            }
        display_names = dict(ds_doc.get("display_names", {}))

    if data_doc is not None:
        if isinstance(data_doc, list):
            rows = data_doc
        elif isinstance(data_doc, (str, bytes)):
            text = data_doc.decode("utf-8") if isinstance(data_doc, bytes) else data_doc
            stripped = text.lstrip()
            if stripped.startswith("[") or stripped.startswith("{"):
                rows = _load_json(text, "dataset")
            else:
                rows = parse_csv_rows(text)
        else:
            raise MalformedSpec("dataset rows must be a list, CSV text, or JSON text")
    elif isinstance(ds_doc, dict) and "inline" in ds_doc:
        rows = ds_doc["inline"]
    elif isinstance(ds_doc, dict) and "path" in ds_doc:
        path = Path(ds_doc["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise MalformedSpec(f"cannot read dataset file {path}: {exc}") from exc
        if path.suffix.lower() == ".csv":
            rows = parse_csv_rows(text)
        else:
            rows = _load_json(text, "dataset")
    else:
        raise MalformedSpec("ensemble has no dataset (expected 'inline', 'path', or a data document)")

    if not isinstance(rows, list) or not all(isinstance(r, dict) for r in rows):
        raise MalformedSpec("dataset rows must be a JSON array of flat objects")
    if not rows:
        raise MalformedSpec("dataset has no rows")
    schema = explicit_schema if explicit_schema else infer_schema(rows)
    # Every row carries every schema attribute, null when absent.
    rows = [{name: row.get(name) for name in schema} for row in rows]
    return Dataset(schema=schema, rows=rows, display_names=display_names)


def _parse_enum(enum_cls, raw, what: str):
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise MalformedSpec(f"unknown {what}: {raw!r} (expected one of: {allowed})") from None


def _parse_chart(doc, index: int, schema: dict[str, FieldType], warnings: list[str]) -> ChartSpec:
    if not isinstance(doc, dict):
        raise MalformedSpec(f"chart #{index} is not an object")
    chart_id = doc.get("id")
    if not isinstance(chart_id, str) or not chart_id:
        raise MalformedSpec(f"chart #{index} has no string id")
    for key in doc:
        if key not in _KNOWN_CHART_KEYS:
            warnings.append(f"chart {chart_id!r}: ignoring unknown key {key!r}")

    mark = _parse_enum(Mark, doc.get("mark"), f"mark in chart {chart_id!r}")

    raw_channels = doc.get("channels", [])
    if not isinstance(raw_channels, list) or not raw_channels:
        raise MalformedSpec(f"chart {chart_id!r} binds no channels")
    seen_slots: set[Channel] = set()
    channels = []
    for ch in raw_channels:
        slot = _parse_enum(Channel, ch.get("channel"), f"channel in chart {chart_id!r}")
        fname = ch.get("field")
        if not isinstance(fname, str) or not fname:
            raise MalformedSpec(f"chart {chart_id!r}: channel {slot.value} has no field")
        if fname not in schema:
            raise UnknownAttribute(f"chart {chart_id!r} binds unknown attribute {fname!r}")
        ftype = _parse_enum(FieldType, ch.get("type"), f"field type in chart {chart_id!r}")
        if slot in seen_slots:
            raise MalformedSpec(f"chart {chart_id!r} binds channel {slot.value} twice")
        seen_slots.add(slot)
        channels.append(ChannelBinding(channel=slot, field=fname, type=ftype))

    transforms = []
    slot_fields = {b.channel.value: b.field for b in channels}
    for tr in doc.get("transforms", []):
        kind = _parse_enum(TransformKind, tr.get("kind"), f"transform in chart {chart_id!r}")
        target = tr.get("target")
        if not isinstance(target, str) or not target:
            raise MalformedSpec(f"chart {chart_id!r}: transform {kind.value} has no target")
        if target not in schema and target not in slot_fields:
            raise UnknownAttribute(
                f"chart {chart_id!r}: transform {kind.value} targets unknown attribute {target!r}"
            )
        param = tr.get("param")
        if param is not None and not isinstance(param, str):
            raise MalformedSpec(f"chart {chart_id!r}: transform param must be a string")
        transforms.append(Transformation(kind=kind, target=target, param=param))

    created_at = doc.get("created_at")
    if created_at is None:
        created_at = float(index)  # file order stands in for a timestamp
    elif not isinstance(created_at, (int, float)) or isinstance(created_at, bool):
        raise MalformedSpec(f"chart {chart_id!r}: created_at must be a number (UTC seconds)")

    title = doc.get("title")
    if title is not None and not isinstance(title, str):
        raise MalformedSpec(f"chart {chart_id!r}: title must be a string")

    spec = ChartSpec(
        id=chart_id,
        mark=mark,
        channels=frozenset(channels),
        transforms=frozenset(transforms),
        created_at=float(created_at),
        title=title,
    )
    n_attrs = len(attribute_set(spec))
    if n_attrs > _MAX_RECOMMENDED_ATTRS:
        warnings.append(
            f"chart {chart_id!r} binds {n_attrs} data attributes; more than "
            f"{_MAX_RECOMMENDED_ATTRS} tends to hurt readability"
        )
    return spec


def parse_ensemble(ensemble_doc, data_doc=None, base_dir: Path | str | None = None) -> ChartEnsemble:
    """Parse and validate an ensemble document plus its dataset.

    `ensemble_doc` may be a dict or JSON text; `data_doc` (optional) overrides
    the dataset with rows, CSV text, or JSON text. Unknown chart keys are
    ignored but recorded in `ChartEnsemble.warnings`.
    """
    doc = _load_json(ensemble_doc, "ensemble")
    if not isinstance(doc, dict):
        raise MalformedSpec("ensemble document must be a JSON object")
    base = Path(base_dir) if base_dir is not None else None

    warnings: list[str] = []
    dataset = _parse_dataset(doc.get("dataset"), data_doc, base)

    raw_charts = doc.get("charts")
    if not isinstance(raw_charts, list) or not raw_charts:
        raise MalformedSpec("ensemble contains no charts")

    charts: list[ChartSpec] = []
    seen_ids: set[str] = set()
    for i, raw in enumerate(raw_charts):
        spec = _parse_chart(raw, i, dataset.schema, warnings)
        if spec.id in seen_ids:
            raise DuplicateChartId(f"chart id {spec.id!r} appears more than once")
        seen_ids.add(spec.id)
        charts.append(spec)

    return ChartEnsemble(dataset=dataset, charts=charts, warnings=warnings)


def attribute_set(chart: ChartSpec) -> frozenset[str]:
    """Dataset attributes a chart touches: bound fields plus transform targets.

    A transform target naming a bound channel slot resolves to that slot's
    field; anything else is taken as an attribute name directly.
    """
    slot_fields = {b.channel.value: b.field for b in chart.channels}
    attrs = {b.field for b in chart.channels}
    for tr in chart.transforms:
        attrs.add(slot_fields.get(tr.target, tr.target))
    return frozenset(attrs)


def serialize_ensemble(ensemble: ChartEnsemble) -> dict:
    """Canonical plain-dict form; `parse_ensemble` round-trips it."""
    charts = []
    for c in ensemble.charts:
        charts.append(
            {
                "id": c.id,
                "mark": c.mark.value,
                "channels": [
                    {"channel": b.channel.value, "field": b.field, "type": b.type.value}
                    for b in sorted(c.channels, key=lambda b: b.channel.value)
                ],
                "transforms": [
                    {"kind": t.kind.value, "target": t.target, "param": t.param}
                    for t in sorted(c.transforms, key=lambda t: (t.kind.value, t.target, t.param or ""))
                ],
                "created_at": c.created_at,
                "title": c.title,
            }
        )
    ds = ensemble.dataset
    return {
        "dataset": {
            "schema": {k: v.value for k, v in ds.schema.items()},
            "display_names": dict(ds.display_names),
            "inline": [dict(r) for r in ds.rows],
        },
        "charts": charts,
    }


def ensemble_hash(ensemble: ChartEnsemble) -> str:
    blob = json.dumps(serialize_ensemble(ensemble), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()

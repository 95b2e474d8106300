"""Chart-to-chart transition distance.

Two charts are diffed slot-wise over their mark, channel bindings, and
transformations; the distance is the sum of per-operation costs, computed in
time linear in spec size.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from .chart_model import ChannelBinding, ChartEnsemble, ChartSpec, Transformation
from .rational import frac_str, to_fraction


class OpKind(str, Enum):
    ADD = "add"
    MODIFY = "modify"
    REMOVE = "remove"


class Slot(str, Enum):
    MARK = "mark"
    CHANNEL = "channel"
    TRANSFORM = "transform"


@dataclass(frozen=True)
class CostTable:
    """Per-operation costs. Add must equal remove per slot kind so the
    distance is symmetric (clustering and MSTs require that); set
    `asymmetric=True` to lift the constraint and take the cheaper direction.
    """

    mark_modify: Fraction = Fraction(1)
    channel_add: Fraction = Fraction(7, 10)
    channel_remove: Fraction = Fraction(7, 10)
    channel_modify: Fraction = Fraction(1, 2)
    transform_add: Fraction = Fraction(4, 5)
    transform_remove: Fraction = Fraction(4, 5)
    transform_modify: Fraction = Fraction(3, 5)
    asymmetric: bool = False

    def __post_init__(self):
        for name in (
            "mark_modify",
            "channel_add",
            "channel_remove",
            "channel_modify",
            "transform_add",
            "transform_remove",
            "transform_modify",
        ):
            value = to_fraction(getattr(self, name))
            if value < 0:
                raise ValueError(f"cost {name} must be nonnegative")
            object.__setattr__(self, name, value)
        if all(
            getattr(self, n) == 0
            for n in (
                "mark_modify",
                "channel_add",
                "channel_remove",
                "channel_modify",
                "transform_add",
                "transform_remove",
                "transform_modify",
            )
        ):
            raise ValueError("at least one cost must be positive")
        if not self.asymmetric:
            if self.channel_add != self.channel_remove:
                raise ValueError("channel_add must equal channel_remove (symmetric mode)")
            if self.transform_add != self.transform_remove:
                raise ValueError("transform_add must equal transform_remove (symmetric mode)")

    def to_dict(self) -> dict:
        return {
            "mark_modify": frac_str(self.mark_modify),
            "channel_add": frac_str(self.channel_add),
            "channel_remove": frac_str(self.channel_remove),
            "channel_modify": frac_str(self.channel_modify),
            "transform_add": frac_str(self.transform_add),
            "transform_remove": frac_str(self.transform_remove),
            "transform_modify": frac_str(self.transform_modify),
            "asymmetric": self.asymmetric,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CostTable":
        kwargs = {}
        for key, value in data.items():
            if key == "asymmetric":
                kwargs[key] = bool(value)
            else:
                kwargs[key] = to_fraction(value)
        return cls(**kwargs)


DEFAULT_COSTS = CostTable()


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    slot: Slot
    key: str
    before: object | None = None
    after: object | None = None

    @property
    def detail(self) -> str:
        def show(v):
            if v is None:
                return "-"
            if isinstance(v, ChannelBinding):
                return f"{v.field}({v.type.value})"
            if isinstance(v, Transformation):
                return v.param or v.kind.value
            return getattr(v, "value", str(v))

        return f"{self.key}: {show(self.before)} -> {show(self.after)}"


def diff_specs(a: ChartSpec, b: ChartSpec) -> list[EditOp]:
    """Minimal edit script from a to b under slot-wise matching.

    Channels match by channel slot, transforms by (kind, target); the mark is
    compared directly. Runs in time linear in spec size.
    """
    ops: list[EditOp] = []
    if a.mark != b.mark:
        ops.append(EditOp(OpKind.MODIFY, Slot.MARK, "mark", a.mark, b.mark))

    a_ch = {c.channel.value: c for c in a.channels}
    b_ch = {c.channel.value: c for c in b.channels}
    for slot in sorted(set(a_ch) | set(b_ch)):
        ca, cb = a_ch.get(slot), b_ch.get(slot)
        if ca is None:
            ops.append(EditOp(OpKind.ADD, Slot.CHANNEL, slot, None, cb))
        elif cb is None:
            ops.append(EditOp(OpKind.REMOVE, Slot.CHANNEL, slot, ca, None))
        elif ca != cb:
            ops.append(EditOp(OpKind.MODIFY, Slot.CHANNEL, slot, ca, cb))

    a_tr = {(t.kind.value, t.target): t for t in a.transforms}
    b_tr = {(t.kind.value, t.target): t for t in b.transforms}
    for key in sorted(set(a_tr) | set(b_tr)):
        ta, tb = a_tr.get(key), b_tr.get(key)
        label = f"{key[0]}:{key[1]}"
        if ta is None:
            ops.append(EditOp(OpKind.ADD, Slot.TRANSFORM, label, None, tb))
        elif tb is None:
            ops.append(EditOp(OpKind.REMOVE, Slot.TRANSFORM, label, ta, None))
        elif ta != tb:
            ops.append(EditOp(OpKind.MODIFY, Slot.TRANSFORM, label, ta, tb))
    return ops


def apply_script(spec: ChartSpec, ops: list[EditOp]) -> ChartSpec:
    """Apply an edit script; the result has the source's identity fields but
    the target's mark/channels/transforms."""
    mark = spec.mark
    channels = {c.channel.value: c for c in spec.channels}
    transforms = {(t.kind.value, t.target): t for t in spec.transforms}
    for op in ops:
        if op.slot is Slot.MARK:
            mark = op.after
        elif op.slot is Slot.CHANNEL:
            if op.kind is OpKind.REMOVE:
                channels.pop(op.key)
            else:
                channels[op.key] = op.after
        else:
            key = tuple(op.key.split(":", 1))
            if op.kind is OpKind.REMOVE:
                transforms.pop(key)
            else:
                transforms[key] = op.after
    return replace(
        spec,
        mark=mark,
        channels=frozenset(channels.values()),
        transforms=frozenset(transforms.values()),
    )


def op_cost(op: EditOp, costs: CostTable) -> Fraction:
    if op.slot is Slot.MARK:
        return costs.mark_modify
    if op.slot is Slot.CHANNEL:
        return {
            OpKind.ADD: costs.channel_add,
            OpKind.REMOVE: costs.channel_remove,
            OpKind.MODIFY: costs.channel_modify,
        }[op.kind]
    return {
        OpKind.ADD: costs.transform_add,
        OpKind.REMOVE: costs.transform_remove,
        OpKind.MODIFY: costs.transform_modify,
    }[op.kind]


def _directed_cost(a: ChartSpec, b: ChartSpec, costs: CostTable) -> Fraction:
    return sum((op_cost(op, costs) for op in diff_specs(a, b)), Fraction(0))


def distance(a: ChartSpec, b: ChartSpec, costs: CostTable = DEFAULT_COSTS) -> Fraction:
    """Summed operation cost between two charts (exact rational)."""
    if costs.asymmetric:
        return min(_directed_cost(a, b, costs), _directed_cost(b, a, costs))
    return _directed_cost(a, b, costs)


def distance_matrix(ensemble: ChartEnsemble, costs: CostTable = DEFAULT_COSTS) -> list[list[Fraction]]:
    """Symmetric pairwise distance matrix over the ensemble's charts."""
    charts = ensemble.charts
    n = len(charts)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(charts[i], charts[j], costs)
            matrix[i][j] = d
            matrix[j][i] = d
    return matrix

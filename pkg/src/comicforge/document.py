"""The editable comic document and its canonical JSON form.

Serialization is canonical (sorted keys, compact separators, fractions as
exact strings) so identical inputs produce byte-identical exports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .backbone import BackboneEdge, BackboneShape, StoryBackbone
from .captions import Caption
from .distance import CostTable
from .errors import SchemaVersionMismatch
from .layout import Cell, LayoutPattern, TierLayout
from .rational import frac_str, parse_frac, to_fraction

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class StyleConfig:
    aspect_ratio: tuple[int, int] = (16, 9)
    theme: str = "light"
    chart_theme: str = "grammar"
    font_family: str = "Georgia, 'Times New Roman', serif"
    font_size: int = 12

    def __post_init__(self):
        w, h = self.aspect_ratio
        if w <= 0 or h <= 0:
            raise ValueError("aspect ratio must be positive")
        if self.theme not in ("light", "dark"):
            raise ValueError("theme must be 'light' or 'dark'")
        if not 6 <= self.font_size <= 72:
            raise ValueError("font_size must be within [6, 72]")

    def to_dict(self) -> dict:
        return {
            "aspect_ratio": list(self.aspect_ratio),
            "theme": self.theme,
            "chart_theme": self.chart_theme,
            "font_family": self.font_family,
            "font_size": self.font_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StyleConfig":
        return cls(
            aspect_ratio=tuple(d.get("aspect_ratio", (16, 9))),
            theme=d.get("theme", "light"),
            chart_theme=d.get("chart_theme", "grammar"),
            font_family=d.get("font_family", "Georgia, 'Times New Roman', serif"),
            font_size=d.get("font_size", 12),
        )


STYLE_PRESETS: dict[str, StyleConfig] = {
    "report": StyleConfig(),
    "dark-slides": StyleConfig(
        theme="dark",
        font_family="'Helvetica Neue', Arial, sans-serif",
        font_size=14,
    ),
    "spreadsheet": StyleConfig(
        chart_theme="spreadsheet",
        font_family="Calibri, 'Segoe UI', sans-serif",
        font_size=11,
    ),
    "grammar": StyleConfig(chart_theme="grammar"),
}


def style_preset(name: str) -> StyleConfig:
    """Look up a named style preset (built-in table, extendable via config)."""
    try:
        return STYLE_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown style preset {name!r} (have: {', '.join(sorted(STYLE_PRESETS))})"
        ) from None


@dataclass(frozen=True)
class EngineParams:
    alpha: Fraction = Fraction(1, 3)
    beta: Fraction = Fraction(1, 3)
    gamma: Fraction = Fraction(1, 3)
    delta: Fraction = Fraction(4)
    tau: Fraction | None = None
    max_size: int = 4
    cost_table: CostTable = field(default_factory=CostTable)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.tau is not None:
            object.__setattr__(self, "tau", to_fraction(self.tau))
        if min(self.alpha, self.beta, self.gamma) < 0 or (self.alpha + self.beta + self.gamma) == 0:
            raise ValueError("alpha, beta, gamma must be nonnegative and not all zero")
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")

    def to_dict(self) -> dict:
        return {
            "alpha": frac_str(self.alpha),
            "beta": frac_str(self.beta),
            "gamma": frac_str(self.gamma),
            "delta": frac_str(self.delta),
            "tau": frac_str(self.tau) if self.tau is not None else None,
            "max_size": self.max_size,
            "cost_table": self.cost_table.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EngineParams":
        kwargs = {}
        if "alpha" in d:
            kwargs["alpha"] = parse_frac(d["alpha"])
        if "beta" in d:
            kwargs["beta"] = parse_frac(d["beta"])
        if "gamma" in d:
            kwargs["gamma"] = parse_frac(d["gamma"])
        if "delta" in d:
            kwargs["delta"] = parse_frac(d["delta"])
        if d.get("tau") is not None:
            kwargs["tau"] = parse_frac(d["tau"])
        if "max_size" in d:
            kwargs["max_size"] = int(d["max_size"])
        if "cost_table" in d and d["cost_table"] is not None:
            kwargs["cost_table"] = CostTable.from_dict(d["cost_table"])
        return cls(**kwargs)


@dataclass
class StoryPiece:
    index: int
    chart_ids: list[str]
    backbone: StoryBackbone
    layout: TierLayout
    captions: dict[str, Caption]
    fact_selection: dict[str, list[str]] = field(default_factory=dict)
    order_pinned: bool = False


@dataclass
class ComicDocument:
    pieces: list[StoryPiece]
    style: StyleConfig
    params: EngineParams
    revision: int
    ensemble_ref: str
    included_chart_ids: list[str] | None = None
    piece_order_pinned: bool = False

    def piece_of_chart(self, chart_id: str) -> StoryPiece | None:
        for piece in self.pieces:
            if chart_id in piece.chart_ids:
                return piece
        return None

    def chart_ids(self) -> list[str]:
        out: list[str] = []
        for piece in self.pieces:
            out.extend(piece.chart_ids)
        return out


def _caption_to_dict(c: Caption) -> dict:
    return {
        "text": c.text,
        "pinned": c.pinned,
        "segments": [[fid, s, e] for fid, s, e in c.segments],
        "term_links": [[t, u] for t, u in c.term_links],
    }


def _caption_from_dict(d: dict) -> Caption:
    return Caption(
        text=d["text"],
        pinned=bool(d.get("pinned", False)),
        segments=[(fid, int(s), int(e)) for fid, s, e in d.get("segments", [])],
        term_links=[(t, u) for t, u in d.get("term_links", [])],
    )


def _piece_to_dict(p: StoryPiece) -> dict:
    return {
        "index": p.index,
        "chart_ids": list(p.chart_ids),
        "order_pinned": p.order_pinned,
        "backbone": {
            "root": p.backbone.root,
            "shape": p.backbone.shape.value,
            "edges": [
                [e.parent, e.child, frac_str(e.weight)]
                for e in sorted(p.backbone.edges, key=lambda e: (e.parent, e.child))
            ],
        },
        "layout": {
            "pattern": p.layout.pattern.value,
            "reading_order": list(p.layout.reading_order),
            "cells": [
                {
                    "chart": c.chart_id,
                    "x": frac_str(c.x),
                    "y": frac_str(c.y),
                    "w": frac_str(c.w),
                    "h": frac_str(c.h),
                }
                for c in p.layout.cells
            ],
        },
        "captions": {cid: _caption_to_dict(p.captions[cid]) for cid in sorted(p.captions)},
        "fact_selection": {cid: list(ids) for cid, ids in sorted(p.fact_selection.items())},
    }


def _piece_from_dict(d: dict) -> StoryPiece:
    backbone = StoryBackbone(
        root=d["backbone"]["root"],
        edges=frozenset(
            BackboneEdge(parent=p, child=c, weight=parse_frac(w))
            for p, c, w in d["backbone"]["edges"]
        ),
        shape=BackboneShape(d["backbone"]["shape"]),
    )
    layout = TierLayout(
        pattern=LayoutPattern(d["layout"]["pattern"]),
        reading_order=list(d["layout"]["reading_order"]),
        cells=[
            Cell(
                chart_id=c["chart"],
                x=parse_frac(c["x"]),
                y=parse_frac(c["y"]),
                w=parse_frac(c["w"]),
                h=parse_frac(c["h"]),
            )
            for c in d["layout"]["cells"]
        ],
    )
    return StoryPiece(
        index=int(d["index"]),
        chart_ids=list(d["chart_ids"]),
        backbone=backbone,
        layout=layout,
        captions={cid: _caption_from_dict(cd) for cid, cd in d["captions"].items()},
        fact_selection={cid: list(ids) for cid, ids in d.get("fact_selection", {}).items()},
        order_pinned=bool(d.get("order_pinned", False)),
    )


def document_to_dict(doc: ComicDocument) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "revision": doc.revision,
        "ensemble_ref": doc.ensemble_ref,
        "params": doc.params.to_dict(),
        "style": doc.style.to_dict(),
        "included_chart_ids": list(doc.included_chart_ids)
        if doc.included_chart_ids is not None
        else None,
        "piece_order_pinned": doc.piece_order_pinned,
        "pieces": [_piece_to_dict(p) for p in doc.pieces],
    }


def export_json(doc: ComicDocument) -> str:
    """Canonical, byte-stable JSON export."""
    return json.dumps(document_to_dict(doc), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def document_from_dict(data: dict) -> ComicDocument:
    if not isinstance(data, dict) or data.get("schema") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"unsupported comic schema: {data.get('schema') if isinstance(data, dict) else data!r}"
        )
    revision = data.get("revision")
    if not isinstance(revision, int) or isinstance(revision, bool):
        raise SchemaVersionMismatch("revision must be an integer")
    try:
        return ComicDocument(
            pieces=[_piece_from_dict(p) for p in data["pieces"]],
            style=StyleConfig.from_dict(data["style"]),
            params=EngineParams.from_dict(data["params"]),
            revision=revision,
            ensemble_ref=data["ensemble_ref"],
            included_chart_ids=list(data["included_chart_ids"])
            if data.get("included_chart_ids") is not None
            else None,
            piece_order_pinned=bool(data.get("piece_order_pinned", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaVersionMismatch(f"corrupt comic document: {exc}") from exc


def import_json(payload: str | bytes) -> ComicDocument:
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8")
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise SchemaVersionMismatch(f"not JSON: {exc}") from exc
    return document_from_dict(data)

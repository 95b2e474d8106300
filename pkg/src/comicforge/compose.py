"""Assemble comic documents from chart ensembles and apply refinement edits.

`compose` runs distance -> partition -> backbone -> layout/order -> facts ->
captions deterministically. `apply_edit` produces a new document per edit;
documents are immutable values with a strictly increasing revision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction

from .backbone import BackboneShape, build_backbone
from .captions import (
    Caption,
    TermProvider,
    plan_stitches,
    realize,
    term_candidates,
    term_context,
)
from .chart_model import ChartEnsemble, FieldType, ensemble_hash
from .distance import distance_matrix
from .document import ComicDocument, EngineParams, StoryPiece, StyleConfig, document_from_dict, document_to_dict
from .errors import InvalidEdit, MalformedSpec, StaleRevision, UnknownEntity
from .facts import DataFact, RankedFacts, extract_facts, rank_and_select
from .layout import Cell, LayoutPattern, assign_layout, order_pieces
from .partition import default_threshold, partition
from .rational import frac_str

logger = logging.getLogger("comicforge.compose")


@dataclass(frozen=True)
class SwapCharts:
    a: str
    b: str


@dataclass(frozen=True)
class ReorderPieces:
    order: list[int]


@dataclass(frozen=True)
class SelectFacts:
    chart_id: str
    fact_ids: list[str]


@dataclass(frozen=True)
class EditCaptionText:
    chart_id: str
    text: str


@dataclass(frozen=True)
class SetStyle:
    style: StyleConfig


@dataclass(frozen=True)
class SetParams:
    params: EngineParams


@dataclass(frozen=True)
class IncludeCharts:
    add: list[str]
    remove: list[str]


Edit = SwapCharts | ReorderPieces | SelectFacts | EditCaptionText | SetStyle | SetParams | IncludeCharts


@dataclass(frozen=True)
class EditLogEntry:
    op: str
    detail: str
    count: int


def edit_from_dict(body: dict) -> Edit:
    """Parse the tagged edit union used by the PATCH endpoint."""
    if not isinstance(body, dict) or "op" not in body:
        raise ValueError("edit body must be an object with an 'op' tag")
    op = body["op"]
    try:
        if op == "swap_charts":
            return SwapCharts(a=str(body["a"]), b=str(body["b"]))
        if op == "reorder_pieces":
            return ReorderPieces(order=[int(i) for i in body["order"]])
        if op == "select_facts":
            return SelectFacts(
                chart_id=str(body["chart"]), fact_ids=[str(f) for f in body["fact_ids"]]
            )
        if op == "edit_caption":
            return EditCaptionText(chart_id=str(body["chart"]), text=str(body["text"]))
        if op == "set_style":
            return SetStyle(style=StyleConfig.from_dict(body["style"]))
        if op == "set_params":
            return SetParams(params=EngineParams.from_dict(body["params"]))
        if op == "include_charts":
            return IncludeCharts(
                add=[str(c) for c in body.get("add", [])],
                remove=[str(c) for c in body.get("remove", [])],
            )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {op} edit: {exc}") from exc
    raise ValueError(f"unknown edit op {op!r}")


def _active_ensemble(ensemble: ChartEnsemble, included: list[str] | None) -> ChartEnsemble:
    if included is None:
        return ensemble
    keep = set(included)
    charts = [c for c in ensemble.charts if c.id in keep]
    unknown = keep - {c.id for c in charts}
    if unknown:
        raise UnknownEntity(f"included charts not in ensemble: {sorted(unknown)}")
    if not charts:
        raise MalformedSpec("no charts remain after inclusion filter")
    return ChartEnsemble(dataset=ensemble.dataset, charts=charts)


def _neighbors_of(backbone) -> dict[str, list[str]]:
    adjacency: dict[str, list[str]] = {}
    for e in backbone.edges:
        adjacency.setdefault(e.parent, []).append(e.child)
        adjacency.setdefault(e.child, []).append(e.parent)
    return {k: sorted(v) for k, v in adjacency.items()}


def _rank_piece(
    reading_order: list[str],
    backbone,
    facts_by_chart: dict[str, list[DataFact]],
    params: EngineParams,
) -> dict[str, RankedFacts]:
    return rank_and_select(
        reading_order,
        facts_by_chart,
        _neighbors_of(backbone),
        alpha=params.alpha,
        beta=params.beta,
        gamma=params.gamma,
        delta=params.delta,
    )


def _caption_terms(ensemble: ChartEnsemble) -> list[str]:
    nominal_values: list[str] = []
    names: list[str] = []
    for attr, ftype in ensemble.dataset.schema.items():
        names.append(attr)
        display = ensemble.dataset.display_names.get(attr)
        if display:
            names.append(display)
        if ftype is FieldType.NOMINAL:
            seen: set[str] = set()
            for row in ensemble.dataset.rows:
                v = row.get(attr)
                if isinstance(v, str) and v not in seen:
                    seen.add(v)
                    nominal_values.append(v)
    return term_candidates(nominal_values, names)


def _captions_for_piece(
    reading_order: list[str],
    backbone,
    facts_by_chart: dict[str, list[DataFact]],
    params: EngineParams,
    ensemble: ChartEnsemble,
    term_provider: TermProvider | None,
    pinned: dict[str, Caption] | None = None,
    fact_selection: dict[str, list[str]] | None = None,
) -> dict[str, Caption]:
    ranked = _rank_piece(reading_order, backbone, facts_by_chart, params)
    terms = _caption_terms(ensemble) if term_provider else []
    captions: dict[str, Caption] = {}
    for cid in reading_order:
        if pinned and cid in pinned:
            captions[cid] = pinned[cid]
            continue
        selected = ranked[cid].selected
        if fact_selection and cid in fact_selection:
            by_id = {f.fact_id: f for f, _ in ranked[cid].ranked}
            chosen = [by_id[fid] for fid in fact_selection[cid] if fid in by_id]
            if chosen:
                selected = chosen
        caption = realize(plan_stitches(selected), selected, ensemble.dataset.display_names)
        captions[cid] = term_context(caption, term_provider, terms)
    return captions


def compose(
    ensemble: ChartEnsemble,
    params: EngineParams | None = None,
    style: StyleConfig | None = None,
    included_chart_ids: list[str] | None = None,
    term_provider: TermProvider | None = None,
    pattern_table: dict[BackboneShape, LayoutPattern] | None = None,
) -> ComicDocument:
    """Generate a comic document; identical inputs yield byte-identical JSON."""
    params = params or EngineParams()
    style = style or StyleConfig()
    active = _active_ensemble(ensemble, included_chart_ids)
    charts = active.charts

    matrix = distance_matrix(active, params.cost_table)
    if len(charts) == 1:
        piece_sets = [frozenset([charts[0].id])]
    else:
        tau = params.tau if params.tau is not None else default_threshold(matrix)
        piece_sets = partition(
            matrix, max_size=params.max_size, tau=tau, labels=[c.id for c in charts]
        ).pieces
    for piece in piece_sets:
        if len(piece) == 1:
            logger.warning("story piece %s is a singleton; it may read as a weak story", set(piece))

    built = []
    for piece in piece_sets:
        backbone = build_backbone(piece, matrix, active)
        layout = assign_layout(backbone, pattern_table)
        built.append((backbone, layout))

    roots = [active.chart_by_id(b.root) for b, _ in built]
    root_matrix = [
        [matrix[active.index_of(r1.id)][active.index_of(r2.id)] for r2 in roots] for r1 in roots
    ]
    story_order = order_pieces(roots, root_matrix)

    facts_by_chart = {c.id: extract_facts(c, active.dataset) for c in charts}

    pieces: list[StoryPiece] = []
    for index, original in enumerate(story_order.sequence):
        backbone, layout = built[original]
        captions = _captions_for_piece(
            layout.reading_order, backbone, facts_by_chart, params, active, term_provider
        )
        pieces.append(
            StoryPiece(
                index=index,
                chart_ids=list(layout.reading_order),
                backbone=backbone,
                layout=layout,
                captions=captions,
            )
        )

    return ComicDocument(
        pieces=pieces,
        style=style,
        params=params,
        revision=0,
        ensemble_ref=ensemble_hash(ensemble),
        included_chart_ids=list(included_chart_ids) if included_chart_ids is not None else None,
    )


def ranked_facts_for(
    doc: ComicDocument, ensemble: ChartEnsemble, chart_id: str
) -> list[dict]:
    """Full ranked fact list for the fact picker, with selection flags."""
    piece = doc.piece_of_chart(chart_id)
    if piece is None:
        raise UnknownEntity(f"chart {chart_id!r} is not part of this comic")
    active = _active_ensemble(ensemble, doc.included_chart_ids)
    facts_by_chart = {cid: extract_facts(active.chart_by_id(cid), active.dataset) for cid in piece.chart_ids}
    ranked = _rank_piece(piece.chart_ids, piece.backbone, facts_by_chart, doc.params)[chart_id]
    if chart_id in piece.fact_selection:
        selected_ids = set(piece.fact_selection[chart_id])
    else:
        selected_ids = {f.fact_id for f in ranked.selected}
    out = []
    for fact, weight in ranked.ranked:
        out.append(
            {
                "fact_id": fact.fact_id,
                "form": fact.form.value,
                "level": fact.level,
                "attributes": sorted(fact.attributes),
                "subject": fact.subject,
                "payload": fact.value_payload,
                "weight": frac_str(weight),
                "selected": fact.fact_id in selected_ids,
            }
        )
    return out


def _copy_document(doc: ComicDocument) -> ComicDocument:
    return document_from_dict(document_to_dict(doc))


def _pinned_captions(doc: ComicDocument) -> dict[str, Caption]:
    out: dict[str, Caption] = {}
    for piece in doc.pieces:
        for cid, caption in piece.captions.items():
            if caption.pinned:
                out[cid] = caption
    return out


def _rebuild_piece(
    membership: frozenset[str],
    index: int,
    ensemble: ChartEnsemble,
    doc: ComicDocument,
    term_provider: TermProvider | None,
    pinned: dict[str, Caption],
    pattern_table=None,
) -> StoryPiece:
    active = _active_ensemble(ensemble, doc.included_chart_ids)
    matrix = distance_matrix(active, doc.params.cost_table)
    backbone = build_backbone(membership, matrix, active)
    layout = assign_layout(backbone, pattern_table)
    facts_by_chart = {cid: extract_facts(active.chart_by_id(cid), active.dataset) for cid in membership}
    captions = _captions_for_piece(
        layout.reading_order,
        backbone,
        facts_by_chart,
        doc.params,
        active,
        term_provider,
        pinned=pinned,
    )
    return StoryPiece(
        index=index,
        chart_ids=list(layout.reading_order),
        backbone=backbone,
        layout=layout,
        captions=captions,
    )


def _apply_manual_order(piece: StoryPiece, desired: list[str]):
    """Re-seat charts into the piece's cells following a manual order."""
    position = {cid: i for i, cid in enumerate(piece.chart_ids)}
    piece.layout.cells = [
        replace(cell, chart_id=desired[position[cell.chart_id]]) if cell.chart_id in position else cell
        for cell in piece.layout.cells
    ]
    piece.chart_ids = list(desired)
    piece.layout.reading_order = list(desired)
    piece.order_pinned = True


def _refresh_piece_captions(
    piece: StoryPiece,
    ensemble: ChartEnsemble,
    doc: ComicDocument,
    term_provider: TermProvider | None,
):
    active = _active_ensemble(ensemble, doc.included_chart_ids)
    facts_by_chart = {cid: extract_facts(active.chart_by_id(cid), active.dataset) for cid in piece.chart_ids}
    pinned = {cid: c for cid, c in piece.captions.items() if c.pinned}
    piece.captions = _captions_for_piece(
        piece.chart_ids,
        piece.backbone,
        facts_by_chart,
        doc.params,
        active,
        term_provider,
        pinned=pinned,
        fact_selection=piece.fact_selection,
    )


def _recompose_preserving(
    doc: ComicDocument,
    ensemble: ChartEnsemble,
    term_provider: TermProvider | None,
    pattern_table=None,
):
    """Full recompose that keeps pinned captions and, when chart membership is
    unchanged, manual piece ordering and manual within-piece orders."""
    pinned = _pinned_captions(doc)
    old_sequence = [frozenset(p.chart_ids) for p in doc.pieces]
    old_manual = {
        frozenset(p.chart_ids): list(p.chart_ids) for p in doc.pieces if p.order_pinned
    }
    fresh = compose(
        ensemble,
        params=doc.params,
        style=doc.style,
        included_chart_ids=doc.included_chart_ids,
        term_provider=term_provider,
        pattern_table=pattern_table,
    )
    pieces = fresh.pieces
    memberships = [frozenset(p.chart_ids) for p in pieces]

    if doc.piece_order_pinned and set(memberships) == set(old_sequence):
        by_membership = {frozenset(p.chart_ids): p for p in pieces}
        pieces = [by_membership[m] for m in old_sequence]
    else:
        doc.piece_order_pinned = False

    for i, piece in enumerate(pieces):
        piece.index = i
        membership = frozenset(piece.chart_ids)
        if membership in old_manual:
            _apply_manual_order(piece, old_manual[membership])
        present_pinned = {cid: cap for cid, cap in pinned.items() if cid in piece.chart_ids}
        if present_pinned or piece.order_pinned:
            piece.captions.update(present_pinned)
            _refresh_piece_captions(piece, ensemble, doc, term_provider)
    doc.pieces = pieces


def apply_edit(
    doc: ComicDocument,
    edit: Edit,
    ensemble: ChartEnsemble,
    expected_revision: int | None = None,
    term_provider: TermProvider | None = None,
    pattern_table=None,
) -> tuple[ComicDocument, EditLogEntry]:
    """Apply one edit, returning the next revision and its edit-log entry.

    `expected_revision` implements optimistic concurrency: a mismatch raises
    StaleRevision and leaves the document untouched.
    """
    if expected_revision is not None and expected_revision != doc.revision:
        raise StaleRevision(expected_revision, doc.revision)

    new = _copy_document(doc)

    if isinstance(edit, SwapCharts):
        entry = _edit_swap(new, edit, ensemble, term_provider, pattern_table)
    elif isinstance(edit, ReorderPieces):
        entry = _edit_reorder(new, edit)
    elif isinstance(edit, SelectFacts):
        entry = _edit_select_facts(new, edit, ensemble, term_provider)
    elif isinstance(edit, EditCaptionText):
        entry = _edit_caption_text(new, edit)
    elif isinstance(edit, SetStyle):
        new.style = edit.style
        entry = EditLogEntry(op="set_style", detail=edit.style.theme, count=1)
    elif isinstance(edit, SetParams):
        new.params = edit.params
        _recompose_preserving(new, ensemble, term_provider, pattern_table)
        entry = EditLogEntry(op="set_params", detail="engine parameters replaced", count=1)
    elif isinstance(edit, IncludeCharts):
        entry = _edit_include(new, edit, ensemble, term_provider, pattern_table)
    else:
        raise InvalidEdit(f"unsupported edit type {type(edit).__name__}")

    new.revision = doc.revision + 1
    return new, entry


def _edit_swap(new, edit, ensemble, term_provider, pattern_table) -> EditLogEntry:
    if edit.a == edit.b:
        raise InvalidEdit("swap requires two distinct charts")
    pa = new.piece_of_chart(edit.a)
    pb = new.piece_of_chart(edit.b)
    if pa is None or pb is None:
        missing = edit.a if pa is None else edit.b
        raise UnknownEntity(f"chart {missing!r} is not part of this comic")

    if pa is pb:
        order = list(pa.chart_ids)
        ia, ib = order.index(edit.a), order.index(edit.b)
        order[ia], order[ib] = order[ib], order[ia]
        _apply_manual_order(pa, order)
        _refresh_piece_captions(pa, ensemble, new, term_provider)
        return EditLogEntry(op="swap_charts", detail=f"{edit.a}<->{edit.b} within piece", count=1)

    pinned = _pinned_captions(new)
    membership_a = (frozenset(pa.chart_ids) - {edit.a}) | {edit.b}
    membership_b = (frozenset(pb.chart_ids) - {edit.b}) | {edit.a}
    rebuilt_a = _rebuild_piece(membership_a, pa.index, ensemble, new, term_provider, pinned, pattern_table)
    rebuilt_b = _rebuild_piece(membership_b, pb.index, ensemble, new, term_provider, pinned, pattern_table)
    new.pieces[pa.index] = rebuilt_a
    new.pieces[pb.index] = rebuilt_b
    return EditLogEntry(op="swap_charts", detail=f"{edit.a}<->{edit.b} across pieces", count=1)


def _edit_reorder(new, edit) -> EditLogEntry:
    if sorted(edit.order) != list(range(len(new.pieces))):
        raise InvalidEdit(f"order must be a permutation of 0..{len(new.pieces) - 1}")
    new.pieces = [new.pieces[i] for i in edit.order]
    for i, piece in enumerate(new.pieces):
        piece.index = i
    new.piece_order_pinned = True
    return EditLogEntry(op="reorder_pieces", detail=",".join(map(str, edit.order)), count=1)


def _edit_select_facts(new, edit, ensemble, term_provider) -> EditLogEntry:
    piece = new.piece_of_chart(edit.chart_id)
    if piece is None:
        raise UnknownEntity(f"chart {edit.chart_id!r} is not part of this comic")
    if len(edit.fact_ids) > 4:
        raise InvalidEdit("at most 4 facts per chart")
    if not edit.fact_ids:
        raise InvalidEdit("select at least one fact")
    if len(set(edit.fact_ids)) != len(edit.fact_ids):
        raise InvalidEdit("duplicate fact ids in selection")

    available = {f["fact_id"] for f in ranked_facts_for(new, ensemble, edit.chart_id)}
    unknown = set(edit.fact_ids) - available
    if unknown:
        raise UnknownEntity(f"unknown fact ids: {sorted(unknown)}")

    previous = piece.fact_selection.get(edit.chart_id)
    if previous is None:
        previous = [
            f["fact_id"] for f in ranked_facts_for(new, ensemble, edit.chart_id) if f["selected"]
        ]
    removed = set(previous) - set(edit.fact_ids)
    added = set(edit.fact_ids) - set(previous)
    piece.fact_selection[edit.chart_id] = list(edit.fact_ids)
    if edit.chart_id in piece.captions:
        piece.captions[edit.chart_id].pinned = False
    _refresh_piece_captions(piece, ensemble, new, term_provider)
    return EditLogEntry(
        op="select_facts",
        detail=f"{edit.chart_id}: -{len(removed)} +{len(added)}",
        count=len(removed) + len(added),
    )


def _edit_caption_text(new, edit) -> EditLogEntry:
    piece = new.piece_of_chart(edit.chart_id)
    if piece is None:
        raise UnknownEntity(f"chart {edit.chart_id!r} is not part of this comic")
    piece.captions[edit.chart_id] = Caption(text=edit.text, pinned=True)
    return EditLogEntry(op="edit_caption", detail=edit.chart_id, count=1)


def _edit_include(new, edit, ensemble, term_provider, pattern_table) -> EditLogEntry:
    all_ids = [c.id for c in ensemble.charts]
    current = list(new.included_chart_ids) if new.included_chart_ids is not None else list(all_ids)
    current_set = set(current)
    for cid in edit.add:
        if cid not in all_ids:
            raise UnknownEntity(f"chart {cid!r} is not in the ensemble")
        current_set.add(cid)
    for cid in edit.remove:
        if cid not in current_set:
            raise UnknownEntity(f"chart {cid!r} is not currently included")
        current_set.discard(cid)
    if not current_set:
        raise InvalidEdit("cannot remove every chart")
    new.included_chart_ids = [cid for cid in all_ids if cid in current_set]
    _recompose_preserving(new, ensemble, term_provider, pattern_table)
    return EditLogEntry(
        op="include_charts",
        detail=f"+{len(edit.add)} -{len(edit.remove)}",
        count=len(edit.add) + len(edit.remove),
    )

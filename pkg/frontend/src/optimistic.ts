// Local previews of edits, applied to a cloned document while the PATCH is in
// flight. Structural edits mirror the server exactly; content edits
// (facts/params) only mark intent -- the server document replaces the preview
// on acknowledgement either way, so the view never drifts from server truth.

import type { ComicDoc, Edit } from "./types.js";

function clone(doc: ComicDoc): ComicDoc {
  return JSON.parse(JSON.stringify(doc)) as ComicDoc;
}

export function applyOptimistic(doc: ComicDoc, edit: Edit): ComicDoc {
  const next = clone(doc);
  switch (edit.op) {
    case "swap_charts": {
      const pa = next.pieces.find((p) => p.chart_ids.includes(edit.a));
      const pb = next.pieces.find((p) => p.chart_ids.includes(edit.b));
      if (!pa || !pb) return next;
      if (pa === pb) {
        const ia = pa.chart_ids.indexOf(edit.a);
        const ib = pa.chart_ids.indexOf(edit.b);
        [pa.chart_ids[ia], pa.chart_ids[ib]] = [pa.chart_ids[ib], pa.chart_ids[ia]];
        pa.layout.reading_order = [...pa.chart_ids];
        for (const cell of pa.layout.cells) {
          if (cell.chart === edit.a) cell.chart = edit.b;
          else if (cell.chart === edit.b) cell.chart = edit.a;
        }
        pa.order_pinned = true;
      } else {
        // Membership exchange; backbone/captions refresh on ACK.
        const swapIn = (piece: typeof pa, from: string, to: string) => {
          piece.chart_ids = piece.chart_ids.map((c) => (c === from ? to : c));
          piece.layout.reading_order = [...piece.chart_ids];
          for (const cell of piece.layout.cells) {
            if (cell.chart === from) cell.chart = to;
          }
          const caption = piece.captions[from];
          delete piece.captions[from];
          if (caption) piece.captions[to] = caption;
        };
        swapIn(pa, edit.a, edit.b);
        swapIn(pb, edit.b, edit.a);
      }
      return next;
    }
    case "reorder_pieces": {
      next.pieces = edit.order.map((i, at) => {
        const piece = next.pieces[i];
        piece.index = at;
        return piece;
      });
      next.piece_order_pinned = true;
      return next;
    }
    case "edit_caption": {
      const piece = next.pieces.find((p) => p.chart_ids.includes(edit.chart));
      if (piece) {
        piece.captions[edit.chart] = {
          text: edit.text,
          pinned: true,
          segments: [],
          term_links: [],
        };
      }
      return next;
    }
    case "set_style": {
      next.style = { ...next.style, ...edit.style };
      return next;
    }
    case "select_facts": {
      const piece = next.pieces.find((p) => p.chart_ids.includes(edit.chart));
      if (piece) piece.fact_selection[edit.chart] = [...edit.fact_ids];
      return next;
    }
    case "set_params": {
      next.params = { ...next.params, ...edit.params } as ComicDoc["params"];
      return next;
    }
    case "include_charts":
      // Regrouping is the engine's call; nothing sensible to preview.
      return next;
  }
}

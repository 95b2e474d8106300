// Round-trip tests against the real service: after each edit gesture the
// acknowledged optimistic view must render byte-identically to a fresh GET.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderStudio } from "../src/render.js";
import { ViewState } from "../src/state.js";
import type { ChartSpecDoc, Edit } from "../src/types.js";
import { BASE_URL } from "./server.js";

const ensembleDoc = JSON.parse(
  readFileSync(join(__dirname, "..", "..", "demo", "marketing.json"), "utf-8"),
) as { charts: ChartSpecDoc[] };

const specs = new Map<string, ChartSpecDoc>(ensembleDoc.charts.map((c) => [c.id, c]));

const api = new ApiClient(BASE_URL);
let ensembleId: string;

beforeAll(async () => {
  const uploaded = await api.uploadEnsemble(ensembleDoc);
  ensembleId = uploaded.ensemble_id;
});

async function freshState(): Promise<ViewState> {
  const created = await api.createComic(ensembleId);
  return new ViewState(api, created.comic_id, created.document);
}

async function roundTrip(state: ViewState, edit: Edit): Promise<void> {
  const before = state.revision;
  await state.submit(edit);
  await state.settled();
  expect(state.revision).toBe(before + 1);
  const optimisticView = renderStudio(state.document, specs);
  const refetched = await api.getComic(state.comicId);
  expect(refetched.revision).toBe(state.revision);
  expect(renderStudio(refetched.document, specs)).toBe(optimisticView);
}

describe("each edit gesture round-trips", () => {
  it("swap within a piece", async () => {
    const state = await freshState();
    const piece = state.document.pieces.find((p) => p.chart_ids.length === 4)!;
    await roundTrip(state, { op: "swap_charts", a: piece.chart_ids[1], b: piece.chart_ids[2] });
  });

  it("swap across pieces", async () => {
    const state = await freshState();
    await roundTrip(state, { op: "swap_charts", a: "c6", b: "c8" });
  });

  it("reorder pieces", async () => {
    const state = await freshState();
    const n = state.document.pieces.length;
    const order = [...Array(n).keys()].reverse();
    await roundTrip(state, { op: "reorder_pieces", order });
  });

  it("fact selection", async () => {
    const state = await freshState();
    const facts = await api.getFacts(state.comicId, "c1");
    const chosen = facts.slice(0, 3).map((f) => f.fact_id);
    await roundTrip(state, { op: "select_facts", chart: "c1", fact_ids: chosen });
  });

  it("caption edit pins the caption", async () => {
    const state = await freshState();
    await roundTrip(state, { op: "edit_caption", chart: "c3", text: "Hand-written note." });
    const piece = state.document.pieces.find((p) => p.chart_ids.includes("c3"))!;
    expect(piece.captions.c3.pinned).toBe(true);
    expect(piece.captions.c3.text).toBe("Hand-written note.");
  });

  it("style change", async () => {
    const state = await freshState();
    await roundTrip(state, { op: "set_style", style: { theme: "dark", font_size: 14 } });
    expect(state.document.style.theme).toBe("dark");
  });

  it("parameter change regenerates downstream state", async () => {
    const state = await freshState();
    await roundTrip(state, { op: "set_params", params: { beta: "2/3" } });
    expect(state.document.params.beta).toBe("2/3");
  });

  it("include/exclude charts", async () => {
    const state = await freshState();
    await roundTrip(state, { op: "include_charts", add: [], remove: ["c5"] });
    const charts = state.document.pieces.flatMap((p) => p.chart_ids);
    expect(charts).not.toContain("c5");
  });
});

describe("hero tier rendering from real engine output", () => {
  it("renders one large plus three equal small panels", async () => {
    const state = await freshState();
    const hero = state.document.pieces.find((p) => p.layout.pattern === "HERO_PLUS3");
    expect(hero).toBeDefined();
    const html = renderStudio(state.document, specs);
    const tier = html.split('data-pattern="HERO_PLUS3"')[1].split("</section>")[0];
    const sizes = [...tier.matchAll(/width:([\d.]+)%;height:([\d.]+)%/g)].map(
      (m) => `${m[1]}x${m[2]}`,
    );
    expect(sizes).toHaveLength(4);
    const [root, ...children] = sizes;
    expect(root).toBe("50x100");
    expect(new Set(children).size).toBe(1);
    expect(children[0]).toBe("50x33.3333");
  });
});

describe("conflict handling", () => {
  it("rolls back and refreshes on 409", async () => {
    const state = await freshState();
    // another writer bumps the revision behind this view's back
    await api.patchComic(state.comicId, { op: "set_style", style: { theme: "dark" } }, 0);
    const outcomes: string[] = [];
    state.onOutcome((o) => outcomes.push(o.status));
    await state.submit({ op: "set_style", style: { font_size: 20 } });
    await state.settled();
    expect(outcomes).toEqual(["conflict"]);
    expect(state.pendingCount).toBe(0);
    expect(state.revision).toBe(1);
    // the view converged to server truth: the other writer's edit is visible,
    // the lost edit is not
    expect(state.document.style.theme).toBe("dark");
    expect(state.document.style.font_size).toBe(12);
    const server = await api.getComic(state.comicId);
    expect(renderStudio(state.document, specs)).toBe(renderStudio(server.document, specs));
  });

  it("queued edits drain in order with consecutive revisions", async () => {
    const state = await freshState();
    const done = Promise.all([
      state.submit({ op: "set_style", style: { theme: "dark" } }),
      state.submit({ op: "set_style", style: { font_size: 16 } }),
      state.submit({ op: "reorder_pieces", order: [1, 0, 2, 3] }),
    ]);
    await done;
    await state.settled();
    expect(state.revision).toBe(3);
    const refetched = await api.getComic(state.comicId);
    expect(renderStudio(refetched.document, specs)).toBe(renderStudio(state.document, specs));
  });
});

describe("ui never fabricates state", () => {
  it("rejected edits leave the acknowledged document untouched", async () => {
    const state = await freshState();
    const before = renderStudio(state.acknowledged, specs);
    const outcomes: string[] = [];
    state.onOutcome((o) => outcomes.push(o.status));
    await state.submit({ op: "swap_charts", a: "c1", b: "does-not-exist" });
    await state.settled();
    expect(outcomes).toEqual(["rejected"]);
    expect(renderStudio(state.acknowledged, specs)).toBe(before);
    expect(state.revision).toBe(0);
  });
});

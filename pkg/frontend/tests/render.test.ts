import { describe, expect, it } from "vitest";

import { fracToPercent, renderComic, renderStructureOverview, renderStudio } from "../src/render.js";
import type { ChartSpecDoc, ComicDoc } from "../src/types.js";

function heroDoc(): ComicDoc {
  return {
    schema: 1,
    revision: 0,
    ensemble_ref: "sha256:x",
    params: {
      alpha: "1/3",
      beta: "1/3",
      gamma: "1/3",
      delta: "4",
      tau: null,
      max_size: 4,
      cost_table: {},
    },
    style: {
      aspect_ratio: [16, 9],
      theme: "light",
      chart_theme: "grammar",
      font_family: "Georgia",
      font_size: 12,
    },
    included_chart_ids: null,
    piece_order_pinned: false,
    pieces: [
      {
        index: 0,
        chart_ids: ["root", "a", "b", "c"],
        order_pinned: false,
        backbone: {
          root: "root",
          shape: "STAR4",
          edges: [
            ["root", "a", "1"],
            ["root", "b", "1"],
            ["root", "c", "1"],
          ],
        },
        layout: {
          pattern: "HERO_PLUS3",
          reading_order: ["root", "a", "b", "c"],
          cells: [
            { chart: "root", x: "0", y: "0", w: "1/2", h: "1" },
            { chart: "a", x: "1/2", y: "0", w: "1/2", h: "1/3" },
            { chart: "b", x: "1/2", y: "1/3", w: "1/2", h: "1/3" },
            { chart: "c", x: "1/2", y: "2/3", w: "1/2", h: "1/3" },
          ],
        },
        captions: {
          root: {
            text: "The main picture.",
            pinned: true,
            segments: [],
            term_links: [["picture", "https://wiki.example/Picture"]],
          },
          a: { text: "A.", pinned: false, segments: [], term_links: [] },
          b: { text: "B.", pinned: false, segments: [], term_links: [] },
          c: { text: "C.", pinned: false, segments: [], term_links: [] },
        },
        fact_selection: {},
      },
    ],
  };
}

const SPECS = new Map<string, ChartSpecDoc>([
  [
    "root",
    {
      id: "root",
      mark: "bar",
      channels: [{ channel: "x", field: "size", type: "nominal" }],
      transforms: [],
      created_at: 0,
      title: "Sizes",
    },
  ],
]);

describe("fracToPercent", () => {
  it("converts exact fractions", () => {
    expect(fracToPercent("1/2")).toBe("50%");
    expect(fracToPercent("1/3")).toBe("33.3333%");
    expect(fracToPercent("0")).toBe("0%");
    expect(fracToPercent("1")).toBe("100%");
  });
});

describe("renderComic", () => {
  it("renders a hero-plus-three tier: one large panel and three equal small ones", () => {
    const html = renderComic(heroDoc(), SPECS);
    expect(html).toContain('data-pattern="HERO_PLUS3"');
    const sizes = [...html.matchAll(/width:([\d.]+%);height:([\d.]+%)/g)].map((m) => [m[1], m[2]]);
    expect(sizes).toHaveLength(4);
    const [root, ...children] = sizes;
    expect(root).toEqual(["50", "100"].map((v) => `${v}%`));
    // three children identical in size, each smaller than the root
    expect(new Set(children.map((c) => c.join("x"))).size).toBe(1);
    expect(children[0]).toEqual(["50%", "33.3333%"]);
  });

  it("renders placeholder for charts the client cannot resolve", () => {
    const html = renderComic(heroDoc(), SPECS);
    expect(html).toContain("chart a could not be rendered");
    expect(html).toContain("Sizes");
  });

  it("shows the empty state for a piece-less document", () => {
    const doc = heroDoc();
    doc.pieces = [];
    expect(renderComic(doc, SPECS)).toContain("empty-state");
  });

  it("marks pinned captions and injects term links", () => {
    const html = renderComic(heroDoc(), SPECS);
    expect(html).toContain('data-pinned="true"');
    expect(html).toContain('<a href="https://wiki.example/Picture"');
  });

  it("escapes caption text", () => {
    const doc = heroDoc();
    doc.pieces[0].captions.a.text = "a < b & c";
    const html = renderComic(doc, SPECS);
    expect(html).toContain("a &lt; b &amp; c");
  });
});

describe("renderStructureOverview", () => {
  it("renders the backbone as a tree rooted at the root chart", () => {
    const html = renderStructureOverview(heroDoc());
    expect(html).toContain('data-shape="STAR4"');
    const rootAt = html.indexOf('data-chart="root"');
    expect(rootAt).toBeGreaterThan(-1);
    expect(html.indexOf('data-chart="a"')).toBeGreaterThan(rootAt);
  });
});

describe("renderStudio", () => {
  it("contains the three interface panels", () => {
    const html = renderStudio(heroDoc(), SPECS);
    expect(html).toContain("data-comic-panel");
    expect(html).toContain("advanced-panel");
    expect(html).toContain("configuration-panel");
    expect(html).toContain("parameter-panel");
  });

  it("is a pure function of the document", () => {
    expect(renderStudio(heroDoc(), SPECS)).toBe(renderStudio(heroDoc(), SPECS));
  });
});

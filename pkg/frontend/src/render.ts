// Pure document -> HTML rendering. Everything here is a deterministic
// function of the document JSON, so two equal documents render to identical
// strings -- the round-trip tests rely on that.

import type { BackboneDoc, ChartSpecDoc, ComicDoc, ParamsDoc, PieceDoc, StyleDoc } from "./types.js";

export function fracToPercent(frac: string): string {
  const [num, den] = frac.includes("/") ? frac.split("/") : [frac, "1"];
  const value = (Number(num) / Number(den)) * 100;
  return `${Number(value.toFixed(4))}%`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function captionHtml(piece: PieceDoc, chartId: string): string {
  const caption = piece.captions[chartId];
  if (!caption) return "";
  let text = escapeHtml(caption.text);
  for (const [term, url] of caption.term_links) {
    const needle = escapeHtml(term);
    const at = text.toLowerCase().indexOf(needle.toLowerCase());
    if (at < 0) continue;
    const shown = text.slice(at, at + needle.length);
    text =
      text.slice(0, at) +
      `<a href="${escapeHtml(url)}" target="_blank">${shown}</a>` +
      text.slice(at + needle.length);
  }
  const pin = caption.pinned ? '<span class="pin" title="edited by hand">&#9998;</span> ' : "";
  return `<p class="caption"${caption.pinned ? ' data-pinned="true"' : ""}>${pin}${text}</p>`;
}

export function renderChartPlaceholder(spec: ChartSpecDoc | undefined, chartId: string): string {
  if (!spec) {
    return `<div class="chart-error">chart ${escapeHtml(chartId)} could not be rendered</div>`;
  }
  const title = escapeHtml(spec.title ?? spec.id);
  const bindings = spec.channels
    .map((c) => `${escapeHtml(c.channel)}&rarr;${escapeHtml(c.field)}`)
    .join(", ");
  return (
    `<div class="chart-box"><span class="mark-badge">${escapeHtml(spec.mark)}</span>` +
    `<span class="chart-title">${title}</span>` +
    `<span class="chart-bindings">${bindings}</span></div>`
  );
}

export function renderComic(doc: ComicDoc, specs: Map<string, ChartSpecDoc>): string {
  if (doc.pieces.length === 0) {
    return '<div class="empty-state">No charts yet. Upload an ensemble to begin.</div>';
  }
  const [arW, arH] = doc.style.aspect_ratio;
  const tiers = doc.pieces.map((piece) => {
    const panels = piece.layout.cells.map((cell) => {
      const style =
        `left:${fracToPercent(cell.x)};top:${fracToPercent(cell.y)};` +
        `width:${fracToPercent(cell.w)};height:${fracToPercent(cell.h)}`;
      return (
        `<div class="panel" data-chart="${escapeHtml(cell.chart)}" draggable="true" style="${style}">` +
        renderChartPlaceholder(specs.get(cell.chart), cell.chart) +
        captionHtml(piece, cell.chart) +
        `</div>`
      );
    });
    return (
      `<section class="tier" data-piece="${piece.index}" data-pattern="${piece.layout.pattern}" ` +
      `style="aspect-ratio:${arW} / ${arH}">` +
      panels.join("") +
      `</section>`
    );
  });
  return `<div class="comic" data-revision="${doc.revision}" data-theme="${doc.style.theme}">${tiers.join("")}</div>`;
}

function backboneTree(backbone: BackboneDoc): string {
  const children = new Map<string, [string, string][]>();
  for (const [parent, child, weight] of backbone.edges) {
    const bucket = children.get(parent) ?? [];
    bucket.push([child, weight]);
    children.set(parent, bucket);
  }
  const walk = (node: string): string => {
    const kids = (children.get(node) ?? []).slice().sort((a, b) => (a[0] < b[0] ? -1 : 1));
    const sub = kids.length
      ? `<ul>${kids.map(([child, w]) => `<li data-weight="${escapeHtml(w)}">${walk(child)}</li>`).join("")}</ul>`
      : "";
    return `<span class="node" data-chart="${escapeHtml(node)}">${escapeHtml(node)}</span>${sub}`;
  };
  return `<div class="backbone" data-shape="${escapeHtml(backbone.shape)}">${walk(backbone.root)}</div>`;
}

export function renderStructureOverview(doc: ComicDoc): string {
  const trees = doc.pieces.map(
    (piece) => `<div class="piece-tree" data-piece="${piece.index}">${backboneTree(piece.backbone)}</div>`,
  );
  return `<div class="structure-overview">${trees.join("")}</div>`;
}

const SLIDERS: [keyof ParamsDoc, string][] = [
  ["alpha", "fact form weight"],
  ["beta", "fact level weight"],
  ["gamma", "attribute overlap weight"],
  ["delta", "duplicate discount"],
];

function fracToNumber(frac: string | null): number {
  if (frac === null) return 0;
  const [num, den] = frac.includes("/") ? frac.split("/") : [frac, "1"];
  return Number(num) / Number(den);
}

export function renderParameterPanel(params: ParamsDoc): string {
  const rows = SLIDERS.map(([key, label]) => {
    const value = fracToNumber(params[key] as string);
    return (
      `<label class="param-row">${escapeHtml(label)}` +
      `<input type="range" min="0" max="8" step="0.05" name="${key}" value="${value}">` +
      `<output>${value.toFixed(2)}</output></label>`
    );
  });
  rows.push(
    `<label class="param-row">max piece size` +
      `<input type="range" min="1" max="4" step="1" name="max_size" value="${params.max_size}">` +
      `<output>${params.max_size}</output></label>`,
  );
  return `<form class="parameter-panel">${rows.join("")}</form>`;
}

export function renderConfigPanel(style: StyleDoc): string {
  const themes = ["light", "dark"]
    .map(
      (t) =>
        `<button type="button" class="theme-choice${t === style.theme ? " active" : ""}" data-theme="${t}">${t}</button>`,
    )
    .join("");
  return (
    `<div class="config-panel">` +
    `<section class="tab page-setting">aspect ` +
    `<input name="ar_w" type="number" value="${style.aspect_ratio[0]}" min="1">` +
    `:<input name="ar_h" type="number" value="${style.aspect_ratio[1]}" min="1"></section>` +
    `<section class="tab themes">${themes}</section>` +
    `<section class="tab content-editing"><input name="font_size" type="number" ` +
    `min="6" max="72" value="${style.font_size}"> pt, ` +
    `<input name="font_family" value="${escapeHtml(style.font_family)}"></section>` +
    `</div>`
  );
}

export function renderStudio(doc: ComicDoc, specs: Map<string, ChartSpecDoc>): string {
  return (
    `<div class="studio">` +
    `<section class="data-comic-panel">${renderComic(doc, specs)}</section>` +
    `<aside class="advanced-panel">${renderStructureOverview(doc)}${renderParameterPanel(doc.params)}</aside>` +
    `<aside class="configuration-panel">${renderConfigPanel(doc.style)}</aside>` +
    `</div>`
  );
}

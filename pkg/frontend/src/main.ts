// Browser bootstrap: fetch the comic, render the three panels, and translate
// user gestures into PATCH edits through the ViewState queue.

import { ApiClient } from "./api.js";
import { renderStudio } from "./render.js";
import { ViewState } from "./state.js";
import type { ChartSpecDoc, Edit, ComicDoc } from "./types.js";

function toast(message: string): void {
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = message;
  document.body.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

function gatherSpecs(ensemble: { charts: ChartSpecDoc[] } | null): Map<string, ChartSpecDoc> {
  const map = new Map<string, ChartSpecDoc>();
  for (const chart of ensemble?.charts ?? []) map.set(chart.id, chart);
  return map;
}

function wireGestures(root: HTMLElement, state: ViewState): void {
  let dragged: string | null = null;

  root.addEventListener("dragstart", (event) => {
    const panel = (event.target as HTMLElement).closest<HTMLElement>(".panel");
    dragged = panel?.dataset.chart ?? null;
  });
  root.addEventListener("dragover", (event) => event.preventDefault());
  root.addEventListener("drop", (event) => {
    event.preventDefault();
    const panel = (event.target as HTMLElement).closest<HTMLElement>(".panel");
    const target = panel?.dataset.chart;
    if (dragged && target && dragged !== target) {
      void state.submit({ op: "swap_charts", a: dragged, b: target });
    }
    dragged = null;
  });

  root.addEventListener("dblclick", (event) => {
    const caption = (event.target as HTMLElement).closest<HTMLElement>(".caption");
    const panel = (event.target as HTMLElement).closest<HTMLElement>(".panel");
    if (!caption || !panel?.dataset.chart) return;
    const text = prompt("Edit caption", caption.textContent ?? "");
    if (text !== null) {
      void state.submit({ op: "edit_caption", chart: panel.dataset.chart, text });
    }
  });

  root.addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    if (input.closest(".parameter-panel")) {
      const edit: Edit =
        input.name === "max_size"
          ? { op: "set_params", params: { max_size: Number(input.value) } }
          : { op: "set_params", params: { [input.name]: input.value } };
      void state.submit(edit);
    }
    if (input.name === "font_size") {
      void state.submit({ op: "set_style", style: { font_size: Number(input.value) } });
    }
  });

  root.addEventListener("click", (event) => {
    const themeButton = (event.target as HTMLElement).closest<HTMLElement>(".theme-choice");
    if (themeButton?.dataset.theme) {
      void state.submit({
        op: "set_style",
        style: { theme: themeButton.dataset.theme as "light" | "dark" },
      });
    }
  });
}

export async function boot(baseUrl: string, comicId: string): Promise<void> {
  const api = new ApiClient(baseUrl);
  const initial = await api.getComic(comicId);
  const state = new ViewState(api, comicId, initial.document);
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");

  const specs = gatherSpecs(null);
  const draw = (doc: ComicDoc) => {
    root.innerHTML = renderStudio(doc, specs);
  };
  state.onChange(draw);
  state.onOutcome((outcome) => {
    if (outcome.status === "conflict") toast("Someone else edited this comic; view refreshed.");
    else if (outcome.status === "rejected") toast(outcome.message ?? "edit rejected");
  });
  wireGestures(root, state);
  draw(state.document);
}

declare global {
  interface Window {
    comicforgeBoot: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.comicforgeBoot = boot;
}

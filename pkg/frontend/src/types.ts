// Wire types for the comic service API (schema version 1).

export interface CaptionDoc {
  text: string;
  pinned: boolean;
  segments: [string, number, number][];
  term_links: [string, string][];
}

export interface CellDoc {
  chart: string;
  x: string;
  y: string;
  w: string;
  h: string;
}

export interface LayoutDoc {
  pattern: string;
  reading_order: string[];
  cells: CellDoc[];
}

export interface BackboneDoc {
  root: string;
  shape: string;
  edges: [string, string, string][];
}

export interface PieceDoc {
  index: number;
  chart_ids: string[];
  order_pinned: boolean;
  backbone: BackboneDoc;
  layout: LayoutDoc;
  captions: Record<string, CaptionDoc>;
  fact_selection: Record<string, string[]>;
}

export interface StyleDoc {
  aspect_ratio: [number, number];
  theme: "light" | "dark";
  chart_theme: string;
  font_family: string;
  font_size: number;
}

export interface ParamsDoc {
  alpha: string;
  beta: string;
  gamma: string;
  delta: string;
  tau: string | null;
  max_size: number;
  cost_table: Record<string, string | boolean>;
}

export interface ComicDoc {
  schema: number;
  revision: number;
  ensemble_ref: string;
  params: ParamsDoc;
  style: StyleDoc;
  included_chart_ids: string[] | null;
  piece_order_pinned: boolean;
  pieces: PieceDoc[];
}

export interface FactEntry {
  fact_id: string;
  form: string;
  level: number;
  attributes: string[];
  subject: string;
  payload: Record<string, unknown>;
  weight: string;
  selected: boolean;
}

export type Edit =
  | { op: "swap_charts"; a: string; b: string }
  | { op: "reorder_pieces"; order: number[] }
  | { op: "select_facts"; chart: string; fact_ids: string[] }
  | { op: "edit_caption"; chart: string; text: string }
  | { op: "set_style"; style: Partial<StyleDoc> }
  | { op: "set_params"; params: Partial<ParamsDoc> }
  | { op: "include_charts"; add: string[]; remove: string[] };

export interface PatchResponse {
  comic_id: string;
  revision: number;
  document: ComicDoc;
  applied: { op: string; detail: string; count: number };
}

export interface GetResponse {
  comic_id: string;
  revision: number;
  document: ComicDoc;
  edit_log: { op: string; detail: string; count: number }[];
}

export interface ChartSpecDoc {
  id: string;
  mark: string;
  channels: { channel: string; field: string; type: string }[];
  transforms: { kind: string; target: string; param: string | null }[];
  created_at: number;
  title: string | null;
}

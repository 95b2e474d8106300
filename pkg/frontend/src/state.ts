// Studio view state: the last server-acknowledged document plus a pending
// edit queue that drains strictly in order. The optimistic view is always
// (acked document + pending previews); on acknowledgement the server document
// becomes the base, and a conflict rolls everything back to server truth.

import { ApiClient, ConflictError } from "./api.js";
import { applyOptimistic } from "./optimistic.js";
import type { ComicDoc, Edit } from "./types.js";

export interface EditOutcome {
  edit: Edit;
  status: "applied" | "conflict" | "rejected";
  message?: string;
}

export class ViewState {
  comicId: string;
  revision: number;
  selectedChart: string | null = null;
  selectedPiece: number | null = null;
  activeTab: "structure" | "parameters" = "structure";

  private ackedDoc: ComicDoc;
  private pending: Edit[] = [];
  private draining = false;
  private listeners: ((doc: ComicDoc) => void)[] = [];
  private outcomes: ((outcome: EditOutcome) => void)[] = [];

  constructor(
    private api: ApiClient,
    comicId: string,
    document: ComicDoc,
  ) {
    this.comicId = comicId;
    this.ackedDoc = document;
    this.revision = document.revision;
  }

  get document(): ComicDoc {
    let doc = this.ackedDoc;
    for (const edit of this.pending) doc = applyOptimistic(doc, edit);
    return doc;
  }

  get acknowledged(): ComicDoc {
    return this.ackedDoc;
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  onChange(listener: (doc: ComicDoc) => void): void {
    this.listeners.push(listener);
  }

  onOutcome(listener: (outcome: EditOutcome) => void): void {
    this.outcomes.push(listener);
  }

  private notify(): void {
    const doc = this.document;
    for (const listener of this.listeners) listener(doc);
  }

  private report(outcome: EditOutcome): void {
    for (const listener of this.outcomes) listener(outcome);
  }

  /** Queue an edit: optimistic preview now, server truth on acknowledgement. */
  submit(edit: Edit): Promise<void> {
    this.pending.push(edit);
    this.notify();
    return this.drain();
  }

  private async drain(): Promise<void> {
    if (this.draining) return;
    this.draining = true;
    try {
      while (this.pending.length > 0) {
        const edit = this.pending[0];
        try {
          const response = await this.api.patchComic(this.comicId, edit, this.revision);
          this.ackedDoc = response.document;
          this.revision = response.revision;
          this.pending.shift();
          this.report({ edit, status: "applied" });
        } catch (error) {
          if (error instanceof ConflictError) {
            // Another writer won: drop every pending edit and refetch.
            this.pending = [];
            await this.refetch();
            this.report({ edit, status: "conflict", message: error.message });
          } else {
            this.pending.shift();
            this.report({
              edit,
              status: "rejected",
              message: error instanceof Error ? error.message : String(error),
            });
          }
        }
        this.notify();
      }
    } finally {
      this.draining = false;
    }
  }

  async refetch(): Promise<ComicDoc> {
    const response = await this.api.getComic(this.comicId);
    this.ackedDoc = response.document;
    this.revision = response.revision;
    this.notify();
    return this.ackedDoc;
  }

  /** Wait for the queue to empty (tests and shutdown hooks). */
  async settled(): Promise<void> {
    while (this.pending.length > 0 || this.draining) {
      await new Promise((resolve) => setTimeout(resolve, 1));
    }
  }
}

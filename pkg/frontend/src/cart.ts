/** Saved-papers cart: remove entries, export the API's JSON verbatim. */

import { ApiClient } from "./api.js";

export interface CartHandlers {
  onRemove(id: number): void;
}

/** Trigger a browser download of raw text (the export body, unmodified). */
export function downloadText(text: string, filename: string, doc: Document = document): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const anchor = doc.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  doc.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}

export class CartView {
  private listEl: HTMLElement;
  private exportButton: HTMLButtonElement;

  constructor(
    root: HTMLElement,
    private api: ApiClient,
    private handlers: CartHandlers,
    private titleOf: (id: number) => string,
  ) {
    root.innerHTML = `
      <div class="cart-list"></div>
      <button class="cart-export" disabled>Export saved papers (JSON)</button>`;
    this.listEl = root.querySelector(".cart-list") as HTMLElement;
    this.exportButton = root.querySelector(".cart-export") as HTMLButtonElement;
    this.exportButton.addEventListener("click", () => void this.exportSaved());
  }

  private savedIds: number[] = [];

  render(savedIds: number[]): void {
    this.savedIds = [...savedIds];
    this.exportButton.disabled = savedIds.length === 0;
    this.listEl.innerHTML = savedIds.length ? "" : "<em>cart is empty</em>";
    for (const id of savedIds) {
      const row = document.createElement("div");
      row.className = "cart-row";
      const title = document.createElement("span");
      title.textContent = this.titleOf(id);
      const remove = document.createElement("button");
      remove.textContent = "remove";
      remove.addEventListener("click", () => this.handlers.onRemove(id));
      row.append(title, remove);
      this.listEl.appendChild(row);
    }
  }

  async exportSaved(): Promise<string | null> {
    if (this.savedIds.length === 0) return null;
    const { raw } = await this.api.exportPapers(this.savedIds);
    downloadText(raw, "saved-papers.json");
    return raw;
  }
}

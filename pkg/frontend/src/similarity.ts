/** Similarity search panel: seed management, by-text form, results table. */

import { PaperRecord, SimilarityRequest, SimilarityResult } from "./types.js";

export interface SimilarityHandlers {
  onSearch(req: SimilarityRequest): void;
  onRemoveSeed(id: number): void;
  onAddResultAsSeed(id: number): void;
  onToggleSave(id: number): void;
}

/** Pre-request validation; returns an error message or null when OK. */
export function validateByText(title: string, abstract: string): string | null {
  if (abstract.trim() === "") return "abstract must not be empty";
  if (title.trim() === "" && abstract.trim() === "") return "enter a title and abstract";
  return null;
}

export function validateByPapers(seedIds: number[]): string | null {
  return seedIds.length === 0 ? "add at least one seed paper first" : null;
}

export class SimilarityPanel {
  private seedRow: HTMLElement;
  private resultsBody: HTMLElement;
  private message: HTMLElement;
  private methodSelect: HTMLSelectElement;
  private dimsSelect: HTMLSelectElement;
  private kInput: HTMLInputElement;

  constructor(
    root: HTMLElement,
    private handlers: SimilarityHandlers,
    private titleOf: (id: number) => string,
  ) {
    root.innerHTML = `
      <div class="seed-row"><em>no seed papers yet</em></div>
      <div class="sim-controls">
        <label>method <select class="sim-method"></select></label>
        <label>dims <select class="sim-dims">
          <option value="full">n-D</option><option value="planar">2-D</option>
        </select></label>
        <label>k <input class="sim-k" type="number" value="25" min="1" size="4"></label>
        <button class="search-seeds">Search by seed papers</button>
      </div>
      <div class="by-text">
        <input class="text-title" placeholder="working title">
        <textarea class="text-abstract" rows="3" placeholder="working abstract"></textarea>
        <button class="search-text">Search by title + abstract</button>
      </div>
      <div class="sim-message" role="alert"></div>
      <div class="sim-results"></div>`;
    this.seedRow = root.querySelector(".seed-row") as HTMLElement;
    this.resultsBody = root.querySelector(".sim-results") as HTMLElement;
    this.message = root.querySelector(".sim-message") as HTMLElement;
    this.methodSelect = root.querySelector(".sim-method") as HTMLSelectElement;
    this.dimsSelect = root.querySelector(".sim-dims") as HTMLSelectElement;
    this.kInput = root.querySelector(".sim-k") as HTMLInputElement;

    (root.querySelector(".search-seeds") as HTMLElement).addEventListener("click", () => {
      const error = validateByPapers(this.currentSeeds);
      if (error) {
        this.message.textContent = error;
        return;
      }
      this.message.textContent = "";
      this.handlers.onSearch({
        mode: "by_papers",
        seed_ids: [...this.currentSeeds],
        ...this.commonOptions(),
      });
    });
    (root.querySelector(".search-text") as HTMLElement).addEventListener("click", () => {
      const title = (root.querySelector(".text-title") as HTMLInputElement).value;
      const abstract = (root.querySelector(".text-abstract") as HTMLTextAreaElement).value;
      const error = validateByText(title, abstract);
      if (error) {
        this.message.textContent = error;
        return;
      }
      this.message.textContent = "";
      this.handlers.onSearch({ mode: "by_text", title, abstract, ...this.commonOptions() });
    });
  }

  private currentSeeds: number[] = [];

  private commonOptions(): { dims: "planar" | "full"; method: string | undefined; k: number } {
    const k = Math.max(1, Number(this.kInput.value) || 25);
    const method = this.methodSelect.value || undefined;
    return { dims: this.dimsSelect.value as "planar" | "full", method, k };
  }

  setMethods(methods: string[]): void {
    this.methodSelect.innerHTML = "";
    for (const method of methods) {
      const option = document.createElement("option");
      option.value = method;
      option.textContent = method;
      this.methodSelect.appendChild(option);
    }
  }

  setSeeds(ids: number[]): void {
    this.currentSeeds = [...ids];
    this.seedRow.innerHTML = ids.length ? "" : "<em>no seed papers yet</em>";
    for (const id of ids) {
      const chip = document.createElement("span");
      chip.className = "chip seed-chip";
      chip.textContent = this.titleOf(id);
      const x = document.createElement("button");
      x.textContent = "x";
      x.title = "remove seed";
      x.addEventListener("click", () => this.handlers.onRemoveSeed(id));
      chip.appendChild(x);
      this.seedRow.appendChild(chip);
    }
  }

  setError(message: string): void {
    this.message.textContent = message;
  }

  setResults(results: SimilarityResult[], recordsById: Map<number, PaperRecord>): void {
    this.resultsBody.innerHTML = "";
    if (results.length === 0) {
      this.resultsBody.innerHTML = "<em>no results yet</em>";
      return;
    }
    for (const result of results) {
      const row = document.createElement("div");
      row.className = "result-row";
      const score = document.createElement("span");
      score.className = "cell-score";
      score.textContent = result.score.toFixed(4);
      const title = document.createElement("span");
      title.className = "cell-title";
      title.textContent = result.title;
      title.title = recordsById.get(result.paper_id)?.Abstract ?? "";
      const meta = document.createElement("span");
      meta.className = "cell-meta";
      meta.textContent = `${result.source} ${result.year}`;
      const actions = document.createElement("span");
      const addSeed = document.createElement("button");
      addSeed.textContent = "+";
      addSeed.title = "add result as seed and iterate";
      addSeed.addEventListener("click", () => this.handlers.onAddResultAsSeed(result.paper_id));
      const save = document.createElement("button");
      save.textContent = "☆";
      save.title = "save to cart";
      save.addEventListener("click", () => this.handlers.onToggleSave(result.paper_id));
      actions.append(addSeed, save);
      row.append(score, title, meta, actions);
      this.resultsBody.appendChild(row);
    }
  }
}

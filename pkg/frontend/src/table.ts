/** Virtualized paper table with per-column filters and row actions. */

import { ApiClient } from "./api.js";
import { ColumnFilter, FilterState, clearFilter, describeFilter, setFilter, setQuery } from "./filters.js";
import { PaperRecord } from "./types.js";
import { pagesForWindow, visibleWindow } from "./virtual.js";

const ROW_HEIGHT = 34;
const PAGE_SIZE = 100;

export interface TableHandlers {
  onFilterChange(filter: FilterState): void;
  onDetail(record: PaperRecord): void;
  onLocate(id: number): void;
  onAddSeed(id: number): void;
  onToggleSave(id: number): void;
  onPage?(papers: PaperRecord[]): void;
}

export class PaperTable {
  total = 0;
  private pages = new Map<number, PaperRecord[]>();
  private pending = new Set<number>();
  private filter: FilterState = { filters: [], query: "" };
  private scroller: HTMLElement;
  private body: HTMLElement;
  private countLabel: HTMLElement;
  private chipRow: HTMLElement;

  constructor(
    root: HTMLElement,
    private api: ApiClient,
    private handlers: TableHandlers,
    private isSaved: (id: number) => boolean,
  ) {
    root.innerHTML = `
      <div class="table-controls">
        <input type="search" class="global-search" placeholder="Search titles, abstracts, authors, keywords">
        <span class="paper-count"></span>
      </div>
      <div class="filter-bar">
        <label>Year <input class="f-year-lo" type="number" placeholder="min" size="6">
          .. <input class="f-year-hi" type="number" placeholder="max" size="6"></label>
        <label>Citations <input class="f-cite-lo" type="number" placeholder="min" size="6">
          .. <input class="f-cite-hi" type="number" placeholder="max" size="6"></label>
        <label>Source <input class="f-source" placeholder="TVCG|VAST" size="12"></label>
        <label>Author <input class="f-authors" placeholder="name" size="14"></label>
        <label>Keyword <input class="f-keywords" placeholder="keyword" size="12"></label>
        <button class="apply-filters">Apply</button>
      </div>
      <div class="filter-chips"></div>
      <div class="table-scroller">
        <div class="table-spacer-top"></div>
        <div class="table-body"></div>
        <div class="table-spacer-bottom"></div>
      </div>`;
    this.scroller = root.querySelector(".table-scroller") as HTMLElement;
    this.body = root.querySelector(".table-body") as HTMLElement;
    this.countLabel = root.querySelector(".paper-count") as HTMLElement;
    this.chipRow = root.querySelector(".filter-chips") as HTMLElement;

    const search = root.querySelector(".global-search") as HTMLInputElement;
    search.addEventListener("change", () => {
      this.filter = setQuery(this.filter, search.value);
      this.handlers.onFilterChange(this.filter);
    });
    (root.querySelector(".apply-filters") as HTMLElement).addEventListener("click", () => {
      this.applyControlFilters(root);
    });
    this.scroller.addEventListener("scroll", () => this.renderRows());
  }

  private applyControlFilters(root: HTMLElement): void {
    const num = (sel: string): number | null => {
      const value = (root.querySelector(sel) as HTMLInputElement).value.trim();
      return value === "" ? null : Number(value);
    };
    const text = (sel: string): string[] => {
      const value = (root.querySelector(sel) as HTMLInputElement).value.trim();
      return value === "" ? [] : value.split("|").map((s) => s.trim()).filter(Boolean);
    };
    let state = this.filter;
    const updates: ColumnFilter[] = [
      { kind: "range", column: "year", lo: num(".f-year-lo"), hi: num(".f-year-hi") },
      { kind: "range", column: "citation_count", lo: num(".f-cite-lo"), hi: num(".f-cite-hi") },
      { kind: "values", column: "source", values: text(".f-source") },
      { kind: "values", column: "authors", values: text(".f-authors") },
      { kind: "values", column: "keywords", values: text(".f-keywords") },
    ];
    for (const update of updates) state = setFilter(state, update);
    this.filter = state;
    this.handlers.onFilterChange(this.filter);
  }

  /** New filter state: drop the row cache and refetch. */
  async refresh(filter: FilterState): Promise<void> {
    this.filter = filter;
    this.pages.clear();
    this.pending.clear();
    this.scroller.scrollTop = 0;
    const page = await this.api.papers(0, PAGE_SIZE, this.filter);
    this.pages.set(0, page.papers);
    this.handlers.onPage?.(page.papers);
    this.total = page.total;
    this.countLabel.textContent = `${page.total} papers`;
    this.renderChips();
    this.renderRows();
  }

  private renderChips(): void {
    this.chipRow.innerHTML = "";
    for (const filter of this.filter.filters) {
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.textContent = describeFilter(filter);
      const x = document.createElement("button");
      x.textContent = "x";
      x.title = "clear this filter";
      x.addEventListener("click", () => {
        this.handlers.onFilterChange(clearFilter(this.filter, filter.column));
      });
      chip.appendChild(x);
      this.chipRow.appendChild(chip);
    }
    if (this.filter.query.trim() !== "") {
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.textContent = `search: ${this.filter.query}`;
      const x = document.createElement("button");
      x.textContent = "x";
      x.addEventListener("click", () => this.handlers.onFilterChange(setQuery(this.filter, "")));
      chip.appendChild(x);
      this.chipRow.appendChild(chip);
    }
  }

  private rowAt(index: number): PaperRecord | null {
    const page = this.pages.get(Math.floor(index / PAGE_SIZE));
    return page ? page[index % PAGE_SIZE] ?? null : null;
  }

  private fetchPage(pageIndex: number): void {
    if (this.pages.has(pageIndex) || this.pending.has(pageIndex)) return;
    this.pending.add(pageIndex);
    this.api
      .papers(pageIndex * PAGE_SIZE, PAGE_SIZE, this.filter)
      .then((page) => {
        this.pages.set(pageIndex, page.papers);
        this.handlers.onPage?.(page.papers);
        this.pending.delete(pageIndex);
        this.renderRows();
      })
      .catch(() => this.pending.delete(pageIndex));
  }

  renderRows(): void {
    const win = visibleWindow(this.scroller.scrollTop, ROW_HEIGHT, this.scroller.clientHeight || 400, this.total);
    for (const pageIndex of pagesForWindow(win.start, win.end, PAGE_SIZE)) {
      this.fetchPage(pageIndex);
    }
    (this.scroller.querySelector(".table-spacer-top") as HTMLElement).style.height = `${win.padTop}px`;
    (this.scroller.querySelector(".table-spacer-bottom") as HTMLElement).style.height = `${win.padBottom}px`;
    this.body.innerHTML = "";
    for (let i = win.start; i < win.end; i++) {
      this.body.appendChild(this.renderRow(this.rowAt(i)));
    }
  }

  private renderRow(record: PaperRecord | null): HTMLElement {
    const row = document.createElement("div");
    row.className = "paper-row";
    row.style.height = `${ROW_HEIGHT}px`;
    if (!record) {
      row.textContent = "…";
      return row;
    }
    const title = document.createElement("span");
    title.className = "cell-title";
    title.textContent = record.Title;
    title.title = record.Authors.join(", ");
    const meta = document.createElement("span");
    meta.className = "cell-meta";
    meta.textContent = `${record.Source} ${record.Year}` + (record.CitationCounts !== null ? ` · ${record.CitationCounts}c` : "");
    const actions = document.createElement("span");
    actions.className = "cell-actions";
    for (const [label, title_, fn] of [
      ["i", "details", () => this.handlers.onDetail(record)],
      ["◎", "locate on map", () => this.handlers.onLocate(record.ID)],
      ["+", "add to similarity seeds", () => this.handlers.onAddSeed(record.ID)],
      [this.isSaved(record.ID) ? "★" : "☆", "save to cart", () => this.handlers.onToggleSave(record.ID)],
    ] as [string, string, () => void][]) {
      const button = document.createElement("button");
      button.textContent = label;
      button.title = title_;
      button.addEventListener("click", fn);
      actions.appendChild(button);
    }
    row.append(title, meta, actions);
    return row;
  }
}

/** Composition root: wires the API client, session, and the five views. */

import { ApiClient } from "./api.js";
import { CartView } from "./cart.js";
import { ScatterCanvas } from "./canvas.js";
import { FilterState } from "./filters.js";
import { MetaView } from "./meta.js";
import { Session } from "./session.js";
import { SimilarityPanel } from "./similarity.js";
import { PaperTable } from "./table.js";
import { ColorContext, colorForPoint } from "./theme.js";
import { ColorMode, PaperRecord, ProjectionPoint, SimilarityRequest } from "./types.js";

export class App {
  private api: ApiClient;
  private session: Session;
  private records = new Map<number, PaperRecord>();
  private points: ProjectionPoint[] = [];
  private selection = new Set<number>();

  private table!: PaperTable;
  private metaView!: MetaView;
  private similarity!: SimilarityPanel;
  private cart!: CartView;
  private canvas!: ScatterCanvas;
  private tooltip!: HTMLElement;

  constructor(private root: Document = document, api?: ApiClient) {
    this.api = api ?? new ApiClient("");
    this.session = new Session(window.localStorage);
  }

  private el(id: string): HTMLElement {
    const found = this.root.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found;
  }

  async init(): Promise<void> {
    this.tooltip = this.el("canvas-tooltip");
    this.metaView = new MetaView(this.el("meta-view"));
    this.table = new PaperTable(
      this.el("paper-table"),
      this.api,
      {
        onFilterChange: (filter) => void this.setFilter(filter),
        onDetail: (record) => this.showDetail(record),
        onLocate: (id) => this.canvas.locate(id),
        onAddSeed: (id) => this.addSeed(id),
        onToggleSave: (id) => this.toggleSave(id),
        onPage: (papers) => this.cachePage(papers),
      },
      (id) => this.session.isSaved(id),
    );
    this.similarity = new SimilarityPanel(
      this.el("similarity-panel"),
      {
        onSearch: (req) => void this.runSearch(req),
        onRemoveSeed: (id) => {
          this.session.removeSeed(id);
          this.similarity.setSeeds(this.session.seeds);
          void this.refreshProjection(true);
        },
        onAddResultAsSeed: (id) => this.addSeed(id),
        onToggleSave: (id) => this.toggleSave(id),
      },
      (id) => this.titleOf(id),
    );
    this.cart = new CartView(
      this.el("cart-view"),
      this.api,
      { onRemove: (id) => this.toggleSave(id) },
      (id) => this.titleOf(id),
    );
    this.canvas = new ScatterCanvas(this.el("map-canvas") as HTMLCanvasElement, {
      onHover: (id) => void this.showTooltip(id),
      onToggleSelect: (id) => {
        if (this.selection.has(id)) this.selection.delete(id);
        else this.selection.add(id);
        this.canvas.setSelected(this.selection);
        void this.showTooltip(id);
      },
      onLasso: (ids) => {
        this.selection = new Set(ids);
        this.canvas.setSelected(this.selection);
        this.tooltip.textContent = `${ids.length} points selected`;
      },
    });

    this.el("btn-recenter").addEventListener("click", () => this.canvas.recenter());
    this.el("btn-clear-selection").addEventListener("click", () => {
      this.selection.clear();
      this.canvas.setSelected(this.selection);
    });
    this.el("btn-selection-seeds").addEventListener("click", () => {
      for (const id of this.selection) this.session.addSeed(id);
      this.similarity.setSeeds(this.session.seeds);
      void this.refreshProjection(true);
    });
    this.el("btn-selection-save").addEventListener("click", () => {
      for (const id of this.selection) this.session.save(id);
      this.cart.render(this.session.saved);
      void this.refreshProjection(true);
    });
    const colorSelect = this.el("color-mode") as HTMLSelectElement;
    colorSelect.addEventListener("change", () => {
      this.session.colorMode = colorSelect.value as ColorMode;
      this.recolor(true);
    });

    const health = await this.api.health();
    this.similarity.setMethods(health.methods);
    this.cart.render(this.session.saved);
    await this.ensureRecords(this.session.saved);
    await this.setFilter(this.session.filter);
  }

  private titleOf(id: number): string {
    return this.records.get(id)?.Title ?? `paper #${id}`;
  }

  /** Resolve full metadata through the export endpoint, cached by id. */
  private async ensureRecords(ids: Iterable<number>): Promise<void> {
    const missing = [...new Set(ids)].filter((id) => !this.records.has(id));
    if (missing.length === 0) return;
    const { parsed } = await this.api.exportPapers(missing);
    for (const record of parsed.papers) this.records.set(record.ID, record);
  }

  private cachePage(papers: PaperRecord[]): void {
    for (const record of papers) this.records.set(record.ID, record);
  }

  private async setFilter(filter: FilterState): Promise<void> {
    this.session.filter = filter;
    await this.table.refresh(filter);
    const meta = await this.api.meta(filter);
    this.metaView.render(meta);
    await this.refreshProjection(true);
  }

  private async refreshProjection(keepViewport: boolean): Promise<void> {
    this.points = await this.api.projection({
      filter: this.session.filter,
      seeds: this.session.seeds,
      outputs: this.session.resultIds(),
      saved: this.session.saved,
    });
    this.recolor(keepViewport);
  }

  private colorContext(): ColorContext {
    const years = [...this.records.values()].map((r) => r.Year);
    const citations = [...this.records.values()].map((r) => r.CitationCounts ?? 0);
    return {
      recordsById: this.records,
      scoresById: new Map(this.session.results.map((r) => [r.paper_id, r.score])),
      yearRange: years.length ? [Math.min(...years), Math.max(...years)] : [0, 1],
      citationMax: citations.length ? Math.max(...citations) : 0,
    };
  }

  private recolor(keepViewport: boolean): void {
    const ctx = this.colorContext();
    const colors = this.points.map((p) => colorForPoint(p, this.session.colorMode, ctx));
    this.canvas.setData(this.points, colors, keepViewport);
  }

  private addSeed(id: number): void {
    this.session.addSeed(id);
    this.similarity.setSeeds(this.session.seeds);
    void this.ensureRecords([id]).then(() => this.similarity.setSeeds(this.session.seeds));
    void this.refreshProjection(true);
  }

  private toggleSave(id: number): void {
    if (this.session.isSaved(id)) this.session.unsave(id);
    else this.session.save(id);
    void this.ensureRecords([id]).then(() => this.cart.render(this.session.saved));
    this.table.renderRows();
    void this.refreshProjection(true);
  }

  private async runSearch(req: SimilarityRequest): Promise<void> {
    try {
      const results = await this.api.similarity(req);
      this.session.setResults(results);
      await this.ensureRecords(results.map((r) => r.paper_id));
      this.similarity.setResults(results, this.records);
      await this.refreshProjection(true);
      // bring the seed + output points into view
      const focusIds = [...(req.seed_ids ?? []), ...results.map((r) => r.paper_id)];
      if (focusIds.length) this.canvas.focus(focusIds);
    } catch (error) {
      this.similarity.setError(error instanceof Error ? error.message : String(error));
    }
  }

  private async showTooltip(id: number | null): Promise<void> {
    if (id === null) {
      this.tooltip.textContent = this.selection.size ? `${this.selection.size} points selected` : "";
      return;
    }
    await this.ensureRecords([id]);
    const record = this.records.get(id);
    this.tooltip.textContent = record
      ? `${record.Title} (${record.Source} ${record.Year})`
      : `paper #${id}`;
  }

  private showDetail(record: PaperRecord): void {
    const dialog = this.el("detail-dialog") as HTMLDialogElement;
    this.el("detail-title").textContent = record.Title;
    this.el("detail-meta").textContent =
      `${record.Authors.join(", ")} — ${record.Source} ${record.Year}` +
      (record.CitationCounts !== null ? ` — ${record.CitationCounts} citations` : "");
    this.el("detail-abstract").textContent = record.Abstract;
    this.el("detail-keywords").textContent = record.Keywords.join(", ");
    const link = this.el("detail-link") as HTMLAnchorElement;
    link.href = record.URL;
    dialog.showModal();
  }
}

/** Client-side session state.
 *
 * Only the saved-paper cart persists (browser storage); seeds and search
 * results are per-session and reset on reload. Every piece of rendering
 * state is reconstructible from a snapshot plus API responses.
 */

import { FilterState, emptyFilters } from "./filters.js";
import { ColorMode, SimilarityResult } from "./types.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const SAVED_KEY = "litscout.saved";

export interface SessionSnapshot {
  filter: FilterState;
  seeds: number[];
  results: SimilarityResult[];
  saved: number[];
  colorMode: ColorMode;
}

export class Session {
  filter: FilterState = emptyFilters();
  seeds: number[] = [];
  results: SimilarityResult[] = [];
  saved: number[] = [];
  colorMode: ColorMode = "default";

  constructor(private storage: StorageLike) {
    const stored = storage.getItem(SAVED_KEY);
    if (stored) {
      try {
        const ids = JSON.parse(stored) as number[];
        if (Array.isArray(ids)) this.saved = ids.filter((v) => Number.isInteger(v));
      } catch {
        /* corrupt storage: start with an empty cart */
      }
    }
  }

  private persistSaved(): void {
    this.storage.setItem(SAVED_KEY, JSON.stringify(this.saved));
  }

  isSaved(id: number): boolean {
    return this.saved.includes(id);
  }

  save(id: number): void {
    if (!this.saved.includes(id)) {
      this.saved.push(id);
      this.persistSaved();
    }
  }

  unsave(id: number): void {
    this.saved = this.saved.filter((v) => v !== id);
    this.persistSaved();
  }

  hasSeed(id: number): boolean {
    return this.seeds.includes(id);
  }

  addSeed(id: number): void {
    if (!this.seeds.includes(id)) this.seeds.push(id);
  }

  removeSeed(id: number): void {
    this.seeds = this.seeds.filter((v) => v !== id);
  }

  clearSeeds(): void {
    this.seeds = [];
  }

  /** A new search replaces the previous result set. */
  setResults(results: SimilarityResult[]): void {
    this.results = results;
  }

  resultIds(): number[] {
    return this.results.map((r) => r.paper_id);
  }

  snapshot(): SessionSnapshot {
    return {
      filter: { filters: this.filter.filters.map((f) => ({ ...f })), query: this.filter.query },
      seeds: [...this.seeds],
      results: this.results.map((r) => ({ ...r })),
      saved: [...this.saved],
      colorMode: this.colorMode,
    };
  }

  restore(snapshot: SessionSnapshot): void {
    this.filter = { filters: snapshot.filter.filters.map((f) => ({ ...f })), query: snapshot.filter.query };
    this.seeds = [...snapshot.seeds];
    this.results = snapshot.results.map((r) => ({ ...r }));
    this.saved = [...snapshot.saved];
    this.colorMode = snapshot.colorMode;
    this.persistSaved();
  }
}

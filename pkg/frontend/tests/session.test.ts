/** Session persistence rules: saved survives reload, seeds/results do not. */

import { describe, expect, it } from "vitest";

import { Session, StorageLike } from "../src/session.js";
import { SimilarityResult } from "../src/types.js";

class FakeStorage implements StorageLike {
  private store = new Map<string, string>();
  getItem(key: string): string | null {
    return this.store.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.store.set(key, value);
  }
}

function result(id: number, score: number): SimilarityResult {
  return { paper_id: id, distance: 1 / score - 1, score, title: `t${id}`, source: "S", year: 2020 };
}

describe("session state", () => {
  it("saved cart survives a reload; seeds and results reset", () => {
    const storage = new FakeStorage();
    const first = new Session(storage);
    first.save(3);
    first.save(9);
    first.addSeed(1);
    first.setResults([result(5, 0.5)]);

    const reloaded = new Session(storage); // same storage = same browser
    expect(reloaded.saved).toEqual([3, 9]);
    expect(reloaded.seeds).toEqual([]);
    expect(reloaded.results).toEqual([]);
  });

  it("unsave removes from the persisted cart", () => {
    const storage = new FakeStorage();
    const session = new Session(storage);
    session.save(1);
    session.save(2);
    session.unsave(1);
    expect(new Session(storage).saved).toEqual([2]);
  });

  it("a new search replaces the previous result set", () => {
    const session = new Session(new FakeStorage());
    session.setResults([result(1, 0.9), result(2, 0.8)]);
    session.setResults([result(7, 0.7)]);
    expect(session.resultIds()).toEqual([7]);
  });

  it("seed add/remove is idempotent and ordered", () => {
    const session = new Session(new FakeStorage());
    session.addSeed(4);
    session.addSeed(2);
    session.addSeed(4);
    expect(session.seeds).toEqual([4, 2]);
    session.removeSeed(4);
    expect(session.seeds).toEqual([2]);
  });

  it("snapshot/restore reconstructs all rendering state", () => {
    const storage = new FakeStorage();
    const session = new Session(storage);
    session.filter = {
      filters: [{ kind: "range", column: "year", lo: 2010, hi: 2020 }],
      query: "bias",
    };
    session.addSeed(11);
    session.setResults([result(5, 0.44)]);
    session.save(8);
    session.colorMode = "score";

    const snapshot = session.snapshot();
    const restored = new Session(new FakeStorage());
    restored.restore(snapshot);
    expect(restored.snapshot()).toEqual(snapshot);
  });

  it("tolerates corrupt storage", () => {
    const storage = new FakeStorage();
    storage.setItem("litscout.saved", "{nonsense");
    expect(new Session(storage).saved).toEqual([]);
  });
});

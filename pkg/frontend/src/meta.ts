/** Meta view: ranked keyword/author/source/year summaries for the
 *  current filter, live-updating with the paper collection. */

import { FacetSummary, MetaResponse } from "./types.js";

const TOP_N = 12;

export class MetaView {
  constructor(private root: HTMLElement) {}

  render(meta: MetaResponse): void {
    this.root.innerHTML = "";
    const order: [string, FacetSummary][] = [
      ["Keywords", meta.keywords],
      ["Authors", meta.authors],
      ["Source", meta.source],
      ["Year", meta.year],
    ];
    for (const [label, summary] of order) {
      const block = document.createElement("div");
      block.className = "facet-block";
      const heading = document.createElement("h4");
      heading.textContent = `${label} (${summary.distinct_count})`;
      block.appendChild(heading);
      const list = document.createElement("ol");
      for (const [value, count] of summary.entries.slice(0, TOP_N)) {
        const item = document.createElement("li");
        item.textContent = `${value} — ${count}`;
        list.appendChild(item);
      }
      if (summary.entries.length === 0) {
        const empty = document.createElement("em");
        empty.textContent = "none";
        block.appendChild(empty);
      }
      block.appendChild(list);
      this.root.appendChild(block);
    }
  }
}

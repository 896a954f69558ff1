/** Client-side filter state and its encoding into the API's filter grammar. */

export interface RangeFilter {
  kind: "range";
  column: "year" | "citation_count";
  lo: number | null;
  hi: number | null;
}

export interface ValuesFilter {
  kind: "values";
  column: "source" | "authors" | "keywords";
  values: string[];
}

export type ColumnFilter = RangeFilter | ValuesFilter;

export interface FilterState {
  filters: ColumnFilter[];
  query: string;
}

export function emptyFilters(): FilterState {
  return { filters: [], query: "" };
}

export function isEmpty(state: FilterState): boolean {
  return state.filters.length === 0 && state.query.trim() === "";
}

function encodeFilter(filter: ColumnFilter): string | null {
  if (filter.kind === "range") {
    if (filter.lo === null && filter.hi === null) return null;
    const lo = filter.lo === null ? "" : String(filter.lo);
    const hi = filter.hi === null ? "" : String(filter.hi);
    return `${filter.column}:${lo}..${hi}`;
  }
  if (filter.values.length === 0) return null;
  return `${filter.column}:${filter.values.join("|")}`;
}

/** Query parameters in the server's `filter=column:spec` grammar. */
export function filterParams(state: FilterState): [string, string][] {
  const params: [string, string][] = [];
  for (const filter of state.filters) {
    const encoded = encodeFilter(filter);
    if (encoded !== null) params.push(["filter", encoded]);
  }
  if (state.query.trim() !== "") params.push(["q", state.query.trim()]);
  return params;
}

/** Replace any existing filter on the same column (one filter per column). */
export function setFilter(state: FilterState, filter: ColumnFilter): FilterState {
  const rest = state.filters.filter((f) => f.column !== filter.column);
  const encoded = encodeFilter(filter);
  return { filters: encoded === null ? rest : [...rest, filter], query: state.query };
}

/** The explicit 'x' on a filter chip: dropping it restores the wider result set. */
export function clearFilter(state: FilterState, column: string): FilterState {
  return { filters: state.filters.filter((f) => f.column !== column), query: state.query };
}

export function setQuery(state: FilterState, query: string): FilterState {
  return { filters: state.filters, query };
}

export function describeFilter(filter: ColumnFilter): string {
  if (filter.kind === "range") {
    const lo = filter.lo === null ? "" : String(filter.lo);
    const hi = filter.hi === null ? "" : String(filter.hi);
    return `${filter.column}: ${lo}..${hi}`;
  }
  return `${filter.column}: ${filter.values.join(", ")}`;
}

/** Payload shapes of the REST API (mirrored, not invented). */

export interface PaperRecord {
  ID: number;
  Title: string;
  Authors: string[];
  Source: string;
  Year: number;
  URL: string;
  Abstract: string;
  Keywords: string[];
  CitationCounts: number | null;
}

export interface PapersPage {
  papers: PaperRecord[];
  total: number;
  offset: number;
  limit: number;
}

export interface FacetSummary {
  facet: string;
  entries: [string | number, number][];
  distinct_count: number;
}

export interface MetaResponse {
  keywords: FacetSummary;
  authors: FacetSummary;
  source: FacetSummary;
  year: FacetSummary;
}

export type PointState =
  | "unfiltered"
  | "filtered"
  | "similarity_input"
  | "similarity_output"
  | "saved";

export interface ProjectionPoint {
  paper_id: number;
  x: number;
  y: number;
  state: PointState;
}

export interface SimilarityResult {
  paper_id: number;
  distance: number;
  score: number;
  title: string;
  source: string;
  year: number;
}

export interface SimilarityRequest {
  mode: "by_papers" | "by_text";
  seed_ids?: number[];
  title?: string;
  abstract?: string;
  dims: "planar" | "full";
  method?: string;
  k: number;
}

export interface ExportResponse {
  papers: PaperRecord[];
  rejects: number[];
}

export interface HealthResponse {
  papers: number;
  methods: string[];
  projection: boolean;
}

export type ColorMode = "default" | "source" | "year" | "citations" | "score";

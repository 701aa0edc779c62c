/** Wire format of the analysis service (GET /api/v1/report). */

export interface TierInfo {
  level: 'excellent' | 'good' | 'fair' | 'poor' | 'unknown';
  color: string;
}

export interface BadgeInfo {
  metric_id: string;
  label: string;
  value_text: string;
  tier: TierInfo;
  insight: string;
}

export interface AnalysisReport {
  repo: { source: string; canonical_url: string; display_name: string };
  commit: string;
  source: unknown | null;
  history: unknown | null;
  issues: unknown | null;
  badges: BadgeInfo[];
  diagnostics: string[];
  generated_at: number;
  engine_version: string;
}

export interface PageContext {
  host: string;
  owner: string;
  name: string;
  /** 40-hex commit id scraped from the page, when the page exposes one. */
  headCommit: string | null;
}

export interface ClientCacheEntry {
  commit: string;
  report: AnalysisReport;
  stored_at: number;
}

/** Maintenance-family metric ids, grouped together in the badge strip. */
export const MAINTENANCE_METRICS = new Set([
  'active-authors',
  'commit-impact-files',
  'commit-impact-lines',
  'bug-handling',
]);

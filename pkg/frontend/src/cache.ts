/** Commit-keyed client-side report cache over pluggable storage. */

import type { AnalysisReport, ClientCacheEntry } from './types';

export interface StorageArea {
  get(key: string): Promise<string | null>;
  set(key: string, value: string): Promise<void>;
}

/** chrome.storage.local when running as an extension, else localStorage,
 * else a plain in-memory map (tests, unsupported browsers). */
export function defaultStorage(): StorageArea {
  const chromeApi = (globalThis as any).chrome;
  if (chromeApi?.storage?.local) {
    const area = chromeApi.storage.local;
    return {
      get: (key) => area.get(key).then((found: any) => found?.[key] ?? null),
      set: (key, value) => area.set({ [key]: value }),
    };
  }
  const local = (globalThis as any).localStorage;
  if (local) {
    return {
      get: async (key) => local.getItem(key),
      set: async (key, value) => local.setItem(key, value),
    };
  }
  const memory = new Map<string, string>();
  return {
    get: async (key) => memory.get(key) ?? null,
    set: async (key, value) => void memory.set(key, value),
  };
}

const PREFIX = 'gitq:report:';

export class ClientCache {
  constructor(private readonly storage: StorageArea = defaultStorage()) {}

  /**
   * Cached report for the canonical URL, but only when its commit matches
   * `headCommit`. A null `headCommit` (page did not expose one) is
   * stale-tolerant and accepts whatever commit is stored.
   */
  async lookup(
    canonicalUrl: string,
    headCommit: string | null,
  ): Promise<AnalysisReport | null> {
    const raw = await this.storage.get(PREFIX + canonicalUrl);
    if (raw === null) return null;
    let entry: ClientCacheEntry;
    try {
      entry = JSON.parse(raw);
    } catch {
      return null;
    }
    if (!entry?.report || typeof entry.commit !== 'string') return null;
    if (headCommit !== null && entry.commit !== headCommit) return null;
    return entry.report;
  }

  async store(canonicalUrl: string, report: AnalysisReport): Promise<void> {
    const entry: ClientCacheEntry = {
      commit: report.commit,
      report,
      stored_at: Date.now(),
    };
    await this.storage.set(PREFIX + canonicalUrl, JSON.stringify(entry));
  }
}

/** Content-script entry: detect the page, fetch or reuse the report, inject. */

import { ClientCache, defaultStorage, type StorageArea } from './cache';
import { DEFAULT_BASE_URL, ServiceClient, ServiceUnavailable } from './client';
import { injectBadges, showUnavailableMarker } from './inject';
import { detectRepoPage } from './page';

const OPTIONS_KEY = 'gitq:options:baseUrl';

export async function readBaseUrl(storage: StorageArea): Promise<string> {
  const stored = await storage.get(OPTIONS_KEY);
  return stored && stored.trim() !== '' ? stored.trim() : DEFAULT_BASE_URL;
}

export interface RunDeps {
  storage?: StorageArea;
  fetchFn?: typeof fetch;
  pollIntervalMs?: number;
}

/**
 * One pass over the current document. Inert (and network-silent) on
 * non-repository pages; on failure it leaves only a small marker.
 */
export async function run(doc: Document, deps: RunDeps = {}): Promise<void> {
  const context = detectRepoPage(doc);
  if (context === null) return;
  const storage = deps.storage ?? defaultStorage();
  const client = new ServiceClient(new ClientCache(storage), {
    baseUrl: await readBaseUrl(storage),
    fetchFn: deps.fetchFn,
    pollIntervalMs: deps.pollIntervalMs,
  });
  try {
    const report = await client.fetchOrCache(context);
    injectBadges(doc, context, report);
  } catch (err) {
    if (err instanceof ServiceUnavailable) {
      console.debug('[gitq]', err.message);
      showUnavailableMarker(doc);
      return;
    }
    throw err;
  }
}

// In the browser the script runs once per page load; tests import the
// functions instead.
declare const process: unknown;
if (typeof process === 'undefined' && typeof document !== 'undefined') {
  void run(document);
}

export { OPTIONS_KEY };

/** Shared test scaffolding: fixture documents, stub service, stub storage. */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { Window } from 'happy-dom';

import type { StorageArea } from '../src/cache';
import type { AnalysisReport, BadgeInfo } from '../src/types';

const here = dirname(fileURLToPath(import.meta.url));

export const FIXTURE_COMMIT = '3f1f19fea5ec6d1bdc621b02e2d2f1fb27a384c7';

export function repoPageDocument(
  url = 'https://github.com/ReactiveX/RxJava',
): Document {
  const html = readFileSync(join(here, 'fixtures', 'repo-page.html'), 'utf-8');
  const window = new Window({ url });
  window.document.write(html);
  return window.document as unknown as Document;
}

export function plainDocument(url: string, body = '<main></main>'): Document {
  const window = new Window({ url });
  window.document.write(`<!doctype html><html><body>${body}</body></html>`);
  return window.document as unknown as Document;
}

export function badge(metric_id: string, overrides: Partial<BadgeInfo> = {}): BadgeInfo {
  return {
    metric_id,
    label: metric_id.replace(/-/g, ' '),
    value_text: '42',
    tier: { level: 'good', color: '#97ca00' },
    insight: `insight for ${metric_id}`,
    ...overrides,
  };
}

export function sampleReport(
  commit = FIXTURE_COMMIT,
  badges: BadgeInfo[] | null = null,
): AnalysisReport {
  return {
    repo: {
      source: 'https://github.com/ReactiveX/RxJava',
      canonical_url: 'https://github.com/reactivex/rxjava',
      display_name: 'ReactiveX/RxJava',
    },
    commit,
    source: {},
    history: {},
    issues: null,
    badges: badges ?? [
      badge('active-authors', {
        value_text: '8%',
        tier: { level: 'poor', color: '#e05d44' },
        insight: 'Less than 10% of authors remain active in the last 90 days',
      }),
      badge('commit-impact-files'),
      badge('commit-impact-lines'),
      badge('bug-handling', {
        tier: { level: 'unknown', color: '#9f9f9f' },
        value_text: 'n/a',
        insight: 'No issue data available',
      }),
      badge('packages', { value_text: '2' }),
      badge('wmc-median', { value_text: '1.0' }),
    ],
    diagnostics: [],
    generated_at: 1700000000,
    engine_version: '0.1.0',
  };
}

export class MemoryStorage implements StorageArea {
  readonly map = new Map<string, string>();

  async get(key: string): Promise<string | null> {
    return this.map.get(key) ?? null;
  }

  async set(key: string, value: string): Promise<void> {
    this.map.set(key, value);
  }
}

export interface StubCall {
  url: string;
  method: string;
  body: unknown;
}

/** Fake service: answers analyze with pending N times, then done; serves
 * the supplied report. Counts every request. */
export function stubService(
  report: AnalysisReport,
  options: { pendingResponses?: number; failAll?: boolean } = {},
) {
  const calls: StubCall[] = [];
  let pendingLeft = options.pendingResponses ?? 0;
  const fetchFn = (async (input: any, init?: any) => {
    const url = String(input);
    const method = init?.method ?? 'GET';
    calls.push({ url, method, body: init?.body ? JSON.parse(init.body) : null });
    if (options.failAll) throw new TypeError('fetch failed');
    if (url.includes('/api/v1/analyze')) {
      if (pendingLeft > 0) {
        pendingLeft -= 1;
        return jsonResponse({ status: 'pending' }, 202);
      }
      return jsonResponse({ status: 'done', commit: report.commit }, 200);
    }
    if (url.includes('/api/v1/report')) {
      return jsonResponse(report, 200);
    }
    return jsonResponse({ code: 'not_found', message: 'nope', retryable: false }, 404);
  }) as typeof fetch;
  return { fetchFn, calls };
}

function jsonResponse(body: unknown, status: number) {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as Response;
}

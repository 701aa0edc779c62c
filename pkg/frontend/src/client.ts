/** Talk to the analysis service: request, poll while pending, cache by commit. */

import { ClientCache } from './cache';
import { canonicalUrl, repoUrl } from './page';
import type { AnalysisReport, PageContext } from './types';

export const DEFAULT_BASE_URL = 'http://127.0.0.1:8490';

export class ServiceUnavailable extends Error {}

export interface ClientOptions {
  baseUrl?: string;
  fetchFn?: typeof fetch;
  /** Delay between polls of a pending analysis, in ms. */
  pollIntervalMs?: number;
  /** Maximum polls before giving up on a pending analysis. */
  maxPolls?: number;
  sleepFn?: (ms: number) => Promise<void>;
}

const sleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ServiceClient {
  private readonly baseUrl: string;
  private readonly fetchFn: typeof fetch;
  private readonly pollIntervalMs: number;
  private readonly maxPolls: number;
  private readonly sleepFn: (ms: number) => Promise<void>;

  constructor(
    private readonly cache: ClientCache = new ClientCache(),
    options: ClientOptions = {},
  ) {
    this.baseUrl = (options.baseUrl ?? DEFAULT_BASE_URL).replace(/\/+$/, '');
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.pollIntervalMs = options.pollIntervalMs ?? 1500;
    this.maxPolls = options.maxPolls ?? 40;
    this.sleepFn = options.sleepFn ?? sleep;
  }

  /**
   * Report for the page's repository. A cache entry matching the page's
   * head commit is served without any network traffic; otherwise the
   * analysis is requested, polled while pending, and stored on success.
   */
  async fetchOrCache(context: PageContext): Promise<AnalysisReport> {
    const key = canonicalUrl(context);
    const cached = await this.cache.lookup(key, context.headCommit);
    if (cached !== null) return cached;
    const commit = await this.requestAnalysis(repoUrl(context));
    const report = await this.fetchReport(repoUrl(context), commit);
    await this.cache.store(key, report);
    return report;
  }

  private async requestAnalysis(url: string): Promise<string> {
    for (let attempt = 0; ; attempt++) {
      let resp: Response;
      try {
        resp = await this.fetchFn(`${this.baseUrl}/api/v1/analyze`, {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ repo_url: url }),
        });
      } catch (err) {
        throw new ServiceUnavailable(`analysis service unreachable: ${err}`);
      }
      if (resp.status === 202) {
        if (attempt >= this.maxPolls) {
          throw new ServiceUnavailable('analysis still pending after polling');
        }
        await this.sleepFn(this.pollIntervalMs);
        continue;
      }
      if (!resp.ok) {
        throw new ServiceUnavailable(`analysis request failed (${resp.status})`);
      }
      const body = await resp.json();
      if (body.status !== 'done' || typeof body.commit !== 'string') {
        throw new ServiceUnavailable('unexpected analysis response');
      }
      return body.commit;
    }
  }

  private async fetchReport(url: string, commit: string): Promise<AnalysisReport> {
    const query = new URLSearchParams({ url, commit });
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}/api/v1/report?${query}`);
    } catch (err) {
      throw new ServiceUnavailable(`analysis service unreachable: ${err}`);
    }
    if (!resp.ok) {
      throw new ServiceUnavailable(`report request failed (${resp.status})`);
    }
    return (await resp.json()) as AnalysisReport;
  }
}

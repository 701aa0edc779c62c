/** Repository-page detection and head-commit scraping. */

import type { PageContext } from './types';

const SHA40 = /\b[0-9a-f]{40}\b/;

// First path segments that are site sections, not user/organization names.
const RESERVED = new Set([
  'about',
  'explore',
  'features',
  'issues',
  'join',
  'login',
  'marketplace',
  'notifications',
  'orgs',
  'pricing',
  'pulls',
  'search',
  'settings',
  'sponsors',
  'topics',
  'trending',
]);

/**
 * Returns a context on repository root pages only; null anywhere else
 * (profiles, search, issue lists, sub-pages), which keeps the extension
 * inert there.
 */
export function detectRepoPage(doc: Document): PageContext | null {
  const loc = doc.location;
  if (!loc) return null;
  const segments = loc.pathname.split('/').filter((s) => s.length > 0);
  if (segments.length !== 2) return null;
  const [owner, name] = segments;
  if (RESERVED.has(owner.toLowerCase())) return null;
  return {
    host: loc.hostname,
    owner,
    name,
    headCommit: scrapeHeadCommit(doc, owner, name),
  };
}

/** Latest-commit id from the page DOM, when the page exposes one. */
export function scrapeHeadCommit(
  doc: Document,
  owner: string,
  name: string,
): string | null {
  const anchors = Array.from(doc.querySelectorAll<HTMLAnchorElement>('a[href*="/commit/"]'));
  const ownPrefix = `/${owner}/${name}/commit/`.toLowerCase();
  const own = anchors.find((a) =>
    (a.getAttribute('href') ?? '').toLowerCase().includes(ownPrefix),
  );
  for (const anchor of own ? [own, ...anchors] : anchors) {
    const match = SHA40.exec((anchor.getAttribute('href') ?? '').toLowerCase());
    if (match) return match[0];
  }
  return null;
}

/** Cache key shared with the service: lowercase scheme://host/owner/name. */
export function canonicalUrl(context: PageContext): string {
  return `https://${context.host}/${context.owner}/${context.name}`.toLowerCase();
}

/** The URL sent to the analysis service. */
export function repoUrl(context: PageContext): string {
  return `https://${context.host}/${context.owner}/${context.name}`;
}

/** Badge strip injection. All page mutation stays inside one container. */

import { MAINTENANCE_METRICS, type AnalysisReport, type BadgeInfo, type PageContext } from './types';

export const CONTAINER_ID = 'gitq-badges';
export const UNAVAILABLE_ID = 'gitq-unavailable';

// Anchor candidates for the repository header, most specific first.
const HEADER_SELECTORS = [
  '#repository-container-header',
  '[data-testid="repo-header"]',
  '#repo-title-component',
  'main',
];

const LABEL_BG = '#555';
const TEXT_STYLE =
  'fill="#fff" font-family="Verdana,Geneva,DejaVu Sans,sans-serif" font-size="11"';

/** Approximate text width at font-size 11; only needs to be stable. */
function textWidth(text: string): number {
  let tenths = 0;
  for (const ch of text) {
    if ('iíìl!|.,:;\''.includes(ch)) tenths += 32;
    else if ('jft/\\()[]{} '.includes(ch)) tenths += 45;
    else if ('mwMW%@&#~'.includes(ch)) tenths += 103;
    else if (ch >= 'A' && ch <= 'Z') tenths += 80;
    else tenths += 69;
  }
  return Math.ceil(tenths / 10);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Two-segment badge SVG built locally from report data: rendering a badge
 * never makes a network request. */
export function badgeSvg(badge: BadgeInfo): string {
  const left = textWidth(badge.label) + 10;
  const right = textWidth(badge.value_text) + 10;
  const total = left + right;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${total}" height="20" role="img" ` +
    `aria-label="${escapeXml(`${badge.label}: ${badge.value_text}`)}">` +
    `<title>${escapeXml(badge.insight)}</title>` +
    `<rect width="${left}" height="20" fill="${LABEL_BG}"/>` +
    `<rect x="${left}" width="${right}" height="20" fill="${badge.tier.color}"/>` +
    `<text x="${Math.floor(left / 2)}" y="14" text-anchor="middle" ${TEXT_STYLE}>` +
    `${escapeXml(badge.label)}</text>` +
    `<text x="${left + Math.floor(right / 2)}" y="14" text-anchor="middle" ${TEXT_STYLE}>` +
    `${escapeXml(badge.value_text)}</text>` +
    `</svg>`
  );
}

function badgeElement(doc: Document, badge: BadgeInfo): HTMLElement {
  const wrap = doc.createElement('span');
  wrap.className = 'gitq-badge';
  wrap.dataset.metricId = badge.metric_id;
  wrap.title = badge.insight; // hover reveals the insight sentence
  wrap.style.display = 'inline-block';
  wrap.style.margin = '2px 4px 2px 0';
  wrap.innerHTML = badgeSvg(badge);
  return wrap;
}

/**
 * Inserts (or refreshes) the badge strip under the repository header.
 * Re-injection is idempotent: the container is keyed by a stable id and
 * there is never more than one. When no header anchor exists, the strip
 * is prepended to the body with a degraded-layout marker.
 */
export function injectBadges(
  doc: Document,
  _context: PageContext,
  report: AnalysisReport,
): HTMLElement {
  let container = doc.getElementById(CONTAINER_ID) as HTMLElement | null;
  if (container === null) {
    container = doc.createElement('div');
    container.id = CONTAINER_ID;
    const anchor = HEADER_SELECTORS.map((sel) => doc.querySelector(sel)).find(
      (el) => el !== null,
    );
    if (anchor) {
      anchor.appendChild(container);
    } else {
      container.dataset.degradedLayout = 'true';
      doc.body.insertBefore(container, doc.body.firstChild);
    }
  }
  container.textContent = ''; // refresh in place on re-render
  const source = doc.createElement('span');
  source.className = 'gitq-source-badges';
  const maintenance = doc.createElement('span');
  maintenance.className = 'gitq-maintenance-badges';
  for (const badge of report.badges) {
    const group = MAINTENANCE_METRICS.has(badge.metric_id) ? maintenance : source;
    group.appendChild(badgeElement(doc, badge));
  }
  if (source.childNodes.length > 0) container.appendChild(source);
  if (maintenance.childNodes.length > 0) container.appendChild(maintenance);
  return container;
}

/** Small, unobtrusive marker shown when the service cannot be reached. */
export function showUnavailableMarker(doc: Document): void {
  if (doc.getElementById(UNAVAILABLE_ID)) return;
  const marker = doc.createElement('div');
  marker.id = UNAVAILABLE_ID;
  marker.textContent = 'analysis unavailable';
  marker.style.cssText = 'color:#888;font-size:11px;margin:2px 0;';
  const anchor = HEADER_SELECTORS.map((sel) => doc.querySelector(sel)).find(
    (el) => el !== null,
  );
  (anchor ?? doc.body).appendChild(marker);
}

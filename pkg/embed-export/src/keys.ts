/**
 * Archive key derivation. Must stay byte-identical to the core's rule; the
 * shared golden file (tests/data/key_derivation_golden.tsv in the repo root)
 * is checked by both components.
 *
 *   text key    = "text:" + sha1(normalizeText(s) as UTF-8) hex
 *   visual keys = "visual:<ref>#<index>" plus "visual:<ref>#count"
 *
 * normalizeText: Unicode NFC, collapse whitespace runs (explicit codepoint
 * table, same on both sides) to one space, trim, simple lowercase.
 */

import { createHash } from 'node:crypto';

// Shared whitespace contract, inclusive codepoint ranges.
const WS_RANGES: Array<[number, number]> = [
  [0x09, 0x0d],
  [0x1c, 0x1f],
  [0x20, 0x20],
  [0x85, 0x85],
  [0xa0, 0xa0],
  [0x1680, 0x1680],
  [0x2000, 0x200a],
  [0x2028, 0x2029],
  [0x202f, 0x202f],
  [0x205f, 0x205f],
  [0x3000, 0x3000],
  [0xfeff, 0xfeff],
];

const esc = (cp: number) => '\\u' + cp.toString(16).padStart(4, '0');
const WS = new RegExp(
  '[' + WS_RANGES.map(([a, b]) => (a === b ? esc(a) : `${esc(a)}-${esc(b)}`)).join('') + ']+',
  'g',
);

export function normalizeText(text: string): string {
  const collapsed = text.normalize('NFC').replace(WS, ' ');
  return collapsed.replace(/^ +| +$/g, '').toLowerCase();
}

export function textKey(text: string): string {
  const digest = createHash('sha1').update(normalizeText(text), 'utf8').digest('hex');
  return `text:${digest}`;
}

export function visualTokenKey(featureRef: string, index: number): string {
  return `visual:${featureRef}#${index}`;
}

export function visualCountKey(featureRef: string): string {
  return `visual:${featureRef}#count`;
}

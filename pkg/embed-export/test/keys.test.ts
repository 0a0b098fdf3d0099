import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { normalizeText, textKey, visualCountKey, visualTokenKey } from '../src/keys.js';

const here = dirname(fileURLToPath(import.meta.url));
// shared with the core component; both sides must pass against the same file
const GOLDEN = join(here, '..', '..', 'tests', 'data', 'key_derivation_golden.tsv');

function unescape(s: string): string {
  let out = '';
  for (let i = 0; i < s.length; i++) {
    if (s[i] === '\\' && i + 1 < s.length) {
      const next = s[i + 1];
      out += next === 'n' ? '\n' : next === 't' ? '\t' : next;
      i += 1;
    } else {
      out += s[i];
    }
  }
  return out;
}

describe('key derivation', () => {
  it('matches the shared golden file', () => {
    const lines = readFileSync(GOLDEN, 'utf8')
      .split('\n')
      .filter((l) => l && !l.startsWith('#'));
    expect(lines.length).toBeGreaterThanOrEqual(10);
    for (const line of lines) {
      const [raw, expected] = line.split('\t');
      expect(textKey(unescape(raw))).toBe(expected);
    }
  });

  it('normalizes whitespace, case, and NFC', () => {
    expect(normalizeText('  Hello\t WORLD \n')).toBe('hello world');
    expect(normalizeText('Café')).toBe(normalizeText('Café'));
  });

  it('derives visual keys with the count companion', () => {
    expect(visualTokenKey('vis-1', 3)).toBe('visual:vis-1#3');
    expect(visualCountKey('vis-1')).toBe('visual:vis-1#count');
  });
});

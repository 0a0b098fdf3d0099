/**
 * Reader for the core's line-oriented sample manifest:
 *   header "#v1 taxonomy=<hash>", then per line
 *   id|modality|visual_ref|ocr_text|title|body|labels
 * with backslash escaping for \\ | and newlines.
 */

import { readFileSync } from 'node:fs';

export interface SampleRecord {
  id: string;
  modality: 'image' | 'text';
  visualRef: string | null;
  ocrText: string | null;
  title: string | null;
  body: string | null;
  labels: string[];
}

export interface Manifest {
  taxonomyHash: string;
  samples: SampleRecord[];
}

function splitFields(line: string): string[] {
  const fields: string[] = [];
  let current = '';
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (ch === '\\' && i + 1 < line.length) {
      current += ch + line[i + 1];
      i += 1;
    } else if (ch === '|') {
      fields.push(current);
      current = '';
    } else {
      current += ch;
    }
  }
  fields.push(current);
  return fields;
}

function unescape(field: string): string {
  let out = '';
  for (let i = 0; i < field.length; i++) {
    if (field[i] === '\\' && i + 1 < field.length) {
      const next = field[i + 1];
      out += next === 'n' ? '\n' : next === 'r' ? '\r' : next;
      i += 1;
    } else {
      out += field[i];
    }
  }
  return out;
}

export function parseManifest(text: string): Manifest {
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length === 0 || !lines[0].startsWith('#v')) {
    throw new Error('missing manifest header line');
  }
  const header = lines[0].slice(1).split(' ');
  const taxonomyEntry = header.find((p) => p.startsWith('taxonomy='));
  if (header[0] !== 'v1' || !taxonomyEntry) {
    throw new Error(`malformed manifest header: ${lines[0]}`);
  }
  const samples: SampleRecord[] = [];
  for (const line of lines.slice(1)) {
    const parts = splitFields(line).map(unescape);
    if (parts.length !== 7) {
      throw new Error(`expected 7 fields, got ${parts.length}: ${line}`);
    }
    const [id, modality, visualRef, ocrText, title, body, labels] = parts;
    if (modality !== 'image' && modality !== 'text') {
      throw new Error(`unknown modality ${modality} for sample ${id}`);
    }
    samples.push({
      id,
      modality,
      visualRef: visualRef || null,
      ocrText: ocrText || null,
      title: title || null,
      body: body || null,
      labels: labels.split(',').filter((l) => l.length > 0),
    });
  }
  return { taxonomyHash: taxonomyEntry.slice('taxonomy='.length), samples };
}

export function loadManifest(path: string): Manifest {
  return parseManifest(readFileSync(path, 'utf8'));
}

/** Registry file: one open tag per line, "<id>\t<display name>\t<origin>". */
export function loadRegistry(path: string): Array<{ id: string; displayName: string }> {
  const out: Array<{ id: string; displayName: string }> = [];
  for (const line of readFileSync(path, 'utf8').split('\n')) {
    if (!line.trim()) continue;
    const parts = line.split('\t');
    if (parts.length !== 3) throw new Error(`malformed registry line: ${line}`);
    out.push({ id: parts[0], displayName: parts[1] });
  }
  return out;
}

/**
 * The export job: walk a manifest, embed every string the tagging core can
 * request, and write one archive.
 *
 * Covered keys, per sample:
 *   - every alphanumeric token of every text field (a superset of whatever
 *     keyword ranking the core applies, so top-k choices never miss)
 *   - the raw concatenated text (the core's fallback token when keyword
 *     extraction yields nothing)
 *   - the visual token series + "#count" companion for image samples
 * plus, once per run, both label-text variants (name, "name: definition") for
 * the six predefined tags and every registry open tag.
 */

import { writeArchive } from './archive.js';
import { loadTextEncoder, loadVisionEncoder, type EncoderOptions } from './encoders.js';
import { normalizeText, textKey, visualCountKey, visualTokenKey } from './keys.js';
import { loadManifest, loadRegistry, type Manifest } from './manifest.js';
import { labelTexts, PREDEFINED_TAGS } from './taxonomy.js';

export interface ExportJob {
  manifestPath: string;
  outPath: string;
  registryPath: string | null;
  textModel: string;
  visionModel: string;
  dim: number;
  seed: number;
  normalize: boolean;
  visualTokens: number;
  batchSize: number;
}

export const DEFAULT_JOB: Omit<ExportJob, 'manifestPath' | 'outPath'> = {
  registryPath: null,
  textModel: 'hash',
  visionModel: 'hash',
  dim: 64,
  seed: 0,
  normalize: true,
  visualTokens: 8,
  batchSize: 32,
};

const TOKEN_PATTERN = /[\p{L}\p{M}\p{N}]+/gu;

export function requestableTexts(manifest: Manifest, openTagNames: string[]): string[] {
  const texts = new Map<string, string>(); // key -> representative text
  const add = (text: string) => {
    if (!normalizeText(text)) return;
    const key = textKey(text);
    if (!texts.has(key)) texts.set(key, text);
  };

  for (const tag of PREDEFINED_TAGS) {
    for (const text of labelTexts(tag.displayName, tag.definition)) add(text);
  }
  for (const name of openTagNames) {
    for (const text of labelTexts(name, null)) add(text);
  }
  for (const sample of manifest.samples) {
    const fields = [sample.ocrText, sample.title, sample.body].filter((f): f is string => !!f);
    for (const field of fields) {
      for (const token of normalizeText(field).match(TOKEN_PATTERN) ?? []) {
        if (token.length >= 2) add(token);
      }
    }
    const raw = fields.join(' ').trim();
    if (raw) add(raw);
  }
  return [...texts.values()];
}

export interface ExportStats {
  textEntries: number;
  visualSeries: number;
  totalEntries: number;
}

export async function runExport(job: ExportJob, log: (line: string) => void = () => {}): Promise<ExportStats> {
  const manifest = loadManifest(job.manifestPath);
  const openTagNames = job.registryPath ? loadRegistry(job.registryPath).map((t) => t.displayName) : [];
  const options: EncoderOptions = {
    dim: job.dim,
    seed: job.seed,
    normalize: job.normalize,
    visualTokens: job.visualTokens,
  };
  const textEncoder = await loadTextEncoder(job.textModel, options);
  const visionEncoder = await loadVisionEncoder(job.visionModel, options);
  if (textEncoder.dim !== visionEncoder.dim) {
    throw new Error(
      `archive holds one dim: text encoder emits ${textEncoder.dim}, vision encoder ${visionEncoder.dim}`,
    );
  }

  const entries = new Map<string, Float32Array>();
  const texts = requestableTexts(manifest, openTagNames);
  for (let start = 0; start < texts.length; start += job.batchSize) {
    const batch = texts.slice(start, start + job.batchSize);
    const vectors = await Promise.all(batch.map((t) => textEncoder.embed(t)));
    batch.forEach((text, i) => entries.set(textKey(text), vectors[i]));
    log(`text ${Math.min(start + job.batchSize, texts.length)}/${texts.length}`);
  }

  let visualSeries = 0;
  const seenRefs = new Set<string>();
  for (const sample of manifest.samples) {
    if (sample.modality !== 'image' || !sample.visualRef || seenRefs.has(sample.visualRef)) continue;
    seenRefs.add(sample.visualRef);
    const tokens = await visionEncoder.embedTokens(sample.visualRef);
    tokens.forEach((vec, i) => entries.set(visualTokenKey(sample.visualRef!, i), vec));
    const count = new Float32Array(job.dim);
    count[0] = tokens.length;
    entries.set(visualCountKey(sample.visualRef), count);
    visualSeries += 1;
  }
  log(`visual series: ${visualSeries}`);

  writeArchive(job.outPath, job.dim, entries);
  return { textEntries: texts.length, visualSeries, totalEntries: entries.size };
}

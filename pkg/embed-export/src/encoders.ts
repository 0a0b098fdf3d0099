/**
 * Encoder backends behind one interface.
 *
 * The built-in "hash" backend is fully offline and deterministic: per-word
 * unit vectors derived from SHA-256, summed bag-of-words style and
 * L2-normalized, mirroring how a real text encoder keeps related texts close.
 * Real pretrained encoders (e.g. a transformers.js feature-extraction
 * pipeline) plug in through the same interface; see loadEncoder below for the
 * model-id convention.
 */

import { createHash } from 'node:crypto';

import { normalizeText } from './keys.js';

export interface TextEncoder {
  readonly dim: number;
  embed(text: string): Promise<Float32Array>;
}

export interface VisionEncoder {
  readonly dim: number;
  readonly tokensPerImage: number;
  embedTokens(featureRef: string): Promise<Float32Array[]>;
}

/** Deterministic unit vector for an arbitrary seed string. */
function hashVector(seed: string, dim: number): Float64Array {
  const out = new Float64Array(dim);
  let counter = 0;
  let filled = 0;
  while (filled < dim) {
    const digest = createHash('sha256').update(`${seed}|${counter}`).digest();
    for (let i = 0; i + 8 <= digest.length && filled < dim; i += 8) {
      // Box-Muller over two 32-bit uniforms keeps entries roughly gaussian
      const u1 = (digest.readUInt32LE(i) + 1) / 4294967297;
      const u2 = (digest.readUInt32LE(i + 4) + 1) / 4294967297;
      out[filled] = Math.sqrt(-2 * Math.log(u1)) * Math.cos(2 * Math.PI * u2);
      filled += 1;
    }
    counter += 1;
  }
  let norm = 0;
  for (const v of out) norm += v * v;
  norm = Math.sqrt(norm);
  for (let i = 0; i < dim; i++) out[i] /= norm;
  return out;
}

export class HashTextEncoder implements TextEncoder {
  constructor(
    readonly dim: number,
    private readonly seed: number,
    private readonly normalize: boolean,
  ) {}

  async embed(text: string): Promise<Float32Array> {
    const normalized = normalizeText(text);
    const words = normalized.match(/[\p{L}\p{M}\p{N}]+/gu) ?? [normalized];
    const acc = new Float64Array(this.dim);
    for (const word of words) {
      const wv = hashVector(`${this.seed}|word|${word}`, this.dim);
      for (let i = 0; i < this.dim; i++) acc[i] += wv[i];
    }
    if (this.normalize) {
      let norm = 0;
      for (const v of acc) norm += v * v;
      norm = Math.sqrt(norm) || 1;
      for (let i = 0; i < this.dim; i++) acc[i] /= norm;
    }
    return Float32Array.from(acc);
  }
}

export class HashVisionEncoder implements VisionEncoder {
  constructor(
    readonly dim: number,
    readonly tokensPerImage: number,
    private readonly seed: number,
  ) {}

  async embedTokens(featureRef: string): Promise<Float32Array[]> {
    const tokens: Float32Array[] = [];
    for (let i = 0; i < this.tokensPerImage; i++) {
      tokens.push(Float32Array.from(hashVector(`${this.seed}|visual|${featureRef}|${i}`, this.dim)));
    }
    return tokens;
  }
}

export interface EncoderOptions {
  dim: number;
  seed: number;
  normalize: boolean;
  visualTokens: number;
}

/**
 * Model-id convention: "hash" selects the built-in offline backend. Anything
 * else is treated as a transformers.js-style model id and loaded dynamically;
 * this keeps heavyweight runtimes out of the default install.
 */
export async function loadTextEncoder(modelId: string, opts: EncoderOptions): Promise<TextEncoder> {
  if (modelId === 'hash') {
    return new HashTextEncoder(opts.dim, opts.seed, opts.normalize);
  }
  return loadPipelineTextEncoder(modelId, opts);
}

export async function loadVisionEncoder(modelId: string, opts: EncoderOptions): Promise<VisionEncoder> {
  if (modelId === 'hash') {
    return new HashVisionEncoder(opts.dim, opts.visualTokens, opts.seed);
  }
  throw new Error(
    `vision model ${modelId}: only the built-in "hash" backend ships with this tool; ` +
      'plug a real backbone in through the VisionEncoder interface',
  );
}

async function loadPipelineTextEncoder(modelId: string, opts: EncoderOptions): Promise<TextEncoder> {
  let pipelineFactory: (task: string, model: string) => Promise<any>;
  try {
    const mod = (await import('@huggingface/transformers' as string)) as any;
    pipelineFactory = mod.pipeline;
  } catch {
    throw new Error(
      `text model ${modelId}: @huggingface/transformers is not installed; ` +
        'install it or use the built-in "hash" backend',
    );
  }
  const extractor = await pipelineFactory('feature-extraction', modelId);
  return {
    dim: opts.dim,
    async embed(text: string): Promise<Float32Array> {
      const output = await extractor(text, { pooling: 'mean', normalize: opts.normalize });
      const values = Float32Array.from(output.data as Iterable<number>);
      if (values.length !== opts.dim) {
        throw new Error(`model ${modelId} emits dim ${values.length}, expected ${opts.dim}`);
      }
      return values;
    },
  };
}

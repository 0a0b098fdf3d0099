#!/usr/bin/env node
/**
 * embed-export: precompute frozen encoder outputs for a sample manifest.
 *
 *   embed-export --manifest data.manifest --out features.bin \
 *     [--registry registry.tsv] [--text-model hash] [--vision-model hash] \
 *     [--dim 64] [--seed 0] [--visual-tokens 8] [--batch-size 32] [--no-normalize]
 */

import { DEFAULT_JOB, runExport, type ExportJob } from './export.js';

function parseArgs(argv: string[]): ExportJob {
  const values = new Map<string, string>();
  const flags = new Set<string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith('--')) throw new Error(`unexpected argument ${arg}`);
    const name = arg.slice(2);
    if (name === 'no-normalize' || name === 'help') {
      flags.add(name);
    } else {
      const value = argv[++i];
      if (value === undefined) throw new Error(`flag --${name} needs a value`);
      values.set(name, value);
    }
  }
  if (flags.has('help')) {
    console.log(
      'usage: embed-export --manifest PATH --out PATH [--registry PATH] ' +
        '[--text-model ID] [--vision-model ID] [--dim N] [--seed N] ' +
        '[--visual-tokens N] [--batch-size N] [--no-normalize]',
    );
    process.exit(0);
  }
  const manifestPath = values.get('manifest');
  const outPath = values.get('out');
  if (!manifestPath || !outPath) throw new Error('--manifest and --out are required');
  const num = (name: string, fallback: number) => {
    const raw = values.get(name);
    if (raw === undefined) return fallback;
    const parsed = Number(raw);
    if (!Number.isFinite(parsed)) throw new Error(`--${name}: cannot parse ${raw}`);
    return parsed;
  };
  return {
    manifestPath,
    outPath,
    registryPath: values.get('registry') ?? DEFAULT_JOB.registryPath,
    textModel: values.get('text-model') ?? DEFAULT_JOB.textModel,
    visionModel: values.get('vision-model') ?? DEFAULT_JOB.visionModel,
    dim: num('dim', DEFAULT_JOB.dim),
    seed: num('seed', DEFAULT_JOB.seed),
    normalize: !flags.has('no-normalize'),
    visualTokens: num('visual-tokens', DEFAULT_JOB.visualTokens),
    batchSize: num('batch-size', DEFAULT_JOB.batchSize),
  };
}

async function main(): Promise<void> {
  try {
    const job = parseArgs(process.argv.slice(2));
    const stats = await runExport(job, (line) => console.error(line));
    console.log(`wrote ${job.outPath}: ${stats.totalEntries} entries (${stats.textEntries} texts, ${stats.visualSeries} visual series)`);
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}

void main();

/**
 * Binary embedding archive, matching the core's loader bit for bit.
 *
 * Little-endian layout:
 *   magic   8 bytes "OTTREMB1"
 *   version u32 (1)
 *   dim     u32
 *   count   u64
 *   entries: [u32 key length][UTF-8 key][dim * f32]
 */

import { mkdirSync, renameSync, writeFileSync, readFileSync } from 'node:fs';
import { dirname } from 'node:path';

export const MAGIC = 'OTTREMB1';
export const VERSION = 1;

export function encodeArchive(dim: number, entries: Map<string, Float32Array>): Buffer {
  if (dim <= 0) throw new Error(`archive dim must be positive, got ${dim}`);
  const parts: Buffer[] = [];
  const header = Buffer.alloc(8 + 4 + 4 + 8);
  header.write(MAGIC, 0, 'ascii');
  header.writeUInt32LE(VERSION, 8);
  header.writeUInt32LE(dim, 12);
  header.writeBigUInt64LE(BigInt(entries.size), 16);
  parts.push(header);
  for (const [key, values] of entries) {
    if (values.length !== dim) {
      throw new Error(`entry ${key} has ${values.length} values, archive dim is ${dim}`);
    }
    const keyBytes = Buffer.from(key, 'utf8');
    const lenBuf = Buffer.alloc(4);
    lenBuf.writeUInt32LE(keyBytes.length, 0);
    parts.push(lenBuf, keyBytes, Buffer.from(values.buffer.slice(values.byteOffset, values.byteOffset + values.byteLength)));
  }
  return Buffer.concat(parts);
}

/** Write atomically: temp file in the same directory, then rename. */
export function writeArchive(path: string, dim: number, entries: Map<string, Float32Array>): void {
  mkdirSync(dirname(path), { recursive: true });
  const tmp = `${path}.tmp-${process.pid}`;
  writeFileSync(tmp, encodeArchive(dim, entries));
  renameSync(tmp, path);
}

export interface ArchiveContents {
  version: number;
  dim: number;
  entries: Map<string, Float32Array>;
}

export function readArchive(path: string): ArchiveContents {
  const blob = readFileSync(path);
  if (blob.length < 24) throw new Error('archive shorter than its header');
  if (blob.toString('ascii', 0, 8) !== MAGIC) throw new Error('bad archive magic');
  const version = blob.readUInt32LE(8);
  if (version !== VERSION) throw new Error(`unsupported archive version ${version}`);
  const dim = blob.readUInt32LE(12);
  const count = Number(blob.readBigUInt64LE(16));
  const entries = new Map<string, Float32Array>();
  let offset = 24;
  for (let i = 0; i < count; i++) {
    if (offset + 4 > blob.length) throw new Error(`truncated archive at byte ${offset}`);
    const keyLen = blob.readUInt32LE(offset);
    offset += 4;
    if (offset + keyLen + 4 * dim > blob.length) throw new Error(`truncated archive at byte ${offset}`);
    const key = blob.toString('utf8', offset, offset + keyLen);
    offset += keyLen;
    const values = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      values[j] = blob.readFloatLE(offset + 4 * j);
    }
    offset += 4 * dim;
    entries.set(key, values);
  }
  if (offset !== blob.length) throw new Error(`${blob.length - offset} trailing bytes`);
  return { version, dim, entries };
}

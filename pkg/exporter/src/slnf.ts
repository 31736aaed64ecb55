/** Writer for the "SLNF" feature container consumed by the training
 * pipeline.
 *
 * Layout (all little-endian): magic "SLNF", u16 version (1), u16 tensor
 * count, then per tensor a u16-length-prefixed UTF-8 name, u8 rank,
 * u32 dims, raw float32 payload; the file closes with a CRC32 (zlib
 * polynomial) of every preceding byte.
 */

import { promises as fs } from "node:fs";
import * as path from "node:path";
import { crc32 } from "node:zlib";

export const SLNF_MAGIC = "SLNF";
export const SLNF_VERSION = 1;

export interface Tensor {
  name: string;
  dims: number[];
  data: Float32Array;
}

function tensorBytes(t: Tensor): Buffer {
  const size = t.dims.reduce((a, b) => a * b, 1);
  if (size !== t.data.length) {
    throw new Error(
      `tensor ${t.name}: dims [${t.dims}] imply ${size} values, got ${t.data.length}`,
    );
  }
  const name = Buffer.from(t.name, "utf-8");
  const head = Buffer.alloc(2 + name.length + 1 + 4 * t.dims.length);
  let off = head.writeUInt16LE(name.length, 0);
  off += name.copy(head, off);
  off = head.writeUInt8(t.dims.length, off);
  for (const d of t.dims) off = head.writeUInt32LE(d, off);
  const payload = Buffer.alloc(4 * t.data.length);
  for (let i = 0; i < t.data.length; i++) payload.writeFloatLE(t.data[i], 4 * i);
  return Buffer.concat([head, payload]);
}

export function slnfBytes(tensors: Tensor[]): Buffer {
  const head = Buffer.alloc(8);
  head.write(SLNF_MAGIC, 0, "ascii");
  head.writeUInt16LE(SLNF_VERSION, 4);
  head.writeUInt16LE(tensors.length, 6);
  const body = Buffer.concat([head, ...tensors.map(tensorBytes)]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32LE(crc32(body) >>> 0, 0);
  return Buffer.concat([body, tail]);
}

/** Write atomically: temp file in the same directory, then rename. */
export async function writeSlnf(file: string, tensors: Tensor[]): Promise<void> {
  const tmp = path.join(
    path.dirname(file),
    `.${path.basename(file)}.${process.pid}.tmp`,
  );
  await fs.writeFile(tmp, slnfBytes(tensors));
  await fs.rename(tmp, file);
}

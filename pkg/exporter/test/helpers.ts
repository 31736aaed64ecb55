/** Test-only helpers: a minimal baseline PNG encoder (filter 0,
 * 8-bit RGB, non-interlaced) and synthetic image generators. */

import { crc32, deflateSync } from "node:zlib";
import { Image, makeImage, setPixel } from "../src/image.js";
import { Rng } from "../src/random.js";

function chunk(type: string, data: Buffer): Buffer {
  const head = Buffer.alloc(4);
  head.writeUInt32BE(data.length, 0);
  const body = Buffer.concat([Buffer.from(type, "ascii"), data]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(body) >>> 0, 0);
  return Buffer.concat([head, body, tail]);
}

export function encodePng(img: Image): Buffer {
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(img.width, 0);
  ihdr.writeUInt32BE(img.height, 4);
  ihdr.writeUInt8(8, 8); // bit depth
  ihdr.writeUInt8(2, 9); // color type: RGB
  // compression 0, filter 0, interlace 0 already zeroed
  const stride = img.width * 3;
  const raw = Buffer.alloc(img.height * (stride + 1));
  for (let y = 0; y < img.height; y++) {
    raw[y * (stride + 1)] = 0; // filter: none
    Buffer.from(img.data.subarray(y * stride, (y + 1) * stride)).copy(
      raw,
      y * (stride + 1) + 1,
    );
  }
  return Buffer.concat([
    Buffer.from([137, 80, 78, 71, 13, 10, 26, 10]),
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw)),
    chunk("IEND", Buffer.alloc(0)),
  ]);
}

/** A deterministic colorful test image (smooth gradients + noise). */
export function syntheticImage(width: number, height: number, seed: number): Image {
  const img = makeImage(width, height);
  const rng = new Rng(seed);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      setPixel(img, x, y, [
        Math.round((255 * x) / Math.max(1, width - 1)),
        Math.round((255 * y) / Math.max(1, height - 1)),
        Math.round(rng.uniform(0, 255)),
      ]);
    }
  }
  return img;
}

/** Minimal dependency-free raster handling: 8-bit RGB images, PNG and
 * binary-PPM decoding, cropping and bilinear resizing.
 *
 * The PNG path covers the baseline flavors (8-bit depth, grayscale /
 * RGB / indexed-free color types, non-interlaced) which is what photo
 * exports and test fixtures produce; anything else is rejected with a
 * clear error rather than decoded wrongly.
 */

import { inflateSync } from "node:zlib";

export interface Image {
  width: number;
  height: number;
  /** Row-major RGB, 3 bytes per pixel. */
  data: Uint8Array;
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export class ImageError extends Error {}

export function makeImage(width: number, height: number, fill = 0): Image {
  if (width < 1 || height < 1) {
    throw new ImageError(`degenerate image size ${width}x${height}`);
  }
  return { width, height, data: new Uint8Array(width * height * 3).fill(fill) };
}

export function getPixel(img: Image, x: number, y: number): [number, number, number] {
  const i = (y * img.width + x) * 3;
  return [img.data[i], img.data[i + 1], img.data[i + 2]];
}

export function setPixel(img: Image, x: number, y: number, rgb: readonly number[]): void {
  const i = (y * img.width + x) * 3;
  img.data[i] = rgb[0];
  img.data[i + 1] = rgb[1];
  img.data[i + 2] = rgb[2];
}

// ---------------------------------------------------------------- PPM

export function decodePpm(buf: Buffer): Image {
  // P6, whitespace-separated header, maxval 255, raw RGB payload
  const header: number[] = [];
  let pos = 0;
  if (buf.length < 2 || buf.toString("ascii", 0, 2) !== "P6") {
    throw new ImageError("not a P6 PPM file");
  }
  pos = 2;
  while (header.length < 3) {
    while (pos < buf.length && /\s/.test(String.fromCharCode(buf[pos]))) pos++;
    if (pos < buf.length && buf[pos] === 0x23) {
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      continue;
    }
    let start = pos;
    while (pos < buf.length && /\d/.test(String.fromCharCode(buf[pos]))) pos++;
    if (pos === start) throw new ImageError("malformed PPM header");
    header.push(parseInt(buf.toString("ascii", start, pos), 10));
  }
  pos++; // single whitespace after maxval
  const [width, height, maxval] = header;
  if (maxval !== 255) throw new ImageError(`unsupported PPM maxval ${maxval}`);
  const need = width * height * 3;
  if (buf.length - pos < need) throw new ImageError("truncated PPM payload");
  return { width, height, data: new Uint8Array(buf.subarray(pos, pos + need)) };
}

export function encodePpm(img: Image): Buffer {
  const head = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([head, Buffer.from(img.data)]);
}

// ---------------------------------------------------------------- PNG

const PNG_SIGNATURE = Buffer.from([137, 80, 78, 71, 13, 10, 26, 10]);

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

export function decodePng(buf: Buffer): Image {
  if (buf.length < 8 || !buf.subarray(0, 8).equals(PNG_SIGNATURE)) {
    throw new ImageError("not a PNG file");
  }
  let pos = 8;
  let width = 0;
  let height = 0;
  let channels = 0;
  const idat: Buffer[] = [];
  while (pos + 8 <= buf.length) {
    const len = buf.readUInt32BE(pos);
    const type = buf.toString("ascii", pos + 4, pos + 8);
    const data = buf.subarray(pos + 8, pos + 8 + len);
    pos += 12 + len; // length + type + payload + per-chunk CRC
    if (type === "IHDR") {
      width = data.readUInt32BE(0);
      height = data.readUInt32BE(4);
      const depth = data.readUInt8(8);
      const color = data.readUInt8(9);
      const interlace = data.readUInt8(12);
      if (depth !== 8) throw new ImageError(`unsupported PNG bit depth ${depth}`);
      if (interlace !== 0) throw new ImageError("interlaced PNG not supported");
      const byColor: Record<number, number> = { 0: 1, 2: 3, 4: 2, 6: 4 };
      if (!(color in byColor)) {
        throw new ImageError(`unsupported PNG color type ${color}`);
      }
      channels = byColor[color];
    } else if (type === "IDAT") {
      idat.push(data);
    } else if (type === "IEND") {
      break;
    }
  }
  if (!width || !idat.length) throw new ImageError("PNG missing IHDR/IDAT");

  const raw = inflateSync(Buffer.concat(idat));
  const stride = width * channels;
  if (raw.length < height * (stride + 1)) throw new ImageError("truncated PNG data");
  const lines = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const src = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const out = y * stride;
    const prev = (y - 1) * stride;
    for (let i = 0; i < stride; i++) {
      const left = i >= channels ? lines[out + i - channels] : 0;
      const up = y > 0 ? lines[prev + i] : 0;
      const upLeft = y > 0 && i >= channels ? lines[prev + i - channels] : 0;
      let v = src[i];
      if (filter === 1) v += left;
      else if (filter === 2) v += up;
      else if (filter === 3) v += (left + up) >> 1;
      else if (filter === 4) v += paeth(left, up, upLeft);
      else if (filter !== 0) throw new ImageError(`bad PNG filter ${filter}`);
      lines[out + i] = v & 0xff;
    }
  }

  const img = makeImage(width, height);
  for (let p = 0; p < width * height; p++) {
    const s = p * channels;
    const d = p * 3;
    if (channels >= 3) {
      img.data[d] = lines[s];
      img.data[d + 1] = lines[s + 1];
      img.data[d + 2] = lines[s + 2];
    } else {
      img.data[d] = img.data[d + 1] = img.data[d + 2] = lines[s];
    }
  }
  return img;
}

export function decodeImage(buf: Buffer, name: string): Image {
  if (name.toLowerCase().endsWith(".png")) return decodePng(buf);
  if (name.toLowerCase().endsWith(".ppm")) return decodePpm(buf);
  throw new ImageError(`unsupported image format: ${name}`);
}

// ------------------------------------------------------- geometry ops

export function crop(img: Image, box: Box): Image {
  const { x, y, w, h } = box;
  if (
    !Number.isInteger(x) || !Number.isInteger(y) ||
    !Number.isInteger(w) || !Number.isInteger(h) ||
    w < 1 || h < 1 || x < 0 || y < 0 ||
    x + w > img.width || y + h > img.height
  ) {
    throw new ImageError(
      `box ${JSON.stringify(box)} outside ${img.width}x${img.height} image`,
    );
  }
  const out = makeImage(w, h);
  for (let row = 0; row < h; row++) {
    const src = ((y + row) * img.width + x) * 3;
    out.data.set(img.data.subarray(src, src + w * 3), row * w * 3);
  }
  return out;
}

export function resizeBilinear(img: Image, width: number, height: number): Image {
  const out = makeImage(width, height);
  const sx = img.width / width;
  const sy = img.height / height;
  for (let y = 0; y < height; y++) {
    // sample at pixel centers so up- and down-scaling stay symmetric
    const fy = Math.min(Math.max((y + 0.5) * sy - 0.5, 0), img.height - 1);
    const y0 = Math.floor(fy);
    const y1 = Math.min(y0 + 1, img.height - 1);
    const wy = fy - y0;
    for (let x = 0; x < width; x++) {
      const fx = Math.min(Math.max((x + 0.5) * sx - 0.5, 0), img.width - 1);
      const x0 = Math.floor(fx);
      const x1 = Math.min(x0 + 1, img.width - 1);
      const wx = fx - x0;
      const d = (y * width + x) * 3;
      for (let ch = 0; ch < 3; ch++) {
        const tl = img.data[(y0 * img.width + x0) * 3 + ch];
        const tr = img.data[(y0 * img.width + x1) * 3 + ch];
        const bl = img.data[(y1 * img.width + x0) * 3 + ch];
        const br = img.data[(y1 * img.width + x1) * 3 + ch];
        const top = tl + (tr - tl) * wx;
        const bot = bl + (br - bl) * wx;
        out.data[d + ch] = Math.round(top + (bot - top) * wy);
      }
    }
  }
  return out;
}

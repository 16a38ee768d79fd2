/**
 * Raster backend: paints a screen-space scene into an RGBA buffer and
 * encodes it as a PNG using only node builtins (zlib for the IDAT
 * stream, a small CRC32 table for chunk checksums).
 */

import { deflateSync } from "node:zlib";

import type { Scene } from "./svg.js";

const CRC_TABLE = new Uint32Array(256);
for (let n = 0; n < 256; n++) {
  let c = n;
  for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
  CRC_TABLE[n] = c >>> 0;
}

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    c = CRC_TABLE[(c ^ buf[i]!) & 0xff]! ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([head.subarray(4), data]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head.subarray(0, 4), body, tail]);
}

export class Raster {
  readonly width: number;
  readonly height: number;
  private readonly px: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.px = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const o = (yi * this.width + xi) * 4;
    this.px[o] = rgb[0];
    this.px[o + 1] = rgb[1];
    this.px[o + 2] = rgb[2];
    this.px[o + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number,
       rgb: [number, number, number], width: number): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1) * 2;
    const rad = Math.max(0, Math.floor(width / 2));
    for (let i = 0; i <= steps; i++) {
      const t = i / steps;
      const x = x0 + (x1 - x0) * t;
      const y = y0 + (y1 - y0) * t;
      for (let dx = -rad; dx <= rad; dx++) {
        for (let dy = -rad; dy <= rad; dy++) this.set(x + dx, y + dy, rgb);
      }
    }
  }

  disc(cx: number, cy: number, r: number, rgb: [number, number, number]): void {
    for (let dx = -r; dx <= r; dx++) {
      for (let dy = -r; dy <= r; dy++) {
        if (dx * dx + dy * dy <= r * r) this.set(cx + dx, cy + dy, rgb);
      }
    }
  }

  encode(): Buffer {
    // Filter type 0 on every scanline, 8-bit RGBA (color type 6).
    const stride = this.width * 4;
    const raw = Buffer.alloc((stride + 1) * this.height);
    for (let y = 0; y < this.height; y++) {
      raw[y * (stride + 1)] = 0;
      raw.set(this.px.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
    }
    const ihdr = Buffer.alloc(13);
    ihdr.writeUInt32BE(this.width, 0);
    ihdr.writeUInt32BE(this.height, 4);
    ihdr[8] = 8;
    ihdr[9] = 6;
    const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    return Buffer.concat([
      signature,
      chunk("IHDR", ihdr),
      chunk("IDAT", deflateSync(raw)),
      chunk("IEND", new Uint8Array(0)),
    ]);
  }
}

function parseColor(color: string): [number, number, number] {
  const m = /^#([0-9a-f]{6})$/i.exec(color);
  if (!m) throw new Error(`unsupported color "${color}"`);
  const v = parseInt(m[1]!, 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

/** Paint a scene and encode it.  Text labels are vector-only. */
export function sceneToPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height);
  for (const pl of scene.polylines) {
    const rgb = parseColor(pl.color);
    for (let i = 1; i < pl.points.length; i++) {
      const [x0, y0] = pl.points[i - 1]!;
      const [x1, y1] = pl.points[i]!;
      if (!pl.dashed) {
        raster.line(x0, y0, x1, y1, rgb, pl.width);
        continue;
      }
      const len = Math.hypot(x1 - x0, y1 - y0);
      const period = 10;
      for (let s = 0; s < len; s += period) {
        const t0 = s / len;
        const t1 = Math.min((s + 6) / len, 1);
        raster.line(x0 + (x1 - x0) * t0, y0 + (y1 - y0) * t0,
                    x0 + (x1 - x0) * t1, y0 + (y1 - y0) * t1, rgb, pl.width);
      }
    }
  }
  for (const m of scene.markers) {
    raster.disc(m.x, m.y, Math.ceil(m.r), parseColor(m.color));
  }
  return raster.encode();
}

/**
 * Minimal hand-assembled SVG: linear scales, polylines, ticked axes,
 * dashed reference lines and circle markers.  Everything is computed in
 * screen space first so the raster backend can reuse the same geometry.
 */

export interface Scale {
  (x: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    // Degenerate extent (single-point data): pad so the point sits centered.
    const pad = d0 === 0 ? 1 : Math.abs(d0) * 0.5;
    d0 -= pad;
    d1 += pad;
  }
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  const f = ((x: number) => r0 + (x - d0) * k) as Scale;
  f.domain = [d0, d1];
  f.range = range;
  return f;
}

export function extent(values: number[]): [number, number] {
  if (values.length === 0) throw new Error("extent of empty data");
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * factor;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + s * 1e-9; v += s) out.push(Number(v.toPrecision(12)));
  return out;
}

const fmt = (v: number): string => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  return a >= 1e4 || a < 1e-3 ? v.toExponential(1) : String(Number(v.toPrecision(4)));
};

export interface Polyline {
  points: [number, number][];
  color: string;
  width: number;
  dashed?: boolean;
}

export interface Dot {
  x: number;
  y: number;
  r: number;
  color: string;
}

export interface Label {
  x: number;
  y: number;
  text: string;
  color: string;
  anchor?: "start" | "middle" | "end";
}

/** Screen-space scene: one figure, ready for either backend. */
export interface Scene {
  width: number;
  height: number;
  polylines: Polyline[];
  markers: Dot[];
  labels: Label[];
}

export const MARGIN = { left: 62, right: 16, top: 18, bottom: 40 } as const;

export function frameScales(width: number, height: number,
                            xdom: [number, number], ydom: [number, number]): { sx: Scale; sy: Scale } {
  return {
    sx: linearScale(xdom, [MARGIN.left, width - MARGIN.right]),
    sy: linearScale(ydom, [height - MARGIN.bottom, MARGIN.top]),
  };
}

/** Axis lines, tick marks and numeric labels for a framed scene. */
export function axes(scene: Scene, sx: Scale, sy: Scale,
                     xTitle: string, yTitle: string): void {
  const xPix: [number, number] = [sx.range[0], sx.range[1]];
  const yPix: [number, number] = [sy.range[0], sy.range[1]];
  const axisColor = "#333333";
  scene.polylines.push({ points: [[xPix[0], yPix[0]], [xPix[1], yPix[0]]], color: axisColor, width: 1 });
  scene.polylines.push({ points: [[xPix[0], yPix[0]], [xPix[0], yPix[1]]], color: axisColor, width: 1 });
  for (const v of ticks(sx.domain[0], sx.domain[1])) {
    const x = sx(v);
    scene.polylines.push({ points: [[x, yPix[0]], [x, yPix[0] + 4]], color: axisColor, width: 1 });
    scene.labels.push({ x, y: yPix[0] + 16, text: fmt(v), color: axisColor, anchor: "middle" });
  }
  for (const v of ticks(sy.domain[0], sy.domain[1])) {
    const y = sy(v);
    scene.polylines.push({ points: [[xPix[0] - 4, y], [xPix[0], y]], color: axisColor, width: 1 });
    scene.labels.push({ x: xPix[0] - 7, y: y + 4, text: fmt(v), color: axisColor, anchor: "end" });
  }
  scene.labels.push({
    x: (xPix[0] + xPix[1]) / 2, y: scene.height - 8, text: xTitle,
    color: axisColor, anchor: "middle",
  });
  scene.labels.push({ x: xPix[0], y: 12, text: yTitle, color: axisColor, anchor: "start" });
}

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function sceneToSvg(scene: Scene): string {
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`);
  parts.push(`<rect width="${scene.width}" height="${scene.height}" fill="#ffffff"/>`);
  for (const pl of scene.polylines) {
    const pts = pl.points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    const dash = pl.dashed ? ` stroke-dasharray="6,4"` : "";
    parts.push(`<polyline points="${pts}" fill="none" stroke="${pl.color}" stroke-width="${pl.width}"${dash}/>`);
  }
  for (const m of scene.markers) {
    parts.push(`<circle class="marker" cx="${m.x.toFixed(2)}" cy="${m.y.toFixed(2)}" r="${m.r}" fill="${m.color}" stroke="#ffffff" stroke-width="1"/>`);
  }
  for (const l of scene.labels) {
    const anchor = l.anchor ?? "start";
    parts.push(`<text x="${l.x.toFixed(2)}" y="${l.y.toFixed(2)}" font-family="sans-serif" font-size="11" fill="${l.color}" text-anchor="${anchor}">${esc(l.text)}</text>`);
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

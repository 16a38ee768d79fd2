/**
 * Figure assembly.  Each renderer lays out one screen-space scene and
 * hands it to both backends, so the vector and raster outputs always
 * agree on geometry.
 */

import type { FiberRow, SweepRow } from "./csv.js";
import { classifyFiber, type FiberCase } from "./markers.js";
import { sceneToPng } from "./png.js";
import { axes, extent, frameScales, sceneToSvg, type Scene } from "./svg.js";

export interface RenderResult {
  svg: string;
  png: Buffer;
  markerCount: number;
}

const WIDTH = 640;
const HEIGHT = 400;

const PHI_COLOR = "#1f77b4";
const DPHI_COLOR = "#ff7f0e";
const ROOT_COLOR = "#d62728";
const PEAK_COLOR = "#2ca02c";
const GUIDE_COLOR = "#777777";

function newScene(): Scene {
  return { width: WIDTH, height: HEIGHT, polylines: [], markers: [], labels: [] };
}

/**
 * Fiber map and its derivative along one ray, with the critical points
 * the sign pattern of dphi dictates: nothing, one crossing, or the
 * two-crossing case with the slope peak between them.
 */
export function renderFiber(rows: FiberRow[]): RenderResult & { fiberCase: FiberCase } {
  const cls = classifyFiber(rows);
  const scene = newScene();
  const xdom = extent(rows.map((r) => r.t));
  const ydom = extent(rows.flatMap((r) => [r.phi, r.dphi]));
  const { sx, sy } = frameScales(WIDTH, HEIGHT, xdom, ydom);

  if (sy.domain[0] < 0 && sy.domain[1] > 0) {
    scene.polylines.push({
      points: [[sx.range[0], sy(0)], [sx.range[1], sy(0)]],
      color: GUIDE_COLOR, width: 1, dashed: true,
    });
  }
  scene.polylines.push({
    points: rows.map((r) => [sx(r.t), sy(r.phi)]),
    color: PHI_COLOR, width: 2,
  });
  scene.polylines.push({
    points: rows.map((r) => [sx(r.t), sy(r.dphi)]),
    color: DPHI_COLOR, width: 2,
  });
  for (const m of cls.markers) {
    scene.markers.push({
      x: sx(m.t), y: sy(m.value), r: 4,
      color: m.kind === "root" ? ROOT_COLOR : PEAK_COLOR,
    });
  }
  scene.labels.push({ x: WIDTH - 150, y: 30, text: "phi", color: PHI_COLOR });
  scene.labels.push({ x: WIDTH - 150, y: 44, text: "dphi", color: DPHI_COLOR });
  scene.labels.push({ x: WIDTH - 150, y: 58, text: `case: ${cls.kind}`, color: GUIDE_COLOR });
  axes(scene, sx, sy, "t", "fiber map along the ray");

  return {
    svg: sceneToSvg(scene),
    png: sceneToPng(scene),
    markerCount: cls.markers.length,
    fiberCase: cls.kind,
  };
}

/**
 * Forcing sweep: the concave-branch level and small-branch norm against
 * log2 of the forcing scale, with the unforced level as a dashed
 * horizontal guide the levels approach.
 */
export function renderSweep(rows: SweepRow[]): RenderResult {
  const positive = rows.filter((r) => r.lambda > 0);
  if (positive.length === 0) {
    throw new Error("sweep has no rows with lambda > 0 to place on a log axis");
  }
  positive.sort((a, b) => a.lambda - b.lambda);
  const mV = positive[0]!.m_V;

  const scene = newScene();
  const xs = positive.map((r) => Math.log2(r.lambda));
  const ys = positive.flatMap((r) => [r.m_1g, r.u_plus_norm]).concat([mV]);
  const { sx, sy } = frameScales(WIDTH, HEIGHT, extent(xs), extent(ys));

  scene.polylines.push({
    points: [[sx.range[0], sy(mV)], [sx.range[1], sy(mV)]],
    color: GUIDE_COLOR, width: 1, dashed: true,
  });
  scene.polylines.push({
    points: positive.map((r) => [sx(Math.log2(r.lambda)), sy(r.m_1g)]),
    color: PHI_COLOR, width: 2,
  });
  scene.polylines.push({
    points: positive.map((r) => [sx(Math.log2(r.lambda)), sy(r.u_plus_norm)]),
    color: DPHI_COLOR, width: 2,
  });
  for (const r of positive) {
    scene.markers.push({ x: sx(Math.log2(r.lambda)), y: sy(r.m_1g), r: 3, color: PHI_COLOR });
    scene.markers.push({ x: sx(Math.log2(r.lambda)), y: sy(r.u_plus_norm), r: 3, color: DPHI_COLOR });
  }
  scene.labels.push({ x: WIDTH - 190, y: 30, text: "m_1g", color: PHI_COLOR });
  scene.labels.push({ x: WIDTH - 190, y: 44, text: "u_plus_norm", color: DPHI_COLOR });
  scene.labels.push({ x: WIDTH - 190, y: 58, text: "m_V (unforced level)", color: GUIDE_COLOR });
  axes(scene, sx, sy, "log2 lambda", "level and small-branch norm");

  return { svg: sceneToSvg(scene), png: sceneToPng(scene), markerCount: scene.markers.length };
}

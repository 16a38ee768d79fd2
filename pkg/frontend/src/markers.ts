/**
 * Critical-point markers from sampled ray-energy data.
 *
 * The derivative column determines everything: its positive-t sign
 * changes locate the Nehari times, and the classification follows the
 * count.  Concavity of the derivative caps the count at two; more sign
 * changes than that means the file does not hold a fiber profile.
 */

import type { FiberRow } from "./csv.js";

export type FiberCase = "no_roots" | "one_root" | "two_roots";

export interface Marker {
  /** Abscissa of the marked point. */
  t: number;
  /** Ordinate on the curve the marker belongs to. */
  value: number;
  /** Which curve the marker sits on. */
  curve: "phi" | "dphi";
  /** What the point is: a Nehari root or the derivative's peak. */
  kind: "root" | "peak";
}

export interface FiberClassification {
  kind: FiberCase;
  roots: number[];
  markers: Marker[];
}

function interpolate(a: FiberRow, b: FiberRow, pick: (r: FiberRow) => number): [number, number] {
  // Linear zero crossing of dphi between two samples.
  const w = a.dphi / (a.dphi - b.dphi);
  const t = a.t + w * (b.t - a.t);
  return [t, pick(a) + w * (pick(b) - pick(a))];
}

export function classifyFiber(rows: FiberRow[]): FiberClassification {
  // t = 0 is the ray origin, not a critical point; dphi vanishes there
  // whenever the forcing pairing does.
  const pts = rows.filter((r) => r.t > 0);
  if (pts.length < 2) throw new Error("fiber data needs at least two positive-t samples");

  const roots: number[] = [];
  const rootsPhi: number[] = [];
  for (let i = 0; i + 1 < pts.length; i++) {
    const a = pts[i]!;
    const b = pts[i + 1]!;
    if (a.dphi === 0) {
      roots.push(a.t);
      rootsPhi.push(a.phi);
    } else if (a.dphi * b.dphi < 0) {
      const [t, phi] = interpolate(a, b, (r) => r.phi);
      roots.push(t);
      rootsPhi.push(phi);
    }
  }
  const last = pts[pts.length - 1]!;
  if (last.dphi === 0) {
    roots.push(last.t);
    rootsPhi.push(last.phi);
  }

  if (roots.length > 2) {
    throw new Error(`dphi changes sign ${roots.length} times; a fiber profile allows at most 2`);
  }

  const markers: Marker[] = roots.map((t, i) => ({
    t, value: rootsPhi[i] ?? 0, curve: "phi", kind: "root",
  }));

  if (roots.length === 2) {
    // Between the two roots the derivative is positive and unimodal; its
    // sampled peak marks the crossing time separating the branches.
    const lo = roots[0]!;
    const hi = roots[1]!;
    let peak: FiberRow | null = null;
    for (const r of pts) {
      if (r.t > lo && r.t < hi && (peak === null || r.dphi > peak.dphi)) peak = r;
    }
    if (peak !== null) {
      markers.splice(1, 0, { t: peak.t, value: peak.dphi, curve: "dphi", kind: "peak" });
    }
  }

  const kind: FiberCase = roots.length === 0 ? "no_roots"
    : roots.length === 1 ? "one_root" : "two_roots";
  return { kind, roots, markers };
}

/**
 * The two figure kinds:
 *  - trajectories3d: orthographically projected 3-d state paths, with the
 *    shared zero-loss ray {(5,-1,s): s <= 0} in grey and, when any input
 *    has gamma > 0, the regime plane w2 + w3 = 0.
 *  - epsilon_limit: the third product coordinate of each sweep limit
 *    against epsilon on a log axis.
 *
 * Rendering is read-only over its inputs and recomputes nothing; every
 * figure embeds the SHA-256 of each input file in its metadata.
 */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";
import { basename } from "node:path";

import { Curve3d, Sweep, readSweep, readTrajectory } from "./csv.js";
import { SvgDoc } from "./svg.js";

export const GAMMA_COLORS: Record<string, string> = {
  "0": "purple",
  "1": "red",
  "2": "green",
  "5": "blue",
  "20": "gold",
};
const FALLBACK_COLOR = "#555";

export function colorFor(gamma: number | null): string {
  if (gamma === null) return FALLBACK_COLOR;
  return GAMMA_COLORS[String(gamma)] ?? FALLBACK_COLOR;
}

function sha256(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

function inputHashes(paths: string[]): Record<string, string> {
  const out: Record<string, string> = {};
  for (const p of paths) out[basename(p)] = sha256(p);
  return out;
}

/** Fixed orthographic projection direction (slightly above, off-axis). */
function project([x, y, z]: [number, number, number]): [number, number] {
  const px = 0.92 * x - 0.38 * y;
  const py = 0.26 * x + 0.31 * y + 0.91 * z;
  return [px, -py];
}

interface Bounds {
  xmin: number;
  xmax: number;
  ymin: number;
  ymax: number;
}

function fit(pts: [number, number][], width: number, height: number, pad: number) {
  const b: Bounds = { xmin: Infinity, xmax: -Infinity, ymin: Infinity, ymax: -Infinity };
  for (const [x, y] of pts) {
    b.xmin = Math.min(b.xmin, x);
    b.xmax = Math.max(b.xmax, x);
    b.ymin = Math.min(b.ymin, y);
    b.ymax = Math.max(b.ymax, y);
  }
  const sx = (width - 2 * pad) / Math.max(b.xmax - b.xmin, 1e-12);
  const sy = (height - 2 * pad) / Math.max(b.ymax - b.ymin, 1e-12);
  const s = Math.min(sx, sy);
  return ([x, y]: [number, number]): [number, number] => [
    pad + (x - b.xmin) * s,
    pad + (y - b.ymin) * s,
  ];
}

export function renderTrajectories3d(inputs: string[], width = 640, height = 480): string {
  if (inputs.length === 0) throw new Error("trajectories3d: need at least one trajectory CSV");
  const curves: Curve3d[] = inputs.map(readTrajectory);

  // the ray of zero-loss points shared by the whole family (alpha = 1)
  const sMin = Math.min(-0.5, ...curves.map((c) => Math.min(...c.points.map((p) => p[2]))));
  const ray: [number, number, number][] = [
    [5, -1, 0],
    [5, -1, 1.2 * sMin],
  ];

  const all: [number, number][] = [];
  const projected = curves.map((c) => c.points.map(project));
  for (const pts of projected) all.push(...pts);
  const rayProj = ray.map(project);
  all.push(...rayProj);

  const doc = new SvgDoc(width, height);
  doc.metadata(inputHashes(inputs));
  const toScreen = fit(all, width, height, 40);

  if (curves.some((c) => (c.gamma ?? 0) > 0)) {
    // regime plane w2 + w3 = 0, drawn as a translucent patch near the ray
    const patch: [number, number, number][] = [
      [3.5, -1.5, 1.5],
      [5.5, -1.5, 1.5],
      [5.5, 1.5, -1.5],
      [3.5, 1.5, -1.5],
    ];
    doc.polygon(patch.map(project).map(toScreen), "#8888aa", 0.15);
  }

  doc.polyline(rayProj.map(toScreen), "grey", 3);
  for (let k = 0; k < curves.length; k++) {
    const pts = projected[k].map(toScreen);
    doc.polyline(pts, colorFor(curves[k].gamma));
    const [ex, ey] = pts[pts.length - 1];
    doc.circle(ex, ey, 3, colorFor(curves[k].gamma));
    const label = curves[k].gamma === null ? basename(curves[k].file) : `gamma=${curves[k].gamma}`;
    doc.text(ex + 6, ey - 4, label, 11, colorFor(curves[k].gamma));
  }
  return doc.render();
}

export function renderEpsilonLimit(inputs: string[], width = 640, height = 400): string {
  if (inputs.length === 0) throw new Error("epsilon_limit: need at least one sweep CSV");
  const sweeps: Sweep[] = inputs.map(readSweep);
  const pad = 50;
  const doc = new SvgDoc(width, height);
  doc.metadata(inputHashes(inputs));

  const logs = sweeps.flatMap((s) => s.epsilon.map(Math.log10));
  const vals = sweeps.flatMap((s) => s.u3);
  const xmin = Math.min(...logs);
  const xmax = Math.max(...logs);
  const span = Math.max(Math.max(...vals) - Math.min(...vals), 0.05);
  const ymin = Math.min(...vals, 0) - 0.1 * span;
  const ymax = Math.max(...vals, 0) + 0.1 * span;
  const sx = (width - 2 * pad) / Math.max(xmax - xmin, 1e-12);
  const sy = (height - 2 * pad) / (ymax - ymin);
  const X = (e: number) => pad + (Math.log10(e) - xmin) * sx;
  const Y = (v: number) => height - pad - (v - ymin) * sy;

  // axes: log-epsilon ticks and the u3 = 0 reference line
  doc.line(pad, height - pad, width - pad, height - pad, "#333");
  doc.line(pad, pad, pad, height - pad, "#333");
  doc.line(pad, Y(0), width - pad, Y(0), "#bbb");
  for (let e = Math.ceil(xmin); e <= Math.floor(xmax); e++) {
    doc.line(X(10 ** e), height - pad, X(10 ** e), height - pad + 5, "#333");
    doc.text(X(10 ** e) - 12, height - pad + 18, `1e${e}`, 10);
  }
  doc.text(width / 2 - 20, height - 10, "epsilon", 12);
  doc.text(10, pad - 10, "u3 at the loss floor", 12);

  for (const s of sweeps) {
    const color = colorFor(s.gamma);
    const pts: [number, number][] = s.epsilon.map((e, i) => [X(e), Y(s.u3[i])]);
    doc.polyline(pts, color, 1, "3,3");
    for (const [x, y] of pts) doc.circle(x, y, 4, color);
  }
  return doc.render();
}

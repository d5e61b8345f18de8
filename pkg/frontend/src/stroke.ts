// Stroke input is sent to the backend as a polyline sampled into positive
// clicks every STROKE_STEP px, since the prompt contract only knows points
// and boxes.

import type { Point } from "./coords";

export const STROKE_STEP = 8;

export function sampleStroke(path: Point[], step = STROKE_STEP): Point[] {
  if (path.length === 0) return [];
  const out: Point[] = [{ ...path[0] }];
  let carried = 0;
  for (let i = 1; i < path.length; i++) {
    let a = path[i - 1];
    const b = path[i];
    let segment = Math.hypot(b.x - a.x, b.y - a.y);
    while (carried + segment >= step) {
      const need = step - carried;
      const f = need / segment;
      a = { x: a.x + (b.x - a.x) * f, y: a.y + (b.y - a.y) * f };
      out.push({ x: a.x, y: a.y });
      segment -= need;
      carried = 0;
    }
    carried += segment;
  }
  return out;
}

/** Deduplicate stroke samples that land on the same image pixel. */
export function uniquePixels(points: Point[]): Point[] {
  const seen = new Set<string>();
  const out: Point[] = [];
  for (const p of points) {
    const key = `${Math.floor(p.x)},${Math.floor(p.y)}`;
    if (!seen.has(key)) {
      seen.add(key);
      out.push({ x: Math.floor(p.x), y: Math.floor(p.y) });
    }
  }
  return out;
}

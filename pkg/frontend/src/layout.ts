/**
 * Deterministic force-directed layout.
 *
 * Positions depend only on the structure: the PRNG is seeded by a hash
 * of the canonical structure JSON, the force loop runs a fixed number of
 * iterations in a fixed order, and no wall-clock or Math.random input
 * exists anywhere — the same structure always draws the same picture.
 */

import type { StructureJson } from "./api.js";

export interface Point {
  x: number;
  y: number;
}

/** JSON.stringify with object keys sorted at every level, so hashes are
 * independent of relation insertion order. */
export function canonicalJson(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonicalJson).join(",")}]`;
  }
  if (value !== null && typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonicalJson(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

/** 32-bit FNV-1a over the canonical JSON text. */
export function structureHash(structure: StructureJson): number {
  const text = canonicalJson(structure);
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** Small deterministic PRNG (mulberry32) for jitter and initial angles. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Undirected adjacency from every relation: vertices co-occurring in a
 * tuple attract each other, which for graphs is just the edge relation. */
function cooccurrenceEdges(structure: StructureJson): Array<[number, number]> {
  const seen = new Set<string>();
  const edges: Array<[number, number]> = [];
  for (const name of Object.keys(structure.relations).sort()) {
    const relation = structure.relations[name];
    if (relation === undefined) continue;
    for (const tuple of relation.tuples) {
      for (let i = 0; i < tuple.length; i++) {
        for (let j = i + 1; j < tuple.length; j++) {
          const a = tuple[i];
          const b = tuple[j];
          if (a === undefined || b === undefined || a === b) continue;
          const key = a < b ? `${a},${b}` : `${b},${a}`;
          if (!seen.has(key)) {
            seen.add(key);
            edges.push(a < b ? [a, b] : [b, a]);
          }
        }
      }
    }
  }
  return edges;
}

const ITERATIONS = 150;
const MARGIN = 28;

/** Lay out all vertices inside width × height.  Spring attraction along
 * co-occurrence edges, pairwise repulsion, gentle centering pull. */
export function forceLayout(
  structure: StructureJson,
  width: number,
  height: number,
): Point[] {
  const n = structure.universe;
  if (n === 0) return [];
  const rng = mulberry32(structureHash(structure));
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 2 - MARGIN;
  const points: Point[] = [];
  for (let v = 0; v < n; v++) {
    const angle = (2 * Math.PI * v) / n + rng() * 0.3;
    const rr = radius * (0.7 + 0.3 * rng());
    points.push({ x: cx + rr * Math.cos(angle), y: cy + rr * Math.sin(angle) });
  }
  if (n === 1) {
    points[0] = { x: cx, y: cy };
    return points;
  }

  const edges = cooccurrenceEdges(structure);
  const ideal = (2 * radius) / Math.sqrt(n);
  for (let step = 0; step < ITERATIONS; step++) {
    const cooling = 1 - step / ITERATIONS;
    const fx = new Array<number>(n).fill(0);
    const fy = new Array<number>(n).fill(0);
    for (let a = 0; a < n; a++) {
      for (let b = a + 1; b < n; b++) {
        const pa = points[a]!;
        const pb = points[b]!;
        const dx = pa.x - pb.x;
        const dy = pa.y - pb.y;
        const d2 = Math.max(dx * dx + dy * dy, 1e-4);
        const push = (ideal * ideal) / d2;
        const d = Math.sqrt(d2);
        fx[a]! += (dx / d) * push;
        fy[a]! += (dy / d) * push;
        fx[b]! -= (dx / d) * push;
        fy[b]! -= (dy / d) * push;
      }
    }
    for (const [a, b] of edges) {
      const pa = points[a];
      const pb = points[b];
      if (pa === undefined || pb === undefined) continue;
      const dx = pa.x - pb.x;
      const dy = pa.y - pb.y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1e-2);
      const pull = (d * d) / ideal / 20;
      fx[a]! -= (dx / d) * pull;
      fy[a]! -= (dy / d) * pull;
      fx[b]! += (dx / d) * pull;
      fy[b]! += (dy / d) * pull;
    }
    for (let v = 0; v < n; v++) {
      const p = points[v]!;
      fx[v]! += (cx - p.x) * 0.01;
      fy[v]! += (cy - p.y) * 0.01;
      const mag = Math.max(Math.sqrt(fx[v]! * fx[v]! + fy[v]! * fy[v]!), 1e-9);
      const cap = Math.min(mag, 12 * cooling + 0.5);
      p.x += (fx[v]! / mag) * cap;
      p.y += (fy[v]! / mag) * cap;
      p.x = Math.min(width - MARGIN, Math.max(MARGIN, p.x));
      p.y = Math.min(height - MARGIN, Math.max(MARGIN, p.y));
    }
  }
  return points.map((p) => ({ x: Math.round(p.x * 100) / 100, y: Math.round(p.y * 100) / 100 }));
}

/**
 * SVG painting for the game board.
 *
 * Renders whatever the view model holds and nothing else: vertex colors,
 * the ghost overlay for a previewed move, per-vertex ball annotations,
 * and banners all come from server-provided fields.  Click and hover
 * callbacks are attached to every vertex; deciding whether a click is
 * legal is the server's job, so the handlers receive every click.
 */

import type { StatePayload } from "./api.js";
import type { Point } from "./layout.js";
import { lastMoves, vertexRole, type UiGameView } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VERTEX_RADIUS = 14;

export interface BoardHandlers {
  onVertexClick(vertex: number): void;
  onVertexEnter(vertex: number): void;
  onVertexLeave(vertex: number): void;
}

function edgeList(view: UiGameView): Array<[number, number]> {
  const structure = view.structure;
  if (structure === null) return [];
  const edges: Array<[number, number]> = [];
  const seen = new Set<string>();
  for (const relation of Object.values(structure.relations)) {
    if (relation.arity !== 2) continue;
    for (const tuple of relation.tuples) {
      const [a, b] = tuple;
      if (a === undefined || b === undefined || a === b) continue;
      const key = a < b ? `${a},${b}` : `${b},${a}`;
      if (!seen.has(key)) {
        seen.add(key);
        edges.push([a, b]);
      }
    }
  }
  return edges;
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) node.setAttribute(name, value);
  return node;
}

function vertexClasses(view: UiGameView, state: StatePayload, vertex: number): string {
  const classes = ["vertex", vertexRole(state, vertex)];
  if (lastMoves(state).includes(vertex)) classes.push("last-move");
  const preview = view.preview;
  if (preview !== null) {
    if (preview.vertex === vertex) classes.push("preview-pick");
    classes.push(preview.state.arena.includes(vertex) ? "preview-kept" : "preview-dropped");
  }
  return classes.join(" ");
}

/** Repaint the whole board into `svg` from the view.  Idempotent: the
 * same view always produces the same DOM. */
export function renderBoard(
  svg: SVGSVGElement,
  view: UiGameView,
  layout: Point[],
  handlers: BoardHandlers,
): void {
  svg.textContent = "";
  const state = view.state;
  if (state === null || view.structure === null) return;

  for (const [a, b] of edgeList(view)) {
    const pa = layout[a];
    const pb = layout[b];
    if (pa === undefined || pb === undefined) continue;
    svg.appendChild(
      el("line", {
        class: "edge",
        x1: String(pa.x),
        y1: String(pa.y),
        x2: String(pb.x),
        y2: String(pb.y),
      }),
    );
  }

  for (let v = 0; v < view.structure.universe; v++) {
    const p = layout[v];
    if (p === undefined) continue;
    const group = el("g", { class: vertexClasses(view, state, v), "data-vertex": String(v) });
    group.appendChild(
      el("circle", { cx: String(p.x), cy: String(p.y), r: String(VERTEX_RADIUS) }),
    );
    const label = el("text", {
      class: "vertex-id",
      x: String(p.x),
      y: String(p.y + 4),
      "text-anchor": "middle",
    });
    label.textContent = String(v);
    group.appendChild(label);

    const ballSize = view.annotations.balls[String(v)];
    if (ballSize !== undefined) {
      const note = el("text", {
        class: "ball-size",
        x: String(p.x + VERTEX_RADIUS + 2),
        y: String(p.y - VERTEX_RADIUS + 2),
      });
      note.textContent = String(ballSize);
      group.appendChild(note);
    }

    group.addEventListener("click", () => handlers.onVertexClick(v));
    group.addEventListener("mouseenter", () => handlers.onVertexEnter(v));
    group.addEventListener("mouseleave", () => handlers.onVertexLeave(v));
    svg.appendChild(group);
  }
}

/** One-line game status: whose turn, round number, outcome. */
export function statusText(view: UiGameView): string {
  const state = view.state;
  if (state === null) return "No game yet — load a structure and start one.";
  if (state.status === "separator_won") return "Separator wins — the arena is down to one vertex.";
  const turn = state.awaiting === view.human ? "your move" : "engine thinking";
  return `Round ${state.round}: ${state.awaiting} to move (${turn}).`;
}

export function engineMoveText(view: UiGameView): string {
  const move = view.engineMove;
  if (move === null) return "";
  const quality = move.bound === null ? "fallback" : move.exact ? `bound ${move.bound}` : `bound ≥ ${move.bound}`;
  return `Engine (${move.role}) played ${move.vertex} (${quality}).`;
}

export function renderBanner(container: HTMLElement, view: UiGameView): void {
  container.textContent = "";
  container.className = "banner-area";
  const banner = view.banner;
  if (banner === null) return;
  const box = document.createElement("div");
  box.className = `banner banner-${banner.kind}`;
  box.textContent = banner.text;
  container.appendChild(box);
}

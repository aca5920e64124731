/**
 * View model for the game board.
 *
 * The view is always a pure function of the most recent server response:
 * reducers here copy server payloads into place, classify errors into
 * banners, and coalesce preview requests so only the latest one can
 * render.  No move legality, arena arithmetic, or win detection happens
 * client-side — the server is the single authority on every transition.
 */

import type {
  Annotations,
  ApiError,
  EngineMove,
  MoveResponse,
  PreviewResponse,
  Role,
  SavedGame,
  SessionResponse,
  StatePayload,
  StructureJson,
} from "./api.js";

export type BannerKind = "win" | "move-error" | "network" | "stale-session" | "preview-cost";

export interface Banner {
  kind: BannerKind;
  text: string;
}

/** Ghost overlay for a candidate move: the position the server says
 * would result, before committing. */
export interface PreviewOverlay {
  vertex: number;
  role: Role;
  state: StatePayload;
  annotations: Annotations;
}

export interface UiGameView {
  session: string | null;
  human: Role;
  structure: StructureJson | null;
  state: StatePayload | null;
  annotations: Annotations;
  engineMove: EngineMove | null;
  preview: PreviewOverlay | null;
  banner: Banner | null;
  /** Token of the most recently issued preview request; stale responses
   * carry an older token and are dropped. */
  previewToken: number;
}

export function freshView(): UiGameView {
  return {
    session: null,
    human: "connector",
    structure: null,
    state: null,
    annotations: { balls: {} },
    engineMove: null,
    preview: null,
    banner: null,
    previewToken: 0,
  };
}

function winBanner(state: StatePayload): Banner | null {
  if (state.status !== "separator_won") return null;
  return { kind: "win", text: `Separator wins after round ${state.round - 1}` };
}

/** Install a freshly opened session. */
export function applySession(view: UiGameView, resp: SessionResponse): UiGameView {
  return {
    ...view,
    session: resp.session,
    human: resp.human,
    structure: resp.structure,
    state: resp.state,
    annotations: resp.annotations,
    engineMove: resp.engine_move,
    preview: null,
    banner: winBanner(resp.state),
  };
}

/** Install the server's response to a committed move. */
export function applyMove(view: UiGameView, resp: MoveResponse): UiGameView {
  return {
    ...view,
    state: resp.state,
    annotations: resp.annotations,
    engineMove: resp.engine_move,
    preview: null,
    banner: winBanner(resp.state),
  };
}

/** Reserve the next preview slot; only the returned token may render. */
export function beginPreview(view: UiGameView): [UiGameView, number] {
  const token = view.previewToken + 1;
  return [{ ...view, previewToken: token }, token];
}

/** Render a preview response unless a newer preview has been requested
 * since (latest-wins: stale responses leave the view untouched). */
export function resolvePreview(
  view: UiGameView,
  token: number,
  resp: PreviewResponse,
): UiGameView {
  if (token !== view.previewToken) return view;
  return {
    ...view,
    preview: {
      vertex: resp.vertex,
      role: resp.role,
      state: resp.state,
      annotations: resp.annotations,
    },
  };
}

export function clearPreview(view: UiGameView): UiGameView {
  if (view.preview === null) return view;
  return { ...view, preview: null };
}

/** Map a request failure onto the banner the board should show.  The
 * game position is never touched: a failed request changes nothing. */
export function applyFailure(
  view: UiGameView,
  error: Pick<ApiError, "status" | "detail">,
  context: "move" | "preview" | "session",
): UiGameView {
  let banner: Banner;
  if (error.status === 0) {
    banner = { kind: "network", text: "Network failure — check the server and retry." };
  } else if (error.status === 404) {
    banner = { kind: "stale-session", text: "This session is gone — start a new game." };
  } else if (error.status === 503 && context === "preview") {
    banner = { kind: "preview-cost", text: "Too expensive to preview." };
  } else {
    banner = { kind: "move-error", text: error.detail };
  }
  return { ...view, banner };
}

export function clearBanner(view: UiGameView): UiGameView {
  if (view.banner === null) return view;
  return { ...view, banner: null };
}

/** Project the current game into the on-disk replay format. */
export function toSavedGame(view: UiGameView): SavedGame {
  if (view.structure === null || view.state === null) {
    throw new Error("no game to save");
  }
  return {
    structure: view.structure,
    r: view.state.r,
    human: view.human,
    history: view.state.history.map((pair) => [...pair]),
  };
}

export type VertexRole = "separator" | "arena" | "eliminated";

/** Board color class for a vertex, derived entirely from server fields.
 * Separator membership wins over arena membership so picked parameters
 * stay visible even while they remain in play. */
export function vertexRole(state: StatePayload, vertex: number): VertexRole {
  if (state.separator_set.includes(vertex)) return "separator";
  if (state.arena.includes(vertex)) return "arena";
  return "eliminated";
}

/** The most recent completed or half-completed round, for highlighting. */
export function lastMoves(state: StatePayload): number[] {
  const marks: number[] = [];
  const last = state.history[state.history.length - 1];
  if (last !== undefined) marks.push(...last);
  if (state.pending_connector !== null) marks.push(state.pending_connector);
  return marks;
}

/**
 * Page wiring: forms, the click-to-move loop, hover previews, and replay.
 *
 * Every state transition waits for the server (no optimistic updates);
 * the board repaints only from the view model, which in turn holds only
 * the last server response.  The bundle is served by the same process as
 * the API, so the client talks to its own origin.
 */

import { ApiError, GameClient, type Role, type SavedGame } from "./api.js";
import { forceLayout, type Point } from "./layout.js";
import { engineMoveText, renderBanner, renderBoard, statusText } from "./render.js";
import {
  applyFailure,
  applyMove,
  applySession,
  beginPreview,
  clearPreview,
  freshView,
  resolvePreview,
  toSavedGame,
  type UiGameView,
} from "./state.js";

const BOARD_WIDTH = 640;
const BOARD_HEIGHT = 440;

const client = new GameClient("");

let view: UiGameView = freshView();
let layout: Point[] = [];
/** Re-run after a network-failure banner's Retry. */
let lastAction: (() => Promise<void>) | null = null;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

const boardSvg = byId<HTMLElement>("board") as unknown as SVGSVGElement;
const bannerArea = byId<HTMLDivElement>("banners");
const statusLine = byId<HTMLParagraphElement>("status");
const engineLine = byId<HTMLParagraphElement>("engine-move");
const historyLine = byId<HTMLPreElement>("history");
const structureInput = byId<HTMLTextAreaElement>("structure-json");
const radiusInput = byId<HTMLInputElement>("radius");
const roleSelect = byId<HTMLSelectElement>("role");
const newGameButton = byId<HTMLButtonElement>("new-game");
const retryButton = byId<HTMLButtonElement>("retry");
const saveButton = byId<HTMLButtonElement>("save-history");
const loadInput = byId<HTMLInputElement>("load-history");

function repaint(): void {
  renderBoard(boardSvg, view, layout, {
    onVertexClick: (vertex) => void submitMove(vertex),
    onVertexEnter: (vertex) => void previewMove(vertex),
    onVertexLeave: () => {
      view = clearPreview(view);
      repaint();
    },
  });
  renderBanner(bannerArea, view);
  statusLine.textContent = statusText(view);
  engineLine.textContent = engineMoveText(view);
  historyLine.textContent =
    view.state === null ? "" : JSON.stringify(view.state.history);
  retryButton.hidden = view.banner?.kind !== "network";
}

function fail(error: unknown, context: "move" | "preview" | "session"): void {
  if (error instanceof ApiError) {
    view = applyFailure(view, error, context);
  } else {
    view = applyFailure(view, { status: 0, detail: String(error) }, context);
  }
  repaint();
}

async function startGame(): Promise<void> {
  const action = async (): Promise<void> => {
    const structure = JSON.parse(structureInput.value) as SavedGame["structure"];
    const r = Number(radiusInput.value);
    const human = roleSelect.value as Role;
    const resp = await client.newSession(structure, r, human);
    layout = forceLayout(resp.structure, BOARD_WIDTH, BOARD_HEIGHT);
    view = applySession(freshView(), resp);
    repaint();
  };
  lastAction = action;
  try {
    await action();
  } catch (error) {
    fail(error, "session");
  }
}

async function submitMove(vertex: number): Promise<void> {
  if (view.session === null) return;
  const session = view.session;
  const action = async (): Promise<void> => {
    const resp = await client.move(session, vertex);
    view = applyMove(view, resp);
    repaint();
  };
  lastAction = action;
  try {
    await action();
  } catch (error) {
    fail(error, "move");
  }
}

async function previewMove(vertex: number): Promise<void> {
  if (view.session === null || view.state === null || view.state.finished) return;
  const session = view.session;
  const [next, token] = beginPreview(view);
  view = next;
  try {
    const resp = await client.previewMove(session, vertex);
    view = resolvePreview(view, token, resp);
    repaint();
  } catch (error) {
    if (token === view.previewToken) fail(error, "preview");
  }
}

function saveHistory(): void {
  let saved: SavedGame;
  try {
    saved = toSavedGame(view);
  } catch {
    return;
  }
  const blob = new Blob([JSON.stringify(saved, null, 2)], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "game-history.json";
  link.click();
  URL.revokeObjectURL(link.href);
}

async function loadHistory(file: File): Promise<void> {
  const action = async (): Promise<void> => {
    const saved = JSON.parse(await file.text()) as SavedGame;
    const opened = await client.newSession(saved.structure, saved.r, saved.human);
    layout = forceLayout(opened.structure, BOARD_WIDTH, BOARD_HEIGHT);
    view = applySession(freshView(), opened);
    repaint();
    const column = saved.human === "connector" ? 0 : 1;
    for (const pair of saved.history) {
      const vertex = pair[column];
      if (vertex === undefined) break;
      const resp = await client.move(opened.session, vertex);
      view = applyMove(view, resp);
      repaint();
    }
  };
  lastAction = action;
  try {
    await action();
  } catch (error) {
    fail(error, "session");
  }
}

newGameButton.addEventListener("click", () => void startGame());
retryButton.addEventListener("click", () => {
  if (lastAction !== null) void lastAction().catch((error) => fail(error, "session"));
});
saveButton.addEventListener("click", saveHistory);
loadInput.addEventListener("change", () => {
  const file = loadInput.files?.[0];
  if (file !== undefined) void loadHistory(file);
});

repaint();

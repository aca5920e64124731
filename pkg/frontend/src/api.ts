/**
 * Typed request layer over the game server's JSON endpoints.
 *
 * Exactly two API families are used: `/api/session` (create, read, move)
 * and `/api/analyze` (stateless ball / distance / move-preview queries).
 * The layer does no game reasoning of its own — it shapes requests,
 * decodes responses, and normalizes failures into `ApiError` so callers
 * can branch on the HTTP status alone.
 */

export type Role = "connector" | "separator";

/** Structure wire format: universe size plus named relations. */
export interface StructureJson {
  universe: number;
  graph?: boolean;
  relations: Record<string, { arity: number; tuples: number[][] }>;
}

/** Snapshot of one game position as the server reports it. */
export interface StatePayload {
  r: number;
  round: number;
  arena: number[];
  separator_set: number[];
  history: number[][];
  pending_connector: number | null;
  status: "running" | "separator_won";
  awaiting: Role | null;
  finished: boolean;
}

/** Per-arena-vertex size of (ball ∩ arena); empty with a note when the
 * server's enumeration budget is too small to annotate. */
export interface Annotations {
  balls: Record<string, number>;
  note?: string;
}

export interface EngineMove {
  role: Role;
  vertex: number;
  bound: number | null;
  exact: boolean;
}

export interface SessionResponse {
  session: string;
  human: Role;
  state: StatePayload;
  annotations: Annotations;
  structure: StructureJson;
  engine_move: EngineMove | null;
}

export interface MoveResponse {
  session: string;
  human: Role;
  state: StatePayload;
  annotations: Annotations;
  after_move: StatePayload;
  engine_move: EngineMove | null;
}

export interface PreviewResponse {
  op: "preview_move";
  session: string;
  vertex: number;
  role: Role;
  state: StatePayload;
  annotations: Annotations;
}

export interface BallResponse {
  op: "ball";
  vertex: number;
  r: number;
  S: number[];
  ball: number[];
  size: number;
}

export interface FlipdistResponse {
  op: "flipdist";
  u: number;
  v: number;
  S: number[];
  distance: number | null;
  infinite: boolean;
}

/** A finished (or abandoned) game in the on-disk replay format. */
export interface SavedGame {
  structure: StructureJson;
  r: number;
  human: Role;
  history: number[][];
}

/** HTTP failure with the server's detail string; `status` 0 means the
 * request never reached the server (network failure). */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`${status || "network"}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

async function decodeFailure(status: number, res: { json(): Promise<unknown> }): Promise<never> {
  let detail = `request failed with status ${status}`;
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the generic detail
  }
  throw new ApiError(status, detail);
}

export class GameClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? (globalThis.fetch as unknown as FetchLike);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let res;
    try {
      res = await this.fetchImpl(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : "network failure");
    }
    if (!res.ok) await decodeFailure(res.status, res);
    return (await res.json()) as T;
  }

  newSession(
    structure: StructureJson,
    r: number,
    human: Role = "connector",
    budgetBits?: number,
  ): Promise<SessionResponse> {
    const body: Record<string, unknown> = { structure, r, human };
    if (budgetBits !== undefined) body.budget_bits = budgetBits;
    return this.request("POST", "/api/session", body);
  }

  getSession(session: string): Promise<SessionResponse> {
    return this.request("GET", `/api/session/${session}`);
  }

  move(session: string, vertex: number): Promise<MoveResponse> {
    return this.request("POST", `/api/session/${session}/move`, { vertex });
  }

  previewMove(session: string, vertex: number): Promise<PreviewResponse> {
    return this.request("POST", "/api/analyze", { op: "preview_move", session, vertex });
  }

  ball(structure: StructureJson, S: number[], r: number, vertex: number): Promise<BallResponse> {
    return this.request("POST", "/api/analyze", { op: "ball", structure, S, r, vertex });
  }

  flipdist(structure: StructureJson, S: number[], u: number, v: number): Promise<FlipdistResponse> {
    return this.request("POST", "/api/analyze", { op: "flipdist", structure, S, u, v });
  }
}

/** The column of the saved history the human owns; the other column is
 * the engine's and is reproduced by the server on replay. */
export function humanMoves(saved: SavedGame): number[] {
  const column = saved.human === "connector" ? 0 : 1;
  return saved.history.map((pair) => {
    const vertex = pair[column];
    if (vertex === undefined) throw new Error("saved history has an incomplete round");
    return vertex;
  });
}

/** Re-drive a saved game through a fresh session.  All state transitions
 * come from the server — the file only supplies the human's choices. */
export async function replayGame(client: GameClient, saved: SavedGame): Promise<SessionResponse> {
  const opened = await client.newSession(saved.structure, saved.r, saved.human);
  const session = opened.session;
  for (const vertex of humanMoves(saved)) {
    await client.move(session, vertex);
  }
  return client.getSession(session);
}

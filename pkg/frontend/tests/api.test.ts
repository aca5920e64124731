import { describe, expect, it } from "vitest";

import {
  ApiError,
  GameClient,
  humanMoves,
  type FetchLike,
  type SavedGame,
  type StructureJson,
} from "../src/api.js";

const k2: StructureJson = {
  universe: 2,
  graph: true,
  relations: { E: { arity: 2, tuples: [[0, 1], [1, 0]] } },
};

interface Captured {
  url: string;
  method: string | undefined;
  body: unknown;
}

function stubFetch(
  status: number,
  payload: unknown,
  captured: Captured[] = [],
): FetchLike {
  return async (url, init) => {
    captured.push({
      url,
      method: init?.method,
      body: init?.body === undefined ? undefined : JSON.parse(init.body),
    });
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => payload,
    };
  };
}

describe("request shapes", () => {
  it("opens a session with structure, radius, and role", async () => {
    const captured: Captured[] = [];
    const client = new GameClient("http://host", stubFetch(200, { session: "s" }, captured));
    await client.newSession(k2, 2, "separator");
    expect(captured).toEqual([
      {
        url: "http://host/api/session",
        method: "POST",
        body: { structure: k2, r: 2, human: "separator" },
      },
    ]);
  });

  it("posts moves to the session path", async () => {
    const captured: Captured[] = [];
    const client = new GameClient("http://host/", stubFetch(200, {}, captured));
    await client.move("abc", 3);
    expect(captured[0]?.url).toBe("http://host/api/session/abc/move");
    expect(captured[0]?.body).toEqual({ vertex: 3 });
  });

  it("previews through the analysis endpoint", async () => {
    const captured: Captured[] = [];
    const client = new GameClient("", stubFetch(200, {}, captured));
    await client.previewMove("abc", 1);
    expect(captured[0]?.url).toBe("/api/analyze");
    expect(captured[0]?.body).toEqual({ op: "preview_move", session: "abc", vertex: 1 });
  });

  it("shapes ball and distance analysis queries", async () => {
    const captured: Captured[] = [];
    const client = new GameClient("", stubFetch(200, {}, captured));
    await client.ball(k2, [0], 1, 1);
    await client.flipdist(k2, [], 0, 1);
    expect(captured[0]?.body).toEqual({ op: "ball", structure: k2, S: [0], r: 1, vertex: 1 });
    expect(captured[1]?.body).toEqual({ op: "flipdist", structure: k2, S: [], u: 0, v: 1 });
  });
});

describe("failure normalization", () => {
  it("carries the server's status and detail", async () => {
    const client = new GameClient("", stubFetch(409, { detail: "game is over" }));
    const err = await client.move("abc", 0).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).detail).toBe("game is over");
  });

  it("keeps a generic detail when the error body is not JSON", async () => {
    const broken: FetchLike = async () => ({
      ok: false,
      status: 500,
      json: async () => {
        throw new Error("not json");
      },
    });
    const err = await new GameClient("", broken).getSession("x").catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(500);
    expect((err as ApiError).detail).toContain("500");
  });

  it("maps a thrown fetch to status 0", async () => {
    const down: FetchLike = async () => {
      throw new TypeError("fetch failed");
    };
    const err = await new GameClient("", down).getSession("x").catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(0);
    expect((err as ApiError).detail).toBe("fetch failed");
  });
});

describe("replay projection", () => {
  const saved: SavedGame = { structure: k2, r: 1, human: "connector", history: [[0, 1], [1, 0]] };

  it("takes the connector column for a connector game", () => {
    expect(humanMoves(saved)).toEqual([0, 1]);
  });

  it("takes the separator column for a separator game", () => {
    expect(humanMoves({ ...saved, human: "separator" })).toEqual([1, 0]);
  });

  it("rejects half-recorded rounds", () => {
    expect(() => humanMoves({ ...saved, human: "separator", history: [[3]] })).toThrow(
      "incomplete round",
    );
  });
});

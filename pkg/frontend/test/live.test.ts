/**
 * Live round trip against the real Python service: create a session, send
 * the "comedy movie" opener, and confirm the Genre estimate bar reacts.
 *
 * Requires the backend package to be importable (pip install -e ..).
 */

import { ChildProcess, spawn } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ChatEvent, applyEvent, initialView } from "../src/transcript.js";
import { BotTurn } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");
const PORT = 18641;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/health`);
      if (resp.ok) {
        const body = (await resp.json()) as { status: string; movie_count: number };
        expect(body.movie_count).toBe(200);
        return;
      }
    } catch (err) {
      lastError = err;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`server never became healthy: ${String(lastError)}`);
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "slotforge.cli", "serve", "--port", String(PORT)],
    { cwd: repoRoot, stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stderr?.on("data", () => undefined); // keep the pipe drained
  server.stdout?.on("data", () => undefined);
  await waitForHealth(30_000);
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("live fixture server", () => {
  it("updates the genre estimate bar after the comedy opener", async () => {
    const api = new ApiClient(BASE);
    const created = await api.createSession();
    expect(created.session_id).toBeTruthy();

    let view = applyEvent(initialView(), {
      type: "session_started",
      payload: created,
    });
    const genreBefore = view.estimates.find((b) => b.entityType === "genre")!;
    expect(genreBefore.state).toBe("estimate");

    const events: ChatEvent[] = [
      { type: "user_message", text: "I want a comedy movie" },
    ];
    const turn: BotTurn = await api.sendMessage(created.session_id, "I want a comedy movie");
    events.push({ type: "bot_turn", payload: turn });
    for (const event of events) {
      view = applyEvent(view, event);
    }

    expect(turn.kind).toBe("ask");
    expect(turn.assumed.genre).toEqual({ skipped: false, order: 0 });
    const genreAfter = view.estimates.find((b) => b.entityType === "genre")!;
    expect(genreAfter.state).toBe("given");
    expect(genreAfter.value).toBe(1);

    // the remaining bars keep live estimates from the server
    const person = view.estimates.find((b) => b.entityType === "person")!;
    expect(person.state).toBe("estimate");
    expect(person.value).toBeGreaterThanOrEqual(0);
    expect(person.value).toBeLessThanOrEqual(1);
  }, 20_000);

  it("rejects empty messages with 422", async () => {
    const api = new ApiClient(BASE);
    const created = await api.createSession();
    await expect(api.sendMessage(created.session_id, "   ")).rejects.toMatchObject({
      status: 422,
    });
  });
});

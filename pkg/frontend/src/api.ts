/** Thin fetch client for the /v1 session endpoints. */

import { BotTurn, Health, SessionCreated } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.base + path, init);
    } catch (err) {
      throw new ApiError(`network error: ${String(err)}`);
    }
    if (!resp.ok) {
      throw new ApiError(`HTTP ${resp.status} on ${path}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  createSession(): Promise<SessionCreated> {
    return this.request<SessionCreated>("/v1/sessions", { method: "POST" });
  }

  sendMessage(sessionId: string, text: string): Promise<BotTurn> {
    return this.request<BotTurn>(`/v1/sessions/${sessionId}/messages`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  health(): Promise<Health> {
    return this.request<Health>("/health");
  }
}

/**
 * Pure chat-view model: the rendered UI is a function of the event stream.
 *
 * Every server interaction becomes a ChatEvent; applyEvent folds events into
 * a ChatView without reading anything outside its arguments, so replaying a
 * recorded stream reproduces the identical view (and transcript text).
 */

import {
  AssumedInfo,
  BotTurn,
  ENTITY_TYPES,
  EntityTypeKey,
  ResultCard,
  SessionCreated,
} from "./types.js";

export type ChatEvent =
  | { type: "session_started"; payload: SessionCreated }
  | { type: "user_message"; text: string }
  | { type: "bot_turn"; payload: BotTurn }
  | { type: "error"; message: string };

export interface Bubble {
  speaker: "user" | "bot";
  text: string;
}

export type BarState = "estimate" | "given" | "refused";

export interface EstimateBar {
  entityType: EntityTypeKey;
  state: BarState;
  /** skip probability for "estimate" bars, 1 for settled ones */
  value: number;
}

export interface ChatView {
  sessionId: string | null;
  transcript: Bubble[];
  results: ResultCard[];
  estimates: EstimateBar[];
  error: string | null;
  ended: boolean;
}

export function initialView(): ChatView {
  return {
    sessionId: null,
    transcript: [],
    results: [],
    estimates: ENTITY_TYPES.map((t) => ({ entityType: t, state: "estimate", value: 0.5 })),
    error: null,
    ended: false,
  };
}

function barFor(
  entityType: EntityTypeKey,
  previous: EstimateBar,
  estimates: Record<string, number>,
  assumed: Record<string, AssumedInfo>,
): EstimateBar {
  const settled = assumed[entityType];
  if (settled !== undefined) {
    return { entityType, state: settled.skipped ? "refused" : "given", value: 1 };
  }
  const p = estimates[entityType];
  if (p !== undefined) {
    return { entityType, state: "estimate", value: p };
  }
  return previous;
}

export function applyEvent(view: ChatView, event: ChatEvent): ChatView {
  switch (event.type) {
    case "session_started":
      return {
        ...initialView(),
        sessionId: event.payload.session_id,
        transcript: [{ speaker: "bot", text: event.payload.greeting }],
      };
    case "user_message":
      return {
        ...view,
        error: null,
        transcript: [...view.transcript, { speaker: "user", text: event.text }],
      };
    case "bot_turn": {
      const turn = event.payload;
      return {
        ...view,
        error: null,
        ended: turn.kind === "farewell",
        transcript: [...view.transcript, { speaker: "bot", text: turn.utterance }],
        results: turn.kind === "results" ? turn.results : view.results,
        estimates: view.estimates.map((bar) =>
          barFor(bar.entityType, bar, turn.estimates, turn.assumed),
        ),
      };
    }
    case "error":
      return { ...view, error: event.message };
  }
}

export function viewFromEvents(events: ChatEvent[]): ChatView {
  return events.reduce(applyEvent, initialView());
}

/**
 * Deterministic plain-text projection of the view; the replay test
 * byte-compares this against a golden transcript.
 */
export function renderTranscriptText(view: ChatView): string {
  const lines: string[] = [];
  for (const bubble of view.transcript) {
    lines.push(`${bubble.speaker === "user" ? "user" : "bot"}> ${bubble.text}`);
  }
  if (view.results.length > 0) {
    lines.push("-- results --");
    for (const card of view.results) {
      lines.push(`${card.title} (${card.year}) rating ${card.rating.toFixed(1)}`);
    }
  }
  if (view.error !== null) {
    lines.push(`[error] ${view.error}`);
  }
  return lines.join("\n") + "\n";
}

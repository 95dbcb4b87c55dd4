/** Payload shapes of the /v1 session API. */

export type TurnKind = "ask" | "results" | "farewell";

export const ENTITY_TYPES = [
  "audience_age",
  "genre",
  "keyword",
  "country_or_continent",
  "person",
  "release_year",
] as const;

export type EntityTypeKey = (typeof ENTITY_TYPES)[number];

export interface ResultCard {
  id: string;
  title: string;
  year: number;
  rating: number;
}

export interface AssumedInfo {
  skipped: boolean;
  order: number;
}

export interface BotTurn {
  kind: TurnKind;
  entity_type: string | null;
  utterance: string;
  results: ResultCard[];
  estimates: Record<string, number>;
  assumed: Record<string, AssumedInfo>;
}

export interface SessionCreated {
  session_id: string;
  greeting: string;
}

export interface Health {
  status: "ok" | "degraded";
  movie_count: number;
  history_count: number;
}

/** DOM rendering and input wiring; all state lives in the ChatView. */

import { ChatView } from "./transcript.js";

const TYPE_LABELS: Record<string, string> = {
  audience_age: "audience",
  genre: "genre",
  keyword: "keyword",
  country_or_continent: "country",
  person: "person",
  release_year: "year",
};

export interface UiHandles {
  transcript: HTMLElement;
  results: HTMLElement;
  estimates: HTMLElement;
  banner: HTMLElement;
  retry: HTMLButtonElement;
  input: HTMLInputElement;
  send: HTMLButtonElement;
}

export function grabHandles(root: Document): UiHandles {
  const get = <T extends HTMLElement>(id: string): T => {
    const el = root.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el as T;
  };
  return {
    transcript: get("transcript"),
    results: get("results"),
    estimates: get("estimates"),
    banner: get("banner"),
    retry: get<HTMLButtonElement>("retry"),
    input: get<HTMLInputElement>("message-input"),
    send: get<HTMLButtonElement>("send-button"),
  };
}

export function render(view: ChatView, ui: UiHandles, busy: boolean): void {
  ui.transcript.replaceChildren(
    ...view.transcript.map((bubble) => {
      const div = document.createElement("div");
      div.className = `bubble ${bubble.speaker}`;
      div.textContent = bubble.text;
      return div;
    }),
  );
  ui.transcript.scrollTop = ui.transcript.scrollHeight;

  ui.results.replaceChildren(
    ...view.results.map((card) => {
      const el = document.createElement("div");
      el.className = "card";
      const title = document.createElement("strong");
      title.textContent = card.title;
      const meta = document.createElement("span");
      meta.textContent = ` (${card.year}) rating ${card.rating.toFixed(1)}`;
      el.append(title, meta);
      return el;
    }),
  );

  ui.estimates.replaceChildren(
    ...view.estimates.map((bar) => {
      const row = document.createElement("div");
      row.className = "estimate-row";
      row.dataset.type = bar.entityType;
      const label = document.createElement("span");
      label.className = "estimate-label";
      label.textContent = TYPE_LABELS[bar.entityType] ?? bar.entityType;
      const track = document.createElement("div");
      track.className = "estimate-track";
      const fill = document.createElement("div");
      fill.className = `estimate-fill ${bar.state}`;
      fill.style.width = `${Math.round(bar.value * 100)}%`;
      track.appendChild(fill);
      const state = document.createElement("span");
      state.className = "estimate-state";
      state.textContent =
        bar.state === "estimate" ? `skip ${bar.value.toFixed(2)}` : bar.state;
      row.append(label, track, state);
      return row;
    }),
  );

  const hasError = view.error !== null;
  ui.banner.classList.toggle("hidden", !hasError);
  ui.banner.querySelector(".banner-text")!.textContent = view.error ?? "";
  ui.retry.classList.toggle("hidden", !hasError);

  const disabled = busy || view.ended || view.sessionId === null;
  ui.send.disabled = disabled || ui.input.value.trim().length === 0;
  ui.input.disabled = busy || view.ended;
}

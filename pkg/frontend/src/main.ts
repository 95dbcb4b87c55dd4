import { ApiClient, ApiError } from "./api.js";
import { applyEvent, ChatEvent, ChatView, initialView } from "./transcript.js";
import { grabHandles, render } from "./ui.js";

const api = new ApiClient("");
const ui = grabHandles(document);

let view: ChatView = initialView();
let busy = false;

function dispatch(event: ChatEvent): void {
  view = applyEvent(view, event);
  render(view, ui, busy);
}

function setBusy(value: boolean): void {
  busy = value;
  render(view, ui, busy);
}

async function startSession(): Promise<void> {
  setBusy(true);
  try {
    const created = await api.createSession();
    dispatch({ type: "session_started", payload: created });
  } catch (err) {
    dispatch({ type: "error", message: describe(err) });
  } finally {
    setBusy(false);
  }
}

async function sendCurrentMessage(): Promise<void> {
  const text = ui.input.value.trim();
  if (!text || busy || view.sessionId === null || view.ended) return;
  ui.input.value = "";
  dispatch({ type: "user_message", text });
  setBusy(true); // one in-flight message at a time, matching the 409 contract
  try {
    const turn = await api.sendMessage(view.sessionId, text);
    dispatch({ type: "bot_turn", payload: turn });
  } catch (err) {
    dispatch({ type: "error", message: describe(err) });
  } finally {
    setBusy(false);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError && err.status === 409) {
    return "Still thinking about your previous message - try again in a moment.";
  }
  return err instanceof Error ? err.message : String(err);
}

ui.send.addEventListener("click", () => void sendCurrentMessage());
ui.input.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") void sendCurrentMessage();
});
ui.input.addEventListener("input", () => render(view, ui, busy));
ui.retry.addEventListener("click", () => {
  if (view.sessionId === null) {
    void startSession();
  } else {
    dispatch({ type: "error", message: "" });
    view = { ...view, error: null };
    render(view, ui, busy);
  }
});

document.getElementById("details-toggle")!.addEventListener("click", () => {
  document.getElementById("estimates-panel")!.classList.toggle("hidden");
});

void startSession();

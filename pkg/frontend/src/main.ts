import { ApiClient } from "./api.js";
import { renderBoard } from "./board.js";
import {
  BoardState,
  boardFromServer,
  buildAcceptBatch,
  decide,
  drainQueue,
  markStale,
  moveCursor,
  queueOffline,
  withSnippets,
} from "./state.js";

const api = new ApiClient("");

let labels: string[] = [];
let state: BoardState | null = null;
let root: HTMLElement;

function rerender(): void {
  if (state) {
    renderBoard(root, state, labels);
  }
}

async function loadLabel(label: string): Promise<void> {
  const page = await api.candidates(label, 1, 50);
  const preview = await api.preview(label);
  state = boardFromServer(page, preview);
  rerender();
}

async function loadEvidence(): Promise<void> {
  if (!state) return;
  const card = state.cards[state.cursor];
  if (!card || card.snippetsLoaded) return;
  const payload = await api.kwic(card.token, 8);
  state = withSnippets(state, card.token, payload.snippets);
  rerender();
}

async function submitRound(): Promise<void> {
  if (!state) return;
  const batch = buildAcceptBatch(state);
  try {
    const result = await api.accept(batch);
    if (result.ok) {
      // refetch so candidates and preview reflect the new round exactly
      await loadLabel(state.label);
      return;
    }
    if (result.conflict) {
      const labelState = (await api.labels()).labels.find((l) => l.label === state!.label);
      state = markStale(state, labelState ? labelState.version : -1);
    } else {
      state = { ...state, notice: result.detail };
    }
  } catch {
    state = queueOffline(state, batch);
  }
  rerender();
}

async function replayQueue(): Promise<void> {
  if (!state || state.queued.length === 0) return;
  const { state: drained, requests } = drainQueue(state);
  state = drained;
  for (const request of requests) {
    try {
      const result = await api.accept({ ...request, version: state.version });
      if (result.ok) {
        await loadLabel(state.label);
      } else {
        state = { ...state, notice: result.detail, stale: result.conflict };
      }
    } catch {
      state = queueOffline(state, request);
      break;
    }
  }
  rerender();
}

function onKey(event: KeyboardEvent): void {
  if (!state) return;
  const key = event.key;
  if (key === "j" || key === "ArrowDown") {
    state = moveCursor(state, 1);
  } else if (key === "k" || key === "ArrowUp") {
    state = moveCursor(state, -1);
  } else if (key === "a" || key === "r" || key === "s") {
    const decision = key === "a" ? "accept" : key === "r" ? "reject" : "skip";
    const outcome = decide(state, state.cursor, decision);
    state = outcome.state;
    if (outcome.blocked) {
      state = { ...state, notice: outcome.blocked };
      if (outcome.blocked.startsWith("show snippets")) {
        void loadEvidence();
      }
    } else {
      state = moveCursor({ ...state, notice: null }, 1);
    }
  } else if (key === "e") {
    void loadEvidence();
    return;
  } else if (key === "Enter") {
    void submitRound();
    return;
  } else {
    return;
  }
  event.preventDefault();
  rerender();
}

function onClick(event: MouseEvent): void {
  const target = event.target as HTMLElement;
  if (target.dataset.label) {
    void loadLabel(target.dataset.label);
  } else if (target.id === "refresh" && state) {
    void loadLabel(state.label);
  }
}

async function bootstrap(): Promise<void> {
  root = document.getElementById("board") as HTMLElement;
  try {
    const session = await api.session();
    labels = session.labels.map((l) => l.label);
    if (labels.length === 0) {
      root.textContent = "no labels in this session";
      return;
    }
    await loadLabel(labels[0]);
  } catch (err) {
    root.textContent = `cannot reach the curation API: ${String(err)}`;
    return;
  }
  document.addEventListener("keydown", onKey);
  document.addEventListener("click", onClick);
  window.addEventListener("online", () => void replayQueue());
}

void bootstrap();

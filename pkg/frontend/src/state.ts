import type {
  AcceptRequest,
  Candidate,
  CandidatePage,
  KwicSnippet,
  LabelState,
  PreviewRow,
} from "./types.js";

export type Decision = "accept" | "reject" | "skip";

export type TriageCard = {
  token: string;
  count: number;
  decision: Decision | null;
  snippets: KwicSnippet[];
  snippetsLoaded: boolean;
};

export type BoardState = {
  label: string;
  round: number;
  filteredCount: number;
  converged: boolean;
  version: number;
  preview: PreviewRow | null;
  cards: TriageCard[];
  cursor: number;
  page: number;
  total: number;
  stale: boolean;
  offline: boolean;
  queued: AcceptRequest[];
  notice: string | null;
};

/** Tokens at least this frequent demand KWIC evidence before acceptance. */
export const EVIDENCE_THRESHOLD = 100;

export function cardOf(candidate: Candidate): TriageCard {
  return {
    token: candidate.token,
    count: candidate.count,
    decision: null,
    snippets: [],
    snippetsLoaded: false,
  };
}

export function boardFromServer(page: CandidatePage, preview: PreviewRow | null): BoardState {
  return {
    label: page.label,
    round: page.round,
    filteredCount: page.filtered_count,
    converged: page.converged,
    version: page.version,
    preview,
    cards: page.candidates.map(cardOf),
    cursor: 0,
    page: page.page,
    total: page.total,
    stale: false,
    offline: false,
    queued: [],
    notice: null,
  };
}

export function needsEvidence(card: TriageCard): boolean {
  return card.count >= EVIDENCE_THRESHOLD && !card.snippetsLoaded;
}

/** Mark a decision on one card; acceptance is blocked until evidence is
 * shown for high-frequency tokens, and entirely while converged. */
export function decide(
  state: BoardState,
  index: number,
  decision: Decision,
): { state: BoardState; blocked: string | null } {
  const card = state.cards[index];
  if (!card) {
    return { state, blocked: "no card at cursor" };
  }
  if (decision === "accept" && state.converged) {
    return { state, blocked: "label converged; nothing to accept" };
  }
  if (decision === "accept" && needsEvidence(card)) {
    return { state, blocked: `show snippets first (count ${card.count})` };
  }
  const cards = state.cards.slice();
  cards[index] = { ...card, decision };
  return { state: { ...state, cards }, blocked: null };
}

export function withSnippets(
  state: BoardState,
  token: string,
  snippets: KwicSnippet[],
): BoardState {
  const cards = state.cards.map((card) =>
    card.token === token ? { ...card, snippets, snippetsLoaded: true } : card,
  );
  return { ...state, cards };
}

export function moveCursor(state: BoardState, delta: number): BoardState {
  if (state.cards.length === 0) {
    return state;
  }
  const cursor = Math.min(Math.max(state.cursor + delta, 0), state.cards.length - 1);
  return { ...state, cursor };
}

export function acceptedSurfaces(state: BoardState): string[] {
  return state.cards.filter((c) => c.decision === "accept").map((c) => c.token);
}

/** One accept request per label batch; rejected and skipped cards simply
 * stay out of the surface list (a reject-only batch posts an empty list,
 * which the server treats as convergence). */
export function buildAcceptBatch(state: BoardState): AcceptRequest {
  return {
    label: state.label,
    surfaces: acceptedSurfaces(state),
    version: state.version,
  };
}

export function applyAcceptResponse(state: BoardState, response: LabelState): BoardState {
  return {
    ...state,
    round: response.round,
    filteredCount: response.filtered_count,
    converged: response.converged,
    version: response.version,
    stale: false,
    notice: null,
  };
}

export function markStale(state: BoardState, serverVersion: number): BoardState {
  if (serverVersion === state.version) {
    return state;
  }
  return { ...state, stale: true, notice: "vocabulary changed elsewhere; refresh" };
}

export function queueOffline(state: BoardState, request: AcceptRequest): BoardState {
  return {
    ...state,
    offline: true,
    queued: [...state.queued, request],
    notice: "offline: decision queued, will replay on reconnect",
  };
}

export function drainQueue(state: BoardState): { state: BoardState; requests: AcceptRequest[] } {
  return {
    state: { ...state, queued: [], offline: false },
    requests: state.queued,
  };
}

export function decisionSummary(state: BoardState): {
  accepted: number;
  rejected: number;
  skipped: number;
  pending: number;
} {
  let accepted = 0;
  let rejected = 0;
  let skipped = 0;
  let pending = 0;
  for (const card of state.cards) {
    if (card.decision === "accept") accepted += 1;
    else if (card.decision === "reject") rejected += 1;
    else if (card.decision === "skip") skipped += 1;
    else pending += 1;
  }
  return { accepted, rejected, skipped, pending };
}

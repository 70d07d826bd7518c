import type { BoardState, TriageCard } from "./state.js";
import { decisionSummary, needsEvidence } from "./state.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function decisionBadge(card: TriageCard): string {
  if (card.decision === "accept") return "✓ accept";
  if (card.decision === "reject") return "✗ reject";
  if (card.decision === "skip") return "– skip";
  return "";
}

function renderCard(card: TriageCard, active: boolean): HTMLElement {
  const row = el("div", "card" + (active ? " active" : "") + (card.decision ? ` ${card.decision}` : ""));
  const head = el("div", "card-head");
  head.appendChild(el("span", "token", card.token));
  head.appendChild(el("span", "count", String(card.count)));
  const badge = decisionBadge(card);
  if (badge) {
    head.appendChild(el("span", "decision", badge));
  }
  if (needsEvidence(card)) {
    head.appendChild(el("span", "evidence-hint", "evidence required (e)"));
  }
  row.appendChild(head);
  if (card.snippetsLoaded) {
    const list = el("div", "snippets");
    if (card.snippets.length === 0) {
      list.appendChild(el("div", "snippet empty", "no occurrences sampled"));
    }
    for (const s of card.snippets) {
      const line = el("div", "snippet");
      line.appendChild(el("span", "context", s.left));
      line.appendChild(el("span", "match", s.match));
      line.appendChild(el("span", "context", s.right));
      line.appendChild(el("span", "meta", ` [x=${s.score} ${s.day}]`));
      list.appendChild(line);
    }
    row.appendChild(list);
  }
  return row;
}

function fmt(value: number | null | undefined, digits = 2): string {
  return value === null || value === undefined ? "–" : value.toFixed(digits);
}

/** Rebuild the board view from state; every number shown is server-reported. */
export function renderBoard(root: HTMLElement, state: BoardState, labels: string[]): void {
  root.textContent = "";

  const tabs = el("div", "tabs");
  for (const label of labels) {
    const tab = el("button", "tab" + (label === state.label ? " current" : ""), label);
    tab.dataset.label = label;
    tabs.appendChild(tab);
  }
  root.appendChild(tabs);

  const status = el("div", "status");
  status.appendChild(el("span", "stat", `round ${state.round}`));
  status.appendChild(el("span", "stat", `filtered ${state.filteredCount}`));
  status.appendChild(el("span", "stat", `version ${state.version}`));
  status.appendChild(el("span", "stat", `${state.total} candidates`));
  if (state.converged) {
    status.appendChild(el("span", "converged", "label converged — accepting disabled"));
  }
  root.appendChild(status);

  if (state.stale) {
    const banner = el("div", "banner stale", state.notice ?? "stale state — refresh");
    const refresh = el("button", "refresh", "refresh");
    refresh.id = "refresh";
    banner.appendChild(refresh);
    root.appendChild(banner);
  }
  if (state.offline) {
    root.appendChild(el("div", "banner offline", state.notice ?? "connection lost — decisions queued"));
  } else if (state.notice && !state.stale) {
    root.appendChild(el("div", "banner notice", state.notice));
  }

  if (state.preview) {
    const preview = el("div", "preview");
    preview.appendChild(el("span", "stat", `n=${state.preview.n}`));
    preview.appendChild(el("span", "stat", `mean ${fmt(state.preview.mean_x)}`));
    preview.appendChild(el("span", "stat", `f(x=10) ${fmt(state.preview.f_x10)}`));
    preview.appendChild(el("span", "stat", `f(x<2) ${fmt(state.preview.f_xlt2)}`));
    root.appendChild(preview);
  }

  const summary = decisionSummary(state);
  root.appendChild(
    el(
      "div",
      "summary",
      `pending ${summary.pending} · accept ${summary.accepted} · ` +
        `reject ${summary.rejected} · skip ${summary.skipped} — ` +
        "keys: a accept, r reject, s skip, e evidence, j/k move, enter submit round",
    ),
  );

  const list = el("div", "cards");
  state.cards.forEach((card, index) => {
    list.appendChild(renderCard(card, index === state.cursor));
  });
  if (state.cards.length === 0) {
    list.appendChild(el("div", "card empty", "no candidates on this page"));
  }
  root.appendChild(list);
}

import { ChatSession } from "./state.js";
import { CandidateView, DebugView, TurnView } from "./types.js";

// Rendering works against a minimal structural slice of the DOM so the
// test suite can drive it with a lightweight stub document.

export interface El {
  className: string;
  textContent: string | null;
  disabled?: boolean;
  value?: string;
  placeholder?: string;
  appendChild(child: El): unknown;
  addEventListener(type: string, handler: (ev?: { key?: string }) => void): unknown;
}

export interface Doc {
  createElement(tag: string): El;
}

export interface Handlers {
  onStart(): void;
  onSend(text: string): void;
  onRetry(): void;
}

function el(doc: Doc, tag: string, className: string, text?: string): El {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function badgeText(turn: TurnView): string {
  return turn.fsm_turn ? `FSM: ${turn.source}` : turn.source;
}

export function conceptChip(concept: { path: string; slot: string | null }): string {
  return concept.slot ? `${concept.path} = ${concept.slot}` : concept.path;
}

function renderBanner(doc: Doc, session: ChatSession, handlers: Handlers): El {
  const banner = el(doc, "div", session.error ? "banner visible" : "banner");
  if (session.error) {
    banner.appendChild(el(doc, "span", "banner-text", session.error));
    const retry = el(doc, "button", "retry", "retry");
    retry.addEventListener("click", () => handlers.onRetry());
    banner.appendChild(retry);
  }
  return banner;
}

function renderBubblePair(doc: Doc, turn: TurnView): El[] {
  const user = el(doc, "div", "bubble user");
  user.appendChild(el(doc, "span", "text", turn.user_text));
  const bot = el(doc, "div", "bubble bot");
  bot.appendChild(el(doc, "span", "badge", badgeText(turn)));
  bot.appendChild(el(doc, "span", "text", turn.reply));
  return [user, bot];
}

function renderLog(doc: Doc, session: ChatSession): El {
  const log = el(doc, "div", "log");
  if (session.opening !== null) {
    const opening = el(doc, "div", "bubble bot opening");
    opening.appendChild(el(doc, "span", "badge", "opening"));
    opening.appendChild(el(doc, "span", "text", session.opening));
    log.appendChild(opening);
  }
  for (const turn of session.turns) {
    for (const bubble of renderBubblePair(doc, turn)) log.appendChild(bubble);
  }
  if (session.ended) {
    log.appendChild(el(doc, "div", "end-marker", "conversation ended"));
  }
  return log;
}

function renderComposer(doc: Doc, session: ChatSession, handlers: Handlers): El {
  const composer = el(doc, "div", "composer");
  const input = el(doc, "input", "input");
  input.placeholder = session.ended ? "session over" : "say something...";
  input.disabled = !session.canSend();
  const send = el(doc, "button", "send", "send");
  send.disabled = !session.canSend();
  const submit = () => {
    const text = (input.value ?? "").trim();
    if (text) handlers.onSend(text);
  };
  send.addEventListener("click", submit);
  input.addEventListener("keydown", (ev) => {
    if (ev && ev.key === "Enter") submit();
  });
  composer.appendChild(input);
  composer.appendChild(send);
  return composer;
}

function renderStack(doc: Doc, debug: DebugView): El {
  const panel = el(doc, "div", "panel stack-panel");
  panel.appendChild(el(doc, "h3", "panel-title", "fsm stack"));
  const list = el(doc, "ul", "stack");
  debug.stack.forEach((fsmId, index) => {
    const top = index === debug.stack.length - 1;
    list.appendChild(el(doc, "li", top ? "stack-item top" : "stack-item", fsmId));
  });
  panel.appendChild(list);
  return panel;
}

function renderConcepts(doc: Doc, debug: DebugView): El {
  const panel = el(doc, "div", "panel concepts-panel");
  panel.appendChild(el(doc, "h3", "panel-title", "concepts"));
  const chips = el(doc, "div", "chips");
  for (const concept of debug.concepts) {
    chips.appendChild(el(doc, "span", "chip", conceptChip(concept)));
  }
  panel.appendChild(chips);
  return panel;
}

function renderMeta(doc: Doc, debug: DebugView): El {
  const panel = el(doc, "div", "panel meta-panel");
  panel.appendChild(el(doc, "h3", "panel-title", "nlu"));
  panel.appendChild(el(doc, "div", "meta intents", debug.intents.join(", ")));
  panel.appendChild(el(doc, "div", "meta sentiment", String(debug.sentiment)));
  panel.appendChild(el(doc, "div", "meta topic", debug.topic));
  return panel;
}

function renderCandidateRow(doc: Doc, candidate: CandidateView): El {
  const row = el(doc, "div", candidate.kept ? "cand" : "cand filtered");
  row.appendChild(el(doc, "span", "cand-text", candidate.text));
  row.appendChild(el(doc, "span", "cand-source", candidate.source));
  row.appendChild(el(doc, "span", "cand-score", String(candidate.score)));
  row.appendChild(el(doc, "span", "cand-reasons", candidate.reasons.join(", ")));
  return row;
}

function renderCandidates(doc: Doc, debug: DebugView): El {
  const panel = el(doc, "div", "panel candidates-panel");
  panel.appendChild(el(doc, "h3", "panel-title", "candidates"));
  const table = el(doc, "div", "cands");
  for (const candidate of debug.candidates) {
    table.appendChild(renderCandidateRow(doc, candidate));
  }
  panel.appendChild(table);
  return panel;
}

function renderSidebar(doc: Doc, session: ChatSession): El {
  const sidebar = el(doc, "div", "sidebar");
  const last = session.turns[session.turns.length - 1];
  if (!last || !last.debug) {
    sidebar.appendChild(el(doc, "div", "sidebar-empty", "debug info appears after the first turn"));
    return sidebar;
  }
  sidebar.appendChild(renderStack(doc, last.debug));
  sidebar.appendChild(renderConcepts(doc, last.debug));
  sidebar.appendChild(renderMeta(doc, last.debug));
  sidebar.appendChild(renderCandidates(doc, last.debug));
  return sidebar;
}

export function renderApp(doc: Doc, root: El, session: ChatSession, handlers: Handlers): void {
  root.textContent = ""; // clear previous render
  root.appendChild(renderBanner(doc, session, handlers));
  const header = el(doc, "div", "header");
  header.appendChild(el(doc, "span", "title", "stackchat"));
  const start = el(doc, "button", "start", session.started ? "connected" : "start conversation");
  start.disabled = session.pending || session.started;
  start.addEventListener("click", () => handlers.onStart());
  header.appendChild(start);
  root.appendChild(header);

  const layout = el(doc, "div", "layout");
  const chat = el(doc, "div", "chat");
  chat.appendChild(renderLog(doc, session));
  chat.appendChild(renderComposer(doc, session, handlers));
  layout.appendChild(chat);
  layout.appendChild(renderSidebar(doc, session));
  root.appendChild(layout);
}

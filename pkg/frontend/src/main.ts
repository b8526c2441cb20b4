import { ApiClient } from "./api.js";
import { ChatSession } from "./state.js";
import { Doc, El, renderApp } from "./render.js";

// Browser entry point. The engine base URL comes from ?engine=... and
// defaults to same-origin.

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get("engine") ?? "");
  const session = new ChatSession(api);
  const doc = document as unknown as Doc;
  const root = document.getElementById("app") as unknown as El;

  const handlers = {
    onStart: () => void session.start(),
    onSend: (text: string) => void session.send(text),
    onRetry: () => void session.retry(),
  };
  session.onChange(() => renderApp(doc, root, session, handlers));
  renderApp(doc, root, session, handlers);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}

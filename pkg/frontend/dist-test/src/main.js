import { ApiClient } from "./api.js";
import { ChatSession } from "./state.js";
import { renderApp } from "./render.js";
// Browser entry point. The engine base URL comes from ?engine=... and
// defaults to same-origin.
function boot() {
    const params = new URLSearchParams(window.location.search);
    const api = new ApiClient(params.get("engine") ?? "");
    const session = new ChatSession(api);
    const doc = document;
    const root = document.getElementById("app");
    const handlers = {
        onStart: () => void session.start(),
        onSend: (text) => void session.send(text),
        onRetry: () => void session.retry(),
    };
    session.onChange(() => renderApp(doc, root, session, handlers));
    renderApp(doc, root, session, handlers);
}
if (typeof document !== "undefined" && document.getElementById("app")) {
    boot();
}

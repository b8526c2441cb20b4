export class ChatSession {
    constructor(api) {
        this.api = api;
        this.sessionId = null;
        this.opening = null;
        this.turns = [];
        this.pending = false;
        this.ended = false;
        this.error = null;
        this.failedText = null; // last text that errored, for retry
        this.listeners = [];
    }
    onChange(listener) {
        this.listeners.push(listener);
    }
    notify() {
        for (const listener of this.listeners)
            listener();
    }
    get started() {
        return this.sessionId !== null;
    }
    canSend() {
        return this.started && !this.pending && !this.ended;
    }
    async start(seed) {
        if (this.pending || this.started)
            return; // duplicate click guard
        this.pending = true;
        this.error = null;
        this.notify();
        try {
            const start = await this.api.startSession(seed);
            this.sessionId = start.session_id;
            this.opening = start.reply;
        }
        catch (err) {
            this.error = err instanceof Error ? err.message : String(err);
        }
        finally {
            this.pending = false;
            this.notify();
        }
    }
    async send(text) {
        if (!this.canSend() || !text.trim())
            return;
        this.pending = true;
        this.error = null;
        this.failedText = null;
        this.notify();
        try {
            const payload = await this.api.sendTurn(this.sessionId, text);
            this.turns.push({ user_text: text, ...payload });
            this.ended = payload.ended;
        }
        catch (err) {
            this.error = err instanceof Error ? err.message : String(err);
            this.failedText = text;
        }
        finally {
            this.pending = false;
            this.notify();
        }
    }
    async retry() {
        const text = this.failedText;
        if (text === null)
            return;
        this.failedText = null;
        await this.send(text);
    }
    async transcript() {
        if (!this.started)
            return "";
        return this.api.fetchTranscript(this.sessionId);
    }
}

import { ApiClient } from "./api.js";
import { TurnView } from "./types.js";

// One in-flight request per session: `pending` locks both the start
// button and the input row until the engine answers.

export type Listener = () => void;

export class ChatSession {
  sessionId: string | null = null;
  opening: string | null = null;
  turns: TurnView[] = [];
  pending = false;
  ended = false;
  error: string | null = null;
  failedText: string | null = null; // last text that errored, for retry
  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get started(): boolean {
    return this.sessionId !== null;
  }

  canSend(): boolean {
    return this.started && !this.pending && !this.ended;
  }

  async start(seed?: number): Promise<void> {
    if (this.pending || this.started) return; // duplicate click guard
    this.pending = true;
    this.error = null;
    this.notify();
    try {
      const start = await this.api.startSession(seed);
      this.sessionId = start.session_id;
      this.opening = start.reply;
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.pending = false;
      this.notify();
    }
  }

  async send(text: string): Promise<void> {
    if (!this.canSend() || !text.trim()) return;
    this.pending = true;
    this.error = null;
    this.failedText = null;
    this.notify();
    try {
      const payload = await this.api.sendTurn(this.sessionId as string, text);
      this.turns.push({ user_text: text, ...payload });
      this.ended = payload.ended;
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
      this.failedText = text;
    } finally {
      this.pending = false;
      this.notify();
    }
  }

  async retry(): Promise<void> {
    const text = this.failedText;
    if (text === null) return;
    this.failedText = null;
    await this.send(text);
  }

  async transcript(): Promise<string> {
    if (!this.started) return "";
    return this.api.fetchTranscript(this.sessionId as string);
  }
}

import { SessionStart, TurnPayload } from "./types.js";

export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init?: unknown) => Promise<ResponseLike>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (globalThis as { fetch?: FetchLike }).fetch as FetchLike,
  ) {}

  private async post(path: string, body: unknown): Promise<unknown> {
    let response: ResponseLike;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `engine unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(response.status, `HTTP ${response.status} from ${path}`);
    }
    return response.json();
  }

  async startSession(seed?: number): Promise<SessionStart> {
    const body = seed === undefined ? {} : { seed };
    return (await this.post("/api/sessions", body)) as SessionStart;
  }

  async sendTurn(sessionId: string, text: string): Promise<TurnPayload> {
    return (await this.post(
      `/api/sessions/${encodeURIComponent(sessionId)}/turns`,
      { text },
    )) as TurnPayload;
  }

  async fetchTranscript(sessionId: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}/transcript`,
    );
    if (!response.ok) {
      throw new ApiError(response.status, `HTTP ${response.status} fetching transcript`);
    }
    return response.text();
  }
}

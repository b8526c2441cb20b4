export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    constructor(baseUrl = "", fetchFn = globalThis.fetch) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async post(path, body) {
        let response;
        try {
            response = await this.fetchFn(`${this.baseUrl}${path}`, {
                method: "POST",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify(body),
            });
        }
        catch (err) {
            throw new ApiError(0, `engine unreachable: ${String(err)}`);
        }
        if (!response.ok) {
            throw new ApiError(response.status, `HTTP ${response.status} from ${path}`);
        }
        return response.json();
    }
    async startSession(seed) {
        const body = seed === undefined ? {} : { seed };
        return (await this.post("/api/sessions", body));
    }
    async sendTurn(sessionId, text) {
        return (await this.post(`/api/sessions/${encodeURIComponent(sessionId)}/turns`, { text }));
    }
    async fetchTranscript(sessionId) {
        const response = await this.fetchFn(`${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}/transcript`);
        if (!response.ok) {
            throw new ApiError(response.status, `HTTP ${response.status} fetching transcript`);
        }
        return response.text();
    }
}

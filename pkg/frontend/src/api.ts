// Thin client for the three rating-service endpoints.

import type {ListPayload, ProgressSummary, SubmitAck, SubmitBody} from "./types.js";

/** The server understood the request and said no (e.g. "already evaluated"). */
export class ServiceRejection extends Error {
    constructor(readonly status: number, readonly reason: string) {
        super(reason);
        this.name = "ServiceRejection";
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RatingApi {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
    ) {}

    async fetchList(listId: string, raterId: string, scale: string): Promise<ListPayload> {
        const query = new URLSearchParams({rater_id: raterId, scale});
        const url = `${this.baseUrl}/api/lists/${encodeURIComponent(listId)}?${query}`;
        return this.request<ListPayload>(url);
    }

    async submitRatings(body: SubmitBody): Promise<SubmitAck> {
        return this.request<SubmitAck>(`${this.baseUrl}/api/ratings`, {
            method: "POST",
            headers: {"Content-Type": "application/json"},
            body: JSON.stringify(body),
        });
    }

    async fetchProgress(): Promise<ProgressSummary> {
        return this.request<ProgressSummary>(`${this.baseUrl}/api/progress`);
    }

    // Network failures propagate as the fetch TypeError so callers can
    // offer a retry; server-side refusals become ServiceRejection.
    private async request<T>(url: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchFn(url, init);
        const payload = await response.json().catch(() => ({}));
        if (!response.ok) {
            const reason =
                typeof payload === "object" && payload !== null && "error" in payload
                    ? String((payload as {error: unknown}).error)
                    : `request failed with status ${response.status}`;
            throw new ServiceRejection(response.status, reason);
        }
        return payload as T;
    }
}

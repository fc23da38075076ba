import {describe, expect, it} from "vitest";

import {RatingApi, ServiceRejection} from "../src/api.js";
import {jsonResponse, samplePayload} from "./fixtures.js";

describe("RatingApi", () => {
    it("fetches a list with rater and scale in the query", async () => {
        const calls: string[] = [];
        const api = new RatingApi("http://svc", async (url) => {
            calls.push(url);
            return jsonResponse(200, samplePayload());
        });
        const payload = await api.fetchList("list_01", "rater 7", "overall");
        expect(payload.items).toHaveLength(30);
        expect(calls[0]).toBe("http://svc/api/lists/list_01?rater_id=rater+7&scale=overall");
    });

    it("posts submissions as JSON", async () => {
        let captured: RequestInit | undefined;
        const api = new RatingApi("http://svc", async (_url, init) => {
            captured = init;
            return jsonResponse(200, {accepted: true, records: 30, duplicate: false});
        });
        const ack = await api.submitRatings({
            rater_id: "r",
            list_id: "l",
            scale: "overall",
            values: {img000: 4},
        });
        expect(ack.accepted).toBe(true);
        expect(captured?.method).toBe("POST");
        expect(JSON.parse(String(captured?.body))).toMatchObject({
            rater_id: "r",
            values: {img000: 4},
        });
    });

    it("turns server refusals into ServiceRejection with the reason", async () => {
        const api = new RatingApi("http://svc", async () =>
            jsonResponse(403, {error: "already evaluated"}),
        );
        const attempt = api.fetchList("list_01", "r", "overall");
        await expect(attempt).rejects.toBeInstanceOf(ServiceRejection);
        await expect(attempt).rejects.toMatchObject({status: 403, reason: "already evaluated"});
    });

    it("copes with non-JSON error bodies", async () => {
        const api = new RatingApi("http://svc", async () => new Response("boom", {status: 500}));
        await expect(api.fetchProgress()).rejects.toMatchObject({
            reason: "request failed with status 500",
        });
    });

    it("lets network failures bubble for retry handling", async () => {
        const api = new RatingApi("http://svc", async () => {
            throw new TypeError("fetch failed");
        });
        await expect(api.fetchProgress()).rejects.toBeInstanceOf(TypeError);
    });
});

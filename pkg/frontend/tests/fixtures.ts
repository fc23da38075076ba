import type {ListPayload} from "../src/types.js";

export function fakeStorage(): Storage {
    const data = new Map<string, string>();
    return {
        get length() {
            return data.size;
        },
        clear: () => data.clear(),
        getItem: (key: string) => data.get(key) ?? null,
        key: (index: number) => [...data.keys()][index] ?? null,
        removeItem: (key: string) => void data.delete(key),
        setItem: (key: string, value: string) => void data.set(key, value),
    } as Storage;
}

export function samplePayload(itemCount = 30): ListPayload {
    return {
        list_id: "list_01",
        rater_id: "rater-7",
        scale: {
            name: "overall",
            min: 1,
            max: 7,
            labels: {"1": "Very bad", "7": "Very good"},
        },
        instructions: {
            examples: [
                {end: "good", caption: "a precise description of the scene"},
                {end: "bad", caption: "words unrelated to the image"},
            ],
        },
        items: Array.from({length: itemCount}, (_, i) => ({
            image_id: `img${String(i).padStart(3, "0")}`,
            caption: `caption number ${i}`,
            image_url: `/images/img${String(i).padStart(3, "0")}`,
        })),
    };
}

export function jsonResponse(status: number, body: unknown): Response {
    return new Response(JSON.stringify(body), {
        status,
        headers: {"Content-Type": "application/json"},
    });
}

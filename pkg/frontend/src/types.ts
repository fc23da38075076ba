// Wire types mirroring the rating service payloads. Field names follow
// the ratings-store schema (rater_id, list_id, image_id, scale, value).

export interface ScaleInfo {
    name: string;
    min: number;
    max: number;
    labels: Record<string, string>;
}

export interface RatingItem {
    image_id: string;
    caption: string;
    image_url: string;
}

export interface InstructionExample {
    end: "good" | "bad";
    caption: string;
    image_id?: string;
    image_url?: string;
}

export interface ListPayload {
    list_id: string;
    rater_id: string;
    scale: ScaleInfo;
    instructions: { examples: InstructionExample[] };
    items: RatingItem[];
}

export interface SubmitBody {
    rater_id: string;
    list_id: string;
    scale: string;
    values: Record<string, number>;
}

export interface SubmitAck {
    accepted: boolean;
    records: number;
    duplicate: boolean;
}

export interface ListProgress {
    list_id: string;
    items: number;
    submissions: number;
    raters: string[];
}

export interface ProgressSummary {
    lists: ListProgress[];
    total_records: number;
    open_sessions: number;
}

// Local view state for one rating session: entered values, the current
// item, and instruction bookkeeping. Values persist to storage on every
// change so a page reload within a session loses nothing.

import type {ListPayload, SubmitBody} from "./types.js";

interface SessionSnapshot {
    list_id: string;
    rater_id: string;
    scale: string;
    values: (number | null)[];
    index: number;
    instructionsDismissed: boolean;
}

export class RatingSession {
    readonly payload: ListPayload;
    private values: (number | null)[];
    private currentIndex = 0;
    private dismissed = false;
    private readonly storage: Storage | null;

    constructor(payload: ListPayload, storage: Storage | null = null) {
        this.payload = payload;
        this.values = payload.items.map(() => null);
        this.storage = storage;
        this.restore();
    }

    get itemCount(): number {
        return this.payload.items.length;
    }

    get index(): number {
        return this.currentIndex;
    }

    get instructionsDismissed(): boolean {
        return this.dismissed;
    }

    currentItem() {
        const item = this.payload.items[this.currentIndex];
        if (!item) throw new RangeError(`no item at index ${this.currentIndex}`);
        return item;
    }

    valueAt(index: number): number | null {
        const value = this.values[index];
        return value === undefined ? null : value;
    }

    ratedCount(): number {
        return this.values.filter((v) => v !== null).length;
    }

    /** Submission is possible only once every item has a value. */
    canSubmit(): boolean {
        return this.ratedCount() === this.itemCount;
    }

    rate(index: number, value: number): void {
        if (index < 0 || index >= this.itemCount) {
            throw new RangeError(`no item at index ${index}`);
        }
        const {min, max} = this.payload.scale;
        if (!Number.isInteger(value) || value < min || value > max) {
            throw new RangeError(`value ${value} outside scale [${min}, ${max}]`);
        }
        this.values[index] = value;
        this.persist();
    }

    goTo(index: number): void {
        if (index < 0 || index >= this.itemCount) {
            throw new RangeError(`no item at index ${index}`);
        }
        this.currentIndex = index;
        this.persist();
    }

    next(): void {
        if (this.currentIndex < this.itemCount - 1) this.goTo(this.currentIndex + 1);
    }

    previous(): void {
        if (this.currentIndex > 0) this.goTo(this.currentIndex - 1);
    }

    /** Instructions are shown once; dismissing them again is a no-op. */
    dismissInstructions(): void {
        this.dismissed = true;
        this.persist();
    }

    submissionBody(): SubmitBody {
        if (!this.canSubmit()) {
            throw new Error(`incomplete: ${this.ratedCount()} of ${this.itemCount} rated`);
        }
        const values: Record<string, number> = {};
        this.payload.items.forEach((item, i) => {
            values[item.image_id] = this.values[i] as number;
        });
        return {
            rater_id: this.payload.rater_id,
            list_id: this.payload.list_id,
            scale: this.payload.scale.name,
            values,
        };
    }

    clearStored(): void {
        this.storage?.removeItem(this.storageKey());
    }

    private storageKey(): string {
        const {list_id, rater_id, scale} = this.payload;
        return `phonoscore-rating:${rater_id}:${list_id}:${scale.name}`;
    }

    private persist(): void {
        if (!this.storage) return;
        const snapshot: SessionSnapshot = {
            list_id: this.payload.list_id,
            rater_id: this.payload.rater_id,
            scale: this.payload.scale.name,
            values: this.values,
            index: this.currentIndex,
            instructionsDismissed: this.dismissed,
        };
        this.storage.setItem(this.storageKey(), JSON.stringify(snapshot));
    }

    private restore(): void {
        const raw = this.storage?.getItem(this.storageKey());
        if (!raw) return;
        try {
            const snapshot = JSON.parse(raw) as SessionSnapshot;
            if (
                snapshot.list_id !== this.payload.list_id ||
                snapshot.rater_id !== this.payload.rater_id ||
                snapshot.scale !== this.payload.scale.name ||
                !Array.isArray(snapshot.values) ||
                snapshot.values.length !== this.itemCount
            ) {
                return;
            }
            const {min, max} = this.payload.scale;
            this.values = snapshot.values.map((v) =>
                typeof v === "number" && Number.isInteger(v) && v >= min && v <= max ? v : null,
            );
            this.currentIndex = Math.min(Math.max(snapshot.index, 0), this.itemCount - 1);
            this.dismissed = Boolean(snapshot.instructionsDismissed);
        } catch {
            // corrupted snapshot: start fresh
        }
    }
}

// DOM rendering: one item per screen, image above caption, discrete
// rating buttons. Controls and test items are indistinguishable here by
// construction: the payload carries no such flag.

import type {RatingSession} from "./state.js";
import type {InstructionExample, SubmitAck} from "./types.js";

export interface UiHandlers {
    onStart(): void;
    onRate(index: number, value: number): void;
    onNavigate(index: number): void;
    onSubmit(): void;
    onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

export function renderInstructions(
    root: HTMLElement,
    session: RatingSession,
    handlers: UiHandlers,
): void {
    root.replaceChildren();
    const {scale} = session.payload;
    const view = el("div", "view instructions-view");
    view.appendChild(el("h1", "title", "Rate image captions"));
    view.appendChild(
        el(
            "p",
            "lead",
            `You will see ${session.itemCount} image/caption pairs, one at a time. ` +
                `For each pair, rate how well the caption describes the image on a ` +
                `scale from ${scale.min} (${scale.labels[String(scale.min)] ?? "worst"}) ` +
                `to ${scale.max} (${scale.labels[String(scale.max)] ?? "best"}).`,
        ),
    );
    const examples = el("div", "examples");
    for (const example of session.payload.instructions.examples) {
        examples.appendChild(renderExample(example, scale.min, scale.max));
    }
    view.appendChild(examples);
    const start = el("button", "primary start-button", "Start rating");
    start.addEventListener("click", () => handlers.onStart());
    view.appendChild(start);
    root.appendChild(view);
}

function renderExample(example: InstructionExample, min: number, max: number): HTMLElement {
    const box = el("div", `example example-${example.end}`);
    const grade = example.end === "good" ? `${max} (Very good)` : `${min} (Very bad)`;
    box.appendChild(el("div", "example-grade", `Example of a ${grade} caption`));
    if (example.image_url) {
        const image = el("img", "example-image");
        image.src = example.image_url;
        image.alt = "";
        box.appendChild(image);
    }
    box.appendChild(el("div", "example-caption", example.caption));
    return box;
}

export function renderItem(root: HTMLElement, session: RatingSession, handlers: UiHandlers): void {
    root.replaceChildren();
    const item = session.currentItem();
    const {scale} = session.payload;
    const view = el("div", "view item-view");

    view.appendChild(
        el("div", "progress", `Item ${session.index + 1} of ${session.itemCount} — ` +
            `${session.ratedCount()} rated`),
    );

    const figure = el("figure", "item-figure");
    const image = el("img", "item-image");
    image.src = item.image_url;
    image.alt = `image ${item.image_id}`;
    figure.appendChild(image);
    const caption = el("figcaption", "item-caption", item.caption);
    figure.appendChild(caption);
    view.appendChild(figure);

    const ratings = el("div", "rating-buttons");
    const current = session.valueAt(session.index);
    for (let value = scale.min; value <= scale.max; value += 1) {
        const button = el("button", "rating-value", String(value));
        if (value === current) button.classList.add("selected");
        const label = scale.labels[String(value)];
        if (label) button.title = label;
        button.addEventListener("click", () => handlers.onRate(session.index, value));
        ratings.appendChild(button);
    }
    view.appendChild(ratings);
    const endpoints = el("div", "scale-endpoints");
    endpoints.appendChild(el("span", "scale-min", scale.labels[String(scale.min)] ?? ""));
    endpoints.appendChild(el("span", "scale-max", scale.labels[String(scale.max)] ?? ""));
    view.appendChild(endpoints);

    const nav = el("div", "nav");
    const prev = el("button", "nav-prev", "Previous");
    prev.disabled = session.index === 0;
    prev.addEventListener("click", () => handlers.onNavigate(session.index - 1));
    nav.appendChild(prev);
    const next = el("button", "nav-next", "Next");
    next.disabled = session.index >= session.itemCount - 1;
    next.addEventListener("click", () => handlers.onNavigate(session.index + 1));
    nav.appendChild(next);
    const submit = el("button", "primary submit-button", "Submit all ratings");
    submit.disabled = !session.canSubmit();
    submit.addEventListener("click", () => handlers.onSubmit());
    nav.appendChild(submit);
    view.appendChild(nav);

    root.appendChild(view);
}

export function renderCompletion(root: HTMLElement, ack: SubmitAck): void {
    root.replaceChildren();
    const view = el("div", "view done-view");
    view.appendChild(el("h1", "title", "Thank you!"));
    const detail = ack.duplicate
        ? "This list was already submitted; nothing was recorded twice."
        : `Your ${ack.records} ratings were recorded.`;
    view.appendChild(el("p", "lead", detail));
    root.appendChild(view);
}

export function renderRejection(root: HTMLElement, reason: string): void {
    root.replaceChildren();
    const view = el("div", "view rejected-view");
    view.appendChild(el("h1", "title", "Submission refused"));
    view.appendChild(el("p", "lead rejection-reason", reason));
    root.appendChild(view);
}

export function renderRetry(root: HTMLElement, handlers: UiHandlers): void {
    root.replaceChildren();
    const view = el("div", "view retry-view");
    view.appendChild(el("h1", "title", "Connection problem"));
    view.appendChild(
        el("p", "lead", "Your ratings are saved on this device. Check the connection and try again."),
    );
    const retry = el("button", "primary retry-button", "Retry submission");
    retry.addEventListener("click", () => handlers.onRetry());
    view.appendChild(retry);
    root.appendChild(view);
}

export function renderFatal(root: HTMLElement, message: string): void {
    root.replaceChildren();
    const view = el("div", "view fatal-view");
    view.appendChild(el("h1", "title", "Cannot load list"));
    view.appendChild(el("p", "lead", message));
    root.appendChild(view);
}

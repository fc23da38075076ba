// Bootstrap: read session parameters from the query string, fetch the
// list, and drive the instruction -> items -> submit flow.

import {RatingApi, ServiceRejection} from "./api.js";
import {RatingSession} from "./state.js";
import {
    renderCompletion,
    renderFatal,
    renderInstructions,
    renderItem,
    renderRejection,
    renderRetry,
    type UiHandlers,
} from "./ui.js";

export interface AppConfig {
    serviceBase: string;
    listId: string;
    raterId: string;
    scale: string;
}

export function configFromLocation(location: Location): AppConfig | null {
    const params = new URLSearchParams(location.search);
    const listId = params.get("list") ?? "";
    const raterId = params.get("rater") ?? "";
    if (!listId || !raterId) return null;
    return {
        serviceBase: params.get("service") ?? location.origin,
        listId,
        raterId,
        scale: params.get("scale") ?? "overall",
    };
}

export async function startApp(
    root: HTMLElement,
    config: AppConfig,
    storage: Storage | null = null,
    api: RatingApi = new RatingApi(config.serviceBase),
): Promise<void> {
    let payload;
    try {
        payload = await api.fetchList(config.listId, config.raterId, config.scale);
    } catch (error) {
        renderFatal(root, error instanceof Error ? error.message : String(error));
        return;
    }
    const session = new RatingSession(payload, storage);

    const handlers: UiHandlers = {
        onStart() {
            session.dismissInstructions();
            renderItem(root, session, handlers);
        },
        onRate(index, value) {
            session.rate(index, value);
            if (index < session.itemCount - 1) session.next();
            renderItem(root, session, handlers);
        },
        onNavigate(index) {
            session.goTo(index);
            renderItem(root, session, handlers);
        },
        onSubmit() {
            void submit();
        },
        onRetry() {
            void submit();
        },
    };

    async function submit(): Promise<void> {
        try {
            const ack = await api.submitRatings(session.submissionBody());
            session.clearStored();
            renderCompletion(root, ack);
        } catch (error) {
            if (error instanceof ServiceRejection) {
                // entered values stay in storage; the reason is shown as-is
                renderRejection(root, error.reason);
            } else {
                renderRetry(root, handlers);
            }
        }
    }

    if (session.instructionsDismissed) {
        renderItem(root, session, handlers);
    } else {
        renderInstructions(root, session, handlers);
    }
}

function boot(): void {
    const root = document.getElementById("app");
    if (!root) return;
    const config = configFromLocation(window.location);
    if (!config) {
        renderFatal(
            root,
            "Missing parameters: open this page as ?list=<list_id>&rater=<your id>" +
                "&scale=overall|actions|objects",
        );
        return;
    }
    void startApp(root, config, window.localStorage);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
    boot();
}

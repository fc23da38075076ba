"""Rating service: serves evaluation lists and images, collects ratings.

Three JSON-over-HTTP endpoints back the rating UI:

    GET  /api/lists/<list_id>?rater_id=..&scale=..   fetch a list
    POST /api/ratings                                 submit ratings
    GET  /api/progress                                progress summary

plus GET /images/<image_id> for the pictures themselves. Payloads reuse
the ratings-file field names (rater_id, list_id, image_id, scale, value)
and never reveal which items are controls. The ratings store is an
append-only CSV that the analysis side parses directly. A rater gets at
most one session per list, ever: once submitted, further fetches and
(non-identical) submissions are refused.
"""

from __future__ import annotations

import json
import mimetypes
import os
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .core import DataError
from .humaneval import (
    EvalList,
    RatingRecord,
    append_ratings,
    get_scale,
    parse_ratings_file,
)

DEFAULT_EXAMPLES = [
    {"end": "good", "caption": "a sharp, specific description of the pictured scene"},
    {"end": "bad", "caption": "an unrelated or garbled description"},
]


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    rater_id: str
    list_id: str
    scale: str
    issued_at: float
    completed: bool = False


class RatingService:
    """Session and store logic, independent of the HTTP transport."""

    def __init__(self, lists, ratings_path, images_dir=None, examples_path=None):
        self._lists: dict[str, EvalList] = {el.list_id: el for el in lists}
        self._ratings_path = ratings_path
        self._images_dir = images_dir
        self._examples = _load_examples(examples_path)
        self._lock = threading.Lock()
        self._open: dict[tuple[str, str], Session] = {}
        # (rater, list) -> image -> value, rebuilt from the store on start
        self._completed: dict[tuple[str, str], dict[str, int]] = {}
        if os.path.exists(ratings_path) and os.path.getsize(ratings_path):
            for rec in parse_ratings_file(ratings_path):
                sub = self._completed.setdefault((rec.rater_id, rec.list_id), {})
                sub[rec.image_id] = rec.value

    def get_list(self, list_id: str, rater_id: str, scale_name: str) -> dict:
        if not rater_id:
            raise ServiceError(400, "rater_id is required")
        eval_list = self._lists.get(list_id)
        if eval_list is None:
            raise ServiceError(404, f"unknown list {list_id!r}")
        scale = _scale_or_400(scale_name)
        with self._lock:
            if (rater_id, list_id) in self._completed:
                raise ServiceError(403, "already evaluated")
            self._open[(rater_id, list_id)] = Session(
                rater_id, list_id, scale.name, time.time()
            )
        return {
            "list_id": list_id,
            "rater_id": rater_id,
            "scale": {
                "name": scale.name,
                "min": scale.min,
                "max": scale.max,
                "labels": {str(scale.min): "Very bad", str(scale.max): "Very good"},
            },
            "instructions": {"examples": self._examples},
            "items": [
                {
                    "image_id": item.image_id,
                    "caption": item.caption,
                    "image_url": f"/images/{item.image_id}",
                }
                for item in eval_list.items
            ],
        }

    def submit_ratings(self, rater_id: str, list_id: str, scale_name: str, values) -> dict:
        if not rater_id:
            raise ServiceError(400, "rater_id is required")
        eval_list = self._lists.get(list_id)
        if eval_list is None:
            raise ServiceError(404, f"unknown list {list_id!r}")
        scale = _scale_or_400(scale_name)
        if not isinstance(values, dict):
            raise ServiceError(400, "values must map image_id to an integer")
        clean: dict[str, int] = {}
        for image_id, value in values.items():
            if not isinstance(value, int) or isinstance(value, bool):
                raise ServiceError(400, f"non-integer value for {image_id!r}")
            if not scale.contains(value):
                raise ServiceError(
                    400,
                    f"value {value} for {image_id!r} outside scale "
                    f"[{scale.min}, {scale.max}]",
                )
            clean[image_id] = value

        expected = set(eval_list.image_ids())
        unknown = sorted(set(clean) - expected)
        if unknown:
            raise ServiceError(400, f"unknown image(s): {', '.join(unknown)}")
        missing = sorted(expected - set(clean))
        if missing:
            raise ServiceError(
                400, f"incomplete: missing {len(missing)} of {len(expected)} items"
            )

        with self._lock:
            key = (rater_id, list_id)
            done = self._completed.get(key)
            if done is not None:
                if done == clean:
                    return {"accepted": True, "records": len(clean), "duplicate": True}
                raise ServiceError(403, "already evaluated")
            session = self._open.get(key)
            if session is None:
                raise ServiceError(409, "no open session for this list")
            if session.scale != scale.name:
                raise ServiceError(400, "scale does not match the open session")
            records = [
                RatingRecord(
                    rater_id, list_id, item.image_id, scale.name,
                    clean[item.image_id], item.is_control, item.control_polarity,
                )
                for item in eval_list.items
            ]
            append_ratings(self._ratings_path, records)
            session.completed = True
            self._completed[key] = clean
            del self._open[key]
        return {"accepted": True, "records": len(records), "duplicate": False}

    def progress(self) -> dict:
        with self._lock:
            per_list = []
            total = 0
            for list_id in sorted(self._lists):
                raters = sorted(
                    rater for rater, lid in self._completed if lid == list_id
                )
                per_list.append(
                    {
                        "list_id": list_id,
                        "items": len(self._lists[list_id].items),
                        "submissions": len(raters),
                        "raters": raters,
                    }
                )
                total += len(raters) * len(self._lists[list_id].items)
            return {
                "lists": per_list,
                "total_records": total,
                "open_sessions": len(self._open),
            }

    def image_path(self, image_id: str):
        if not self._images_dir or "/" in image_id or "\\" in image_id or ".." in image_id:
            return None
        exact = os.path.join(self._images_dir, image_id)
        if os.path.isfile(exact):
            return exact
        for ext in ("jpg", "jpeg", "png", "gif"):
            candidate = f"{exact}.{ext}"
            if os.path.isfile(candidate):
                return candidate
        return None


def _scale_or_400(name: str):
    try:
        return get_scale(name)
    except DataError as exc:
        raise ServiceError(400, str(exc)) from None


def _load_examples(path):
    if path is None:
        return list(DEFAULT_EXAMPLES)
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3 or fields[0] not in ("good", "bad"):
                raise DataError(
                    f"{path}: expected 'good|bad<TAB>image_id<TAB>caption' at line {lineno}"
                )
            end, image_id, caption = fields
            examples.append(
                {"end": end, "image_id": image_id, "caption": caption,
                 "image_url": f"/images/{image_id}"}
            )
    if not examples:
        raise DataError(f"{path}: no instruction examples")
    return examples


class _Handler(BaseHTTPRequestHandler):
    service: RatingService = None  # set by make_server
    static_dir: str | None = None

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.end_headers()

    def do_GET(self) -> None:
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if len(parts) == 3 and parts[0] == "api" and parts[1] == "lists":
                query = parse_qs(url.query)
                payload = self.service.get_list(
                    parts[2],
                    query.get("rater_id", [""])[0],
                    query.get("scale", ["overall"])[0],
                )
                self._send_json(200, payload)
            elif parts == ["api", "progress"]:
                self._send_json(200, self.service.progress())
            elif len(parts) == 2 and parts[0] == "images":
                self._send_file_or_404(self.service.image_path(parts[1]))
            elif self.static_dir:
                self._send_static(parts)
            else:
                self._send_json(404, {"error": "not found"})
        except ServiceError as exc:
            self._send_json(exc.status, {"error": exc.message})

    def do_POST(self) -> None:
        url = urlparse(self.path)
        if url.path != "/api/ratings":
            self._send_json(404, {"error": "not found"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError:
                raise ServiceError(400, "request body is not valid JSON") from None
            if not isinstance(body, dict):
                raise ServiceError(400, "request body must be a JSON object")
            payload = self.service.submit_ratings(
                str(body.get("rater_id", "")),
                str(body.get("list_id", "")),
                str(body.get("scale", "")),
                body.get("values", {}),
            )
            self._send_json(200, payload)
        except ServiceError as exc:
            self._send_json(exc.status, {"error": exc.message})

    def _send_file_or_404(self, path) -> None:
        if path is None:
            self._send_json(404, {"error": "image not found"})
            return
        ctype = mimetypes.guess_type(path)[0] or "application/octet-stream"
        with open(path, "rb") as fh:
            data = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self._cors()
        self.end_headers()
        self.wfile.write(data)

    def _send_static(self, parts) -> None:
        name = "/".join(parts) if parts else "index.html"
        root = os.path.realpath(self.static_dir)
        full = os.path.realpath(os.path.join(root, name))
        if not full.startswith(root + os.sep) and full != root:
            self._send_json(404, {"error": "not found"})
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._send_json(404, {"error": "not found"})
            return
        self._send_file_or_404(full)


def make_server(service: RatingService, host: str = "127.0.0.1", port: int = 0,
                static_dir=None) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {"service": service, "static_dir": static_dir})
    return ThreadingHTTPServer((host, port), handler)


def run_server(service: RatingService, host: str, port: int, static_dir=None) -> None:
    server = make_server(service, host, port, static_dir)
    host_shown, port_shown = server.server_address[:2]
    print(f"rating service listening on http://{host_shown}:{port_shown}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()

import json
import threading
import urllib.error
import urllib.request

import pytest

from phonoscore.humaneval import make_lists, parse_ratings_file
from phonoscore.service import RatingService, ServiceError, make_server

GOOD = ("ctrl_good", "a precise caption")
BAD = ("ctrl_bad", "nonsense")


def build_lists(n_pairs=28, n_lists=1):
    pairs = [(f"img{i:03d}", f"caption {i}") for i in range(n_pairs)]
    return make_lists(pairs, n_lists, n_pairs // n_lists, (GOOD, BAD), seed=17)


@pytest.fixture
def service(tmp_path):
    lists = build_lists()
    return RatingService(lists, tmp_path / "ratings.csv"), lists


@pytest.fixture
def server(service, tmp_path):
    svc, lists = service
    httpd = make_server(svc, "127.0.0.1", 0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{httpd.server_address[1]}"
    yield base, svc, lists
    httpd.shutdown()
    httpd.server_close()


def http(base, path, payload=None):
    url = base + path
    if payload is None:
        request = urllib.request.Request(url)
    else:
        request = urllib.request.Request(
            url, data=json.dumps(payload).encode(),
            headers={"Content-Type": "application/json"},
        )
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as error:
        return error.code, json.loads(error.read())


def full_values(eval_list, value=4, good=7, bad=1):
    values = {}
    for item in eval_list.items:
        if item.control_polarity == "good":
            values[item.image_id] = good
        elif item.control_polarity == "bad":
            values[item.image_id] = bad
        else:
            values[item.image_id] = value
    return values


class TestServiceLogic:
    def test_get_list_payload_hides_controls(self, service):
        svc, lists = service
        payload = svc.get_list(lists[0].list_id, "rater1", "overall")
        assert len(payload["items"]) == 30
        assert payload["scale"] == {
            "name": "overall", "min": 1, "max": 7,
            "labels": {"1": "Very bad", "7": "Very good"},
        }
        assert payload["instructions"]["examples"]
        for item in payload["items"]:
            assert set(item) == {"image_id", "caption", "image_url"}

    def test_payload_item_order_is_stored_order(self, service):
        svc, lists = service
        payload = svc.get_list(lists[0].list_id, "rater1", "overall")
        assert [i["image_id"] for i in payload["items"]] == list(lists[0].image_ids())

    def test_four_point_scale(self, service):
        svc, lists = service
        payload = svc.get_list(lists[0].list_id, "rater1", "actions")
        assert payload["scale"]["min"] == 1
        assert payload["scale"]["max"] == 4

    def test_unknown_list(self, service):
        svc, _ = service
        with pytest.raises(ServiceError) as excinfo:
            svc.get_list("nope", "rater1", "overall")
        assert excinfo.value.status == 404

    def test_submit_appends_records_and_closes_session(self, service, tmp_path):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        ack = svc.submit_ratings("rater1", el.list_id, "overall", full_values(el))
        assert ack == {"accepted": True, "records": 30, "duplicate": False}
        records = parse_ratings_file(tmp_path / "ratings.csv")
        assert len(records) == 30
        assert {r.rater_id for r in records} == {"rater1"}
        controls = [r for r in records if r.is_control]
        assert sorted(c.control_polarity for c in controls) == ["bad", "good"]

    def test_refetch_after_completion_refused(self, service):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        svc.submit_ratings("rater1", el.list_id, "overall", full_values(el))
        with pytest.raises(ServiceError, match="already evaluated"):
            svc.get_list(el.list_id, "rater1", "overall")
        # a different rater can still take the list
        assert svc.get_list(el.list_id, "rater2", "overall")["items"]

    def test_duplicate_submission_is_idempotent(self, service, tmp_path):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        values = full_values(el)
        svc.submit_ratings("rater1", el.list_id, "overall", values)
        ack = svc.submit_ratings("rater1", el.list_id, "overall", values)
        assert ack["duplicate"] is True
        assert len(parse_ratings_file(tmp_path / "ratings.csv")) == 30

    def test_changed_resubmission_refused(self, service):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        svc.submit_ratings("rater1", el.list_id, "overall", full_values(el))
        changed = full_values(el, value=5)
        with pytest.raises(ServiceError, match="already evaluated"):
            svc.submit_ratings("rater1", el.list_id, "overall", changed)

    def test_out_of_range_value_rejects_whole_submission(self, service, tmp_path):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        values = full_values(el)
        values[el.items[0].image_id] = 9
        with pytest.raises(ServiceError, match="outside scale"):
            svc.submit_ratings("rater1", el.list_id, "overall", values)
        assert not (tmp_path / "ratings.csv").exists()

    def test_incomplete_submission_rejected(self, service):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        values = full_values(el)
        values.pop(el.items[5].image_id)
        with pytest.raises(ServiceError, match="incomplete"):
            svc.submit_ratings("rater1", el.list_id, "overall", values)

    def test_submit_without_session_rejected(self, service):
        svc, lists = service
        el = lists[0]
        with pytest.raises(ServiceError, match="no open session"):
            svc.submit_ratings("rater1", el.list_id, "overall", full_values(el))

    def test_completed_sessions_survive_restart(self, service, tmp_path):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        svc.submit_ratings("rater1", el.list_id, "overall", full_values(el))
        reborn = RatingService(lists, tmp_path / "ratings.csv")
        with pytest.raises(ServiceError, match="already evaluated"):
            reborn.get_list(el.list_id, "rater1", "overall")

    def test_store_parses_with_ratings_parser_after_many_submissions(self, service, tmp_path):
        svc, lists = service
        el = lists[0]
        for k in range(4):
            rater = f"rater{k}"
            svc.get_list(el.list_id, rater, "overall")
            svc.submit_ratings(rater, el.list_id, "overall", full_values(el, value=3 + k % 3))
        records = parse_ratings_file(tmp_path / "ratings.csv")
        assert len(records) == 120

    def test_progress_summary(self, service):
        svc, lists = service
        el = lists[0]
        svc.get_list(el.list_id, "rater1", "overall")
        svc.submit_ratings("rater1", el.list_id, "overall", full_values(el))
        progress = svc.progress()
        assert progress["total_records"] == 30
        assert progress["lists"][0]["submissions"] == 1
        assert progress["lists"][0]["raters"] == ["rater1"]


class TestHttpEndpoints:
    def test_fetch_list(self, server):
        base, _, lists = server
        status, payload = http(base, f"/api/lists/{lists[0].list_id}?rater_id=r1&scale=overall")
        assert status == 200
        assert len(payload["items"]) == 30
        assert "is_control" not in json.dumps(payload)

    def test_submit_and_progress_flow(self, server, tmp_path):
        base, _, lists = server
        el = lists[0]
        status, payload = http(base, f"/api/lists/{el.list_id}?rater_id=r1&scale=overall")
        assert status == 200
        values = {item["image_id"]: 4 for item in payload["items"]}
        # the payload hides controls; the fixture knows their ids
        values[GOOD[0]] = 7
        values[BAD[0]] = 1
        status, ack = http(base, "/api/ratings", {
            "rater_id": "r1", "list_id": el.list_id, "scale": "overall",
            "values": values,
        })
        assert status == 200
        assert ack["records"] == 30
        status, progress = http(base, "/api/progress")
        assert status == 200
        assert progress["total_records"] == 30

    def test_resubmission_refused_over_http(self, server):
        base, _, lists = server
        el = lists[0]
        _, payload = http(base, f"/api/lists/{el.list_id}?rater_id=r1&scale=overall")
        values = {item["image_id"]: 4 for item in payload["items"]}
        values[GOOD[0]] = 7
        values[BAD[0]] = 1
        body = {"rater_id": "r1", "list_id": el.list_id, "scale": "overall",
                "values": values}
        assert http(base, "/api/ratings", body)[0] == 200
        changed = dict(body, values=dict(values, **{el.items[2].image_id: 5}))
        status, error = http(base, "/api/ratings", changed)
        assert status == 403
        assert error["error"] == "already evaluated"

    def test_out_of_range_over_http(self, server):
        base, _, lists = server
        el = lists[0]
        _, payload = http(base, f"/api/lists/{el.list_id}?rater_id=r1&scale=overall")
        values = {item["image_id"]: 9 for item in payload["items"]}
        status, error = http(base, "/api/ratings", {
            "rater_id": "r1", "list_id": el.list_id, "scale": "overall",
            "values": values,
        })
        assert status == 400
        assert "outside scale" in error["error"]

    def test_unknown_endpoints(self, server):
        base, _, _ = server
        assert http(base, "/api/unknown")[0] == 404
        assert http(base, "/api/lists/nope?rater_id=r&scale=overall")[0] == 404

    def test_images_served_from_directory(self, tmp_path, service):
        svc, lists = service
        images = tmp_path / "images"
        images.mkdir()
        (images / "img000.png").write_bytes(b"\x89PNG fake")
        svc_with_images = RatingService(lists, tmp_path / "r.csv", images_dir=str(images))
        httpd = make_server(svc_with_images, "127.0.0.1", 0)
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{httpd.server_address[1]}"
        try:
            with urllib.request.urlopen(base + "/images/img000") as response:
                assert response.status == 200
                assert response.read() == b"\x89PNG fake"
            assert http(base, "/images/missing")[0] == 404
            assert http(base, "/images/..%2Fratings.csv")[0] == 404
        finally:
            httpd.shutdown()
            httpd.server_close()

    def test_cors_preflight(self, server):
        base, _, _ = server
        request = urllib.request.Request(base + "/api/progress", method="OPTIONS")
        with urllib.request.urlopen(request) as response:
            assert response.status == 204
            assert response.headers["Access-Control-Allow-Origin"] == "*"

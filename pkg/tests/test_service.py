"""HTTP service: experiment lifecycle, judging flow, idempotency."""

import io

import pytest
from fastapi.testclient import TestClient

from cloneval.knowledge import KnowledgeBase
from cloneval.service import create_app
from cloneval.study import StudyConfig
from tests.conftest import build_corpus, pairs_csv_for

LOOPY = """\
public int tally%s(int n, int m) {{
    int acc = 0;
    for (int i = 0; i < n; i++) {{
        acc = acc + mix(i, m);
        acc = acc - part(i);
    }}
    return acc + n + m;
}}
"""

STRINGY = """\
public String braid(String a, String b) {
    StringBuilder sb = new StringBuilder();
    sb.append(a.trim());
    sb.append(b.toUpperCase());
    sb.append(a.length() + b.length());
    return sb.toString();
}
"""


@pytest.fixture
def world(tmp_path):
    content = "\n".join([LOOPY.format() % c for c in "AB"] + [STRINGY])
    index = build_corpus(tmp_path, {"proj/Main.java": content})
    kb = KnowledgeBase()
    app = create_app(index, kb, model=None, config=StudyConfig(min_tokens=10))
    client = TestClient(app)
    methods = index.methods[("proj", "Main.java")]
    yield client, methods
    kb.close()


def _register(client, name):
    res = client.post("/users", json={"name": name, "email": f"{name}@example.org"})
    assert res.status_code == 200
    body = res.json()
    return body["user_id"], {"Authorization": f"Bearer {body['token']}"}


def _experiment(client, headers, methods, **extra_headers):
    tool = client.post(
        "/tools", json={"name": "det", "version": "1.0"}, headers=headers
    ).json()
    res = client.post(
        "/experiments",
        data={"tool_id": tool["tool_id"], "name": "run"},
        files={"results": ("r.csv", io.BytesIO(pairs_csv_for(methods).encode()), "text/csv")},
        headers={**headers, **extra_headers},
    )
    assert res.status_code == 200, res.text
    return res.json()


def test_requires_auth(world):
    client, _ = world
    assert client.post("/tools", json={"name": "x", "version": "1"}).status_code == 401
    bad = {"Authorization": "Bearer bogus"}
    assert client.post("/tools", json={"name": "x", "version": "1"}, headers=bad).status_code == 401


def test_full_judging_lifecycle(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    j1, h1 = _register(client, "judge1")
    j2, h2 = _register(client, "judge2")

    exp = _experiment(client, oh, methods)
    assert exp["state"] == "judging"
    assert exp["sample_size"] == 3
    assert exp["manual_count"] == 2  # the two loop/string cross pairs

    res = client.post(
        f"/experiments/{exp['experiment_id']}/judges",
        json={"user_ids": [j1, j2]},
        headers=oh,
    )
    assert res.json()["progress"] == [0, 4]

    # report unavailable while judging
    r = client.get(f"/experiments/{exp['experiment_id']}/report", headers=oh)
    assert r.status_code == 409

    for judge, headers in ((j1, h1), (j2, h2)):
        tasks = client.get(f"/judges/{judge}/tasks", headers=headers).json()["tasks"]
        assert len(tasks) == 2
        for t in tasks:
            view = client.get(f"/tasks/{t['task_id']}", headers=headers).json()
            assert view["left"]["source"] and view["right"]["source"]
            assert view["clone_type_options"] == ["T2", "T3", "T4"]
            res = client.post(
                f"/tasks/{t['task_id']}/judgment",
                json={"is_clone": False},
                headers=headers,
            )
            assert res.status_code == 200

    final = client.get(f"/experiments/{exp['experiment_id']}", headers=oh).json()
    assert final["state"] == "complete"
    report = client.get(f"/experiments/{exp['experiment_id']}/report", headers=oh).json()
    assert report["sample_size"] == 3
    assert report["manual_count"] == 2
    assert report["fp"] == 2  # both judged non-clones
    assert report["auto_counts"]["T2"] == 1


def test_double_submit_is_replace_not_duplicate(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    j1, h1 = _register(client, "judge")
    exp = _experiment(client, oh, methods)
    client.post(
        f"/experiments/{exp['experiment_id']}/judges",
        json={"user_ids": [j1]},
        headers=oh,
    )
    tasks = client.get(f"/judges/{j1}/tasks", headers=h1).json()["tasks"]
    tid = tasks[0]["task_id"]
    r1 = client.post(f"/tasks/{tid}/judgment", json={"is_clone": True, "clone_type": "T3"}, headers=h1)
    r2 = client.post(f"/tasks/{tid}/judgment", json={"is_clone": True, "clone_type": "T3"}, headers=h1)
    assert r1.status_code == 200 and r2.status_code == 200
    # progress counts the task once
    assert r2.json()["progress"][0] == r1.json()["progress"][0]


def test_judgment_rejects_type1(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    j1, h1 = _register(client, "judge")
    exp = _experiment(client, oh, methods)
    client.post(
        f"/experiments/{exp['experiment_id']}/judges",
        json={"user_ids": [j1]}, headers=oh,
    )
    tasks = client.get(f"/judges/{j1}/tasks", headers=h1).json()["tasks"]
    res = client.post(
        f"/tasks/{tasks[0]['task_id']}/judgment",
        json={"is_clone": True, "clone_type": "T1"},
        headers=h1,
    )
    assert res.status_code == 422


def test_invite_unregistered_user_rejected(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    exp = _experiment(client, oh, methods)
    res = client.post(
        f"/experiments/{exp['experiment_id']}/judges",
        json={"user_ids": ["nobody"]},
        headers=oh,
    )
    assert res.status_code == 404


def test_invite_same_judge_twice_is_idempotent(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    j1, h1 = _register(client, "judge")
    exp = _experiment(client, oh, methods)
    for _ in range(2):
        client.post(
            f"/experiments/{exp['experiment_id']}/judges",
            json={"user_ids": [j1]},
            headers=oh,
        )
    tasks = client.get(f"/judges/{j1}/tasks", headers=h1).json()["tasks"]
    assert len(tasks) == 2


def test_experiment_create_idempotency_key(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    e1 = _experiment(client, oh, methods, **{"Idempotency-Key": "req-1"})
    e2 = _experiment(client, oh, methods, **{"Idempotency-Key": "req-1"})
    assert e1["experiment_id"] == e2["experiment_id"]
    e3 = _experiment(client, oh, methods, **{"Idempotency-Key": "req-2"})
    assert e3["experiment_id"] != e1["experiment_id"]


def test_malformed_csv_rejected(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    tool = client.post("/tools", json={"name": "det", "version": "1"}, headers=oh).json()
    res = client.post(
        "/experiments",
        data={"tool_id": tool["tool_id"], "name": "bad"},
        files={"results": ("r.csv", io.BytesIO(b"a,b,c\n"), "text/csv")},
        headers=oh,
    )
    assert res.status_code == 400


def test_unknown_tool_rejected(world):
    client, methods = world
    owner, oh = _register(client, "owner")
    res = client.post(
        "/experiments",
        data={"tool_id": "t-nope", "name": "x"},
        files={"results": ("r.csv", io.BytesIO(b""), "text/csv")},
        headers=oh,
    )
    assert res.status_code == 404


def test_export_labels_endpoint(world):
    client, _ = world
    res = client.get("/export/labels")
    assert res.status_code == 200
    assert res.json() == {"labels": []}

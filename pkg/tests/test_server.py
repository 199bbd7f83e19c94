import itertools
import random

import pytest
from fastapi.testclient import TestClient

from fixplan.hierarchy import plan_system
from fixplan.model import HierNode
from fixplan.oracle import execute
from fixplan.server import PlanEntry, create_app
from fixplan.session import IllegalEvent, Session
from conftest import random_hier


@pytest.fixture
def fix5_client(fix5):
    plan = plan_system(fix5)
    app = create_app({"fix5": PlanEntry("fix5", plan, fix5)})
    return TestClient(app)


def _start(client, plan_id="fix5"):
    resp = client.post("/sessions", json={"plan_id": plan_id})
    assert resp.status_code == 200
    return resp.json()


def test_list_plans(fix5_client):
    resp = fix5_client.get("/plans")
    assert resp.status_code == 200
    plans = resp.json()["plans"]
    assert plans[0]["plan_id"] == "fix5"
    assert plans[0]["h"] == pytest.approx(5.0)


def test_unknown_plan_404(fix5_client):
    assert fix5_client.post("/sessions", json={"plan_id": "nope"}).status_code == 404


def test_session_first_prompt(fix5_client):
    state = _start(fix5_client)
    assert state["prompt"]["action"] == "replace"
    assert state["prompt"]["component"] == "L1"
    assert state["expected_remaining_cost"] == pytest.approx(5.0)
    assert state["accumulated_cost"] == 0.0


def test_session_still_broken_then_done(fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    resp = fix5_client.post(f"/sessions/{sid}/events",
                            json={"kind": "status_result", "outcome": "broken"})
    state = resp.json()
    assert state["prompt"]["component"] == "L2"
    assert state["accumulated_cost"] == pytest.approx(4.0)
    assert state["expected_remaining_cost"] == pytest.approx(3.0)
    resp = fix5_client.post(f"/sessions/{sid}/events",
                            json={"kind": "status_result", "outcome": "ok"})
    state = resp.json()
    assert state["done"]
    assert state["accumulated_cost"] == pytest.approx(7.0)


def test_session_ok_after_first_replace(fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    resp = fix5_client.post(f"/sessions/{sid}/events",
                            json={"kind": "status_result", "outcome": "ok"})
    state = resp.json()
    assert state["done"]
    assert state["accumulated_cost"] == pytest.approx(4.0)


def test_wrong_event_kind_409(fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    resp = fix5_client.post(f"/sessions/{sid}/events",
                            json={"kind": "inspect_result", "outcome": "ok"})
    assert resp.status_code == 409
    # state unchanged
    state = fix5_client.get(f"/sessions/{sid}").json()
    assert state["accumulated_cost"] == 0.0
    assert state["prompt"]["component"] == "L1"


def test_inconsistent_final_broken_409(fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    fix5_client.post(f"/sessions/{sid}/events",
                     json={"kind": "status_result", "outcome": "broken"})
    resp = fix5_client.post(f"/sessions/{sid}/events",
                            json={"kind": "status_result", "outcome": "broken"})
    assert resp.status_code == 409


def test_refresh_resumes_same_prompt(fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    fix5_client.post(f"/sessions/{sid}/events",
                     json={"kind": "status_result", "outcome": "broken"})
    refetched = fix5_client.get(f"/sessions/{sid}").json()
    assert refetched["prompt"]["component"] == "L2"
    assert refetched["accumulated_cost"] == pytest.approx(4.0)


def test_transcript_replays_to_identical_cost(fix5, fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    fix5_client.post(f"/sessions/{sid}/events",
                     json={"kind": "status_result", "outcome": "broken"})
    fix5_client.post(f"/sessions/{sid}/events",
                     json={"kind": "status_result", "outcome": "ok"})
    transcript = fix5_client.get(f"/sessions/{sid}/transcript").json()
    plan = plan_system(fix5)
    replayed = Session.replay("replay", "fix5", plan, fix5, transcript["events"])
    assert replayed.accumulated_cost == transcript["accumulated_cost"]
    assert replayed.done == transcript["done"]


def _drive_with_world(session: Session, root: HierNode, world: set[str]) -> float:
    """Answer every prompt with the ground truth for the given world."""
    under = {n.id: frozenset(l.id for l in n.leaves()) for n in root.walk()}
    broken = set(world)
    for _ in range(200):
        if session.done:
            return session.accumulated_cost
        pending = session.pending
        comp = pending["component"]
        if pending["mode"] == "inspect":
            outcome = "broken" if broken & under[comp] else "ok"
        else:
            # the instructed replace (if any) happens, then the unit is observed
            if pending["action"] == "replace":
                broken -= under[comp]
            unit = session.frames[-1].plan.node if session.frames else comp
            outcome = "broken" if broken & under[unit] else "ok"
        session.apply(pending["kind"], outcome)
    raise AssertionError("session did not terminate")


@pytest.mark.parametrize("world", [set(), {"L1"}, {"L2"}, {"L1", "L2"}])
def test_session_cost_matches_executor(fix5, world):
    plan = plan_system(fix5)
    if not world:
        return  # sessions start from a known-faulty system
    session = Session("s", "fix5", plan, fix5)
    cost = _drive_with_world(session, fix5, set(world))
    trace = execute(set(world), plan, fix5)
    assert cost == pytest.approx(trace.total_cost, abs=1e-9)


def test_session_cost_matches_executor_random_trees():
    rng = random.Random(20240823)
    for _ in range(20):
        root = random_hier(rng, max_leaves=6, max_depth=3, max_branch=3)
        plan = plan_system(root)
        leaves = [l.id for l in root.leaves()]
        world = {l for l in leaves if rng.random() < 0.5}
        if not world:
            continue
        session = Session("s", "p", plan, root)
        cost = _drive_with_world(session, root, set(world))
        trace = execute(set(world), plan, root)
        assert cost == pytest.approx(trace.total_cost, abs=1e-9)


def test_event_after_done_rejected(fix5_client):
    state = _start(fix5_client)
    sid = state["session_id"]
    fix5_client.post(f"/sessions/{sid}/events",
                     json={"kind": "status_result", "outcome": "ok"})
    fix5_client.post(f"/sessions/{sid}/events",
                     json={"kind": "status_result", "outcome": "ok"})
    resp = fix5_client.post(f"/sessions/{sid}/events",
                            json={"kind": "status_result", "outcome": "ok"})
    assert resp.status_code == 409

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../backend')))
import json
import tempfile
import unittest

from hypothesis import assume, given, settings, strategies as st

from app.core import Composition, Request, Service, index_services, validate_composition
from app.core.errors import DuplicateServiceError, InstanceError, UnknownQueryError, UnknownServiceError
from app.engine_online import (
    FailoverManager,
    OnlineState,
    compute_service_scores,
    parse_stream,
    read_stream,
    remove_useless,
    replay_stream,
    write_events,
)
from app.engine_online.stream import apply_op

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
DRIVING = os.path.join(FIXTURES, "driving.jsonl")

DRIVING_EVENTS = [
    {"event": "solved", "id": "getDrivingConditions",
     "calls": ["locatePhone", "getWeather", "getLatLon", "getMap", "nearbyStreet", "trafficInfo"]},
    {"event": "solved", "id": "getCityMap", "calls": ["getCityDistrict", "getCityCenter", "getMap"]},
    {"event": "swapped_to_backup", "id": "getDrivingConditions",
     "calls": ["locatePhone", "getWeather", "getCityCenter", "getMap", "nearbyStreet", "trafficInfo"]},
]


def svc(name, ins, outs):
    return Service.from_names(name, ins, outs)


def assert_usages_consistent(test, state):
    test.assertEqual(state.live_usages(), state.expected_usages())


class TestDrivingScenario(unittest.TestCase):
    def test_replay_events(self):
        manager = FailoverManager()
        events = replay_stream(read_stream(DRIVING), manager)
        self.assertEqual([e.to_json() for e in events], DRIVING_EVENTS)
        self.assertEqual(manager.state.stats.main_searches, 2)
        self.assertGreater(manager.state.stats.backup_searches, 0)

    def test_usages_track_every_operation(self):
        manager = FailoverManager()
        for op in read_stream(DRIVING):
            apply_op(manager, op)
            assert_usages_consistent(self, manager.state)
        self.assertNotIn("getLatLon", manager.state.usages)

    def test_swapped_solution_gets_fresh_backups(self):
        manager = FailoverManager()
        replay_stream(read_stream(DRIVING), manager)
        current = manager.state.compositions["getDrivingConditions"]
        self.assertFalse(current.is_backup)
        self.assertEqual(set(current.backup), set(current.main))

    def test_async_backups_reach_same_state(self):
        manager = FailoverManager(async_backups=True)
        try:
            events = replay_stream(read_stream(DRIVING), manager)
        finally:
            manager.close()
        last = events[-1].to_json()
        self.assertIn(last["event"], ("swapped_to_backup", "resolved_from_scratch"))
        self.assertEqual(last["calls"], DRIVING_EVENTS[-1]["calls"])
        assert_usages_consistent(self, manager.state)

    def test_async_with_settled_backups_matches_sync(self):
        manager = FailoverManager(async_backups=True)
        events = []
        try:
            for op in read_stream(DRIVING):
                events.extend(apply_op(manager, op))
                manager.wait()
        finally:
            manager.close()
        self.assertEqual([e.to_json() for e in events], DRIVING_EVENTS)

    def test_distances(self):
        state = OnlineState()
        for op in read_stream(DRIVING)[:8]:
            state.add_service(svc(op.name, op.inputs, op.outputs))
        distance = compute_service_scores(Request.from_names(["phoneNumber"], ["trafficConditions"]),
                                          state.repository)
        self.assertEqual(distance["trafficInfo"], 1)
        self.assertEqual(distance["nearbyStreet"], 2)
        self.assertEqual(distance["getMap"], 3)
        self.assertEqual(distance["getLatLon"], 4)


class TestRepairs(unittest.TestCase):
    def setUp(self):
        self.manager = FailoverManager()
        for s in (svc("a", ["s"], ["m"]), svc("b", ["m"], ["g"]), svc("y", ["s"], ["m"])):
            self.manager.register_service(s)
        self.event = self.manager.find_request("q", Request.from_names(["s"], ["g"]))
        self.sol = self.manager.state.compositions["q"]

    def test_main_prefers_earlier_registration(self):
        self.assertEqual(self.event.to_json(), {"event": "solved", "id": "q", "calls": ["a", "b"]})

    def test_single_service_backup(self):
        bkp = self.sol.backup["a"]
        self.assertEqual(bkp.kind, 1)
        self.assertEqual(bkp.main, ["y", "b"])
        self.assertIsNone(self.sol.backup["b"])

    def test_losing_backup_service_recomputes(self):
        events = self.manager.detect_service_down("y")
        self.assertEqual([e.to_json() for e in events], [
            {"event": "backup_recomputed", "id": "q", "calls": [], "service": "a"},
        ])
        self.assertIsNone(self.sol.backup["a"])
        assert_usages_consistent(self, self.manager.state)

    def test_lost_then_restored(self):
        self.manager.delete_service("y")
        lost = self.manager.delete_service("a")
        self.assertEqual([e.to_json() for e in lost], [{"event": "request_lost", "id": "q", "calls": []}])
        self.assertIsNone(self.manager.state.compositions["q"])
        restored = self.manager.register_service(svc("a2", ["s"], ["m"]))
        self.assertEqual([e.to_json() for e in restored],
                         [{"event": "solved", "id": "q", "calls": ["a2", "b"]}])
        assert_usages_consistent(self, self.manager.state)

    def test_resolved_from_scratch(self):
        state = self.manager.state
        self.sol.backup.pop("a")
        events = self.manager.delete_service("a")
        self.assertEqual(events[0].event, "resolved_from_scratch")
        self.assertEqual(events[0].calls, ["y", "b"])
        self.assertEqual(state.stats.main_searches, 2)

    def test_drop_request(self):
        self.manager.drop_composition_request("q")
        self.assertNotIn("q", self.manager.state.requests)
        self.assertEqual(self.manager.state.live_usages(), {})
        self.assertFalse(self.sol.active)
        with self.assertRaises(UnknownQueryError):
            self.manager.drop_composition_request("q")

    def test_find_replaces_existing_query(self):
        event = self.manager.find_request("q", Request.from_names(["m"], ["g"]))
        self.assertEqual(event.calls, ["b"])
        self.assertFalse(self.sol.active)
        assert_usages_consistent(self, self.manager.state)

    def test_unsolvable_query(self):
        event = self.manager.find_request("nope", Request.from_names(["s"], ["zzz"]))
        self.assertEqual(event.to_json(), {"event": "unsolvable", "id": "nope", "calls": []})

    def test_repository_errors(self):
        with self.assertRaises(DuplicateServiceError):
            self.manager.register_service(svc("a", ["s"], ["m"]))
        with self.assertRaises(UnknownServiceError):
            self.manager.delete_service("ghost")


class TestSuffixBackup(unittest.TestCase):
    def setUp(self):
        self.manager = FailoverManager()
        for s in (svc("x", ["s"], ["m", "n"]), svc("z", ["m", "n"], ["g"]),
                  svc("w", ["s"], ["m"]), svc("v", ["m"], ["g"])):
            self.manager.register_service(s)
        self.manager.find_request("q", Request.from_names(["s"], ["g"]))
        self.sol = self.manager.state.compositions["q"]

    def test_main(self):
        self.assertEqual(self.sol.main, ["x", "z"])

    def test_last_service_replaced_in_place(self):
        bkp = self.sol.backup["z"]
        self.assertEqual(bkp.kind, 1)
        self.assertEqual(bkp.main, ["x", "v"])

    def test_suffix_regenerated_when_inputs_vanish(self):
        bkp = self.sol.backup["x"]
        self.assertEqual(bkp.kind, 2)
        self.assertEqual(bkp.main, ["w", "v"])

    def test_swap_to_suffix_backup(self):
        events = self.manager.delete_service("x")
        self.assertEqual([e.to_json() for e in events],
                         [{"event": "swapped_to_backup", "id": "q", "calls": ["w", "v"]}])
        assert_usages_consistent(self, self.manager.state)


class TestReoptimize(unittest.TestCase):
    def build(self, reoptimize):
        manager = FailoverManager(OnlineState(reoptimize=reoptimize))
        manager.register_service(svc("a", ["s"], ["m"]))
        manager.register_service(svc("b", ["m"], ["g"]))
        manager.find_request("q", Request.from_names(["s"], ["g"]))
        return manager

    def test_shorter_composition_adopted(self):
        manager = self.build(True)
        events = manager.register_service(svc("direct", ["s"], ["g"]))
        self.assertEqual([e.to_json() for e in events],
                         [{"event": "reoptimized", "id": "q", "calls": ["direct"]}])
        assert_usages_consistent(self, manager.state)

    def test_kept_without_flag(self):
        manager = self.build(False)
        self.assertEqual(manager.register_service(svc("direct", ["s"], ["g"])), [])
        self.assertEqual(manager.state.compositions["q"].main, ["a", "b"])


class TestHelpers(unittest.TestCase):
    def test_remove_useless_keeps_first_provider(self):
        state = OnlineState()
        for s in (svc("one", ["s"], ["m"]), svc("two", ["s"], ["m"]), svc("end", ["m"], ["g"])):
            state.add_service(s)
        request = Request.from_names(["s"], ["g"])
        self.assertEqual(remove_useless(state, request, ["one", "two", "end"]), ["one", "end"])

    def test_bad_stream_line(self):
        lines = ['{"op": "drop_request", "id": "q"}', "", '{"op": "explode"}']
        with self.assertRaises(InstanceError) as ctx:
            parse_stream(lines)
        self.assertIn("line 3", str(ctx.exception))

    def test_stream_aliases(self):
        ops = parse_stream(['{"op": "detect_service_down", "name": "x"}',
                            '{"op": "register_service", "name": "x", "in": ["a"], "out": ["b"]}'])
        self.assertEqual(ops[0].name, "x")
        self.assertEqual(ops[1].inputs, ["a"])

    def test_write_events(self):
        manager = FailoverManager()
        events = replay_stream(read_stream(DRIVING), manager)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "events.jsonl")
            write_events(events, path)
            with open(path, "r", encoding="utf-8") as f:
                written = [json.loads(line) for line in f]
        self.assertEqual(written, DRIVING_EVENTS)


ONLINE_PARAMS = [f"op{i}" for i in range(6)]


@st.composite
def online_problems(draw):
    services = []
    for k in range(draw(st.integers(min_value=1, max_value=7))):
        ins = draw(st.sets(st.sampled_from(ONLINE_PARAMS), max_size=2))
        outs = draw(st.sets(st.sampled_from(ONLINE_PARAMS), min_size=1, max_size=2)) - ins
        services.append(svc(f"on_ws{k}", sorted(ins), sorted(outs)))
    init = draw(st.sets(st.sampled_from(ONLINE_PARAMS), min_size=1, max_size=2))
    goal = draw(st.sets(st.sampled_from(ONLINE_PARAMS), min_size=1, max_size=3))
    return services, Request.from_names(init, goal)


class TestStitchedBackups(unittest.TestCase):
    @settings(max_examples=150, deadline=None)
    @given(online_problems())
    def test_backups_validate_without_the_replaced_service(self, problem):
        services, request = problem
        manager = FailoverManager()
        for s in services:
            manager.register_service(s)
        manager.find_request("q", request)
        sol = manager.state.compositions["q"]
        assume(sol is not None)

        repo = manager.state.repository
        self.assertTrue(validate_composition(repo, request, Composition.sequential(sol.main)).valid)
        for name, bkp in sol.backup.items():
            if bkp is None:
                continue
            self.assertEqual(bkp.replaces, name)
            self.assertIn(bkp.kind, (1, 2))
            self.assertNotIn(name, bkp.main)
            without = index_services(s for n, s in repo.items() if n != name)
            report = validate_composition(without, request, Composition.sequential(bkp.main))
            self.assertTrue(report.valid, f"backup for {name}: {bkp.main}")
        assert_usages_consistent(self, manager.state)


if __name__ == "__main__":
    unittest.main()

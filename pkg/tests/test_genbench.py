import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../backend')))
import csv
import io
import json
import tempfile
import unittest
from collections import defaultdict

from app.core import Composition, build_name_problem, dump_name_instance, parse_instance, validate_composition
from app.core.errors import InstanceError
from app.core.schema import CallSpec
from app.engine_online import FailoverManager
from app.engine_online.stream import apply_op, parse_stream
from app.engine_oo import build_oo_problem, find_comp, validate_oo
from app.engine_relational import build_relational_problem, search_composition_relational, validate_relational
from app.genbench import (
    GenConfig,
    InstanceTraverser,
    bench_directory,
    dump_json,
    format_reports,
    generate,
    load_config,
    run_instance,
)
from app.genbench.hier_gen import sample_taxonomy
from app.genbench.config import phase_rngs
from app.pipeline import SolveOptions, solve_instance
from app.taxonomy import build_hierarchical_problem, find_composition_hierarchical, validate_hierarchical


class TestConfig(unittest.TestCase):
    def test_camel_case_keys(self):
        cfg = GenConfig.model_validate({"numWebServices": 30, "numWSinSolution": 5, "seed": 9})
        self.assertEqual(cfg.num_web_services, 30)
        self.assertEqual(cfg.num_ws_in_solution, 5)

    def test_chain_longer_than_repository(self):
        with self.assertRaises(ValueError):
            GenConfig(num_web_services=3, num_ws_in_solution=4)

    def test_load_config_seed_override(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.json")
            dump_json({"numWebServices": 20, "numWSinSolution": 4, "seed": 1}, path)
            self.assertEqual(load_config(path, seed=7).seed, 7)
            dump_json({"numWebServices": "many"}, path)
            with self.assertRaises(InstanceError):
                load_config(path)

    def test_unknown_generator(self):
        with self.assertRaises(ValueError):
            generate("graph", GenConfig())

    def test_taxonomy_shapes(self):
        rng = phase_rngs(0, ["t"])["t"]
        self.assertTrue(all(p is None for p in sample_taxonomy(rng, "flat", 6).values()))
        chain = sample_taxonomy(rng, "chain", 4)
        self.assertEqual(chain, {"C0": None, "C1": "C0", "C2": "C1", "C3": "C2"})


class TestDeterminism(unittest.TestCase):
    def test_same_seed_same_output(self):
        for model in ("name", "hierarchical", "relational", "oo", "online"):
            cfg = GenConfig(num_web_services=40, num_parameters=60, num_ws_in_solution=6, seed=11)
            first, truth1 = generate(model, cfg)
            second, truth2 = generate(model, cfg)
            self.assertEqual(json.dumps(first), json.dumps(second), model)
            self.assertEqual(truth1.to_json(), truth2.to_json(), model)

    def test_seed_changes_output(self):
        a, _ = generate("name", GenConfig(seed=1))
        b, _ = generate("name", GenConfig(seed=2))
        self.assertNotEqual(a, b)


class TestNameGenerator(unittest.TestCase):
    def test_planted_chain_is_valid(self):
        for seed in range(5):
            cfg = GenConfig(num_web_services=80, num_parameters=120, num_ws_in_solution=8, seed=seed)
            instance, truth = generate("name", cfg)
            repo, req = build_name_problem(parse_instance(instance))
            self.assertEqual(len(truth.planted), 8)
            report = validate_composition(repo, req, Composition.sequential(truth.planted))
            self.assertTrue(report.valid, seed)

    def test_instance_is_stable_through_the_loader(self):
        instance, _ = generate("name", GenConfig(num_web_services=30, num_parameters=50, num_ws_in_solution=4, seed=3))
        repo, req = build_name_problem(parse_instance(instance))
        self.assertEqual(dump_name_instance(repo, req), instance)
        self.assertTrue(all(s["in"] == sorted(s["in"]) for s in instance["services"]))

    def test_solver_answers_generated_instances(self):
        for seed in range(5):
            instance, _ = generate("name", GenConfig(seed=seed))
            outcome = solve_instance(parse_instance(instance))
            self.assertTrue(outcome.solved, seed)
            self.assertTrue(outcome.valid, seed)


class TestHierarchicalGenerator(unittest.TestCase):
    def test_planted_chain_valid_for_every_shape(self):
        for shape in ("flat", "random", "chain"):
            cfg = GenConfig(taxonomy_shape=shape, taxonomy_size=15, num_web_services=50,
                            num_parameters=80, num_ws_in_solution=6, seed=3)
            instance, truth = generate("hierarchical", cfg)
            repo, tax, req = build_hierarchical_problem(parse_instance(instance))
            planted = Composition.sequential(truth.planted)
            self.assertTrue(validate_hierarchical(repo, tax, req, planted).valid, shape)
            found = find_composition_hierarchical(repo, tax, req)
            self.assertIsNotNone(found, shape)
            self.assertTrue(validate_hierarchical(repo, tax, req, found).valid, shape)


class TestRelationalGenerator(unittest.TestCase):
    SMALL = dict(num_web_services=30, num_parameters=300, pars_per_service=3, num_ws_in_solution=4)

    def solve(self, cfg, ignore_rules=False):
        instance, truth = generate("relational", cfg)
        onto, services, query = build_relational_problem(parse_instance(instance))
        return search_composition_relational(onto, services, query, ignore_rules=ignore_rules), truth

    def test_repository_follows_config(self):
        cfg = GenConfig(num_web_services=45, num_parameters=300, pars_per_service=3, stage_count=5,
                        relation_count=3, planted_rules=2, noise_ratio=0.5, num_ws_in_solution=4, seed=9)
        instance, truth = generate("relational", cfg)
        services = instance["services"]
        by_name = {s["name"]: s for s in services}
        self.assertEqual(len(services), 45)
        self.assertTrue(all(len(s["in"]) <= 3 and len(s["out"]) <= 3 for s in services))

        pool = {c["name"] for c in instance["taxonomy"]["concepts"]
                if c["parent"] == "Thing" and c["name"] != "NoiseObject"}
        self.assertEqual(len(pool), 300)
        base = {r["name"] for r in instance["relations"] if r["name"].startswith("rel")}
        self.assertEqual(len(base), 3)

        self.assertEqual(len(truth.stages), 5)
        self.assertTrue(all(truth.stages))
        self.assertEqual(truth.rules, ["derive0", "derive1"])
        planted = set(truth.planted)
        self.assertEqual(len([s for s in services if s["name"] not in planted]), 15)
        self.assertEqual(sum(len(layer) for layer in truth.stages), 30)

        # Stage services only consume objects an earlier layer (or the query) produced.
        produced = {p["name"] for p in instance["query"]["known"]}
        for layer in truth.stages:
            made = set()
            for name in layer:
                svc = by_name[name]
                if not name.startswith("stage"):
                    continue
                self.assertLessEqual({p["name"] for p in svc["in"]}, produced, name)
                self.assertLessEqual({p["type"] for p in svc["in"] + svc["out"]}, pool, name)
                self.assertTrue(all(atom[0] in base for atom in svc["rel"]), name)
                made |= {p["name"] for p in svc["out"]}
            produced |= made

    def test_seed_changes_staged_services(self):
        def staged(seed):
            instance, truth = generate("relational", GenConfig(seed=seed, **self.SMALL))
            planted = set(truth.planted)
            return sorted(json.dumps(s, sort_keys=True) for s in instance["services"] if s["name"] in planted)

        self.assertNotEqual(staged(1), staged(2))

    def test_rules_replace_their_twins(self):
        cfg = GenConfig(stage_count=6, relation_count=2, planted_rules=2, seed=5, **self.SMALL)
        with_rules, truth = self.solve(cfg)
        without_rules, _ = self.solve(cfg, ignore_rules=True)
        self.assertEqual(len(truth.rules), 2)
        self.assertEqual(len(without_rules) - len(with_rules), 2)
        dropped = {s.name for s in without_rules.service_calls} - {s.name for s in with_rules.service_calls}
        self.assertEqual(dropped, {"link0", "link1"})
        self.assertTrue(with_rules.rule_applications)

    def test_typed_stages_without_relations(self):
        cfg = GenConfig(num_web_services=12, num_parameters=100, pars_per_service=2, num_ws_in_solution=4,
                        stage_count=3, relation_count=0, noise_ratio=0.0, seed=2)
        instance, truth = generate("relational", cfg)
        self.assertEqual(instance["relations"], [])
        self.assertEqual(truth.rules, [])
        self.assertEqual(len(instance["services"]), 12)
        onto, services, query = build_relational_problem(parse_instance(instance))
        comp = search_composition_relational(onto, services, query)
        self.assertIsNotNone(comp)
        calls = [CallSpec.model_validate(c) for c in json.loads(json.dumps(comp.to_json()))["calls"]]
        self.assertTrue(validate_relational(onto, services, query, calls).valid)

    def test_noise_never_kept(self):
        cfg = GenConfig(num_web_services=40, num_parameters=300, pars_per_service=3, noise_ratio=1.0,
                        num_ws_in_solution=4, seed=8)
        comp, truth = self.solve(cfg)
        planted = set(truth.planted)
        self.assertTrue(comp.service_calls)
        self.assertTrue(all(s.name in planted for s in comp.service_calls))

    def test_repository_too_small(self):
        with self.assertRaises(ValueError):
            generate("relational", GenConfig(num_web_services=3, num_ws_in_solution=3, stage_count=4))


class TestOOGenerator(unittest.TestCase):
    def test_planted_list_and_search(self):
        for seed in range(4):
            cfg = GenConfig(num_web_services=40, num_ws_in_solution=5, concept_count=8,
                            property_count=12, pars_per_service=3, seed=seed)
            instance, truth = generate("oo", cfg)
            tree, services, query = build_oo_problem(parse_instance(instance))
            planted = Composition.sequential(truth.planted)
            self.assertTrue(validate_oo(services, tree, query, planted).valid, seed)
            found = find_comp(services, tree, query)
            self.assertIsNotNone(found, seed)
            self.assertTrue(validate_oo(services, tree, query, found).valid, seed)


class TestOnlineGenerator(unittest.TestCase):
    def setUp(self):
        cfg = GenConfig(num_web_services=120, num_parameters=50, num_ws_in_solution=5,
                        pars_per_service=3, query_count=4, seed=4)
        stream, self.truth = generate("online", cfg)
        self.ops = parse_stream(json.dumps(op) for op in stream)
        self.last_find = max(i for i, op in enumerate(self.ops) if op.op == "find_composition")
        self.manager = FailoverManager()

    def test_modes_cycle(self):
        modes = [self.truth.queries[q]["mode"] for q in sorted(self.truth.queries)]
        self.assertEqual(modes, ["both", "type1", "type2", "none"])

    def test_main_chain_and_backups(self):
        for op in self.ops[: self.last_find + 1]:
            apply_op(self.manager, op)
        for qid, expected in self.truth.queries.items():
            sol = self.manager.state.compositions[qid]
            self.assertEqual(sol.main, expected["main"], qid)
            kinds = {name: bkp.kind for name, bkp in sol.backup.items() if bkp is not None}
            self.assertEqual(kinds, expected["backups"], qid)

    def test_repair_events(self):
        events = []
        for op in self.ops:
            events.extend(apply_op(self.manager, op))
        repairs = events[len(self.truth.queries):]
        seen = defaultdict(list)
        for ev in repairs:
            seen[ev.id].append(ev.event)
        for qid, expected in self.truth.queries.items():
            self.assertEqual(seen[qid], expected["events"], qid)
        self.assertEqual(self.manager.state.live_usages(), self.manager.state.expected_usages())


class TestBench(unittest.TestCase):
    def test_directory_with_corrupt_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            for model in ("name", "relational"):
                os.makedirs(os.path.join(tmp, model))
                instance, truth = generate(model, GenConfig(num_web_services=30, num_ws_in_solution=4, seed=1))
                dump_json(instance, os.path.join(tmp, model, "instance.json"))
                dump_json(truth.to_json(), os.path.join(tmp, model, "groundtruth.json"))
            with open(os.path.join(tmp, "broken.json"), "w", encoding="utf-8") as f:
                f.write("{oops")

            self.assertEqual(InstanceTraverser(tmp).traverse(),
                             ["broken.json", "name/instance.json", "relational/instance.json"])
            reports = bench_directory(tmp, SolveOptions(), workers=2)

        by_name = {r.instance: r for r in reports}
        self.assertIsNotNone(by_name["broken.json"].error)
        self.assertTrue(by_name["name/instance.json"].solved)
        self.assertTrue(by_name["relational/instance.json"].valid)
        self.assertEqual(by_name["relational/instance.json"].model, "relational")

    def test_csv_format(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nlp.json")
            instance, _ = generate("name", GenConfig(num_web_services=20, num_ws_in_solution=3))
            dump_json(instance, path)
            report = run_instance(path, label="nlp.json")
        rows = list(csv.DictReader(io.StringIO(format_reports([report], "csv"))))
        self.assertEqual(rows[0]["instance"], "nlp.json")
        self.assertEqual(rows[0]["solved"], "True")

    def test_empty_directory(self):
        with tempfile.TemporaryDirectory() as tmp:
            self.assertEqual(bench_directory(tmp), [])

    def test_missing_root(self):
        with self.assertRaises(ValueError):
            InstanceTraverser("/definitely/not/here")


if __name__ == "__main__":
    unittest.main()

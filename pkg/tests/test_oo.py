import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../backend')))
import json
import unittest

from hypothesis import given, settings, strategies as st

from app.core import Composition, Request, Service, index_services, parse_instance, validate_composition
from app.core.errors import DuplicateServiceError, TaxonomyError
from app.engine_oo import (
    ConceptTree,
    build_oo_problem,
    find_comp,
    reduce_oo,
    unmet_inputs,
    validate_oo,
)
from app.engine_name import solve_name

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

TRANSPORT_ORDER = [
    "getClosestCity",
    "getCountryFromLocation",
    "getTransportCompany",
    "getLocalSubsidiary",
    "getVehicle",
    "makeArrangements",
]


def transport():
    with open(os.path.join(FIXTURES, "transport.json"), "r", encoding="utf-8") as f:
        return json.load(f)


def small_tree(services, known, required):
    return build_oo_problem(parse_instance({
        "model": "oo",
        "conceptTree": {"concepts": [
            {"name": "Text"},
            {"name": "Item", "props": [{"name": "label", "type": "Text"}]},
            {"name": "Gadget", "parent": "Item"},
            {"name": "Other"},
        ]},
        "services": services,
        "query": {"known": known, "required": required},
    }))


class TestTransportScenario(unittest.TestCase):
    def setUp(self):
        self.tree, self.repo, self.query = build_oo_problem(parse_instance(transport()))

    def test_lexicographic_call_order(self):
        comp = find_comp(self.repo, self.tree, self.query)
        self.assertEqual(list(comp.calls), TRANSPORT_ORDER)
        self.assertTrue(validate_oo(self.repo, self.tree, self.query, comp).valid)

    def test_reduction_keeps_needed_calls(self):
        comp = find_comp(self.repo, self.tree, self.query)
        reduced = reduce_oo(self.repo, self.tree, self.query, comp)
        self.assertEqual(list(reduced.calls), TRANSPORT_ORDER)

    def test_out_of_order_call_flagged(self):
        order = list(TRANSPORT_ORDER)
        order[3], order[4] = order[4], order[3]
        comp = Composition.sequential(order)
        report = validate_oo(self.repo, self.tree, self.query, comp)
        self.assertFalse(report.valid)
        self.assertEqual(report.first_violation.position, 4)
        self.assertEqual(report.first_violation.service, "getVehicle")
        self.assertEqual(
            unmet_inputs(self.repo, self.tree, self.query, comp),
            {"getVehicle": [{"concept": "LocalBusiness", "props": ["email"]}]},
        )

    def test_goal_not_reached(self):
        comp = Composition.sequential(TRANSPORT_ORDER[:-1])
        report = validate_oo(self.repo, self.tree, self.query, comp)
        self.assertFalse(report.goal_covered)

    def test_inherited_properties(self):
        self.assertTrue(self.tree.has("City", "name"))
        self.assertFalse(self.tree.has("City", "lat"))
        self.assertEqual(self.tree.properties("LocalBusiness"), frozenset({"name", "email"}))
        self.assertEqual(self.tree.ancestors("City"), ["City", "AdministrativeArea", "Place", "Thing"])


class TestSmallTrees(unittest.TestCase):
    def test_useless_call_removed(self):
        tree, repo, query = small_tree(
            [
                {"name": "useful", "in": [{"concept": "Other"}], "out": [{"concept": "Gadget", "props": ["label"]}]},
                {"name": "useless", "in": [{"concept": "Other"}], "out": [{"concept": "Text"}]},
            ],
            known=[{"concept": "Other"}],
            required=[{"concept": "Item", "props": ["label"]}],
        )
        reduced = reduce_oo(repo, tree, query, Composition.sequential(["useless", "useful"]))
        self.assertEqual(list(reduced.calls), ["useful"])

    def test_presence_climbs_to_parent(self):
        tree, repo, query = small_tree(
            [{"name": "make", "in": [{"concept": "Other"}], "out": [{"concept": "Gadget"}]}],
            known=[{"concept": "Other"}],
            required=[{"concept": "Item"}],
        )
        comp = find_comp(repo, tree, query)
        self.assertEqual(list(comp.calls), ["make"])

    def test_unsolvable(self):
        tree, repo, query = small_tree(
            [{"name": "make", "in": [{"concept": "Item"}], "out": [{"concept": "Gadget"}]}],
            known=[{"concept": "Other"}],
            required=[{"concept": "Gadget"}],
        )
        self.assertIsNone(find_comp(repo, tree, query))

    def test_unknown_property(self):
        with self.assertRaises(TaxonomyError):
            small_tree([], known=[{"concept": "Other", "props": ["label"]}], required=[])

    def test_reserved_service_name(self):
        with self.assertRaises(DuplicateServiceError):
            small_tree([{"name": "Goal", "in": [], "out": []}], known=[], required=[])


class TestConceptTreeChecks(unittest.TestCase):
    def test_multiple_inheritance_rejected(self):
        data = transport()
        data["conceptTree"]["concepts"].append({"name": "City", "parent": "Organization"})
        with self.assertRaises(TaxonomyError):
            build_oo_problem(parse_instance(data))

    def test_property_on_unrelated_concepts(self):
        with self.assertRaises(TaxonomyError):
            ConceptTree({"A": None, "B": None, "T": None}, {"A": {"p": "T"}, "B": {"p": "T"}})

    def test_property_type_must_exist(self):
        with self.assertRaises(TaxonomyError):
            ConceptTree({"A": None}, {"A": {"p": "Missing"}})

    def test_property_redeclared_below_definer(self):
        tree = ConceptTree({"A": None, "B": "A", "T": None}, {"A": {"p": "T"}, "B": {"p": "T"}})
        self.assertTrue(tree.has("A", "p"))
        self.assertTrue(tree.has("B", "p"))


OO_PARAMS = [f"Op{i}" for i in range(6)]


@st.composite
def flat_problems(draw):
    """(services as (name, ins, outs), init, goal) over presence-only concepts."""
    services = []
    for k in range(draw(st.integers(min_value=1, max_value=6))):
        ins = draw(st.sets(st.sampled_from(OO_PARAMS), max_size=2))
        outs = draw(st.sets(st.sampled_from(OO_PARAMS), min_size=1, max_size=2)) - ins
        services.append((f"oo_ws{k}", sorted(ins), sorted(outs)))
    init = sorted(draw(st.sets(st.sampled_from(OO_PARAMS), min_size=1, max_size=2)))
    goal = sorted(draw(st.sets(st.sampled_from(OO_PARAMS), min_size=1, max_size=3)))
    return services, init, goal


def as_oo(services, init, goal):
    return build_oo_problem(parse_instance({
        "model": "oo",
        "conceptTree": {"concepts": [{"name": p} for p in OO_PARAMS]},
        "services": [
            {"name": name, "in": [{"concept": c} for c in ins], "out": [{"concept": c} for c in outs]}
            for name, ins, outs in services
        ],
        "query": {"known": [{"concept": c} for c in init], "required": [{"concept": c} for c in goal]},
    }))


class TestFlatTreeMatchesNames(unittest.TestCase):
    @settings(max_examples=120, deadline=None)
    @given(flat_problems())
    def test_same_solvability(self, problem):
        services, init, goal = problem
        tree, repo, query = as_oo(services, init, goal)
        names = index_services(Service.from_names(n, ins, outs) for n, ins, outs in services)
        req = Request.from_names(init, goal)

        found = find_comp(repo, tree, query)
        by_name = solve_name(names, req)
        self.assertEqual(found is None, by_name is None)
        if found is not None:
            self.assertTrue(validate_oo(repo, tree, query, found).valid)
            self.assertTrue(validate_composition(names, req, found).valid)


if __name__ == "__main__":
    unittest.main()

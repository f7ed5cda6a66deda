import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../backend')))
import tempfile
import unittest

import networkx as nx

from app.core import Composition, build_name_problem, load_instance
from app.flowchart import USER_GOAL, USER_INPUT, build_dependency_graph, export_mermaid, graph_layers, to_mermaid
from app.taxonomy import build_hierarchical_problem, find_composition_hierarchical

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
NLP_ORDER = ["getPredicate", "getVerbProp", "getWordSense", "getSynonim", "conjugateVerb"]


class TestNameGraph(unittest.TestCase):
    def setUp(self):
        repo, req = build_name_problem(load_instance(os.path.join(FIXTURES, "nlp.json")))
        self.graph = build_dependency_graph(repo, req, Composition.sequential(NLP_ORDER))

    def test_layers_follow_dependencies(self):
        self.assertEqual(graph_layers(self.graph), [
            [USER_INPUT],
            ["getPredicate"],
            ["getVerbProp", "getWordSense"],
            ["getSynonim"],
            ["conjugateVerb"],
            [USER_GOAL],
        ])
        self.assertTrue(nx.is_directed_acyclic_graph(self.graph))

    def test_edges_carry_parameters(self):
        self.assertEqual(self.graph.edges[USER_INPUT, "getWordSense"]["params"], ["sentence"])
        self.assertEqual(self.graph.edges["getVerbProp", "conjugateVerb"]["params"],
                         ["mood", "number", "person", "tense"])
        self.assertEqual(self.graph.edges["conjugateVerb", USER_GOAL]["params"], ["conjugatedVerb"])
        self.assertEqual(self.graph.number_of_edges(), 8)

    def test_mermaid_text(self):
        text = to_mermaid(self.graph)
        self.assertTrue(text.startswith("graph LR"))
        self.assertIn('subgraph L0["Input"]', text)
        self.assertIn('subgraph L2["Layer 2"]', text)
        self.assertIn('subgraph L5["Goal"]', text)
        self.assertIn("getVerbProp -->|mood, number, person, tense| conjugateVerb", text)

    def test_export_wraps_in_fence(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "flow.md")
            export_mermaid(self.graph, path)
            with open(path, "r", encoding="utf-8") as f:
                content = f.read()
        self.assertTrue(content.startswith("```mermaid\ngraph LR"))
        self.assertTrue(content.endswith("```\n"))


class TestHierarchicalGraph(unittest.TestCase):
    def test_subsumption_edges(self):
        repo, tax, req = build_hierarchical_problem(load_instance(os.path.join(FIXTURES, "verb_synonym.json")))
        comp = find_composition_hierarchical(repo, tax, req)
        graph = build_dependency_graph(repo, req, comp, tax)
        self.assertEqual(graph.edges[USER_INPUT, "stringReplace"]["params"], ["string"])
        self.assertEqual(graph.edges["extractMainVerb", "stringReplace"]["params"], ["substr"])
        self.assertEqual(graph.edges["getSynonym", "stringReplace"]["params"], ["substitute"])
        self.assertEqual(graph.edges["extractMainVerb", "getSynonym"]["params"], ["word"])
        self.assertEqual(graph.nodes[USER_GOAL]["layer"], 4)


if __name__ == "__main__":
    unittest.main()

"""
Test Suite for the quiver_structure tool.
Affine recognition, Euler form, delta, defect, reflections and real roots.
"""

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
sys.path.append(str(Path(__file__).parent))

import unittest
import asyncio

from errors import NoAdmissibleOrder, NotAffine, ParseError, UsageError
from quiver import (
    Quiver, admissible_sink_sequence, cartan_matrix, classify_graph, coxeter_vector, cyclic_quiver, defect,
    euler_form, make_quiver, minimal_imaginary_root, parse_dim_vector, positive_real_roots_below,
    reflect_quiver, rep_space_dim, weyl_reflect, register_tools,
)
from fixtures import MockMCP, load_quiver, quiver_text


class TestAffineRecognition(unittest.TestCase):

    def test_kronecker(self):
        self.assertEqual(classify_graph(load_quiver("kronecker")).name, "A~(1)")

    def test_a2_tilde(self):
        self.assertEqual(classify_graph(load_quiver("a2tilde")).name, "A~(2)")

    def test_d4_tilde(self):
        self.assertEqual(classify_graph(load_quiver("d4tilde")).name, "D~(4)")

    def test_d5_tilde(self):
        q = make_quiver(["a", "b", "c", "d", "e", "f"],
                        [("c", "a"), ("d", "a"), ("a", "b"), ("e", "b"), ("f", "b")])
        self.assertEqual(classify_graph(q).name, "D~(5)")

    def test_e6_tilde(self):
        q = make_quiver(range(7), [(1, 0), (2, 1), (3, 0), (4, 3), (5, 0), (6, 5)])
        self.assertEqual(classify_graph(q).name, "E~(6)")

    def test_cyclic(self):
        affine = classify_graph(load_quiver("cyclic3"))
        self.assertTrue(affine.is_cyclic)
        self.assertEqual(affine.name, "cyclic(3)")

    def test_finite_type_is_not_affine(self):
        with self.assertRaises(NotAffine):
            classify_graph(make_quiver(["1", "2", "3"], [("1", "2"), ("2", "3")]))

    def test_disconnected_is_not_affine(self):
        with self.assertRaises(NotAffine):
            classify_graph(make_quiver(["1", "2", "3", "4"], [("1", "2"), ("1", "2"), ("3", "4")]))


class TestForms(unittest.TestCase):

    def setUp(self):
        self.kronecker = load_quiver("kronecker")

    def test_euler_form_is_not_symmetric(self):
        self.assertEqual(euler_form(self.kronecker, (1, 0), (0, 1)), -2)
        self.assertEqual(euler_form(self.kronecker, (0, 1), (1, 0)), 0)

    def test_cartan_matrix(self):
        self.assertEqual(cartan_matrix(self.kronecker), ((2, -2), (-2, 2)))

    def test_delta(self):
        self.assertEqual(minimal_imaginary_root(self.kronecker), (1, 1))
        self.assertEqual(minimal_imaginary_root(load_quiver("a2tilde")), (1, 1, 1))
        self.assertEqual(minimal_imaginary_root(load_quiver("d4tilde")), (2, 1, 1, 1, 1))

    def test_delta_is_isotropic(self):
        for name in ("kronecker", "a2tilde", "d4tilde"):
            q = load_quiver(name)
            delta = minimal_imaginary_root(q)
            self.assertEqual(euler_form(q, delta, delta), 0)

    def test_defect(self):
        self.assertEqual(defect(self.kronecker, (0, 1)), -1)
        self.assertEqual(defect(self.kronecker, (1, 0)), 1)
        self.assertEqual(defect(self.kronecker, (1, 1)), 0)

    def test_defect_needs_acyclic(self):
        with self.assertRaises(UsageError):
            defect(cyclic_quiver(3), (1, 0, 0))

    def test_rep_space_dim(self):
        self.assertEqual(rep_space_dim(self.kronecker, (1, 1)), 2)
        self.assertEqual(rep_space_dim(self.kronecker, (2, 3)), 12)


class TestReflections(unittest.TestCase):

    def setUp(self):
        self.kronecker = load_quiver("kronecker")

    def test_sink_sequence(self):
        self.assertEqual(admissible_sink_sequence(self.kronecker), ("2", "1"))
        self.assertEqual(admissible_sink_sequence(load_quiver("d4tilde")), ("0", "1", "2", "3", "4"))

    def test_cyclic_has_no_sink_sequence(self):
        with self.assertRaises(NoAdmissibleOrder):
            admissible_sink_sequence(load_quiver("cyclic3"))

    def test_reflect_quiver_reverses_incident_arrows(self):
        r = reflect_quiver(self.kronecker, "2")
        self.assertTrue(r.is_source("2"))
        self.assertTrue(r.is_sink("1"))
        self.assertEqual(reflect_quiver(r, "2"), self.kronecker)

    def test_weyl_reflect(self):
        self.assertEqual(weyl_reflect(self.kronecker, "1", (1, 0)), (-1, 0))
        self.assertEqual(weyl_reflect(self.kronecker, "2", (1, 0)), (1, 2))

    def test_coxeter_vector(self):
        self.assertEqual(coxeter_vector(self.kronecker, (2, 3)), (0, 1))
        self.assertEqual(coxeter_vector(self.kronecker, (0, 1), inverse=True), (2, 3))
        self.assertEqual(coxeter_vector(self.kronecker, (1, 1)), (1, 1))

    def test_real_roots_below(self):
        roots = positive_real_roots_below(self.kronecker, (2, 2))
        self.assertEqual(roots, [(0, 1), (1, 0), (1, 2), (2, 1)])

    def test_real_roots_below_d4_delta(self):
        q = load_quiver("d4tilde")
        roots = positive_real_roots_below(q, minimal_imaginary_root(q))
        self.assertEqual(len(roots), 24)
        for root in roots:
            self.assertEqual(euler_form(q, root, root), 1)


class TestParsing(unittest.TestCase):

    def test_missing_arrows_key(self):
        with self.assertRaises(ParseError):
            Quiver.from_json('{"vertices": ["1"]}')

    def test_arrow_to_unknown_vertex(self):
        with self.assertRaises(ParseError):
            Quiver.from_json('{"vertices": ["1"], "arrows": [{"id": "a", "tail": "1", "head": "9"}]}')

    def test_dim_vector_forms(self):
        q = load_quiver("kronecker")
        self.assertEqual(parse_dim_vector(q, "2,3"), (2, 3))
        self.assertEqual(parse_dim_vector(q, "(2, 3)"), (2, 3))
        self.assertEqual(parse_dim_vector(q, {"2": 5}), (0, 5))
        with self.assertRaises(ParseError):
            parse_dim_vector(q, "1,2,3")


class TestQuiverStructureTool(unittest.TestCase):

    def setUp(self):
        self.mock_mcp = MockMCP()
        register_tools(self.mock_mcp)
        self.kronecker = quiver_text("kronecker")

    async def async_test_helper(self, *args, **kwargs):
        return await self.mock_mcp.tools['quiver_structure'](*args, **kwargs)

    def test_classify_graph(self):
        result = asyncio.run(self.async_test_helper("classify_graph", self.kronecker))
        self.assertEqual(result, "✅ A~(1)")

    def test_euler_form(self):
        result = asyncio.run(self.async_test_helper("euler_form", self.kronecker, a="1,0", b="0,1"))
        self.assertIn("= -2", result)

    def test_defect(self):
        result = asyncio.run(self.async_test_helper("defect", self.kronecker, a="0,1"))
        self.assertEqual(result, "✅ defect(0, 1) = -1")

    def test_sink_sequence(self):
        result = asyncio.run(self.async_test_helper("admissible_sink_sequence", self.kronecker))
        self.assertEqual(result, "✅ ['2', '1']")

    def test_cyclic_sink_sequence_error(self):
        result = asyncio.run(self.async_test_helper("admissible_sink_sequence", quiver_text("cyclic3")))
        self.assertIn("[no_admissible_order]", result)

    def test_bad_dim_vector(self):
        result = asyncio.run(self.async_test_helper("defect", self.kronecker, a="1,x"))
        self.assertIn("❌ Error in defect [parse]", result)

    def test_bad_quiver_json(self):
        result = asyncio.run(self.async_test_helper("cartan_matrix", "{"))
        self.assertIn("[parse]", result)

    def test_invalid_operation(self):
        result = asyncio.run(self.async_test_helper("dynkin_label", self.kronecker))
        self.assertIn("❌ Invalid operation 'dynkin_label'", result)


if __name__ == '__main__':
    unittest.main()

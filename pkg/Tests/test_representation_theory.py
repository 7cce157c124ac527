"""
Test Suite for the representation_theory tool.
Hom/Ext dimensions, extensions, subobjects, isomorphism and Krull-Schmidt decomposition
on the Kronecker quiver, the A2 quiver and C_3.
"""

import random
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
sys.path.append(str(Path(__file__).parent))

import unittest
import asyncio

from errors import ParseError, UsageError
from exactfield import Field, identity, zeros
from quiver import euler_form
from rep import (
    Representation, direct_sum, end_dim, endomorphism_is_local, ext1_dim, ext_classes, extension_rep, hom_basis,
    hom_dim, indecompose, is_indecomposable, is_isomorphic, is_morphism, is_nilpotent, orbit_dim, power,
    quotient_representation, random_rep, subrepresentation, register_tools,
)
from tubes import cyclic_indec, cyclic_t_lambda
from fixtures import MockMCP, build_rep, load_quiver, rep_text


class KroneckerCase(unittest.TestCase):

    def setUp(self):
        self.q = load_quiver("kronecker")
        self.f = Field(17)
        self.s1 = build_rep(self.q, self.f, (1, 0))
        self.s2 = build_rep(self.q, self.f, (0, 1))
        self.r3 = build_rep(self.q, self.f, (1, 1), {"a": [[1]], "b": [[3]]})
        self.r5 = build_rep(self.q, self.f, (1, 1), {"a": [[1]], "b": [[5]]})


class TestHomExt(KroneckerCase):

    def test_simple_homs(self):
        self.assertEqual(hom_dim(self.s1, self.s1), 1)
        self.assertEqual(hom_dim(self.s1, self.s2), 0)
        self.assertEqual(hom_dim(self.s2, self.s1), 0)

    def test_ext_between_simples(self):
        self.assertEqual(ext1_dim(self.s1, self.s2), 2)
        self.assertEqual(ext1_dim(self.s2, self.s1), 0)
        self.assertEqual(len(ext_classes(self.s1, self.s2)), 2)

    def test_euler_form_is_hom_minus_ext(self):
        pairs = [(self.s1, self.r3), (self.r3, self.s2), (self.r3, self.r5), (self.s2, self.s1)]
        for m, n in pairs:
            self.assertEqual(hom_dim(m, n) - ext1_dim(m, n), euler_form(self.q, m.dims, n.dims))

    def test_regular_module(self):
        self.assertEqual(end_dim(self.r3), 1)
        self.assertEqual(ext1_dim(self.r3, self.r3), 1)
        self.assertEqual(hom_dim(self.r3, self.r5), 0)

    def test_hom_basis_elements_are_morphisms(self):
        m = direct_sum(self.r3, self.s1)
        basis = hom_basis(m, m)
        self.assertEqual(len(basis), end_dim(m))
        for k in range(len(basis)):
            coeffs = [1 if j == k else 0 for j in range(len(basis))]
            self.assertTrue(is_morphism(m, m, basis.combination(coeffs)))

    def test_orbit_dim(self):
        self.assertEqual(orbit_dim(self.r3), 1)
        self.assertEqual(orbit_dim(direct_sum(self.s1, self.s2)), 0)


class TestEulerIdentity(unittest.TestCase):
    """dim Hom(M, N) - dim Ext^1(M, N) = <dim M, dim N> on random pairs."""

    QUIVERS = ("kronecker", "a2tilde", "d4tilde")

    def random_dims(self, q, rng):
        while True:
            dims = tuple(rng.randint(0, 2) for _ in q.vertices)
            if any(dims):
                return dims

    def check_pairs(self, f, count, seed):
        rng = random.Random(seed)
        quivers = [load_quiver(name) for name in self.QUIVERS]
        for k in range(count):
            q = quivers[k % len(quivers)]
            m = random_rep(q, f, self.random_dims(q, rng), rng)
            n = random_rep(q, f, self.random_dims(q, rng), rng)
            with self.subTest(quiver=self.QUIVERS[k % len(quivers)], m=m.dims, n=n.dims):
                self.assertEqual(hom_dim(m, n) - ext1_dim(m, n), euler_form(q, m.dims, n.dims))

    def test_over_f5(self):
        self.check_pairs(Field(5), 500, seed=5)

    def test_over_rationals(self):
        self.check_pairs(Field(), 50, seed=0)


class TestExtensionsAndSubobjects(KroneckerCase):

    def test_nonsplit_extension_is_indecomposable(self):
        cocycle = ext_classes(self.s1, self.s2)[0]
        e = extension_rep(self.s1, self.s2, cocycle)
        self.assertEqual(e.dims, (1, 1))
        self.assertTrue(is_indecomposable(e))

    def test_split_extension(self):
        e = extension_rep(self.s1, self.s2, None)
        self.assertFalse(is_indecomposable(e))
        self.assertTrue(is_isomorphic(e, direct_sum(self.s1, self.s2)))

    def test_sub_and_quotient(self):
        basis = (zeros(self.f, 1, 0), identity(self.f, 1))
        sub = subrepresentation(self.r3, basis)
        self.assertEqual(sub.dims, (0, 1))
        self.assertEqual(quotient_representation(self.r3, basis).dims, (1, 0))

    def test_unstable_subspace(self):
        basis = (identity(self.f, 1), zeros(self.f, 1, 0))
        with self.assertRaises(UsageError):
            subrepresentation(self.r3, basis)


class TestDecomposition(KroneckerCase):

    def test_isomorphic_after_base_change(self):
        scaled = build_rep(self.q, self.f, (1, 1), {"a": [[2]], "b": [[6]]})
        self.assertTrue(is_isomorphic(self.r3, scaled))
        self.assertFalse(is_isomorphic(self.r3, self.r5))

    def test_rational_isomorphism_by_random_search(self):
        rationals = Field()
        r = build_rep(self.q, rationals, (1, 1), {"a": [[1]], "b": [[3]]})
        m = power(r, 2)
        mixed = build_rep(self.q, rationals, (2, 2), {"a": [[1, 1], [0, 1]], "b": [[3, 3], [0, 3]]})
        self.assertTrue(is_isomorphic(m, mixed))
        other = direct_sum(r, build_rep(self.q, rationals, (1, 1), {"a": [[1]], "b": [[5]]}))
        self.assertFalse(is_isomorphic(m, other))

    def test_different_dims_are_not_isomorphic(self):
        self.assertFalse(is_isomorphic(self.s1, self.s2))

    def test_indecompose_mixed(self):
        m = direct_sum(self.r3, self.s1, self.s2)
        pieces = indecompose(m)
        self.assertEqual(sorted(p.dims for p, _ in pieces), [(0, 1), (1, 0), (1, 1)])
        self.assertTrue(all(mult == 1 for _, mult in pieces))

    def test_indecompose_multiplicity(self):
        pieces = indecompose(power(self.r3, 2))
        self.assertEqual(len(pieces), 1)
        self.assertEqual(pieces[0][1], 2)
        self.assertTrue(is_isomorphic(pieces[0][0], self.r3))

    def test_indecompose_after_base_change(self):
        # R_3 + S_1 written in a basis that mixes the two summands at vertex 1
        m = build_rep(self.q, self.f, (2, 1), {"a": [[1, 1]], "b": [[3, 3]]})
        pieces = indecompose(m)
        self.assertEqual(sorted(p.dims for p, _ in pieces), [(1, 0), (1, 1)])

    def test_regular_and_simple_flags(self):
        self.assertTrue(is_indecomposable(self.r3))
        self.assertFalse(is_indecomposable(direct_sum(self.r3, self.r5)))

    def test_local_endomorphism_ring(self):
        self.assertTrue(endomorphism_is_local(self.r3))
        self.assertTrue(endomorphism_is_local(self.s1))
        self.assertFalse(endomorphism_is_local(direct_sum(self.s1, self.s2)))


class TestValidation(KroneckerCase):

    def test_wrong_map_shape(self):
        with self.assertRaises(UsageError):
            Representation(self.q, self.f, (1, 1), (zeros(self.f, 2, 1), zeros(self.f, 1, 1)))

    def test_unknown_vertex_in_json(self):
        with self.assertRaises(ParseError):
            Representation.from_json({"dims": {"9": 1}, "maps": {}}, quiver=self.q, field=self.f)

    def test_missing_map(self):
        with self.assertRaises(ParseError):
            Representation.from_json({"dims": [1, 1], "maps": {"a": [[1]]}}, quiver=self.q, field=self.f)

    def test_field_mismatch(self):
        other = build_rep(self.q, Field(5), (1, 0))
        with self.assertRaises(UsageError):
            hom_dim(self.s1, other)

    def test_json_round_trip(self):
        back = Representation.from_json(rep_text(self.r3))
        self.assertEqual(back, self.r3)


class TestNilpotency(unittest.TestCase):

    def test_cyclic_segments_are_nilpotent(self):
        f = Field(5)
        self.assertTrue(is_nilpotent(cyclic_indec(3, 0, 4, f).to_representation()))
        self.assertFalse(is_nilpotent(cyclic_t_lambda(3, 2, f).to_representation()))

    def test_acyclic_is_nilpotent(self):
        q = load_quiver("kronecker")
        m = build_rep(q, Field(3), (1, 1), {"a": [[1]], "b": [[1]]})
        self.assertTrue(is_nilpotent(m))


class TestRepresentationTheoryTool(KroneckerCase):

    def setUp(self):
        super().setUp()
        self.mock_mcp = MockMCP()
        register_tools(self.mock_mcp)

    async def async_test_helper(self, *args, **kwargs):
        return await self.mock_mcp.tools['representation_theory'](*args, **kwargs)

    def test_ext1_dim(self):
        result = asyncio.run(self.async_test_helper("ext1_dim", rep_text(self.s1), other=rep_text(self.s2)))
        self.assertEqual(result, "✅ dim Ext^1 = 2")

    def test_hom_dim(self):
        result = asyncio.run(self.async_test_helper("hom_dim", rep_text(self.r3), other=rep_text(self.r3)))
        self.assertEqual(result, "✅ dim Hom = 1")

    def test_indecompose(self):
        m = direct_sum(self.r3, self.r3)
        result = asyncio.run(self.async_test_helper("indecompose", rep_text(m)))
        self.assertEqual(result, "✅ 2 x dims (1, 1)")

    def test_is_isomorphic(self):
        result = asyncio.run(self.async_test_helper("is_isomorphic", rep_text(self.r3), other=rep_text(self.r5)))
        self.assertEqual(result, "✅ isomorphic: False")

    def test_missing_other(self):
        result = asyncio.run(self.async_test_helper("hom_dim", rep_text(self.s1)))
        self.assertIn("requires parameter: other", result)

    def test_bad_rep_json(self):
        result = asyncio.run(self.async_test_helper("dim_vector", '{"dims": [1, 0]}'))
        self.assertIn("❌ Error in dim_vector [parse]", result)

    def test_invalid_operation(self):
        result = asyncio.run(self.async_test_helper("ext2_dim", rep_text(self.s1)))
        self.assertIn("❌ Invalid operation 'ext2_dim'", result)


if __name__ == '__main__':
    unittest.main()

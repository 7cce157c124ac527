"""
Test Suite for the hall_algebra tool.
Quantum numbers, the twist, Hall numbers and products on A2, Serre relations and Hall polynomials.
"""

import sys
from fractions import Fraction
from math import comb
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
sys.path.append(str(Path(__file__).parent))

import unittest
import asyncio

from errors import CombinatorialExplosion, UsageError
from exactfield import Field
from hallalg import (
    HallElement, LaurentPoly, QuadraticScalar, gaussian, graded_subspaces, hall_number, hall_polynomial,
    hall_product, middle_terms, quantum_factorial, quantum_integer, rep_builder, serre_check,
    subspace_count, twist_exponent, twist_scalar, register_tools,
)
from fixtures import MockMCP, a2, build_rep, data_path, load_quiver, quiver_text, rep_text


class TestQuantumNumbers(unittest.TestCase):

    def test_gaussian_strings(self):
        self.assertEqual(str(gaussian(2, 1)), "v + v^-1")
        self.assertEqual(str(gaussian(3, 1)), "v^2 + 1 + v^-2")
        self.assertEqual(str(gaussian(5, 0)), "1")

    def test_gaussian_from_factorials(self):
        for n in range(1, 6):
            for m in range(n + 1):
                lhs = gaussian(n, m) * quantum_factorial(m) * quantum_factorial(n - m)
                self.assertEqual(lhs, quantum_factorial(n))

    def test_gaussian_is_bar_invariant_and_specializes(self):
        for n in range(6):
            for m in range(n + 1):
                self.assertTrue(gaussian(n, m).is_bar_invariant())
                self.assertEqual(gaussian(n, m).at_one(), comb(n, m))

    def test_quantum_integer(self):
        self.assertEqual(quantum_integer(3), LaurentPoly({2: 1, 0: 1, -2: 1}))
        self.assertTrue(quantum_integer(0).is_zero())

    def test_bad_arguments(self):
        with self.assertRaises(UsageError):
            gaussian(2, 3)
        with self.assertRaises(UsageError):
            quantum_integer(-1)


class TestTwist(unittest.TestCase):

    def test_twist_exponent(self):
        self.assertEqual(twist_exponent(a2(), (1, 0), (0, 1)), 1)
        self.assertEqual(twist_exponent(a2(), (0, 1), (1, 0)), 0)
        self.assertEqual(twist_exponent(load_quiver("kronecker"), (1, 0), (0, 1)), 2)

    def test_twist_scalar(self):
        self.assertEqual(twist_scalar(2, 2), Fraction(1, 2))
        self.assertEqual(twist_scalar(3, 1), QuadraticScalar(Fraction(0), Fraction(1, 3), 3))
        self.assertEqual(twist_scalar(4, 1), Fraction(1, 2))

    def test_quadratic_arithmetic(self):
        r = QuadraticScalar.sqrt(5)
        self.assertEqual(r * r, 5)
        self.assertEqual((r + 1) * (r - 1), 4)
        self.assertEqual((r + 2) / (r + 2), 1)
        self.assertEqual(str(QuadraticScalar(Fraction(1), Fraction(-2), 3)), "1 - 2*sqrt(3)")

    def test_mixed_fields(self):
        with self.assertRaises(UsageError):
            QuadraticScalar.sqrt(2) + QuadraticScalar.sqrt(3)


class TestSubspaces(unittest.TestCase):

    def test_subspace_count(self):
        self.assertEqual(subspace_count(2, 1, 3), 4)
        self.assertEqual(subspace_count(4, 2, 2), 35)
        self.assertEqual(subspace_count(3, 4, 2), 0)

    def test_graded_subspaces_are_distinct(self):
        spaces = list(graded_subspaces(Field(2), 3, 1))
        self.assertEqual(len(spaces), 7)
        self.assertEqual(len(set(spaces)), 7)


class A2Case(unittest.TestCase):

    def setUp(self):
        self.q = a2()
        self.f = Field(2)
        self.s1 = build_rep(self.q, self.f, (1, 0))
        self.s2 = build_rep(self.q, self.f, (0, 1))
        self.p = build_rep(self.q, self.f, (1, 1), {"x": [[1]]})
        self.e = build_rep(self.q, self.f, (1, 1), {"x": [[0]]})
        self.s1_squared = build_rep(self.q, self.f, (2, 0))


class TestHallNumbers(A2Case):

    def test_projective(self):
        self.assertEqual(hall_number(self.s1, self.s2, self.p), 1)
        self.assertEqual(hall_number(self.s2, self.s1, self.p), 0)

    def test_semisimple(self):
        self.assertEqual(hall_number(self.s1, self.s2, self.e), 1)
        self.assertEqual(hall_number(self.s2, self.s1, self.e), 1)
        self.assertEqual(hall_number(self.s1, self.s1, self.s1_squared), 3)

    def test_wrong_dimension(self):
        self.assertEqual(hall_number(self.s1, self.s1, self.p), 0)

    def test_middle_terms(self):
        dims = sorted(m.dims for m in middle_terms(self.s1, self.s2))
        self.assertEqual(dims, [(1, 1), (1, 1)])
        self.assertEqual(len(middle_terms(self.s2, self.s1)), 1)

    def test_cap(self):
        with self.assertRaises(CombinatorialExplosion):
            hall_number(self.s1, self.s1, self.s1_squared, cap=1)

    def test_rationals_are_rejected(self):
        s1 = build_rep(self.q, Field(), (1, 0))
        with self.assertRaises(UsageError):
            hall_number(s1, s1, build_rep(self.q, Field(), (2, 0)))


class TestHallProducts(A2Case):

    def test_product_with_extension(self):
        x = hall_product(HallElement.generator(self.s1), HallElement.generator(self.s2))
        v = twist_scalar(2, 1)
        self.assertEqual(len(x), 2)
        self.assertEqual(x.coefficient(self.p), v)
        self.assertEqual(x.coefficient(self.e), v)

    def test_product_over_f3(self):
        f = Field(3)
        s1 = build_rep(self.q, f, (1, 0))
        s2 = build_rep(self.q, f, (0, 1))
        p = build_rep(self.q, f, (1, 1), {"x": [[1]]})
        x = hall_product(HallElement.generator(s1), HallElement.generator(s2))
        self.assertEqual(x.coefficient(p), QuadraticScalar(Fraction(0), Fraction(1, 3), 3))

    def test_split_product(self):
        x = hall_product(HallElement.generator(self.s2), HallElement.generator(self.s1))
        self.assertEqual(len(x), 1)
        self.assertEqual(x.coefficient(self.e), 1)
        self.assertTrue(x.coefficient(self.p).is_zero())

    def test_unit(self):
        unit = HallElement.unit(self.q, self.f)
        x = hall_product(unit, HallElement.generator(self.p))
        self.assertEqual(x.coefficient(self.p), 1)
        self.assertEqual(len(x), 1)

    def test_terms_merge_by_isomorphism_class(self):
        scaled = build_rep(self.q, Field(3), (1, 1), {"x": [[2]]})
        p3 = build_rep(self.q, Field(3), (1, 1), {"x": [[1]]})
        x = HallElement(self.q, Field(3), [(p3, 1), (scaled, 2)])
        self.assertEqual(len(x), 1)
        self.assertEqual(x.coefficient(p3), 3)
        self.assertTrue((x - x).is_zero())

    def test_json_round_trip(self):
        x = hall_product(HallElement.generator(self.s1), HallElement.generator(self.s2))
        back = HallElement.from_json(x.to_json())
        self.assertEqual(back.coefficient(self.p), x.coefficient(self.p))
        self.assertEqual(len(back), 2)

    def test_rationals_are_rejected(self):
        with self.assertRaises(UsageError):
            HallElement.unit(self.q, Field())


class TestSerreRelations(unittest.TestCase):

    def test_a2(self):
        self.assertTrue(serre_check(a2(), "1", "2", 2))
        self.assertTrue(serre_check(a2(), "1", "2", 3))
        self.assertTrue(serre_check(a2(), "1", "2", 5))
        self.assertTrue(serre_check(a2(), "2", "1", 2))

    def test_same_vertex(self):
        with self.assertRaises(UsageError):
            serre_check(a2(), "1", "1", 2)

    def test_kronecker(self):
        q = load_quiver("kronecker")
        for order in (2, 3):
            with self.subTest(q=order):
                self.assertTrue(serre_check(q, "1", "2", order))
                self.assertTrue(serre_check(q, "2", "1", order))

    def test_d4_tilde_adjacent_pair(self):
        q = load_quiver("d4tilde")
        self.assertTrue(serre_check(q, "1", "0", 2))
        self.assertTrue(serre_check(q, "0", "1", 2))


class TestHallPolynomials(unittest.TestCase):

    def test_semisimple_square(self):
        s1 = rep_builder(Path(data_path("kronecker_s1.json")).read_text())
        total = rep_builder(Path(data_path("kronecker_s1_squared.json")).read_text())
        poly = hall_polynomial(lambda f: (s1(f), s1(f), total(f)))
        self.assertEqual(str(poly.as_expr()), "q + 1")

    def test_constant_polynomial(self):
        q = a2()

        def builder(f):
            return (build_rep(q, f, (1, 0)), build_rep(q, f, (0, 1)), build_rep(q, f, (1, 1), {"x": [[1]]}))

        self.assertEqual(str(hall_polynomial(builder).as_expr()), "1")


class TestHallAlgebraTool(A2Case):

    def setUp(self):
        super().setUp()
        self.mock_mcp = MockMCP()
        register_tools(self.mock_mcp)

    async def async_test_helper(self, *args, **kwargs):
        return await self.mock_mcp.tools['hall_algebra'](*args, **kwargs)

    def test_gaussian(self):
        result = asyncio.run(self.async_test_helper("gaussian", n=2, m=1))
        self.assertEqual(result, "✅ [2 choose 1] = v + v^-1")

    def test_twist(self):
        result = asyncio.run(self.async_test_helper("twist_exponent", quiver=quiver_text("kronecker"), a="1,0", b="0,1"))
        self.assertEqual(result, "✅ m(a, b) = 2")

    def test_hall_number(self):
        result = asyncio.run(self.async_test_helper(
            "hall_number", top=rep_text(self.s1), sub=rep_text(self.s1), total=rep_text(self.s1_squared)))
        self.assertEqual(result, "✅ Hall number = 3")

    def test_hall_product(self):
        result = asyncio.run(self.async_test_helper("hall_product", top=rep_text(self.s2), sub=rep_text(self.s1)))
        self.assertTrue(result.startswith("✅ (1)*u[1, 1]"))

    def test_serre(self):
        result = asyncio.run(self.async_test_helper("serre_check", quiver=quiver_text("a2"), i="1", j="2", q=2))
        self.assertEqual(result, "✅ Serre relation (1, 2) at q=2: PASS")

    def test_hall_polynomial(self):
        s1 = Path(data_path("kronecker_s1.json")).read_text()
        total = Path(data_path("kronecker_s1_squared.json")).read_text()
        result = asyncio.run(self.async_test_helper("hall_polynomial", top=s1, sub=s1, total=total))
        self.assertEqual(result, "✅ Hall polynomial = q + 1")

    def test_cap_reported(self):
        result = asyncio.run(self.async_test_helper(
            "hall_number", top=rep_text(self.s1), sub=rep_text(self.s1), total=rep_text(self.s1_squared), cap=1))
        self.assertIn("❌ Error in hall_number [explosion]", result)

    def test_missing_sub(self):
        result = asyncio.run(self.async_test_helper("hall_product", top=rep_text(self.s1)))
        self.assertIn("requires parameter: sub", result)

    def test_invalid_operation(self):
        result = asyncio.run(self.async_test_helper("coproduct"))
        self.assertIn("❌ Invalid operation 'coproduct'", result)


if __name__ == '__main__':
    unittest.main()

import math
import random

import pytest

from primegaps.rational import Q
from primegaps.symmpoly import (
    Signature,
    SymPoly,
    apply_L,
    beta_integral,
    inner_product,
)


def simplex_monomial_oracle(a, exponents):
    """Independent iterated 1-D integration of (1-sum t)^a * prod t^e.

    Works budget-first: int_0^u t^e (u-t)^c dt = u^(e+c+1) * B where B is
    the alternating binomial sum  sum_j C(c,j) (-1)^j / (e+j+1); folding the
    variables in one at a time keeps everything a monomial in the remaining
    budget u.  This never uses the factorial formula under test.
    """
    power = a
    coeff = Q(1)
    for e in exponents:
        B = Q(0)
        for j in range(power + 1):
            B += Q(math.comb(power, j) * (-1) ** j, e + j + 1)
        coeff *= B
        power = e + power + 1
    return coeff  # evaluated at total budget u = 1


class TestSignature:
    def test_valid(self):
        s = Signature((3, 2, 2))
        assert s.degree == 7 and s.length == 3
        assert not s.all_even and not s.has_one

    def test_from_exponents(self):
        assert Signature.from_exponents((0, 2, 0, 1)) == (2, 1)

    def test_rejects_bad(self):
        with pytest.raises(ValueError):
            Signature((1, 2))
        with pytest.raises(ValueError):
            Signature((2, 0))


class TestBetaIntegral:
    def test_unit_interval(self):
        assert beta_integral(1, 0, [0]) == 1

    @pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
    def test_volume(self, k):
        assert beta_integral(k, 0, [0] * k) == Q(1, math.factorial(k))

    def test_linear_case(self):
        assert beta_integral(1, 1, [1]) == Q(1, 6)

    def test_against_iterated_oracle_exhaustive(self):
        # every k <= 4, every a <= 3, every exponent vector with entries <= 3
        import itertools

        for k in range(1, 5):
            for a in range(4):
                for exps in itertools.product(range(4), repeat=k):
                    assert beta_integral(k, a, exps) == simplex_monomial_oracle(a, exps)

    def test_against_sympy_spot_checks(self):
        sympy = pytest.importorskip("sympy")
        t1, t2 = sympy.symbols("t1 t2", nonnegative=True)
        val = sympy.integrate(
            sympy.integrate((1 - t1 - t2) ** 2 * t1**3 * t2, (t2, 0, 1 - t1)),
            (t1, 0, 1),
        )
        assert beta_integral(2, 2, [3, 1]) == Q(int(sympy.fraction(val)[0]), int(sympy.fraction(val)[1]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            beta_integral(2, -1, [0, 0])


def rand_poly(k, deg, rng):
    sigs = [(), (1,), (2,), (1, 1), (3,), (2, 1), (2, 2), (4,)]
    terms = {}
    for s in sigs:
        if sum(s) <= deg and len(s) <= k:
            terms[s] = rng.randint(-4, 4)
    return SymPoly(k, terms)


class TestMultiply:
    def test_p1_squared(self):
        for k in (2, 3, 6):
            p1 = SymPoly.p1(k)
            assert p1 * p1 == SymPoly(k, {(2,): 1, (1, 1): 2})

    def test_p1_times_p2(self):
        k = 3
        out = SymPoly.p1(k) * SymPoly(k, {(2,): 1})
        assert out == SymPoly(k, {(3,): 1, (2, 1): 1})

    def test_k2_p1_times_p11(self):
        out = SymPoly.p1(2) * SymPoly(2, {(1, 1): 1})
        assert out == SymPoly(2, {(2, 1): 1})

    def test_commutative_associative(self):
        rng = random.Random(7)
        for k in (2, 3, 4):
            f, g, h = (rand_poly(k, 4, rng) for _ in range(3))
            assert f * g == g * f
            assert (f * g) * h == f * (g * h)

    def test_length_overflow_truncates(self):
        # in 2 variables P_(1,1) * P_(1,1) = P_(2,2): no length-3 terms
        out = SymPoly(2, {(1, 1): 1}) * SymPoly(2, {(1, 1): 1})
        assert out == SymPoly(2, {(2, 2): 1})


class TestIntegration:
    def test_constant(self):
        for k in (1, 2, 5):
            assert SymPoly.constant(k, 1).integrate_simplex() == Q(1, math.factorial(k))

    def test_scaled_volume(self):
        assert SymPoly.constant(3, 1).integrate_simplex(Q(3, 2)) == Q(9, 16)

    def test_p1_k2(self):
        # oracle: int over the 2-simplex of t1+t2 is 2 * (1!0!)/(1+2)! = 1/3
        assert SymPoly.p1(2).integrate_simplex() == Q(1, 3)

    def test_homogeneous_scaling(self):
        rng = random.Random(3)
        f = rand_poly(3, 3, rng)
        # each signature of degree d scales by s^(d+k); compare termwise sum
        s = Q(2, 3)
        total = sum(
            (c * s ** (sig.degree + 3) * SymPoly(3, {sig: 1}).integrate_simplex()
             for sig, c in f.terms.items()),
            Q(0),
        )
        assert f.integrate_simplex(s) == total


class TestApplyL:
    @pytest.mark.parametrize("k", [1, 2, 3, 5, 9])
    def test_image_of_one(self, k):
        assert apply_L(SymPoly.constant(k, 1)) == SymPoly(k, {(): k, (1,): -(k - 1)})

    @pytest.mark.parametrize("k", [2, 3, 4, 7])
    def test_image_of_p1(self, k):
        expect = SymPoly(k, {(): Q(k, 2), (2,): Q(-(k - 1), 2), (1, 1): -(k - 2)})
        assert apply_L(SymPoly.p1(k)) == expect

    def test_linear(self):
        rng = random.Random(11)
        for k in (2, 3):
            f, g = rand_poly(k, 3, rng), rand_poly(k, 3, rng)
            assert apply_L(f * 2 + g * 3) == apply_L(f) * 2 + apply_L(g) * 3

    def test_self_adjoint(self):
        rng = random.Random(13)
        for k in (2, 3, 4):
            f, g = rand_poly(k, 3, rng), rand_poly(k, 3, rng)
            assert inner_product(apply_L(f), g) == inner_product(f, apply_L(g))

    @pytest.mark.parametrize("k", range(2, 11))
    def test_moment_closed_forms(self, k):
        f = SymPoly.constant(k, 1)
        moments = [f.integrate_simplex()]
        for _ in range(3):
            f = apply_L(f)
            moments.append(f.integrate_simplex())
        fac = math.factorial
        assert moments[0] == Q(1, fac(k))
        assert moments[1] == Q(2 * k, fac(k + 1))
        assert moments[2] == Q(k * (5 * k + 1), fac(k + 2))
        assert moments[3] == Q(2 * k * k * (7 * k + 5), fac(k + 3))


class TestDegreeCap:
    def test_constructor_rejects_overflow(self):
        with pytest.raises(ValueError, match="degree cap"):
            SymPoly(3, {(2, 2): 1}, degree_cap=3)

    def test_multiply_respects_cap(self):
        f = SymPoly(3, {(2,): 1}, degree_cap=3)
        with pytest.raises(ValueError, match="degree cap"):
            f * f

    def test_apply_L_respects_cap(self):
        f = SymPoly.constant(3, 1, degree_cap=2)
        g = apply_L(f)           # degree 1: fine
        assert g.degree_cap == 2
        h = apply_L(g)           # degree 2: still fine
        with pytest.raises(ValueError, match="degree cap"):
            apply_L(h)

    def test_cap_propagates_tightest(self):
        f = SymPoly(3, {(2,): 1}, degree_cap=8)
        g = SymPoly(3, {(2,): 1}, degree_cap=5)
        assert (f + g).degree_cap == 5
        assert (f * g).degree_cap == 5


def test_krylov_order_guard():
    from primegaps.varprob import krylov_moments

    with pytest.raises(ValueError, match="degree cap exceeded"):
        krylov_moments(3, 101)


def test_dumps_format():
    f = SymPoly(3, {(): Q(1, 2), (2, 1): -3})
    assert f.dumps() == "1/2 * P[] + -3 * P[2,1]"
    assert SymPoly(2).dumps() == "0"

"""Closed-form and quadrature-based bound evaluators.

Covers the universal upper bound (k/(k-1)) log k, the exact two-variable
value via the Lambert W point, the enlarged-variant closed forms and upper
bounds, the Bessel-zero lower bound, the explicit large-k lower-bound
machinery for the truncated variational quantity, and the exact rational
four-variable cross-check used by the enlarged-variant chain.

High-precision arithmetic uses mpmath at >= 40 significant digits; every
emitted lower bound is rounded down by the accumulated quadrature error
estimate so it remains a true lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .rational import Q

__all__ = [
    "DPS",
    "mk_upper",
    "m2_exact",
    "m2_eps",
    "mkeps_upper",
    "bessel_lower",
    "AsymptoticParams",
    "AsymptoticReport",
    "asymptotic_lower",
    "m4eps_check",
]

DPS = 40


def mk_upper(k: int):
    """Universal upper bound (k/(k-1)) log k for the plain variant."""
    if k < 2:
        raise ValueError("k must be >= 2")
    with mp.workdps(DPS):
        return mp.mpf(k) / (k - 1) * mp.log(k)


def m2_exact():
    """Exact value 1/(1 - W(1/e)) of the two-variable problem.

    The Lambert W point w = W(1/e) solves w e^w = 1/e and is found by
    Newton iteration from a safe positive seed.
    """
    with mp.workdps(DPS):
        target = mp.exp(-1)
        w = mp.mpf("0.28")
        for _ in range(80):
            ew = mp.exp(w)
            step = (w * ew - target) / (ew * (1 + w))
            w -= step
            if abs(step) < mp.mpf(10) ** (-DPS + 2):
                break
        return 1 / (1 - w)


def _m2_eps_equation(lam, eps):
    """Eigenvalue equation for the enlarged two-variable problem, eps < 1/3.

    Derived from the piecewise eigenfunction ansatz: the inner branch is
    C1/(lam-1-eps+x) on [0, 2 eps], the outer branch is the displayed
    log-ratio form, C1 is fixed by self-consistency of the total mass, and
    the slot-integration identity on the outer branch gives one more
    relation.  Eliminating C1 without dividing keeps the equation regular
    through eps = 1/3, where it degenerates to log-ratio = 1, and at
    eps -> 0 it reduces to the unenlarged equation.
    """
    l1p = mp.log(lam - 1 + eps)
    l1m = mp.log(lam - 1 - eps)
    l2 = mp.log(lam - 2 * eps)
    bracket = ((lam - 2 * eps) * l2 + (lam - 1 + eps) * l1p) / (2 * lam - 1 - eps)
    return (l2 - l1p) * (l1p - l1m) + (1 - l1p + l1m) * (bracket - l1p - 1)


def m2_eps(eps):
    """Exact optimum of the enlarged two-variable problem.

    Closed form (e(1+eps) - 2 eps)/(e-1) for eps >= 1/3; for smaller eps the
    largest root of the transcendental eigenvalue equation, bracketed inside
    (m2_exact(), 2).
    """
    with mp.workdps(DPS):
        e = mp.mpf(eps.numerator) / mp.mpf(eps.denominator) if hasattr(eps, "numerator") else mp.mpf(eps)
        if not 0 < e < 1:
            raise ValueError("eps must lie in (0, 1)")
        if e >= mp.mpf(1) / 3:
            return (mp.e * (1 + e) - 2 * e) / (mp.e - 1)
        lo = max(m2_exact() * (1 - mp.mpf(10) ** -30), 1 + e + mp.mpf(10) ** -30)
        hi = mp.mpf(2)
        f = lambda lam: _m2_eps_equation(lam, e)
        # largest root: walk down from 2 to the first sign change
        steps = 400
        prev_x, prev_f = hi, f(hi)
        root_bracket = None
        for i in range(1, steps + 1):
            x = hi - (hi - lo) * i / steps
            fx = f(x)
            if fx == 0:
                return x
            if mp.sign(fx) != mp.sign(prev_f):
                root_bracket = (x, prev_x)
                break
            prev_x, prev_f = x, fx
        if root_bracket is None:
            raise ArithmeticError("no eigenvalue root found in bracket")
        a, b = root_bracket
        for _ in range(200):  # bisection, then Newton polish
            mid = (a + b) / 2
            fm = f(mid)
            if fm == 0:
                break
            if mp.sign(fm) == mp.sign(f(a)):
                a = mid
            else:
                b = mid
            if b - a < mp.mpf(10) ** (-DPS + 5):
                break
        lam = (a + b) / 2
        h = mp.mpf(10) ** (-12)
        for _ in range(8):
            d = (f(lam + h) - f(lam - h)) / (2 * h)
            if d == 0:
                break
            lam -= f(lam) / d
        return lam


def mkeps_upper(k: int, eps, a=None):
    """Parametrized upper bound for the enlarged variant.

    Valid for 1/(1+eps) < a < 1/(1-eps); a = 1 gives (k/(k-1)) log(2k-1).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    with mp.workdps(DPS):
        e = mp.mpf(eps.numerator) / mp.mpf(eps.denominator) if hasattr(eps, "numerator") else mp.mpf(eps)
        if not 0 < e < 1:
            raise ValueError("eps must lie in (0, 1)")
        av = mp.mpf(1) if a is None else (
            mp.mpf(a.numerator) / mp.mpf(a.denominator) if hasattr(a, "numerator") else mp.mpf(a)
        )
        if not 1 / (1 + e) < av < 1 / (1 - e):
            raise ValueError("a must lie in (1/(1+eps), 1/(1-eps))")
        inner = k + (av * (1 + e) - 1) * (k - 1) / (1 - av * (1 - e))
        return mp.mpf(k) / (av * (k - 1)) * mp.log(inner)


def _bessel_first_zero(nu: int):
    """First positive zero of J_nu: large-order asymptotic seed + Newton."""
    with mp.workdps(DPS):
        if nu == 0:
            x = mp.mpf("2.404825557695773")
        elif nu == 1:
            x = mp.mpf("3.831705970207512")
        else:
            v = mp.mpf(nu)
            c = v ** mp.mpf("0.3333333333333333")
            x = v + mp.mpf("1.8557571") * c + mp.mpf("1.033150") / c \
                - mp.mpf("0.00397") / v - mp.mpf("0.0908") / (v * c * c) \
                + mp.mpf("0.043") / (v * v * c)
        for _ in range(60):
            jv = mp.besselj(nu, x)
            if nu == 0:
                dj = -mp.besselj(1, x)
            else:
                dj = (mp.besselj(nu - 1, x) - mp.besselj(nu + 1, x)) / 2
            step = jv / dj
            x -= step
            if abs(step) < mp.mpf(10) ** (-DPS + 4):
                break
        return x


def bessel_lower(k: int):
    """Lower bound 4k(k-1)/j^2 with j the first zero of the order-(k-2)
    Bessel function; stays below 4 for every k."""
    if k < 2:
        raise ValueError("k must be >= 2")
    with mp.workdps(DPS):
        j = _bessel_first_zero(k - 2)
        return 4 * mp.mpf(k) * (k - 1) / (j * j)


# ---------------------------------------------------------------------------
# explicit lower bound for the truncated variant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticParams:
    """Parameters (k, c, T, tau) for the explicit lower-bound evaluator."""

    k: int
    c: object
    T: object
    tau: object

    @classmethod
    def from_scaled(cls, k: int, theta, beta, tau=None):
        """c = theta/log k and T = beta/log k; tau defaults to 1 - k*mu.

        The derived tau is shaded down by one part in 1e30 so the boundary
        condition k*mu <= 1 - tau survives binary rounding.
        """
        with mp.workdps(DPS):
            logk = mp.log(k)
            c = mp.mpf(str(theta)) / logk
            T = mp.mpf(str(beta)) / logk
            if tau is None:
                m2, mu, sigma2 = _weight_stats(k, c, T)
                tau = (1 - k * mu) * (1 - mp.mpf(10) ** -30)
            else:
                tau = mp.mpf(str(tau))
            return cls(k, c, T, tau)

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        with mp.workdps(DPS):
            for name in ("c", "T", "tau"):
                v = getattr(self, name)
                if not isinstance(v, mp.mpf):
                    v = mp.mpf(str(v))
                if v <= 0:
                    raise ValueError(f"{name} must be positive")
                object.__setattr__(self, name, v)


@dataclass(frozen=True)
class AsymptoticReport:
    """All intermediate quantities with quadrature error radii."""

    params: AsymptoticParams
    m2: object
    mu: object
    sigma2: object
    Z: object
    Z3: object
    W: object
    X: object
    V: object
    U: object
    error_budget: object
    lower_bound: object


def _weight_stats(k, c, T):
    """Closed forms for the squared-weight mass, mean and variance of the
    distribution g(t)^2 dt / m2 with g(t) = 1/(c + (k-1)t) on [0, T]."""
    km1 = mp.mpf(k - 1)
    top = c + km1 * T
    m2 = (1 / c - 1 / top) / km1
    first = (mp.log(top / c) + c / top - 1) / (km1 * km1)
    second = (km1 * T - 2 * c * mp.log(top / c) - c * c / top + c) / (km1**3)
    mu = first / m2
    sigma2 = second / m2 - mu * mu
    return m2, mu, sigma2


def asymptotic_lower(p: AsymptoticParams) -> AsymptoticReport:
    """Explicit lower bound for the truncated variational quantity.

    Checks the three admissibility conditions, evaluates the six auxiliary
    quantities (four by adaptive quadrature, two in closed form), and emits
    (k/(k-1)) log k minus the certified defect, rounded down by the total
    quadrature error estimate.
    """
    with mp.workdps(DPS):
        k, c, T, tau = p.k, p.c, p.T, p.tau
        km1 = mp.mpf(k - 1)
        g = lambda t: 1 / (c + km1 * t)

        m2, mu, sigma2 = _weight_stats(k, c, T)
        # cross-check the closed forms against direct quadrature
        q_m2, e0 = mp.quad(lambda t: g(t) ** 2, [0, T], error=True)
        q_first, e1 = mp.quad(lambda t: t * g(t) ** 2, [0, T], error=True)
        q_second, e2 = mp.quad(lambda t: t * t * g(t) ** 2, [0, T], error=True)
        for exact, quad in ((m2, q_m2), (mu * m2, q_first), ((sigma2 + mu * mu) * m2, q_second)):
            if abs(exact - quad) > mp.mpf(10) ** -12 * abs(exact):
                raise ArithmeticError("closed-form weight statistics disagree with quadrature")

        kmu = k * mu
        ksig = k * sigma2
        if not kmu <= 1 - tau:
            raise ValueError(f"condition violated: k*mu <= 1 - tau (k*mu = {mp.nstr(kmu, 12)})")
        if not kmu < 1 - T:
            raise ValueError(f"condition violated: k*mu < 1 - T (k*mu = {mp.nstr(kmu, 12)})")
        if not ksig < (1 + tau - kmu) ** 2:
            raise ValueError(
                f"condition violated: k*sigma^2 < (1 + tau - k*mu)^2 (k*sigma^2 = {mp.nstr(ksig, 12)})"
            )

        def z_integrand(r):
            lg = mp.log((r - kmu) / T)
            return r * (lg + ksig / (4 * (r - kmu) ** 2 * lg)) + r * r / (4 * k * T)

        Z, ez = mp.quad(z_integrand, [1, 1 + tau], error=True)
        Z = Z / tau
        Z3, ez3 = mp.quad(lambda t: k * t * mp.log(1 + t / T) * g(t) ** 2, [0, T], error=True)
        Z3 = Z3 / m2
        W, ew = mp.quad(lambda t: mp.log(1 + tau / (k * t)) * g(t) ** 2, [0, T], error=True)
        W = W / m2
        X = mp.log(k) / tau * c * c
        V, ev = mp.quad(lambda t: g(t) ** 2 / (2 * c + km1 * t), [0, T], error=True)
        V = V * c / m2
        # U has a polynomial integrand: closed form
        A = 1 - km1 * mu - c
        U = mp.log(k) / c * (A * A + A * tau + tau * tau / 3 + km1 * sigma2)

        denom = (1 + tau / 2) * (1 - ksig / (1 + tau - kmu) ** 2)
        defect = mp.mpf(k) / km1 * (Z + Z3 + W * X + V * U) / denom
        budget = 10 * (ez / tau + ez3 / m2 + ew / m2 * X + ev * c / m2 * U + e0 + e1 + e2)
        lower = mp.mpf(k) / km1 * mp.log(k) - defect - budget
        return AsymptoticReport(p, m2, mu, sigma2, Z, Z3, W, X, V, U, budget, lower)


# ---------------------------------------------------------------------------
# exact four-variable cross-check for the enlarged variant
# ---------------------------------------------------------------------------


def _poly_mul(p, q):
    out = [Q(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_eval_integral(p, upper):
    """int_0^upper of the polynomial with coefficient list p (exact)."""
    total = Q(0)
    power = Q(upper)
    for i, a in enumerate(p):
        total += a * power / (i + 1)
        power *= Q(upper)
    return total


def m4eps_check(eps, alpha):
    """Exact rational (I, J, ratio_ok) for the linear four-variable cutoff
    (1 - alpha * sum(t)) on the enlarged simplex.

    I has the displayed sextic closed form; J integrates the squared inner
    slot integral against the outer shrunk region, a one-dimensional
    polynomial integral evaluated exactly.  ratio_ok tests 4J/I > 2.00558
    as an exact rational comparison.
    """
    eps, alpha = Q(eps), Q(alpha)
    if not 0 < eps < Q(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    w = 1 + eps
    I = alpha * alpha * w**6 / 36 - alpha * w**5 / 15 + w**4 / 24
    # J integrand: (w - u)^2 (1 - alpha (w + u)/2)^2 u^2 / 2
    p1 = [w, Q(-1)]                       # w - u
    p2 = [1 - alpha * w / 2, -alpha / 2]  # 1 - alpha(w+u)/2
    integrand = _poly_mul(_poly_mul(p1, p1), _poly_mul(p2, p2))
    integrand = _poly_mul(integrand, [Q(0), Q(0), Q(1, 2)])  # * u^2/2
    J = _poly_eval_integral(integrand, 1 - eps)
    ratio_ok = 4 * J > Q(200558, 100000) * I
    return I, J, ratio_ok

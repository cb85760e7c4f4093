"""Quadratic-form matrices for the variational sieve problems and exact
lower-bound certificates.

The two quadratic forms are assembled in a basis of symmetric polynomials
b_i; M1 carries the L^2 inner products and M2 the slot-integrated products,
so that a vector a with

    a^T M2 a - C a^T M1 a > 0        (exact rational arithmetic)

certifies a lower bound C for the corresponding variational quantity
(plain simplex variant, or the enlarged/shrunk epsilon variant).  Floating
point only ever proposes candidates; every emitted bound is re-verified
exactly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath as mp
import numpy as np

from .rational import Q, rational_str
from .symmpoly import (
    Signature,
    SymPoly,
    affine_apply_L,
    affine_from_sympoly,
    affine_integral,
    affine_multiply,
    affine_slot_integral,
)

__all__ = [
    "Variant",
    "BasisElement",
    "GramPair",
    "BoundCertificate",
    "KrylovTable",
    "assemble_plain",
    "assemble_eps",
    "solve_generalized",
    "rationalize",
    "certify",
    "gram_lower_bound",
    "krylov_moments",
    "krylov_lower_bound",
    "write_certificate",
    "read_certificate",
    "verify_certificate_file",
]


@dataclass(frozen=True)
class Variant:
    """Which variational quantity a bound refers to."""

    kind: str  # "plain" or "eps"
    k: int
    eps: object = None  # exact rational for kind == "eps"

    def __post_init__(self):
        if self.kind not in ("plain", "eps"):
            raise ValueError("variant kind must be 'plain' or 'eps'")
        if self.kind == "eps":
            e = Q(self.eps)
            if not 0 < e < 1:
                raise ValueError("eps must lie in (0, 1)")
            object.__setattr__(self, "eps", e)
        elif self.eps is not None:
            raise ValueError("plain variant takes no eps")

    def __str__(self):
        if self.kind == "plain":
            return f"plain({self.k})"
        return f"eps({self.k}, {rational_str(self.eps)})"


@dataclass(frozen=True)
class BasisElement:
    """(offset - P_(1))^a * P_alpha with alpha free of parts equal to 1."""

    a: int
    alpha: Signature
    offset: object = Q(1)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Signature(self.alpha))
        object.__setattr__(self, "offset", Q(self.offset))
        if self.a < 0:
            raise ValueError("affine exponent must be non-negative")
        if self.alpha.has_one:
            raise ValueError("basis signatures may not contain a part equal to 1")

    @property
    def degree(self) -> int:
        return self.a + self.alpha.degree


class GramPair:
    """Pair of exact symmetric rational matrices (M1, M2) over a basis."""

    __slots__ = ("variant", "basis", "M1", "M2", "_ldl")

    def __init__(self, variant: Variant, basis, M1, M2):
        self.variant = variant
        self.basis = tuple(basis)
        self.M1 = tuple(tuple(Q(x) for x in row) for row in M1)
        self.M2 = tuple(tuple(Q(x) for x in row) for row in M2)
        n = len(self.basis)
        for M in (self.M1, self.M2):
            if len(M) != n or any(len(row) != n for row in M):
                raise ValueError("matrix sizes must match the basis")
            for i in range(n):
                for j in range(i):
                    if M[i][j] != M[j][i]:
                        raise ValueError("matrices must be exactly symmetric")
        self._ldl = None

    @property
    def n(self) -> int:
        return len(self.basis)

    def m1_ldl(self):
        """Exact unit-lower-triangular LDL^T factorization of M1.

        Raises ValueError when M1 is not positive definite; doubles as the
        exact positive-definiteness check.
        """
        if self._ldl is None:
            self._ldl = _ldl(self.M1, self.n)
        return self._ldl


def _ldl(A, n):
    L = [[Q(0)] * n for _ in range(n)]
    d = [Q(0)] * n
    for j in range(n):
        s = A[j][j]
        for t in range(j):
            s -= L[j][t] * L[j][t] * d[t]
        if s <= 0:
            raise ValueError("M1 not positive definite")
        d[j] = s
        L[j][j] = Q(1)
        for i in range(j + 1, n):
            s = A[i][j]
            for t in range(j):
                s -= L[i][t] * L[j][t] * d[t]
            L[i][j] = s / d[j]
    return L, d


def _forward_solve(L, B, n):
    """Solve L X = B for unit lower triangular L (B is a list of rows)."""
    X = [list(row) for row in B]
    for i in range(n):
        for t in range(i):
            lit = L[i][t]
            if lit != 0:
                Xt = X[t]
                Xi = X[i]
                for j in range(len(Xi)):
                    Xi[j] = Xi[j] - lit * Xt[j]
    return X


def _reduced_form(pair: GramPair):
    """R = L^-1 M2 L^-T and the LDL data of M1, all exact."""
    n = pair.n
    L, d = pair.m1_ldl()
    X = _forward_solve(L, pair.M2, n)
    XT = [[X[j][i] for j in range(n)] for i in range(n)]
    RT = _forward_solve(L, XT, n)
    R = [[RT[j][i] for j in range(n)] for i in range(n)]
    return L, d, R


def _inv_sqrt_rational(q) -> Q:
    """Rational approximation of 1/sqrt(q) to ~38 digits, exact arithmetic."""
    scale = 10**38
    num, den = int(q.numerator), int(q.denominator)
    return Q(isqrt(den * scale * scale // num), scale)


def _q_to_mpf(q):
    return mp.mpf(int(q.numerator)) / mp.mpf(int(q.denominator))


def _reduced_matrix_float(R, d, n) -> np.ndarray:
    invs = [_inv_sqrt_rational(x) for x in d]
    with mp.workdps(60):
        S = np.array(
            [[float(_q_to_mpf(R[i][j] * invs[i] * invs[j])) for j in range(n)] for i in range(n)],
            dtype=float,
        )
    return (S + S.T) / 2.0, invs


def solve_generalized(pair: GramPair, tol: float = 1e-10):
    """Largest generalized eigenpair of (M2, M1), floating point.

    M1 is reduced by its exact triangular factorization; the reduced
    symmetric problem is solved iteratively and the residual is checked
    against tol.  The output is advisory: certification is exact.
    """
    n = pair.n
    L, d, R = _reduced_form(pair)
    S, invs = _reduced_matrix_float(R, d, n)
    w, V = np.linalg.eigh(S)
    lam = float(w[-1])
    v = V[:, -1]
    residual = float(np.linalg.norm(S @ v - lam * v))
    if residual > tol * max(1.0, abs(lam)):
        raise ArithmeticError("iteration did not converge within budget")
    # back-transform a = L^-T (D^-1/2 v); exact L keeps this stable
    y = [Q(Fraction(float(v[i]))) * invs[i] for i in range(n)]
    a = _back_solve_transpose(L, y, n)
    with mp.workdps(60):
        a_float = np.array([float(_q_to_mpf(x)) for x in a], dtype=float)
    return lam, a_float


def _back_solve_transpose(L, y, n):
    """Solve L^T a = y for unit lower triangular L (exact)."""
    a = list(y)
    for i in range(n - 1, -1, -1):
        s = a[i]
        for j in range(i + 1, n):
            s -= L[j][i] * a[j]
        a[i] = s
    return a


def rationalize(values, denominator_bound: int = 10**6):
    """Per-coordinate best rational approximation with bounded denominator
    (continued-fraction convergents)."""
    if denominator_bound < 1:
        raise ValueError("denominator bound must be >= 1")
    out = []
    for x in np.atleast_1d(np.asarray(values, dtype=float)):
        if not math.isfinite(x):
            raise ValueError("cannot rationalize a non-finite value")
        out.append(Q(Fraction(float(x)).limit_denominator(denominator_bound)))
    return out


@dataclass(frozen=True)
class BoundCertificate:
    """Exactly verified statement a^T M2 a > C a^T M1 a (with a^T M1 a > 0)."""

    variant: Variant
    a: tuple
    C: object
    verified: bool

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(Q(x) for x in self.a))
        object.__setattr__(self, "C", Q(self.C))


def _quadratic_form(M, a, n):
    total = Q(0)
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        row = M[i]
        acc = Q(0)
        for j in range(n):
            aj = a[j]
            if aj != 0:
                acc += row[j] * aj
        total += ai * acc
    return total

def quadratic_margin(pair: GramPair, a, C):
    """Exact (a^T M2 a - C a^T M1 a, a^T M1 a)."""
    a = [Q(x) for x in a]
    n = pair.n
    if len(a) != n:
        raise ValueError("coefficient vector length must match the basis")
    t1 = _quadratic_form(pair.M1, a, n)
    t2 = _quadratic_form(pair.M2, a, n)
    return t2 - Q(C) * t1, t1


def certify(pair: GramPair, a, C) -> BoundCertificate:
    """Exact verification; never raises on a failed inequality."""
    margin, t1 = quadratic_margin(pair, a, C)
    return BoundCertificate(pair.variant, tuple(Q(x) for x in a), Q(C), margin > 0 and t1 > 0)


# ---------------------------------------------------------------------------
# basis assembly
# ---------------------------------------------------------------------------


def _basis_signatures(k: int, d: int, even_only: bool):
    """Signatures free of 1s (optionally all even) with degree <= d, length <= k."""
    out = []

    def rec(sig, maxpart, budget):
        out.append(sig)
        if len(sig) == k:
            return
        p = min(maxpart, budget)
        if even_only and p % 2:
            p -= 1
        while p >= 2:
            rec(sig + (p,), p, budget - p)
            p -= 2 if even_only else 1

    rec((), d, d)
    return sorted(set(out), key=lambda s: (sum(s), len(s), s))


def build_basis(k: int, d: int, offset=Q(1), even_only: bool = True):
    """All (offset-P_(1))^a P_alpha with a+deg(alpha) <= d, deterministic order."""
    elems = []
    for alpha in _basis_signatures(k, d, even_only):
        for a in range(d - sum(alpha) + 1):
            elems.append(BasisElement(a, Signature(alpha), offset))
    elems.sort(key=lambda b: (b.degree, b.a, tuple(b.alpha)))
    return elems


def _independent_prefix(M1, n):
    """Indices of a maximal independent subset, greedy in basis order.

    Gram pivots are exact rationals, so dependence is detected exactly: a
    candidate whose LDL pivot vanishes lies in the span of the kept ones.
    (For d > k the affine family is genuinely dependent.)
    """
    keep: list = []
    L_rows: list = []  # rows of L restricted to kept columns
    d: list = []
    for c in range(n):
        coeffs = []
        s_diag = M1[c][c]
        for t, kt in enumerate(keep):
            s = M1[c][kt]
            for u in range(t):
                s -= coeffs[u] * L_rows[t][u] * d[u]
            coeffs.append(s / d[t])
        for t in range(len(keep)):
            s_diag -= coeffs[t] * coeffs[t] * d[t]
        if s_diag > 0:
            keep.append(c)
            L_rows.append(coeffs)
            d.append(s_diag)
    return keep


def _assemble(variant: Variant, k: int, d: int, even_only: bool, offset, m1_scale, m2_scale):
    basis = build_basis(k, d, offset, even_only)
    terms = [{(b.a,) + tuple(b.alpha): Q(1)} for b in basis]
    n = len(basis)
    M1 = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m1 = affine_integral(
                affine_multiply(terms[i], terms[j], k), k, offset=offset, scale=m1_scale
            )
            M1[i][j] = M1[j][i] = m1
    keep = _independent_prefix(M1, n)
    basis = [basis[i] for i in keep]
    terms = [terms[i] for i in keep]
    M1 = [[M1[i][j] for j in keep] for i in keep]
    slot = [affine_slot_integral(t, k) for t in terms]
    m = len(keep)
    M2 = [[Q(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            m2 = k * affine_integral(
                affine_multiply(slot[i], slot[j], k - 1), k - 1, offset=offset, scale=m2_scale
            )
            M2[i][j] = M2[j][i] = m2
    return GramPair(variant, basis, M1, M2)


def assemble_plain(k: int, d: int, even_only: bool = True) -> GramPair:
    """Gram pair over the unit simplex in the affine polynomial basis.

    Candidate elements that are linearly dependent on earlier ones (possible
    once d exceeds k) are dropped, so M1 is always exactly positive definite.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if d < 0:
        raise ValueError("degree threshold must be >= 0")
    return _assemble(Variant("plain", k), k, d, even_only, Q(1), Q(1), Q(1))


def assemble_eps(k: int, d: int, eps, even_only: bool = True) -> GramPair:
    """Gram pair for the enlarged-support variant.

    M1 integrates over the enlarged simplex (scale 1+eps); M2 slot-integrates
    over the full enlarged fiber but restricts the outer region to scale
    1-eps, matching the shrunk outer integration of the variant.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    eps = Q(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    offset = 1 + eps
    return _assemble(Variant("eps", k, eps), k, d, even_only, offset, offset, 1 - eps)


# ---------------------------------------------------------------------------
# certified lower bounds
# ---------------------------------------------------------------------------


def _certified_from_reduced(pair: GramPair) -> BoundCertificate:
    """Propose a via the exactly-reduced problem, then certify exactly.

    The eigenvector is computed in the M1-orthonormalized coordinates where
    float64 is reliable, mapped back through the exact factorization, and
    the final Rayleigh quotient is evaluated in exact arithmetic; C is that
    quotient rounded down.
    """
    n = pair.n
    L, d, R = _reduced_form(pair)
    S, invs = _reduced_matrix_float(R, d, n)
    w, V = np.linalg.eigh(S)
    v = V[:, -1]
    y = [Q(Fraction(float(x))) * inv for x, inv in zip(v, invs)]
    t1 = sum(y[i] * y[i] * d[i] for i in range(n))
    t2 = _quadratic_form(R, y, n)
    if t1 <= 0:
        raise ArithmeticError("degenerate eigenvector proposal")
    rho = t2 / t1
    # round down to the 1e-12 grid so certificate files stay readable
    C = Q(int(rho * 10**12), 10**12)
    if C >= rho:
        C -= Q(1, 10**12)
    a = _back_solve_transpose(L, y, n)
    cert = certify(pair, a, C)
    if not cert.verified:  # pragma: no cover - the rounding above is sufficient
        raise ArithmeticError("exact certification failed unexpectedly")
    return cert


def gram_lower_bound(pair: GramPair, tol: float = 1e-10) -> BoundCertificate:
    """Certified lower bound from a Gram pair.

    First tries the documented rationalize-and-retry ladder on the float
    eigenvector (denominator bounds 1e6 then 1e9, then C reduced in 1e-6
    steps); falls back to the exactly-reduced proposal.
    """
    lam, a_float = solve_generalized(pair, tol)
    scale = float(np.max(np.abs(a_float))) or 1.0
    ladder = [(10**6, 0.0), (10**9, 0.0), (10**9, 1e-6), (10**9, 2e-6), (10**9, 4e-6)]
    for bound, drop in ladder:
        a = rationalize(a_float / scale, bound)
        C = Q(Fraction(lam * (1 - 1e-9) - drop).limit_denominator(10**12))
        cert = certify(pair, a, C)
        if cert.verified:
            return cert
    return _certified_from_reduced(pair)


# ---------------------------------------------------------------------------
# Krylov / Hankel method
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KrylovTable:
    """Exact moments of the slot-integration operator against 1."""

    k: int
    moments: tuple

    def __post_init__(self):
        moms = tuple(Q(m) for m in self.moments)
        if any(m <= 0 for m in moms):
            raise ValueError("moments must be positive")
        object.__setattr__(self, "moments", moms)


class _MomentStream:
    """Grow-on-demand moment sequence for one ambient dimension."""

    def __init__(self, k: int):
        self.k = k
        self._state = affine_from_sympoly(SymPoly.constant(k, 1))
        self._moments = [affine_integral(self._state, k)]
        self._lock = threading.Lock()

    def upto(self, count: int):
        with self._lock:
            while len(self._moments) < count:
                self._state = affine_apply_L(self._state, self.k)
                self._moments.append(affine_integral(self._state, self.k))
            return list(self._moments[:count])


_moment_streams: dict = {}
_moment_streams_lock = threading.Lock()


def _stream(k: int) -> _MomentStream:
    with _moment_streams_lock:
        st = _moment_streams.get(k)
        if st is None:
            st = _moment_streams[k] = _MomentStream(k)
        return st


#: iterated images of 1 reach this total degree at most (memory guard)
KRYLOV_DEGREE_LIMIT = 199


def krylov_moments(k: int, n: int) -> KrylovTable:
    """The 2n exact moments needed for the order-n Hankel pair."""
    if k < 2 or n < 1:
        raise ValueError("need k >= 2 and n >= 1")
    if 2 * n - 1 > KRYLOV_DEGREE_LIMIT:
        raise ValueError(
            f"degree cap exceeded: order {n} needs degree {2 * n - 1} "
            f"> {KRYLOV_DEGREE_LIMIT}"
        )
    return KrylovTable(k, tuple(_stream(k).upto(2 * n)))


def hankel_pair(table: KrylovTable, n: int) -> GramPair:
    """Hankel Gram pair from a moment table (basis = iterated images of 1)."""
    mom = table.moments
    if len(mom) < 2 * n:
        raise ValueError("not enough moments for this order")
    M1 = [[mom[i + j] for j in range(n)] for i in range(n)]
    M2 = [[mom[i + j + 1] for j in range(n)] for i in range(n)]
    basis = tuple(BasisElement(0, Signature()) for _ in range(n))  # positional only
    return GramPair(Variant("plain", table.k), basis, M1, M2)


def krylov_lower_bound(k: int, n: int, tol: float = 1e-10) -> BoundCertificate:
    """Certified lower bound for the plain variational quantity, order n."""
    pair = hankel_pair(krylov_moments(k, n), n)
    return _certified_from_reduced(pair)


# ---------------------------------------------------------------------------
# certificate files
# ---------------------------------------------------------------------------


def write_certificate(path, cert: BoundCertificate, d: int, basis_kind: str = "even") -> None:
    """Text format: variant, k, d, optional eps, basis kind, C, then a[i]."""
    with open(path, "w") as fh:
        fh.write(f"variant {cert.variant.kind}\n")
        fh.write(f"k {cert.variant.k}\n")
        fh.write(f"d {d}\n")
        if cert.variant.kind == "eps":
            fh.write(f"eps {rational_str(cert.variant.eps)}\n")
        fh.write(f"basis {basis_kind}\n")
        fh.write(f"C = {rational_str(cert.C)}\n")
        for i, ai in enumerate(cert.a):
            fh.write(f"a[{i}] = {rational_str(ai)}\n")


def read_certificate(path):
    """Parse a certificate file; returns (variant, d, basis_kind, C, a)."""
    from .rational import parse_rational

    fields = {}
    coeffs = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("a[") and "=" in line:
                idx = int(line[2 : line.index("]")])
                coeffs[idx] = parse_rational(line.split("=", 1)[1])
            elif line.startswith("C") and "=" in line:
                fields["C"] = parse_rational(line.split("=", 1)[1])
            else:
                key, _, value = line.partition(" ")
                fields[key] = value.strip()
    if "C" not in fields or not coeffs:
        raise ValueError("certificate file is missing C or coefficients")
    k = int(fields["k"])
    d = int(fields["d"])
    kind = fields["variant"]
    eps = parse_rational(fields["eps"]) if "eps" in fields else None
    variant = Variant(kind, k, eps)
    basis_kind = fields.get("basis", "even")
    a = tuple(coeffs[i] for i in range(len(coeffs)))
    return variant, d, basis_kind, fields["C"], a


def verify_certificate_file(path):
    """Rebuild the Gram pair named by the file and re-check exactly.

    Returns (certificate, exact margin a^T M2 a - C a^T M1 a).
    """
    variant, d, basis_kind, C, a = read_certificate(path)
    if basis_kind == "krylov":
        pair = hankel_pair(krylov_moments(variant.k, len(a)), len(a))
        if variant.kind != "plain":
            raise ValueError("krylov certificates are plain-variant only")
    elif variant.kind == "plain":
        pair = assemble_plain(variant.k, d, even_only=(basis_kind != "full"))
    else:
        pair = assemble_eps(variant.k, d, variant.eps, even_only=(basis_kind != "full"))
    cert = certify(pair, a, C)
    margin, _ = quadratic_margin(pair, a, C)
    return cert, margin

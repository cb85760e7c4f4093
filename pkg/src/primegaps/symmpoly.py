"""Exact symmetric-polynomial algebra over Q in k variables.

Polynomials are stored in the monomial symmetric basis P_alpha indexed by
signatures (non-increasing tuples of positive integers).  Products use
cached integer structure constants; integrals over scaled simplices reduce
termwise to the Beta-function identity

    int_{R_k} (1-t_1-...-t_k)^a t_1^{a_1}...t_k^{a_k} dt
        = a! a_1! ... a_k! / (a_1+...+a_k+k+a)!

so every operation here is exact rational arithmetic (no floats).

The integral operator L (sum over coordinate slots of integration over the
free fiber of the unit simplex) maps symmetric polynomials to symmetric
polynomials.  Internally it is applied in an "affine" representation whose
terms are (1-P_(1))^a * P_alpha, which avoids re-expanding powers of P_(1)
at every step; `apply_L` converts back to the plain P_alpha basis.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .rational import Q

__all__ = [
    "Signature",
    "SymPoly",
    "beta_integral",
    "apply_L",
    "inner_product",
    "integrate_simplex",
]


class Signature(tuple):
    """Non-increasing tuple of positive integers indexing P_alpha."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError("signature parts must be positive")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError("signature parts must be non-increasing")
        return super().__new__(cls, parts)

    @classmethod
    def from_exponents(cls, exponents) -> "Signature":
        """Canonicalize an exponent vector: sort descending, drop zeros."""
        return cls(tuple(sorted((e for e in exponents if e), reverse=True)))

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    @property
    def all_even(self) -> bool:
        return all(p % 2 == 0 for p in self)

    @property
    def has_one(self) -> bool:
        return bool(self) and self[-1] == 1


def _perm_count(alpha: tuple, k: int) -> int:
    """Distinct exponent vectors of length k with signature alpha."""
    if len(alpha) > k:
        return 0
    denom = math.factorial(k - len(alpha))
    run = 1
    for i, p in enumerate(alpha):
        run = run + 1 if i and alpha[i - 1] == p else 1
        denom *= run
    return math.factorial(k) // denom


@lru_cache(maxsize=None)
def _distinct_perms(alpha: tuple, k: int) -> tuple:
    """All distinct length-k exponent vectors with signature alpha."""
    vec = list(alpha) + [0] * (k - len(alpha))
    out, seen = [], set()
    # k stays small wherever this is used, so a set-filtered recursion is fine
    def rec(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        used = set()
        for i, v in enumerate(remaining):
            if v in used:
                continue
            used.add(v)
            rec(prefix + [v], remaining[:i] + remaining[i + 1 :])

    rec([], vec)
    for v in out:
        seen.add(v)
    return tuple(sorted(seen))


@lru_cache(maxsize=None)
def _struct_constants(alpha: tuple, beta: tuple, k: int) -> tuple:
    """P_alpha * P_beta = sum_gamma c * P_gamma; returns ((gamma, c), ...)."""
    if _perm_count(alpha, k) == 0 or _perm_count(beta, k) == 0:
        return ()
    # enumerate the factor with fewer distinct permutations
    if _perm_count(beta, k) > _perm_count(alpha, k):
        alpha, beta = beta, alpha
    a0 = tuple(alpha) + (0,) * (k - len(alpha))
    buckets: dict = {}
    for b in _distinct_perms(beta, k):
        gamma = tuple(sorted((x + y for x, y in zip(a0, b)), reverse=True))
        gamma = tuple(p for p in gamma if p)
        buckets[gamma] = buckets.get(gamma, 0) + 1
    out = []
    na = _perm_count(alpha, k)
    for gamma, count in sorted(buckets.items()):
        total = count * na
        ng = _perm_count(gamma, k)
        assert total % ng == 0
        out.append((gamma, total // ng))
    return tuple(out)


def beta_integral(k: int, a: int, exponents) -> Q:
    """Exact int over R_k of (1-t_1-...-t_k)^a * t_1^{e_1}...t_k^{e_k}."""
    exps = tuple(int(e) for e in exponents)
    if len(exps) != k:
        raise ValueError("need one exponent per variable")
    if a < 0 or any(e < 0 for e in exps):
        raise ValueError("exponents must be non-negative")
    num = math.factorial(a)
    for e in exps:
        num *= math.factorial(e)
    return Q(num, math.factorial(sum(exps) + k + a))


def _affine_term_integral(k: int, a: int, alpha: tuple, offset=Q(1), scale=Q(1)) -> Q:
    """Exact int over scale*R_k of (offset - P_(1))^a * P_alpha.

    Substituting t = scale*u gives (offset-scale) + scale*(1-P_(1)(u)) for
    the affine factor, which is expanded binomially and integrated with the
    Beta identity.
    """
    n = _perm_count(alpha, k)
    if n == 0:
        return Q(0)
    offset, scale = Q(offset), Q(scale)
    deg = sum(alpha)
    partfact = 1
    for p in alpha:
        partfact *= math.factorial(p)
    shift = offset - scale
    total = Q(0)
    for j in range(a + 1):
        if shift == 0 and j < a:
            continue
        coeff = Q(math.comb(a, j)) * shift ** (a - j) * scale**j
        total += coeff * Q(math.factorial(j) * partfact, math.factorial(deg + k + j))
    return total * n * scale ** (deg + k)


class SymPoly:
    """Symmetric polynomial in k variables in the P_alpha basis.

    An optional degree cap bounds every stored term; operations propagate
    the tightest cap of their operands and reject results that exceed it,
    which keeps the memoized structure-constant tables bounded.
    """

    __slots__ = ("k", "terms", "degree_cap")

    def __init__(self, k: int, terms=None, degree_cap: int | None = None):
        if k < 1:
            raise ValueError("ambient dimension k must be >= 1")
        self.k = int(k)
        self.degree_cap = degree_cap
        clean: dict = {}
        for sig, coeff in (terms or {}).items():
            sig = sig if isinstance(sig, Signature) else Signature(sig)
            if sig.length > k:
                raise ValueError(f"signature {sig} does not fit in {k} variables")
            if degree_cap is not None and sig.degree > degree_cap:
                raise ValueError(f"degree cap {degree_cap} exceeded by {sig}")
            c = Q(coeff)
            if c != 0:
                clean[sig] = clean.get(sig, Q(0)) + c
        self.terms = {s: c for s, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, k: int, c, degree_cap: int | None = None) -> "SymPoly":
        return cls(k, {Signature(): c}, degree_cap)

    @classmethod
    def p1(cls, k: int, degree_cap: int | None = None) -> "SymPoly":
        return cls(k, {Signature((1,)): 1}, degree_cap)

    def _merge_cap(self, other) -> int | None:
        caps = [c for c in (self.degree_cap, getattr(other, "degree_cap", None)) if c is not None]
        return min(caps) if caps else None

    @property
    def degree(self) -> int:
        return max((s.degree for s in self.terms), default=0)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymPoly) and self.k == other.k and self.terms == other.terms

    def __hash__(self):
        return hash((self.k, tuple(sorted(self.terms.items()))))

    def __add__(self, other) -> "SymPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, Q(0)) + c
        return SymPoly(self.k, out, self._merge_cap(other))

    def __sub__(self, other) -> "SymPoly":
        return self + (self._coerce(other) * -1)

    def __mul__(self, other) -> "SymPoly":
        if not isinstance(other, SymPoly):
            c = Q(other)
            return SymPoly(self.k, {s: v * c for s, v in self.terms.items()}, self.degree_cap)
        if other.k != self.k:
            raise ValueError("ambient dimensions differ")
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                cab = ca * cb
                for gamma, c in _struct_constants(tuple(a), tuple(b), self.k):
                    key = Signature(gamma)
                    out[key] = out.get(key, Q(0)) + cab * c
        return SymPoly(self.k, out, self._merge_cap(other))

    __rmul__ = __mul__

    def _coerce(self, other) -> "SymPoly":
        if isinstance(other, SymPoly):
            if other.k != self.k:
                raise ValueError("ambient dimensions differ")
            return other
        return SymPoly.constant(self.k, other)

    def integrate_simplex(self, scale=Q(1)) -> Q:
        """Exact integral over scale*R_k."""
        scale = Q(scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        total = Q(0)
        for sig, c in self.terms.items():
            total += c * _affine_term_integral(self.k, 0, tuple(sig), Q(1), scale)
        return total

    def inner_product(self, other: "SymPoly") -> Q:
        """Exact int over R_k of self*other."""
        return (self * other).integrate_simplex()

    def dumps(self) -> str:
        """Debug rendering: 'coeff * P[alpha] + ...' in sorted order."""
        if not self.terms:
            return "0"
        bits = []
        for sig in sorted(self.terms, key=lambda s: (s.degree, s)):
            c = self.terms[sig]
            label = "P[" + ",".join(map(str, sig)) + "]"
            bits.append(f"{c} * {label}")
        return " + ".join(bits)

    def __repr__(self):  # pragma: no cover
        return f"SymPoly(k={self.k}, {self.dumps()})"


def integrate_simplex(f: SymPoly, scale=Q(1)) -> Q:
    return f.integrate_simplex(scale)


def inner_product(f: SymPoly, g: SymPoly) -> Q:
    return f.inner_product(g)


# ---------------------------------------------------------------------------
# affine representation: dict mapping (a, *alpha) -> coeff for terms
# (offset - P_(1))^a * P_alpha; all routines below are exact.
# ---------------------------------------------------------------------------


def _sorted_insert(alpha: tuple, r: int) -> tuple:
    out = list(alpha)
    for i, p in enumerate(out):
        if r >= p:
            out.insert(i, r)
            break
    else:
        out.append(r)
    return tuple(out)


def _mult_of(alpha: tuple, r: int) -> int:
    return sum(1 for p in alpha if p == r)


def _strip_candidates(alpha: tuple, k: int):
    """Exponents m available on a single slot: distinct parts, plus 0 when
    some slot is unused."""
    seen = set()
    for i, m in enumerate(alpha):
        if m not in seen:
            seen.add(m)
            yield m, alpha[:i] + alpha[i + 1 :]
    if len(alpha) < k:
        yield 0, alpha


def affine_from_sympoly(f: SymPoly) -> dict:
    return {(0,) + tuple(sig): c for sig, c in f.terms.items()}


def affine_apply_L(terms: dict, k: int) -> dict:
    """One application of the slot-integration operator in affine form.

    For a term (1-P_(1))^a P_alpha, integrating slot i over its free fiber
    gives sum_m a!m!/(a+m+1)! (1-s)^(a+m+1) P_{alpha \\ m} in the other
    variables (s their sum); re-symmetrizing expands (1-s)^c = sum_r
    C(c,r) (1-P_(1))^(c-r) t_i^r and merges t_i^r into the signature.
    """
    fact = math.factorial
    comb = math.comb
    out: dict = {}
    for key, coeff in terms.items():
        a, alpha = key[0], key[1:]
        for m, beta in _strip_candidates(alpha, k):
            c = a + m + 1
            w = coeff * Q(fact(a) * fact(m), fact(c))
            free_slots = k - len(beta)
            for r in range(c + 1):
                if r == 0:
                    okey = (c,) + beta
                    oval = w * free_slots
                else:
                    gamma = _sorted_insert(beta, r)
                    okey = (c - r,) + gamma
                    oval = w * comb(c, r) * _mult_of(gamma, r)
                acc = out.get(okey)
                out[okey] = oval if acc is None else acc + oval
    return {key: v for key, v in out.items() if v != 0}


def affine_slot_integral(terms: dict, k: int) -> dict:
    """Integrate one slot over the full fiber, landing in k-1 variables.

    Works for any offset c: (c - P_(1)) restricted to slot t equals
    (c - s) - t, so the same a!m!/(a+m+1)! rule applies and the offset is
    unchanged.  Requires k >= 2.
    """
    fact = math.factorial
    out: dict = {}
    for key, coeff in terms.items():
        a, alpha = key[0], key[1:]
        for m, beta in _strip_candidates(alpha, k):
            if len(beta) > k - 1:
                continue
            c = a + m + 1
            okey = (c,) + beta
            oval = coeff * Q(fact(a) * fact(m), fact(c))
            acc = out.get(okey)
            out[okey] = oval if acc is None else acc + oval
    return {key: v for key, v in out.items() if v != 0}


def affine_multiply(t1: dict, t2: dict, k: int) -> dict:
    """Product of two affine-form polynomials with a common offset."""
    out: dict = {}
    for key1, c1 in t1.items():
        a1, alpha = key1[0], key1[1:]
        for key2, c2 in t2.items():
            a2, beta = key2[0], key2[1:]
            base = a1 + a2
            c12 = c1 * c2
            for gamma, c in _struct_constants(alpha, beta, k):
                okey = (base,) + gamma
                oval = c12 * c
                acc = out.get(okey)
                out[okey] = oval if acc is None else acc + oval
    return {key: v for key, v in out.items() if v != 0}


def affine_integral(terms: dict, k: int, offset=Q(1), scale=Q(1)) -> Q:
    """Exact int over scale*R_k of an affine-form polynomial with offset."""
    total = Q(0)
    for key, coeff in terms.items():
        total += coeff * _affine_term_integral(k, key[0], key[1:], Q(offset), Q(scale))
    return total


@lru_cache(maxsize=None)
def _one_minus_p1_power(a: int, k: int) -> SymPoly:
    if a == 0:
        return SymPoly.constant(k, 1)
    base = SymPoly.constant(k, 1) - SymPoly.p1(k)
    return _one_minus_p1_power(a - 1, k) * base


def sympoly_from_affine(terms: dict, k: int) -> SymPoly:
    out = SymPoly(k)
    for key, coeff in terms.items():
        a, alpha = key[0], key[1:]
        mono = SymPoly(k, {Signature(alpha): coeff})
        out = out + _one_minus_p1_power(a, k) * mono
    return out


def apply_L(f: SymPoly) -> SymPoly:
    """Exact image of f under the slot-integration operator, P_alpha basis.

    Raises ValueError when the (degree + 1) image would exceed f's cap."""
    out = sympoly_from_affine(affine_apply_L(affine_from_sympoly(f), f.k), f.k)
    if f.degree_cap is not None:
        return SymPoly(out.k, out.terms, f.degree_cap)
    return out

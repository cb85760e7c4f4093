"""Exact verification of the three-variable piecewise-polynomial cutoff.

The simplex {x+y+z <= 3/2, x,y,z >= 0} is partitioned (up to null sets)
into 60 open polytopes: ten canonical pieces inside the sector
{0 < y < x < z} and their images under the six coordinate permutations.
A symmetric piecewise polynomial is specified by one polynomial per
canonical piece and extended by symmetry.

Everything here is exact rational arithmetic: the two quadratic
functionals are evaluated by iterated symbolic integration of polynomials
with affine limits (the limit data transcribed per piece), the marginal
conditions reduce to bivariate polynomial identities, and partition
geometry (volumes, membership) is checked from the inequality systems via
exact vertex enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cmp_to_key

from .rational import Q

__all__ = [
    "Poly3",
    "Polytope3",
    "PiecewiseCutoff",
    "CANONICAL_NAMES",
    "WORDS",
    "build_partition",
    "builtin_cutoff",
    "integrate_I",
    "integrate_J",
    "check_marginals",
    "verify_theorem_piece",
    "evaluate",
    "piece_polynomial",
]

CANONICAL_NAMES = ("A", "B", "C", "D", "E", "S", "T", "U", "G", "H")
WORDS = ("xyz", "xzy", "yxz", "yzx", "zxy", "zyx")
_VARS = {"x": 0, "y": 1, "z": 2}


class Poly3:
    """Sparse polynomial in (x, y, z) with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for key, c in (terms or {}).items():
            c = Q(c)
            if c != 0:
                self.terms[tuple(key)] = self.terms.get(tuple(key), Q(0)) + c
        self.terms = {k: v for k, v in self.terms.items() if v != 0}

    @classmethod
    def const(cls, c) -> "Poly3":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> "Poly3":
        key = [0, 0, 0]
        key[_VARS[name]] = 1
        return cls({tuple(key): 1})

    @classmethod
    def affine(cls, c0, cx=0, cy=0, cz=0) -> "Poly3":
        return cls({(0, 0, 0): c0, (1, 0, 0): cx, (0, 1, 0): cy, (0, 0, 1): cz})

    def __add__(self, other) -> "Poly3":
        other = other if isinstance(other, Poly3) else Poly3.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Q(0)) + c
        return Poly3(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly3":
        return Poly3({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Poly3":
        return self + (-(other if isinstance(other, Poly3) else Poly3.const(other)))

    def __mul__(self, other) -> "Poly3":
        if not isinstance(other, Poly3):
            c = Q(other)
            return Poly3({k: v * c for k, v in self.terms.items()})
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                out[key] = out.get(key, Q(0)) + c1 * c2
        return Poly3(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = other if isinstance(other, Poly3) else Poly3.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def eval(self, x, y, z):
        x, y, z = Q(x), Q(y), Q(z)
        total = Q(0)
        for (i, j, l), c in self.terms.items():
            total += c * x**i * y**j * z**l
        return total

    def permute(self, word: str) -> "Poly3":
        """Substitute (x, y, z) -> (word[0], word[1], word[2])."""
        pos = [_VARS[w] for w in word]
        out: dict = {}
        for key, c in self.terms.items():
            new = [0, 0, 0]
            for axis, e in enumerate(key):
                new[pos[axis]] += e
            new = tuple(new)
            out[new] = out.get(new, Q(0)) + c
        return Poly3(out)

    def substitute(self, name: str, value: "Poly3") -> "Poly3":
        """Replace one variable by a polynomial (used for integration limits)."""
        axis = _VARS[name]
        powers = {0: Poly3.const(1)}
        maxdeg = max((k[axis] for k in self.terms), default=0)
        for e in range(1, maxdeg + 1):
            powers[e] = powers[e - 1] * value
        out = Poly3()
        for key, c in self.terms.items():
            rest = list(key)
            e = rest[axis]
            rest[axis] = 0
            out = out + Poly3({tuple(rest): c}) * powers[e]
        return out

    def antiderivative(self, name: str) -> "Poly3":
        axis = _VARS[name]
        out = {}
        for key, c in self.terms.items():
            new = list(key)
            new[axis] += 1
            out[tuple(new)] = c / new[axis]
        return Poly3(out)

    def integrate(self, name: str, lower: "Poly3", upper: "Poly3") -> "Poly3":
        """Definite integral in one variable between polynomial limits."""
        F = self.antiderivative(name)
        return F.substitute(name, upper) - F.substitute(name, lower)

    def compose(self, mx: "Poly3", my: "Poly3", mz: "Poly3") -> "Poly3":
        """Full substitution (x, y, z) -> (mx, my, mz)."""
        cache = {}

        def power(p, e):
            key = (id(p), e)
            if key not in cache:
                cache[key] = Poly3.const(1) if e == 0 else power(p, e - 1) * p
            return cache[key]

        out = Poly3()
        for (i, j, l), c in self.terms.items():
            out = out + power(mx, i) * power(my, j) * power(mz, l) * c
        return out

    def __repr__(self):  # pragma: no cover
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms, key=lambda k: (sum(k), k)):
            mono = "".join(f"{v}^{e}" if e > 1 else (v if e else "") for v, e in zip("xyz", key))
            bits.append(f"{self.terms[key]}{'*' + mono if mono else ''}")
        return " + ".join(bits)


def _iterated_integral(integrand: Poly3, chain) -> Q:
    """Integrate innermost-first along [(var, lo, hi), ...] (outer first).

    Outermost limits must be constants; the result is an exact rational.
    """
    acc = integrand
    for var, lo, hi in reversed(chain):
        acc = acc.integrate(var, lo, hi)
    if not acc.is_zero() and set(acc.terms) != {(0, 0, 0)}:
        raise ValueError("integration chain left free variables")
    return acc.terms.get((0, 0, 0), Q(0))


# ---------------------------------------------------------------------------
# the canonical piece polynomials of the built-in verified cutoff
# ---------------------------------------------------------------------------

_BUILTIN_PIECES = {
    "A": {
        (0, 0, 0): -66, (1, 0, 0): 96, (2, 0, 0): -147, (3, 0, 0): 125,
        (0, 1, 0): 128, (1, 1, 0): -122, (2, 1, 0): 104, (0, 2, 0): -275,
        (0, 3, 0): 394, (0, 0, 1): 99, (1, 0, 1): -58, (2, 0, 1): 63,
        (0, 1, 1): -98, (1, 1, 1): 51, (0, 2, 1): 41, (0, 0, 2): -112,
        (1, 0, 2): 24, (0, 1, 2): 72, (0, 0, 3): 50,
    },
    "B": {
        (0, 0, 0): -41, (1, 0, 0): 52, (2, 0, 0): -73, (3, 0, 0): 25,
        (0, 1, 0): 108, (1, 1, 0): -66, (2, 1, 0): 71, (0, 2, 0): -294,
        (1, 2, 0): 56, (0, 3, 0): 363, (0, 0, 1): 33, (1, 0, 1): 15,
        (2, 0, 1): 22, (0, 1, 1): -40, (1, 1, 1): -42, (0, 2, 1): 75,
        (0, 0, 2): -36, (1, 0, 2): -24, (0, 1, 2): 26, (0, 0, 3): 20,
    },
    "C": {
        (0, 0, 0): -22, (1, 0, 0): 45, (2, 0, 0): -35, (0, 1, 0): 63,
        (1, 1, 0): -99, (2, 1, 0): 82, (0, 2, 0): -140, (1, 2, 0): 54,
        (0, 3, 0): 179,
    },
    "D": {},
    "E": {(0, 0, 0): -12, (1, 0, 0): 8, (0, 1, 0): 32},
    "S": {(0, 0, 0): -6, (1, 0, 0): 8, (0, 1, 0): 16},
    "T": {
        (0, 0, 0): 18, (1, 0, 0): -30, (2, 0, 0): 12, (0, 1, 0): 42,
        (1, 1, 0): -20, (0, 2, 0): -66, (0, 0, 1): -45, (1, 0, 1): 34,
        (0, 0, 2): 22,
    },
    "U": {
        (0, 0, 0): 94, (1, 0, 0): -1823, (2, 0, 0): 5760, (3, 0, 0): -5128,
        (0, 1, 0): 54, (2, 1, 0): -168, (0, 2, 0): 105, (1, 0, 1): 1422,
        (2, 0, 1): -2340, (0, 2, 1): -192, (0, 0, 2): -128, (1, 0, 2): -268,
        (0, 0, 3): 64,
    },
    "G": {
        (0, 0, 0): 5274, (1, 0, 0): -19833, (2, 0, 0): 18570, (3, 0, 0): -5128,
        (0, 1, 0): -18024, (1, 1, 0): 44696, (2, 1, 0): -20664, (0, 2, 0): 16158,
        (1, 2, 0): -19056, (0, 3, 0): -4592, (0, 0, 1): -10704, (1, 0, 1): 26860,
        (2, 0, 1): -12588, (0, 1, 1): 24448, (1, 1, 1): -30352, (0, 2, 1): -10980,
        (0, 0, 2): 7240, (1, 0, 2): -9092, (0, 1, 2): -8288, (0, 0, 3): -1632,
    },
    "H": {(0, 0, 1): 8},
}


@dataclass(frozen=True)
class PiecewiseCutoff:
    """Symmetric piecewise polynomial: one Poly3 per canonical piece name."""

    pieces: dict
    eps: object

    def __post_init__(self):
        eps = Q(self.eps)
        pieces = {}
        for name in CANONICAL_NAMES:
            p = self.pieces.get(name, Poly3())
            pieces[name] = p if isinstance(p, Poly3) else Poly3(p)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "eps", eps)

    def with_piece(self, name: str, poly) -> "PiecewiseCutoff":
        pieces = dict(self.pieces)
        pieces[name] = poly if isinstance(poly, Poly3) else Poly3(poly)
        return PiecewiseCutoff(pieces, self.eps)


def builtin_cutoff() -> PiecewiseCutoff:
    """The verified degree-<=3 cutoff (piece coefficients are exact data)."""
    return PiecewiseCutoff({n: Poly3(c) for n, c in _BUILTIN_PIECES.items()}, Q(1, 4))


def piece_polynomial(f: PiecewiseCutoff, name: str, word: str = "xyz") -> Poly3:
    """The polynomial on the permuted copy name_word of a canonical piece.

    The permuted copy is cut out by substituting (word[0], word[1], word[2])
    for (x, y, z) in the canonical constraints; by symmetry its values come
    from the canonical polynomial under the same substitution.
    """
    if name not in CANONICAL_NAMES:
        raise KeyError(f"unknown canonical piece {name!r}")
    if word not in WORDS:
        raise KeyError(f"unknown permutation word {word!r}")
    return f.pieces[name].permute(word)


# ---------------------------------------------------------------------------
# polytope partition from the inequality systems
# ---------------------------------------------------------------------------


def _canonical_systems(e):
    """Strict inequality systems (c0, cx, cy, cz) > 0 for the ten canonical
    pieces inside {0 < y < x < z}; the chains imply the sector ordering."""
    one = Q(1)
    base = [
        (Q(0), one, Q(0), Q(0)),   # x > 0
        (Q(0), Q(0), one, Q(0)),   # y > 0
        (Q(0), Q(0), Q(0), one),   # z > 0
        (Q(3, 2), -one, -one, -one),  # x+y+z < 3/2
    ]
    x_lt_z = (Q(0), -one, Q(0), one)       # x < z
    y_lt_x = (Q(0), one, -one, Q(0))       # y < x
    xy_lt = lambda b: (b, -one, -one, Q(0))     # x + y < b
    yz_gt = lambda b: (-b, Q(0), one, one)      # y + z > b
    yz_lt = lambda b: (b, Q(0), -one, -one)     # y + z < b
    zx_gt = lambda b: (-b, one, Q(0), one)      # z + x > b
    zx_lt = lambda b: (b, -one, Q(0), -one)     # z + x < b
    lo, hi = 1 - e, 1 + e
    F_sys = [xy_lt(lo), yz_gt(lo), yz_lt(hi), zx_gt(hi)]
    systems = {
        "A": [x_lt_z, y_lt_x, zx_lt(lo)],
        "B": [x_lt_z, yz_lt(lo), zx_gt(lo), zx_lt(hi)],
        "C": [xy_lt(lo), yz_gt(lo), y_lt_x, zx_lt(hi)],
        "D": [(-lo, one, one, Q(0)), x_lt_z, y_lt_x, zx_lt(hi)],  # x+y > 1-e
        "E": [x_lt_z, yz_lt(lo), zx_gt(hi)],
        "S": F_sys + [(Q(1, 2) + e, Q(0), Q(0), -one)],                 # z < 1/2+e
        "T": F_sys + [(-(Q(1, 2) + e), Q(0), Q(0), one),                # z > 1/2+e
                      (-(Q(1, 2) - e), one, Q(0), Q(0))],               # x > 1/2-e
        "U": F_sys + [(Q(1, 2) - e, -one, Q(0), Q(0))],                 # x < 1/2-e
        "G": [xy_lt(lo), yz_gt(hi), y_lt_x],
        "H": [(-lo, one, one, Q(0)), x_lt_z, yz_lt(hi), zx_gt(hi)],
    }
    return {name: base + sys for name, sys in systems.items()}


def _permute_inequality(ineq, word):
    """Literal substitution x -> word[0], y -> word[1], z -> word[2]."""
    c0, cx, cy, cz = ineq
    out = [c0, Q(0), Q(0), Q(0)]
    for coeff, w in zip((cx, cy, cz), word):
        out[1 + _VARS[w]] += coeff
    return tuple(out)


@dataclass(frozen=True)
class Polytope3:
    """Open polytope given by strict affine inequalities c0+cx*x+cy*y+cz*z > 0."""

    name: str
    inequalities: tuple

    def contains(self, point, strict: bool = True) -> bool:
        x, y, z = (Q(v) for v in point)
        for c0, cx, cy, cz in self.inequalities:
            v = c0 + cx * x + cy * y + cz * z
            if v < 0 or (strict and v == 0):
                return False
        return True

    def vertices(self):
        """Exact vertex enumeration over all triples of supporting planes."""
        ineqs = self.inequalities
        pts = set()
        for i1, i2, i3 in itertools.combinations(range(len(ineqs)), 3):
            rows = [ineqs[i1], ineqs[i2], ineqs[i3]]
            det = _det3([r[1:] for r in rows])
            if det == 0:
                continue
            rhs = [-r[0] for r in rows]
            pt = _cramer3([r[1:] for r in rows], rhs, det)
            if self.contains(pt, strict=False):
                pts.add(pt)
        return sorted(pts)

    def volume(self) -> Q:
        """Exact volume via face triangulation fanned from an interior point."""
        verts = self.vertices()
        if len(verts) < 4:
            return Q(0)
        n = len(verts)
        centroid = tuple(sum(v[i] for v in verts) / n for i in range(3))
        total = Q(0)
        for c0, cx, cy, cz in self.inequalities:
            face = [v for v in verts if c0 + cx * v[0] + cy * v[1] + cz * v[2] == 0]
            if len(face) < 3:
                continue
            ring = _order_face(face, (cx, cy, cz))
            for i in range(1, len(ring) - 1):
                d = _det3([
                    _sub(ring[0], centroid),
                    _sub(ring[i], centroid),
                    _sub(ring[i + 1], centroid),
                ])
                total += abs(d)
        return total / 6

    def integrate(self, poly: Poly3) -> Q:
        """Exact integral of a polynomial over the polytope (tetrahedra +
        monomial simplex integrals)."""
        verts = self.vertices()
        if len(verts) < 4:
            return Q(0)
        n = len(verts)
        centroid = tuple(sum(v[i] for v in verts) / n for i in range(3))
        total = Q(0)
        for c0, cx, cy, cz in self.inequalities:
            face = [v for v in verts if c0 + cx * v[0] + cy * v[1] + cz * v[2] == 0]
            if len(face) < 3:
                continue
            ring = _order_face(face, (cx, cy, cz))
            for i in range(1, len(ring) - 1):
                tet = (centroid, ring[0], ring[i], ring[i + 1])
                e1, e2, e3 = (_sub(tet[j], tet[0]) for j in (1, 2, 3))
                det = _det3([e1, e2, e3])
                if det == 0:
                    continue
                # map the standard simplex onto the tetrahedron
                maps = []
                for axis in range(3):
                    maps.append(Poly3.affine(tet[0][axis], e1[axis], e2[axis], e3[axis]))
                composed = poly.compose(*maps)
                piece = Q(0)
                for (a, b, c), coeff in composed.terms.items():
                    piece += coeff * Q(
                        math.factorial(a) * math.factorial(b) * math.factorial(c),
                        math.factorial(a + b + c + 3),
                    )
                total += abs(det) * piece
        return total


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _det3(rows):
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _cramer3(A, rhs, det):
    cols = list(zip(*A))
    out = []
    for i in range(3):
        M = [list(cols[j]) if j != i else list(rhs) for j in range(3)]
        out.append(_det3(list(zip(*M))) / det)
    return tuple(out)


def _order_face(face, normal):
    """Order coplanar points into a convex ring (exact CCW sort)."""
    n = len(face)
    centroid = tuple(sum(v[i] for v in face) / n for i in range(3))
    e1 = _sub(face[0], centroid)
    e2 = _cross(normal, e1)
    coords = []
    for v in face:
        d = _sub(v, centroid)
        coords.append((_dot(d, e1), _dot(d, e2), v))

    def half(u, v):
        return 0 if (v > 0 or (v == 0 and u > 0)) else 1

    def cmp(p, q):
        hp, hq = half(p[0], p[1]), half(q[0], q[1])
        if hp != hq:
            return -1 if hp < hq else 1
        cross = p[0] * q[1] - p[1] * q[0]
        return 0 if cross == 0 else (-1 if cross > 0 else 1)

    return [c[2] for c in sorted(coords, key=cmp_to_key(cmp))]


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def build_partition(eps) -> list:
    """The 60 open polytopes (10 canonical systems x 6 permutations)."""
    e = Q(eps)
    if not Q(1, 4) <= e <= Q(1, 3):
        raise ValueError("the partition is valid for eps in [1/4, 1/3]")
    systems = _canonical_systems(e)
    out = []
    for name in CANONICAL_NAMES:
        for word in WORDS:
            ineqs = tuple(_permute_inequality(iq, word) for iq in systems[name])
            out.append(Polytope3(f"{name}_{word}", ineqs))
    return out


def canonical_polytope(name: str, eps) -> Polytope3:
    e = Q(eps)
    systems = _canonical_systems(e)
    return Polytope3(f"{name}_xyz", tuple(systems[name]))


# ---------------------------------------------------------------------------
# transcribed iterated-integral programs
# ---------------------------------------------------------------------------


def _aff(c0, cx=0, cy=0, cz=0) -> Poly3:
    return Poly3.affine(Q(c0), Q(cx), Q(cy), Q(cz))


def _i_blocks(e):
    """Iterated-integral chains for the squared canonical pieces.

    Each entry: (piece name, [(var, lo, hi), ...]) with outer chains first;
    the D piece is handled separately (it has no transcribed chain).
    """
    half, one = Q(1, 2), Q(1)
    c = _aff
    blocks = [
        ("A", [("x", c(0), c(half - e / 2)), ("y", c(0), c(0, 1)), ("z", c(0, 1), c(one - e, -1))]),
        ("B", [("z", c(half - e / 2), c(half + e / 2)), ("x", c(one - e, 0, 0, -1), c(0, 0, 0, 1)),
               ("y", c(0), c(one - e, 0, 0, -1))]),
        ("B", [("z", c(half + e / 2), c(one - e)), ("x", c(one - e, 0, 0, -1), c(one + e, 0, 0, -1)),
               ("y", c(0), c(one - e, 0, 0, -1))]),
        ("C", [("y", c(0), c(half - 3 * e / 2)), ("x", c(0, 0, 1), c(2 * e, 0, 1)),
               ("z", c(one - e, 0, -1), c(one + e, -1))]),
        ("C", [("y", c(half - 3 * e / 2), c(half - e)), ("x", c(0, 0, 1), c(one - e, 0, -1)),
               ("z", c(one - e, 0, -1), c(one + e, -1))]),
        ("C", [("y", c(half - e), c(half - e / 2)), ("x", c(0, 0, 1), c(one - e, 0, -1)),
               ("z", c(one - e, 0, -1), c(Q(3, 2), -1, -1))]),
        ("E", [("z", c(half + e / 2), c(one - e)), ("x", c(one + e, 0, 0, -1), c(0, 0, 0, 1)),
               ("y", c(0), c(one - e, 0, 0, -1))]),
        ("S", [("y", c(0), c(half - 3 * e / 2)), ("z", c(one - e, 0, -1), c(half + e)),
               ("x", c(one + e, 0, 0, -1), c(one - e, 0, -1))]),
        ("S", [("y", c(half - 3 * e / 2), c(half - e)), ("z", c(2 * e, 0, 1), c(half + e)),
               ("x", c(one + e, 0, 0, -1), c(one - e, 0, -1))]),
        ("T", [("z", c(half + e), c(half + 2 * e)), ("x", c(one + e, 0, 0, -1), c(Q(3, 2), 0, 0, -1)),
               ("y", c(0), c(Q(3, 2), -1, 0, -1))]),
        ("T", [("z", c(half + 2 * e), c(one + e)), ("x", c(half - e), c(Q(3, 2), 0, 0, -1)),
               ("y", c(0), c(Q(3, 2), -1, 0, -1))]),
        ("U", [("x", c(0), c(half - e)), ("y", c(0), c(0, 1)),
               ("z", c(one + e, -1), c(one + e, 0, -1))]),
        ("G", [("x", c(0), c(half - e)), ("y", c(0), c(0, 1)),
               ("z", c(one + e, 0, -1), c(Q(3, 2), -1, -1))]),
        ("H", [("x", c(half + e / 2), c(one - e)), ("y", c(one - e, -1), c(Q(3, 2), -2)),
               ("z", c(0, 1), c(Q(3, 2), -1, -1))]),
        ("H", [("x", c(one - e), c(Q(3, 4))), ("y", c(0), c(Q(3, 2), -2)),
               ("z", c(0, 1), c(Q(3, 2), -1, -1))]),
        ("H", [("x", c(half), c(half + e / 2)), ("y", c(one - e, -1), c(half - e)),
               ("z", c(one + e, -1), c(Q(3, 2), -1, -1))]),
    ]
    return blocks


def _j_blocks(e):
    """Outer chains and z-segment lists for the eight slot-integral regions.

    Each entry: (outer chain [(var, lo, hi), (var, lo, hi)],
                 [(piece, word, z_lo, z_hi), ...]).
    """
    half, one = Q(1, 2), Q(1)
    c = _aff
    x = c(0, 1)
    zero = c(0)
    lo_x = c(one - e, -1)      # 1-e-x
    lo_y = c(one - e, 0, -1)   # 1-e-y
    hi_x = c(one + e, -1)      # 1+e-x
    hi_y = c(one + e, 0, -1)   # 1+e-y
    top = c(Q(3, 2), -1, -1)   # 3/2-x-y
    zsplit = c(half + e)
    y = c(0, 0, 1)
    blocks = [
        # J1
        ([("x", c(0), c(half - e)), ("y", zero, x)],
         [("A", "yzx", zero, y), ("A", "zyx", y, x), ("A", "xyz", x, lo_x),
          ("B", "xyz", lo_x, lo_y), ("C", "xyz", lo_y, hi_x),
          ("U", "xyz", hi_x, hi_y), ("G", "xyz", hi_y, top)]),
        # J2
        ([("x", c(half - e), c(half - e / 2)), ("y", c(half - e), x)],
         [("A", "yzx", zero, y), ("A", "zyx", y, x), ("A", "xyz", x, lo_x),
          ("B", "xyz", lo_x, lo_y), ("C", "xyz", lo_y, top)]),
        # J3
        ([("x", c(half - e), c(half - e / 2)), ("y", zero, c(half - e))],
         [("A", "yzx", zero, y), ("A", "zyx", y, x), ("A", "xyz", x, lo_x),
          ("B", "xyz", lo_x, lo_y), ("C", "xyz", lo_y, hi_x), ("T", "xyz", hi_x, top)]),
        # J4
        ([("x", c(half - e / 2), c(half)), ("y", c(half - e), lo_x)],
         [("A", "yzx", zero, y), ("A", "zyx", y, lo_x), ("B", "zyx", lo_x, x),
          ("B", "xyz", x, lo_y), ("C", "xyz", lo_y, top)]),
        # J5
        ([("x", c(half - e / 2), c(half)), ("y", zero, c(half - e))],
         [("A", "yzx", zero, y), ("A", "zyx", y, lo_x), ("B", "zyx", lo_x, x),
          ("B", "xyz", x, lo_y), ("C", "xyz", lo_y, hi_x), ("T", "xyz", hi_x, top)]),
        # J6 (two outer cells)
        ([("x", c(half), c(2 * e)), ("y", zero, lo_x)],
         [("A", "yzx", zero, y), ("A", "zyx", y, lo_x), ("B", "zyx", lo_x, x),
          ("B", "xyz", x, lo_y), ("C", "xyz", lo_y, hi_x),
          ("S", "xyz", hi_x, zsplit), ("T", "xyz", zsplit, top)]),
        ([("x", c(2 * e), c(half + e / 2)), ("y", c(-2 * e, 1), lo_x)],
         [("A", "yzx", zero, y), ("A", "zyx", y, lo_x), ("B", "zyx", lo_x, x),
          ("B", "xyz", x, lo_y), ("C", "xyz", lo_y, hi_x),
          ("S", "xyz", hi_x, zsplit), ("T", "xyz", zsplit, top)]),
        # J7
        ([("x", c(2 * e), c(half + e / 2)), ("y", zero, c(-2 * e, 1))],
         [("A", "yzx", zero, y), ("A", "zyx", y, lo_x), ("B", "zyx", lo_x, x),
          ("B", "xyz", x, hi_x), ("E", "xyz", hi_x, lo_y),
          ("S", "xyz", lo_y, zsplit), ("T", "xyz", zsplit, top)]),
        # J8
        ([("x", c(half + e / 2), c(one - e)), ("y", zero, lo_x)],
         [("A", "yzx", zero, y), ("A", "zyx", y, lo_x), ("B", "zyx", lo_x, hi_x),
          ("E", "zyx", hi_x, x), ("E", "xyz", x, lo_y),
          ("S", "xyz", lo_y, zsplit), ("T", "xyz", zsplit, top)]),
    ]
    return blocks


def _marginal_blocks(e):
    """Segment lists whose summed z-integrals must vanish identically."""
    c = _aff
    top = c(Q(3, 2), -1, -1)
    hi_x = c(Q(1) + e, -1)
    lo_x = c(Q(1) - e, -1)
    lo_y = c(Q(1) - e, 0, -1)
    y = c(0, 0, 1)
    zero = c(0)
    return [
        ("m1", [("G", "yzx", zero, top)]),
        ("m2", [("G", "yzx", zero, y), ("G", "zyx", y, top)]),
        ("m3", [("U", "yzx", zero, hi_x), ("G", "yzx", hi_x, y), ("G", "zyx", y, top)]),
        ("m4", [("U", "yzx", zero, hi_x), ("G", "yzx", hi_x, top)]),
        ("m5", [("T", "yzx", zero, top)]),
        ("m7", [("E", "yzx", zero, lo_x), ("S", "yzx", lo_x, lo_y), ("H", "yzx", lo_y, top)]),
    ]


def integrate_I(f: PiecewiseCutoff) -> Q:
    """Exact integral of F^2 over the whole simplex (6 x canonical sector)."""
    e = f.eps
    total = Q(0)
    for name, chain in _i_blocks(e):
        p = f.pieces[name]
        if p.is_zero():
            continue
        total += _iterated_integral(p * p, chain)
    d_piece = f.pieces["D"]
    if not d_piece.is_zero():
        total += canonical_polytope("D", e).integrate(d_piece * d_piece)
    return 6 * total


def integrate_piece_I(f: PiecewiseCutoff, name: str, via_polytope: bool = False) -> Q:
    """Canonical-sector integral of one squared piece (both evaluation paths)."""
    p = f.pieces[name]
    if p.is_zero():
        return Q(0)
    if via_polytope or name == "D":
        return canonical_polytope(name, f.eps).integrate(p * p)
    total = Q(0)
    for bname, chain in _i_blocks(f.eps):
        if bname == name:
            total += _iterated_integral(p * p, chain)
    return total


def _segment_sum(f: PiecewiseCutoff, segments) -> Poly3:
    acc = Poly3()
    for name, word, lo, hi in segments:
        poly = piece_polynomial(f, name, word)
        acc = acc + poly.integrate("z", lo, hi)
    return acc


def integrate_J(f: PiecewiseCutoff) -> Q:
    """Exact value of the slot-integrated quadratic functional."""
    total = Q(0)
    for outer, segments in _j_blocks(f.eps):
        inner = _segment_sum(f, segments)
        total += _iterated_integral(inner * inner, outer)
    return 6 * total


def check_marginals(f: PiecewiseCutoff):
    """Residual bivariate polynomial for each marginal identity.

    An all-zero report means every slot integral vanishes identically on
    the far outer region, as the support condition requires.
    """
    out = []
    for label, segments in _marginal_blocks(f.eps):
        out.append((label, _segment_sum(f, segments)))
    return out


def verify_theorem_piece() -> bool:
    """Full exact verification of the built-in cutoff.

    Checks that every marginal residual vanishes identically and that the
    slot functional exceeds twice the square functional, all in exact
    arithmetic.  Raises ValueError naming the first failed stage.
    """
    f = builtin_cutoff()
    for label, residual in check_marginals(f):
        if not residual.is_zero():
            raise ValueError(f"marginal identity {label} has nonzero residual")
    I = integrate_I(f)
    J = integrate_J(f)
    if I <= 0:
        raise ValueError("square functional is not positive")
    if not J > 2 * I:
        raise ValueError("ratio does not exceed 2")
    return True


def evaluate(f: PiecewiseCutoff, point):
    """Pointwise value of the symmetric extension (None on boundaries).

    The point is sorted into the canonical sector (mid, min, max) and the
    canonical piece containing it is located from the inequality systems.
    """
    vals = sorted(Q(v) for v in point)
    canon = (vals[1], vals[0], vals[2])
    for name in CANONICAL_NAMES:
        if canonical_polytope(name, f.eps).contains(canon, strict=True):
            return f.pieces[name].eval(*canon)
    return None

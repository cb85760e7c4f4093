"""Admissible k-tuples: representation, testing, small exact diameters.

A k-tuple of increasing integers is admissible when, for every prime p,
its elements avoid at least one residue class mod p.  Only primes p <= k
matter: k residues can never cover all p > k classes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .primes import primes_upto

__all__ = [
    "Tuple",
    "covers_all_classes",
    "GapEncoding",
    "is_admissible",
    "is_admissible_naive",
    "h_exact_small",
    "encode_gaps",
    "decode_gaps",
    "read_tuple_file",
    "write_tuple_file",
]


@dataclass(frozen=True)
class Tuple:
    """Strictly increasing integer offsets (h_1, ..., h_k)."""

    offsets: tuple

    def __post_init__(self):
        offs = tuple(int(h) for h in self.offsets)
        if len(offs) < 1:
            raise ValueError("tuple must have k >= 1 elements")
        for a, b in zip(offs, offs[1:]):
            if a >= b:
                raise ValueError("offsets must be strictly increasing")
        object.__setattr__(self, "offsets", offs)

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def diameter(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def shifted(self, c: int) -> "Tuple":
        return Tuple(tuple(h + c for h in self.offsets))

    def __len__(self) -> int:
        return len(self.offsets)

    def __iter__(self):
        return iter(self.offsets)


@dataclass(frozen=True)
class GapEncoding:
    """Tuple stored as its first element plus k-1 positive gaps."""

    first: int
    gaps: tuple

    def __post_init__(self):
        gaps = tuple(int(g) for g in self.gaps)
        if any(g <= 0 for g in gaps):
            raise ValueError("gaps must be positive")
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "first", int(self.first))

    def to_bytes(self) -> bytes:
        """One byte per gap < 256; 0x00 escape + 8 bytes otherwise (gaps are
        positive, so the zero byte is free to mark the escape form)."""
        out = bytearray(self.first.to_bytes(8, "big", signed=True))
        for g in self.gaps:
            if g < 256:
                out.append(g)
            else:
                out.append(0x00)
                out += g.to_bytes(8, "big")
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "GapEncoding":
        if len(data) < 8:
            raise ValueError("malformed gap stream: missing header")
        first = int.from_bytes(data[:8], "big", signed=True)
        gaps = []
        i = 8
        n = len(data)
        while i < n:
            b = data[i]
            i += 1
            if b == 0x00:
                if i + 8 > n:
                    raise ValueError("malformed gap stream: truncated escape")
                g = int.from_bytes(data[i : i + 8], "big")
                if g < 256:
                    raise ValueError("malformed gap stream: non-canonical escape")
                gaps.append(g)
                i += 8
            else:
                gaps.append(b)
        return cls(first, tuple(gaps))


def encode_gaps(t: Tuple) -> GapEncoding:
    offs = t.offsets
    return GapEncoding(offs[0], tuple(b - a for a, b in zip(offs, offs[1:])))


def decode_gaps(g: GapEncoding) -> Tuple:
    offs = [g.first]
    for gap in g.gaps:
        offs.append(offs[-1] + gap)
    return Tuple(tuple(offs))


def _as_array(t) -> np.ndarray:
    offs = t.offsets if isinstance(t, Tuple) else tuple(t)
    if len(offs) == 0:
        raise ValueError("k = 0 is not allowed")
    return np.asarray(offs, dtype=np.int64)


def covers_all_classes(offs: np.ndarray, p: int) -> bool:
    return bool((np.bincount(offs % p, minlength=p) > 0).all())


def is_admissible_naive(t) -> bool:
    """Admissibility by full residue enumeration mod every prime p <= k."""
    offs = _as_array(t)
    k = len(offs)
    for p in primes_upto(k):
        if covers_all_classes(offs, int(p)):
            return False
    return True


def is_admissible(t) -> bool:
    """Fast admissibility test.

    Per prime p <= k: when p is large, scan a short residue window [0, m]
    on the boolean-vector representation of the tuple; only when every
    class in the window is occupied fall back to full enumeration.
    """
    offs = _as_array(t)
    k = len(offs)
    if k == 1:
        return True
    ps = primes_upto(k)
    if len(ps) == 0:
        return True
    rel = offs - offs[0]
    bitmap = np.zeros(int(rel[-1]) + 1, dtype=bool)
    bitmap[rel] = True
    # window scan pays off only once the slices bitmap[i::p] are short
    logk = math.log(k) if k > 1 else 1.0
    window = math.ceil(3.0 * logk)
    cutoff = k / logk
    for p in ps:
        p = int(p)
        if p > cutoff:
            m = min(p - 1, window)
            free = False
            for i in range(m + 1):
                if not bitmap[i::p].any():
                    free = True
                    break
            if free:
                continue
        # small prime, or fully occupied window: enumerate all classes
        if covers_all_classes(offs, p):
            return False
    return True


def h_exact_small(k: int, dmax: int) -> int:
    """Minimal diameter of an admissible k-tuple, by exhaustive search.

    Guards: k <= 6 and dmax <= 64 keep the subset enumeration tractable.
    Raises ValueError when no admissible tuple of diameter <= dmax exists.
    """
    if not 1 <= k <= 6:
        raise ValueError("exhaustive search supports 1 <= k <= 6 only")
    if dmax > 64:
        raise ValueError("exhaustive search supports dmax <= 64 only")
    if dmax < 0:
        raise ValueError("dmax must be non-negative")
    if k == 1:
        return 0
    small_primes = [int(p) for p in primes_upto(k)]
    for d in range(k - 1, dmax + 1):
        for mid in itertools.combinations(range(1, d), k - 2):
            offs = (0,) + mid + (d,)
            ok = True
            for p in small_primes:
                if len({h % p for h in offs}) == p:
                    ok = False
                    break
            if ok:
                return d
    raise ValueError(f"no admissible {k}-tuple within diameter {dmax}")


def read_tuple_file(path) -> Tuple:
    """ASCII tuple file: one offset per line, '#' comments, optional k=<int>."""
    offsets = []
    declared_k = None
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("k="):
                if declared_k is not None or offsets:
                    raise ValueError("k=<int> must be the first non-comment line")
                declared_k = int(line[2:])
                continue
            offsets.append(int(line))
    t = Tuple(tuple(offsets))
    if declared_k is not None and declared_k != t.k:
        raise ValueError(f"declared k={declared_k} but file has {t.k} offsets")
    return t


def write_tuple_file(path, t: Tuple, header: str | None = None) -> None:
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"k={t.k}\n")
        for h in t.offsets:
            fh.write(f"{h}\n")

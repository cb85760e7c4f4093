"""Constructions of narrow admissible k-tuples.

Five constructions, ordered by typical output quality:

  * k primes past k (fully sieved, no search),
  * sieve of Eratosthenes with decremental start index,
  * symmetric interval around the origin (the classical improvement),
  * shifted interval keeping even survivors, with shift search,
  * shifted greedy: minimally occupied residue classes for large primes.

All sieving uses numpy boolean masks over the interval; admissibility of
every returned tuple is re-verified with the fast tester.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .admissible import Tuple, covers_all_classes, is_admissible
from .primes import nth_prime_bound, primes_upto

__all__ = [
    "SieveConfig",
    "SieveRun",
    "sieve_k_primes_past_k",
    "sieve_eratosthenes",
    "sieve_hensley_richards",
    "sieve_shifted_schinzel",
    "sieve_shifted_greedy",
    "write_residue_sieve",
    "apply_residue_sieve",
]

METHODS = (
    "eratosthenes",
    "k-primes-past-k",
    "hensley-richards",
    "shifted-schinzel",
    "shifted-greedy",
)


@dataclass(frozen=True)
class SieveConfig:
    """Knobs for the shifted sieves.

    shift: integer start of the interval, or "search" for a coarse scan of
    [-x/2, x/2] (stride max(1, x//1000) unless overridden) refined locally
    around the best hits.  batch_size controls greedy class selection:
    classes within a batch are chosen against the survivor set frozen at
    batch start, so results are deterministic for a given batch size.
    """

    method: str = "shifted-schinzel"
    shift: object = "search"
    shift_range: tuple | None = None
    shift_stride: int | None = None
    batch_size: int = 1
    threads: int = 1
    greedy_multiplier: float = 2.0
    growth: float = 1.05
    refine_top: int = 6

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown sieve method {self.method!r}")
        if self.shift != "search" and not isinstance(self.shift, int):
            raise ValueError("shift must be an integer or 'search'")
        if self.batch_size < 1 or self.threads < 1:
            raise ValueError("batch_size and threads must be positive")
        if self.batch_size % self.threads != 0:
            raise ValueError("batch_size must be a multiple of the thread count")


@dataclass(frozen=True)
class SieveRun:
    """A constructed tuple plus the sieve data that produced it."""

    tuple: Tuple
    k: int
    s: int = 0
    m: int = 0
    classes: tuple = ()  # (prime index (1-based), residue) pairs past index m

    @property
    def diameter(self) -> int:
        return self.tuple.diameter


def _primes_with_index(k: int, extra: int = 0):
    """All primes up to p_{pi(k)+k+extra}; returns (primes, pi(k))."""
    approx = int(k / max(math.log(max(k, 3)), 1.0)) + k + extra + 10
    ps = primes_upto(nth_prime_bound(approx))
    pi_k = int(np.searchsorted(ps, k, side="right"))
    while len(ps) < pi_k + k + extra:
        ps = primes_upto(int(ps[-1] * 1.3) + 100)
    return ps, pi_k


def sieve_k_primes_past_k(k: int) -> Tuple:
    """The k consecutive primes following k; admissible without search."""
    if k < 2:
        raise ValueError("k must be >= 2")
    ps, pi_k = _primes_with_index(k)
    return Tuple(tuple(int(p) for p in ps[pi_k : pi_k + k]))


def sieve_eratosthenes(k: int) -> Tuple:
    """k consecutive primes with the start index pushed down greedily.

    Starting from the fully-sieved window, the start index is decremented
    while the shifted window stays admissible modulo the newly exposed
    prime, then the final window is verified in full (and pushed back up
    if the heuristic overshot).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    ps, pi_k = _primes_with_index(k)
    m = pi_k
    while m >= 1:
        window = ps[m - 1 : m - 1 + k]
        p = int(ps[m - 1])
        if covers_all_classes(window, p):
            break
        m -= 1
    while True:
        t = Tuple(tuple(int(p) for p in ps[m : m + k]))
        if is_admissible(t):
            return t
        m += 1


def sieve_hensley_richards(k: int) -> Tuple:
    """Symmetric tuple (-p_{m+k/2-1}, ..., -1, 1, ..., p_{m+(k+1)/2-1})."""
    if k < 2:
        raise ValueError("k must be >= 2")
    nl = k // 2 - 1
    nr = (k + 1) // 2 - 1
    ps, pi_k = _primes_with_index(k, extra=max(nl, nr))

    def offsets(m):
        return np.concatenate(
            [-ps[m : m + nl][::-1], np.array([-1, 1], dtype=np.int64), ps[m : m + nr]]
        )

    if nl == 0 and nr == 0:
        return Tuple(tuple(int(v) for v in offsets(0)))
    m = pi_k
    while m >= 1:
        p = int(ps[m - 1])
        if covers_all_classes(offsets(m - 1), p):
            break
        m -= 1
    while True:
        cand = offsets(m)
        if is_admissible(cand):
            return Tuple(tuple(int(v) for v in cand))
        m += 1


# ---------------------------------------------------------------------------
# shifted interval sieves
# ---------------------------------------------------------------------------


def _structural_mask(s: int, length: int, odd_primes) -> np.ndarray:
    """Keep even values in [s, s+length); kill 0 mod each listed odd prime."""
    mask = np.ones(length, dtype=bool)
    mask[(1 - s) % 2 :: 2] = False  # remove odd values
    for p in odd_primes:
        p = int(p)
        mask[(-s) % p :: p] = False
    return mask


def _best_window(surv: np.ndarray, k: int):
    """k consecutive survivors minimizing the diameter; None if too few."""
    if len(surv) < k:
        return None
    diffs = surv[k - 1 :] - surv[: len(surv) - k + 1]
    i = int(np.argmin(diffs))
    return surv[i : i + k], int(diffs[i])


def _grow_interval(k: int, s: int, odd_primes, growth: float) -> int:
    """Smallest interval length (geometric growth) with >= k survivors when
    sieving every listed odd prime."""
    x = int(k * (math.log(max(k, 3)) + 1.2)) + 16
    while True:
        mask = _structural_mask(s, x + 1, odd_primes)
        if int(mask.sum()) >= k:
            return x
        x = int(x * growth) + 2


def _schinzel_run(k: int, s: int, ps, pi_k: int, growth: float, x_hint: int) -> SieveRun:
    """Best admissible window of [s, s+x] at the minimal start-prime index.

    x is grown geometrically from the hint until the fully sieved interval
    holds at least k survivors (so every sieve level does); the start-prime
    index is then minimized by bisection on window admissibility.
    """
    x = max(x_hint, 64)
    while True:
        mask = _structural_mask(s, x + 1, ps[1:pi_k])
        if int(mask.sum()) >= k:
            break
        x = int(x * growth) + 64

    def admissible_at(m):
        mask = _structural_mask(s, x + 1, ps[1:m])
        win = _best_window(np.flatnonzero(mask).astype(np.int64) + s, k)
        if win is None:
            return False
        return Tuple(tuple(int(v) for v in win[0])) if is_admissible(win[0]) else False

    lo, hi = 1, pi_k
    best = admissible_at(hi)
    if best is False:  # pragma: no cover - fully sieved windows are admissible
        raise ArithmeticError("fully sieved window failed admissibility")
    while lo < hi:
        mid = (lo + hi) // 2
        t = admissible_at(mid)
        if t:
            hi = mid
            best = t
        else:
            lo = mid + 1
    return SieveRun(best, k=k, s=s, m=hi)


def _shift_candidates(k: int, cfg: SieveConfig, ps, pi_k: int, m_ref: int, x_hint: int):
    """Rank anchor shifts by the anchored-window diameter at a reference
    sieve level (every anchor in the range is scored via one global sieve)."""
    if cfg.shift_range is not None:
        lo, hi = cfg.shift_range
    else:
        lo, hi = -(x_hint // 2), x_hint // 2
    pad = x_hint + 64
    mask = _structural_mask(lo, hi - lo + pad, ps[1:m_ref])
    surv = np.flatnonzero(mask).astype(np.int64) + lo
    if len(surv) < k:
        return [], max(1, x_hint // 1000)
    diams = surv[k - 1 :] - surv[: len(surv) - k + 1]
    anchors = surv[: len(surv) - k + 1]
    keep = anchors <= hi
    order = np.argsort(diams[keep], kind="stable")
    scored = [(int(diams[keep][i]), int(anchors[keep][i])) for i in order[: 4 * cfg.refine_top]]
    # spread the candidates: drop anchors within half a window of a better one
    chosen = []
    for d, s in scored:
        if all(abs(s - c) > x_hint // 8 for _, c in chosen):
            chosen.append((d, s))
        if len(chosen) >= cfg.refine_top:
            break
    stride = cfg.shift_stride or max(1, x_hint // 1000)
    return chosen, stride


def sieve_shifted_schinzel(k: int, cfg: SieveConfig | None = None) -> Tuple:
    """Shifted even-survivor sieve; see SieveConfig for the search policy."""
    return _shifted_schinzel_run(k, cfg).tuple


def _shifted_schinzel_run(k: int, cfg: SieveConfig | None = None) -> SieveRun:
    if k < 2:
        raise ValueError("k must be >= 2")
    cfg = cfg or SieveConfig(method="shifted-schinzel")
    ps, pi_k = _primes_with_index(k)
    x_hint = int(k * (math.log(max(k, 3)) + 1.0)) + 64
    if cfg.shift != "search":
        return _schinzel_run(k, int(cfg.shift), ps, pi_k, cfg.growth, x_hint)
    seed = _schinzel_run(k, k, ps, pi_k, cfg.growth, x_hint)
    scored, stride = _shift_candidates(k, cfg, ps, pi_k, seed.m, x_hint)
    best = seed
    for _, s in scored:
        run = _schinzel_run(k, s, ps, pi_k, cfg.growth, x_hint)
        if run.diameter < best.diameter:
            best = run
    fine = max(1, stride // 10)
    for s in range(best.s - stride, best.s + stride + 1, fine):
        run = _schinzel_run(k, s, ps, pi_k, cfg.growth, x_hint)
        if run.diameter < best.diameter:
            best = run
    return best


class _GreedyPass:
    """One greedy sieve over a fixed interval.

    Classes are minimally occupied residues (ties to the smallest value),
    selected against the survivor set frozen at batch start, so the result
    is deterministic for a given batch size regardless of thread count.
    Sieving stops at the first batch whose best window is admissible; a
    snapshot taken at the previous checkpoint lets the stop point be
    refined without re-running the whole pass.
    """

    def __init__(self, k, surv, primes, cfg: SieveConfig):
        self.k = k
        self.cfg = cfg
        self.surv = surv
        self.primes = [int(p) for p in primes]
        self.picks = []
        self.executor = (
            ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
        )

    def _classes_for(self, batch):
        surv = self.surv

        def min_class(p):
            return int(np.argmin(np.bincount(surv % p, minlength=p)))

        if self.executor is not None:
            return list(self.executor.map(min_class, batch))
        return [min_class(p) for p in batch]

    def _apply(self, batch, classes):
        keep = np.ones(len(self.surv), dtype=bool)
        for p, cls in zip(batch, classes):
            keep &= (self.surv % p) != cls
            self.picks.append((p, cls))
        self.surv = self.surv[keep]

    def _window_admissible(self):
        win = _best_window(self.surv, self.k)
        return win is not None and is_admissible(win[0])

    def run(self):
        """Returns the survivor array after the (refined) minimal prefix of
        batches whose best window is admissible."""
        nb = self.cfg.batch_size
        batches = [self.primes[i : i + nb] for i in range(0, len(self.primes), nb)]
        try:
            state = (self.surv, 0, list(self.picks))
            cadence = max(1, len(batches) // 12)
            stop = None
            i = 0
            while i < len(batches):
                upto = min(i + cadence, len(batches))
                for j in range(i, upto):
                    self._apply(batches[j], self._classes_for(batches[j]))
                if self._window_admissible():
                    stop = (i, upto)
                    break
                state = (self.surv, upto, list(self.picks))
                i = upto
            if stop is not None and stop[1] - stop[0] > 1:
                # replay from the last clean checkpoint one batch at a time
                self.surv, i, self.picks = state
                while i < stop[1]:
                    self._apply(batches[i], self._classes_for(batches[i]))
                    i += 1
                    if self._window_admissible():
                        break
            return self.surv
        finally:
            if self.executor is not None:
                self.executor.shutdown()


def _greedy_pass(k: int, s: int, x: int, cfg: SieveConfig, ps, pi_k):
    threshold = cfg.greedy_multiplier * math.sqrt(k * math.log(max(k, 3)))
    n_struct = int(np.searchsorted(ps, threshold, side="right"))
    mask = _structural_mask(s, x + 1, ps[1:n_struct])
    surv = np.flatnonzero(mask).astype(np.int64) + s
    gp = _GreedyPass(k, surv, ps[max(n_struct, 1) : pi_k], cfg)
    surv = gp.run()
    win = _best_window(surv, k)
    if win is None:
        return None, None, n_struct
    return win, gp.picks, n_struct


def _greedy_run(k: int, s: int, cfg: SieveConfig, ps, pi_k, x_start: int) -> SieveRun:
    """Greedy sieve at a fixed shift, tightening the interval toward the
    achieved diameter (smaller intervals focus the class choices on the
    window that matters, which measurably narrows the result)."""
    x = x_start
    best = None
    for _ in range(4):
        win, picks, n_struct = _greedy_pass(k, s, x, cfg, ps, pi_k)
        while win is None:  # interval too tight for k survivors
            x = int(x * cfg.growth) + 64
            win, picks, n_struct = _greedy_pass(k, s, x, cfg, ps, pi_k)
        t = Tuple(tuple(int(v) for v in win[0]))
        if not is_admissible(t):  # pragma: no cover - checked inside the pass
            raise ArithmeticError("greedy window failed admissibility")
        entries = tuple((int(np.searchsorted(ps, p)) + 1, cls) for p, cls in picks)
        run = SieveRun(t, k=k, s=s, m=n_struct, classes=entries)
        if best is not None and run.diameter >= best.diameter:
            break
        best = run
        tight = best.diameter + max(64, best.diameter // 256)
        if tight >= x:
            break
        x = tight
    return best


def sieve_shifted_greedy(k: int, cfg: SieveConfig | None = None) -> Tuple:
    """Greedy minimally-occupied-class sieve; see SieveConfig."""
    return _shifted_greedy_run(k, cfg).tuple


def _shifted_greedy_run(k: int, cfg: SieveConfig | None = None) -> SieveRun:
    if k < 2:
        raise ValueError("k must be >= 2")
    cfg = cfg or SieveConfig(method="shifted-greedy")
    ps, pi_k = _primes_with_index(k)
    logk = math.log(max(k, 3))
    x_hint = int(k * (logk + 1.0)) + 64
    if cfg.shift != "search":
        return _greedy_run(k, int(cfg.shift), cfg, ps, pi_k, x_hint)
    seed = _schinzel_run(k, k, ps, pi_k, cfg.growth, x_hint)
    scored, stride = _shift_candidates(k, cfg, ps, pi_k, seed.m, x_hint)
    seeds = [s for _, s in scored] + [0, k, int((k - k / logk) / 2)]
    best = None
    for s in dict.fromkeys(seeds):
        run = _greedy_run(k, s, cfg, ps, pi_k, x_hint)
        if best is None or run.diameter < best.diameter:
            best = run
    fine = max(1, stride // 4)
    for s in (best.s - fine, best.s + fine):
        run = _greedy_run(k, s, cfg, ps, pi_k, x_hint)
        if run.diameter < best.diameter:
            best = run
    return best


# ---------------------------------------------------------------------------
# residue-class sieve files
# ---------------------------------------------------------------------------


def write_residue_sieve(path, run: SieveRun) -> None:
    """Header 'k s d m', then 'n_i r_i' lines (or 'n_i' for residue 0).

    Applying the file reproduces the tuple: sieving [s, s+d] of odd values,
    multiples of p_n for 1 < n <= m, and class r_i mod p_{n_i}.
    """
    t = run.tuple
    with open(path, "w") as fh:
        fh.write(f"{run.k} {t.offsets[0]} {t.diameter} {run.m}\n")
        for n_i, r_i in run.classes:
            if r_i == 0:
                fh.write(f"{n_i}\n")
            else:
                fh.write(f"{n_i} {r_i}\n")


def apply_residue_sieve(path) -> Tuple:
    """Reconstruct and verify the tuple described by a residue sieve file."""
    with open(path) as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    k, s, d, m = (int(v) for v in lines[0].split())
    entries = []
    for ln in lines[1:]:
        parts = ln.split()
        entries.append((int(parts[0]), int(parts[1]) if len(parts) > 1 else 0))
    ps = primes_upto(nth_prime_bound(max([m] + [n for n, _ in entries] + [2]) + 10))
    mask = _structural_mask(s, d + 1, ps[1:m])
    for n_i, r_i in entries:
        p = int(ps[n_i - 1])
        start = (r_i - s) % p
        mask[start::p] = False
    surv = np.flatnonzero(mask).astype(np.int64) + s
    if len(surv) != k:
        raise ValueError(f"sieve file yields {len(surv)} survivors, expected {k}")
    t = Tuple(tuple(int(v) for v in surv))
    if not is_admissible(t):
        raise ValueError("sieve file survivors are not admissible")
    return t


def find_tuple(k: int, cfg: SieveConfig) -> Tuple:
    """Dispatch on cfg.method."""
    if cfg.method == "k-primes-past-k":
        return sieve_k_primes_past_k(k)
    if cfg.method == "eratosthenes":
        return sieve_eratosthenes(k)
    if cfg.method == "hensley-richards":
        return sieve_hensley_richards(k)
    if cfg.method == "shifted-schinzel":
        return sieve_shifted_schinzel(k, cfg)
    return sieve_shifted_greedy(k, cfg)

"""Prime generation utilities shared by the tuple sieves."""

from __future__ import annotations

import math

import numpy as np


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (empty for limit < 2)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def nth_prime_bound(n: int) -> int:
    """Upper bound for the n-th prime (1-indexed: p_1 = 2)."""
    if n < 6:
        return 13
    x = float(n)
    return int(x * (math.log(x) + math.log(math.log(x)))) + 1


def first_n_primes(n: int) -> np.ndarray:
    """The first n primes p_1, ..., p_n."""
    if n <= 0:
        return np.array([], dtype=np.int64)
    bound = nth_prime_bound(n)
    ps = primes_upto(bound)
    while len(ps) < n:  # bound is proven for n >= 6; loop is a safety net
        bound *= 2
        ps = primes_upto(bound)
    return ps[:n]


def prime_count(x: int) -> int:
    """pi(x): number of primes <= x."""
    return int(len(primes_upto(x)))

"""
Description: Small numeric helpers shared by the geometry modules: unit-ball volumes kappa_j,
             binomial and multinomial coefficients, compensated (Kahan) accumulation and
             seeded random generators.
Date created: October 19th, 2026
Date last modified: October 19th, 2026
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from config import RNG_ALGORITHM


def log_kappa(j):
    """log of kappa_j, finite for every j >= 0."""
    if j < 0:
        raise ValueError(f"kappa needs j >= 0, got {j}")
    return 0.5 * j * math.log(math.pi) - float(gammaln(0.5 * j + 1.0))


def kappa(j):
    """
    Desc: Volume of the j-dimensional unit ball, pi^(j/2) / Gamma(j/2 + 1).
    Parameters:
        j (int): Dimension, j >= 0.
    returns:
    (float): kappa_j.
    """
    return math.exp(log_kappa(j))


def log_binom(n, k):
    """log binom(n, k) through log-Gamma, usable far beyond float range of the coefficient."""
    if k < 0 or k > n:
        raise ValueError(f"log_binom needs 0 <= k <= n, got n={n}, k={k}")
    return float(gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))


@dataclass(frozen=True)
class KappaTable:
    """kappa_0, ..., kappa_n_max computed once; larger indices fall back to kappa()."""

    n_max: int
    values: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(kappa(j) for j in range(self.n_max + 1)))

    def __getitem__(self, j):
        if 0 <= j <= self.n_max:
            return self.values[j]
        return kappa(j)


def binom(n, k):
    """Binomial coefficient as a float (0 outside 0 <= k <= n)."""
    if k < 0 or k > n:
        return 0.0
    return float(math.comb(n, k))


def multinomial(parts):
    """
    Desc: Multinomial coefficient (sum parts)! / prod(part!).
    Parameters:
        parts (iterable of int): Nonnegative parts; zeros are allowed and ignored.
    returns:
    (float): The coefficient.
    """
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError(f"multinomial parts must be nonnegative, got {parts}")
    total = 0
    value = 1
    for p in parts:
        total += p
        value *= math.comb(total, p)
    return float(value)


class KahanAccumulator:
    """Compensated running sum; adding the same values in the same order is bit-reproducible."""

    def __init__(self):
        self.total = 0.0
        self.compensation = 0.0

    def add(self, term):
        y = float(term) - self.compensation
        t = self.total + y
        self.compensation = (t - self.total) - y
        self.total = t

    def extend(self, terms):
        for term in terms:
            self.add(term)
        return self

    @property
    def value(self):
        return self.total


def kahan_sum(terms):
    """Kahan-compensated sum of an iterable of floats."""
    return KahanAccumulator().extend(terms).value


def chunked(iterable, size):
    """
    Desc: Splits an iterable into consecutive lists of at most `size` items, in order.
    Parameters:
        iterable (iterable): Source items.
        size (int): Chunk length.
    returns:
    (generator): Lists of items.
    """
    iterator = iter(iterable)
    while True:
        chunk = list(itertools.islice(iterator, size))
        if not chunk:
            return
        yield chunk


def make_rng(seed):
    """Seeded numpy Generator using the fixed, named bit generator (PCG64)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed, count):
    """
    Desc: Derives `count` independent substreams from one seed, one per work index, so that
          splitting a Monte Carlo run across workers does not change its result.
    Parameters:
        seed (int): Root seed.
        count (int): Number of substreams.
    returns:
    (list): numpy Generators.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def rng_label(seed):
    """The seed and generator name recorded in every Monte Carlo report."""
    return {"seed": seed, "algorithm": RNG_ALGORITHM}

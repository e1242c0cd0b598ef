"""Independent oracles and data generators shared by the test modules."""

from fractions import Fraction

import numpy as np


def exact_moments(xs):
    """(n, mean, m2) in exact rational arithmetic."""
    fx = [Fraction(float(x)) for x in xs]
    n = len(fx)
    if n == 0:
        return 0, Fraction(0), Fraction(0)
    mu = sum(fx, Fraction(0)) / n
    return n, mu, sum(((x - mu) ** 2 for x in fx), Fraction(0))


def exact_pvariance(xs) -> Fraction:
    n, _, m2 = exact_moments(xs)
    return m2 / n


def random_dataset(rng: np.random.Generator, n_min=2, n_max=1000, adversarial_share=0.2):
    """Uniform data in [-1e6, 1e6], or occasionally a huge offset with tiny spread."""
    n = int(rng.integers(n_min, n_max + 1))
    if rng.random() < adversarial_share:
        centre = rng.uniform(-1e6, 1e6)
        return centre + 1e-3 * rng.standard_normal(n)
    lo, hi = sorted(rng.uniform(-1e6, 1e6, size=2))
    kind = rng.integers(3)
    if kind == 0:
        return rng.uniform(lo, hi, n)
    if kind == 1:
        return rng.uniform(-1e6, 1e6, n)
    # coarse values produce ties and constant stretches
    return rng.integers(-5, 6, n).astype(float) * rng.uniform(0.1, 1e3)


def close(a, b, rel, abs_=0.0) -> bool:
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_)

"""Seedable random variate generation for every distribution the samplers need.

Conventions used everywhere in this package:

* Gamma draws are parameterized by shape and rate, so the mean is shape/rate.
  This matches the precision-scale algebra of the volatility filter, where the
  posterior mean of a precision is shape/rate.
* Inverse-gamma draws are shape and scale (mean = scale/(shape - 1)); the
  conversion happens inside :func:`sample_inverse_gamma`, never at call sites.
* A gamma shape of exactly zero denotes the point mass at zero.  It shows up
  in the backward volatility recursion when the discount factor reaches one,
  and returning 0.0 keeps that recursion well defined.

All functions accept scalars or arrays for the distribution parameters and
broadcast like numpy.  Given the same (seed, stream_id) and the same call
sequence, draws are reproducible bit for bit; distinct stream ids give
statistically independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = [
    "RngStream",
    "sample_gamma",
    "sample_normal",
    "sample_beta",
    "sample_inverse_gamma",
    "sample_bernoulli",
    "log_normal_density",
]

LOG_TWO_PI = math.log(2.0 * math.pi)

_MAX_UINT64 = 2**64

# Smallest positive gamma draw we accept before inverting; draws below this
# would overflow to inf on the inverse-gamma side.
_GAMMA_FLOOR = 1e-300


@dataclass
class RngStream:
    """One independently seeded stream of random draws (one per chain).

    Identical (seed, stream_id) always reproduce the same draw sequence.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not isinstance(value, (int, np.integer)):
                raise ParameterError(f"{name} must be an integer, got {type(value).__name__}")
            if not 0 <= int(value) < _MAX_UINT64:
                raise ParameterError(f"{name} must fit in an unsigned 64-bit integer, got {value}")
        root = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.default_rng(root)


def _as_param(name: str, value, *, positive: bool = False, nonnegative: bool = False) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} must be finite")
    if positive and not np.all(arr > 0.0):
        raise ParameterError(f"{name} must be > 0")
    if nonnegative and not np.all(arr >= 0.0):
        raise ParameterError(f"{name} must be >= 0")
    return arr


def _scalar(shape_like: np.ndarray, *rest: np.ndarray, size) -> bool:
    return size is None and shape_like.ndim == 0 and all(r.ndim == 0 for r in rest)


def sample_gamma(shape, rate, rng: RngStream, size=None):
    """Draw from Gamma(shape, rate); mean shape/rate.

    Shape may be exactly zero (point mass at zero, see module notes); any
    negative shape or non-positive rate raises :class:`ParameterError`.
    Valid for all positive shapes including shape < 1.
    """
    shape_arr = _as_param("shape", shape, nonnegative=True)
    rate_arr = _as_param("rate", rate, positive=True)
    if _scalar(shape_arr, rate_arr, size=size):
        if shape_arr == 0.0:
            return 0.0
        return float(rng.generator.gamma(float(shape_arr), 1.0 / float(rate_arr)))
    zero = shape_arr == 0.0
    draws = rng.generator.gamma(np.where(zero, 1.0, shape_arr), 1.0 / rate_arr, size=size)
    if np.any(zero):
        draws = np.where(zero, 0.0, draws)
    return draws


def sample_normal(mean, variance, rng: RngStream, size=None):
    """Draw from N(mean, variance); variance 0 returns the mean exactly."""
    mean_arr = _as_param("mean", mean)
    var_arr = _as_param("variance", variance, nonnegative=True)
    if _scalar(mean_arr, var_arr, size=size):
        return float(rng.generator.normal(float(mean_arr), math.sqrt(float(var_arr))))
    return rng.generator.normal(mean_arr, np.sqrt(var_arr), size=size)


def sample_beta(a, b, rng: RngStream, size=None):
    """Draw from Beta(a, b); mean a/(a+b)."""
    a_arr = _as_param("a", a, positive=True)
    b_arr = _as_param("b", b, positive=True)
    if _scalar(a_arr, b_arr, size=size):
        return float(rng.generator.beta(float(a_arr), float(b_arr)))
    return rng.generator.beta(a_arr, b_arr, size=size)


def sample_inverse_gamma(shape, scale, rng: RngStream, size=None):
    """Draw from InverseGamma(shape, scale); mean scale/(shape - 1) for shape > 1."""
    shape_arr = _as_param("shape", shape, positive=True)
    scale_arr = _as_param("scale", scale, positive=True)
    if _scalar(shape_arr, scale_arr, size=size):
        g = rng.generator.gamma(float(shape_arr), 1.0 / float(scale_arr))
        return float(1.0 / max(g, _GAMMA_FLOOR))
    g = rng.generator.gamma(shape_arr, 1.0 / scale_arr, size=size)
    return 1.0 / np.maximum(g, _GAMMA_FLOOR)


def sample_bernoulli(p, rng: RngStream, size=None):
    """Draw 0/1 with success probability p; p=0 and p=1 are exact."""
    p_arr = _as_param("p", p)
    if np.any(p_arr < 0.0) or np.any(p_arr > 1.0):
        raise ParameterError("p must lie in [0, 1]")
    if _scalar(p_arr, size=size):
        return int(rng.generator.random() < float(p_arr))
    shape = size if size is not None else p_arr.shape
    u = rng.generator.random(shape)
    return (u < p_arr).astype(np.int64)


def log_normal_density(y, mean, variance):
    """Exact log of the N(mean, variance) density at y; variance must be > 0."""
    y_arr = np.asarray(y, dtype=float)
    mean_arr = np.asarray(mean, dtype=float)
    var_arr = _as_param("variance", variance, positive=True)
    out = -0.5 * (LOG_TWO_PI + np.log(var_arr) + (y_arr - mean_arr) ** 2 / var_arr)
    if out.ndim == 0:
        return float(out)
    return out

"""Exact block sampling of the return-precision path.

Conditional on the mean, jumps and mixture weights, the precision path
lambda_1..lambda_n is a conjugate gamma state-space process governed by a
discount factor omega.  Filtering updates the gamma parameters as

    a_t = omega * a_{t-1} + 1/2
    b_t = omega * b_{t-1} + mixture_t * (y_t - mu - J_t)^2 / 2

and an exact draw from the joint smoothed distribution is obtained backwards:
lambda_n ~ Gamma(a_n, b_n), then for t = n-1 .. 1

    lambda_t = omega * lambda_{t+1} + eta_t,   eta_t ~ Gamma((1-omega) a_t, b_t).

Both first-order recursions run through scipy.signal.lfilter so that chains
over long series stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import ParameterError, SizeError
from .model import ModelConfig, ReturnsSeries
from .rng import RngStream, sample_gamma

__all__ = ["FilterState", "forward_filter", "backward_sample"]

# Rate floor: keeps Gamma rates positive when residuals vanish for long
# stretches and omega**t * b0 underflows.
_B_FLOOR = 1e-300


@dataclass
class FilterState:
    """Filtering parameters; index 0 holds the initial (a0, b0)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.a.ndim != 1 or self.b.ndim != 1 or self.a.size != self.b.size:
            raise SizeError("a and b must be one-dimensional and equally long")
        if self.a.size < 2:
            raise SizeError("filter state needs the initial entry plus at least one step")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ParameterError("filter parameters must be finite")
        if not (np.all(self.a > 0) and np.all(self.b > 0)):
            raise ParameterError("filter parameters must be > 0")

    @property
    def n(self) -> int:
        return int(self.a.size - 1)


def _series_values(y) -> np.ndarray:
    if isinstance(y, ReturnsSeries):
        return y.returns
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise SizeError(f"returns must be one-dimensional, got shape {arr.shape}")
    return arr


def _discount_recursion(increments: np.ndarray, omega: float, start: float) -> np.ndarray:
    """x_t = omega * x_{t-1} + increments_t with x_0 = start; returns x_1..x_n."""
    out, _ = lfilter([1.0], [1.0, -omega], increments, zi=np.array([omega * start]))
    return out


def forward_filter(y, mu: float, jumps, mixture, cfg: ModelConfig) -> FilterState:
    """Run the precision filter over the whole series.

    Deterministic: identical inputs give an identical FilterState.
    """
    y_arr = _series_values(y)
    n = y_arr.size
    jumps_arr = np.asarray(jumps, dtype=float)
    mix_arr = np.asarray(mixture, dtype=float)
    if jumps_arr.shape != (n,) or mix_arr.shape != (n,):
        raise SizeError(
            f"jumps {jumps_arr.shape} and mixture {mix_arr.shape} must both have shape ({n},)"
        )
    if not np.isfinite(mu):
        raise ParameterError(f"mu must be finite, got {mu}")
    if not np.all(mix_arr > 0):
        raise ParameterError("mixture entries must be > 0")

    resid = y_arr - mu - jumps_arr
    omega = cfg.omega
    a = np.empty(n + 1, dtype=float)
    b = np.empty(n + 1, dtype=float)
    a[0] = cfg.a0
    b[0] = cfg.b0
    a[1:] = _discount_recursion(np.full(n, 0.5), omega, cfg.a0)
    b[1:] = _discount_recursion(0.5 * mix_arr * resid * resid, omega, cfg.b0)
    np.maximum(b, _B_FLOOR, out=b)
    return FilterState(a=a, b=b)


def backward_sample(fs: FilterState, cfg: ModelConfig, rng: RngStream) -> np.ndarray:
    """Draw the full precision path from its joint smoothed distribution.

    The terminal point comes from Gamma(a_n, b_n); earlier points add
    independent Gamma((1-omega) a_t, b_t) innovations to the discounted
    successor.  With omega = 1 the innovation shapes are zero and the path
    is constant, which :func:`jumpvol.rng.sample_gamma` handles exactly.
    """
    omega = cfg.omega
    n = fs.n
    lam_n = sample_gamma(fs.a[n], fs.b[n], rng)
    if lam_n <= 0.0:
        # Underflow guard for extreme shapes; keeps the path positive.
        lam_n = _B_FLOOR
    if n == 1:
        return np.array([lam_n], dtype=float)

    shapes = (1.0 - omega) * fs.a[1:n]
    etas = sample_gamma(shapes, fs.b[1:n], rng)
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    # lambda_t = omega * lambda_{t+1} + eta_t runs forward after reversal.
    rev = _discount_recursion(etas[::-1], omega, lam_n)
    lam = np.empty(n, dtype=float)
    lam[: n - 1] = rev[::-1]
    lam[n - 1] = lam_n
    np.maximum(lam, _B_FLOOR, out=lam)
    return lam

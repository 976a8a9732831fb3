"""Domain types for data, configuration, parameters and latent paths.

The observation model for a log-return series y_1..y_n (in percent, i.e.
100 * diff(log price)) is

    y_t = mu + J_t + e_t,        e_t | gamma_t, lambda_t ~ N(0, 1/(gamma_t * lambda_t))
    J_t = xi_t * N_t,            xi_t ~ N(jump_mean, jump_var),  P(N_t = 1) = jump_prob
    gamma_t ~ Gamma(nu/2, nu/2)  iid, making the innovations Student-t with nu dof

and lambda_t follows a discount-factor gamma-beta evolution controlled by
omega in (0, 1].  Volatility is stored internally on the precision scale
(lambda); everything reported to users is 1/lambda (variance scale) or
lambda**-0.5 (standard-deviation scale).

Jump size and indicator are stored at the same index as the return they
affect, so xi[t] * jump_ind[t] is the shock added to y[t].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError, SizeError

__all__ = [
    "ReturnsSeries",
    "Priors",
    "ModelConfig",
    "StaticParams",
    "LatentPath",
    "LatentSummary",
    "ChainMeta",
    "ChainOutput",
    "prices_to_returns",
    "returns_to_prices",
    "default_config",
]


def _finite_1d(name: str, values, min_len: int = 0) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise SizeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise SizeError(f"{name} needs at least {min_len} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} must contain only finite values")
    return arr


@dataclass
class ReturnsSeries:
    """Ordered log-returns (x100%) with optional per-observation labels.

    Fits require at least two observations; a single-return series can still
    be constructed so that price-to-return transforms of two prices work.
    """

    returns: np.ndarray
    timestamps: Optional[Sequence[str]] = None

    def __post_init__(self) -> None:
        self.returns = _finite_1d("returns", self.returns, min_len=1)
        self.returns.flags.writeable = False
        if self.timestamps is not None:
            self.timestamps = list(self.timestamps)
            if len(self.timestamps) != self.returns.size:
                raise SizeError(
                    f"timestamps length {len(self.timestamps)} does not match "
                    f"returns length {self.returns.size}"
                )

    def __len__(self) -> int:
        return int(self.returns.size)


@dataclass(frozen=True)
class Priors:
    """Hyperparameters of every prior used by the samplers.

    mu ~ N(mu_mean, mu_var); jump_mean ~ N(jump_mean_mean, jump_mean_var);
    jump_var ~ InverseGamma(jump_var_shape, jump_var_scale);
    jump_prob ~ Beta(jump_prob_a, jump_prob_b).
    """

    mu_mean: float = 0.0
    mu_var: float = 100.0
    jump_mean_mean: float = 0.0
    jump_mean_var: float = 100.0
    jump_var_shape: float = 0.1
    jump_var_scale: float = 0.1
    jump_prob_a: float = 2.0
    jump_prob_b: float = 40.0

    def __post_init__(self) -> None:
        for name in ("mu_var", "jump_mean_var", "jump_var_shape", "jump_var_scale",
                     "jump_prob_a", "jump_prob_b"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"prior field {name} must be finite and > 0, got {value}")
        for name in ("mu_mean", "jump_mean_mean"):
            if not np.isfinite(getattr(self, name)):
                raise ParameterError(f"prior field {name} must be finite")


@dataclass(frozen=True)
class ModelConfig:
    """Fixed model constants plus all prior hyperparameters.

    nu             mixture degrees of freedom (innovations are t_nu)
    omega          discount factor in (0, 1] for the precision evolution
    jump_threshold posterior-probability cutoff above which an observation
                   is declared a jump (strict inequality)
    a0, b0         initial shape/rate of the precision filter
    jumps_enabled  True fits the jump model; False fits the no-jump reduction
    """

    nu: float = 30.0
    omega: float = 0.9
    jump_threshold: float = 0.7
    a0: float = 0.1
    b0: float = 0.1
    jumps_enabled: bool = True
    priors: Priors = field(default_factory=Priors)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.nu) and self.nu > 0):
            raise ParameterError(f"nu must be finite and > 0, got {self.nu}")
        if not (np.isfinite(self.omega) and 0.0 < self.omega <= 1.0):
            raise ParameterError(f"omega must lie in (0, 1], got {self.omega}")
        if not (np.isfinite(self.jump_threshold) and 0.0 < self.jump_threshold < 1.0):
            raise ParameterError(f"jump_threshold must lie in (0, 1), got {self.jump_threshold}")
        for name in ("a0", "b0"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value}")
        if not isinstance(self.priors, Priors):
            raise ParameterError("priors must be a Priors instance")


def default_config() -> ModelConfig:
    """Configuration used for the reference daily equity-index fits.

    nu=30, omega=0.9, threshold 0.7, a0=b0=0.1, mu ~ N(0,100),
    jump_mean ~ N(0,100), jump_var ~ InverseGamma(0.1,0.1),
    jump_prob ~ Beta(2,40), jumps enabled.
    """
    return ModelConfig()


@dataclass(frozen=True)
class StaticParams:
    """One draw of the static parameters."""

    mu: float
    jump_prob: float
    jump_mean: float
    jump_var: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.mu):
            raise ParameterError(f"mu must be finite, got {self.mu}")
        if not (np.isfinite(self.jump_prob) and 0.0 < self.jump_prob < 1.0):
            raise ParameterError(f"jump_prob must lie in (0, 1), got {self.jump_prob}")
        if not np.isfinite(self.jump_mean):
            raise ParameterError(f"jump_mean must be finite, got {self.jump_mean}")
        if not (np.isfinite(self.jump_var) and self.jump_var > 0):
            raise ParameterError(f"jump_var must be finite and > 0, got {self.jump_var}")


@dataclass
class LatentPath:
    """Per-time-step draws of the latent quantities.

    precision = lambda path (inverse conditional variance scale),
    mixture = per-observation Student-t mixing weights,
    jump_size = xi path, jump_ind = 0/1 indicator path.
    The realized jump at t is jump_size[t] * jump_ind[t].
    """

    precision: np.ndarray
    mixture: np.ndarray
    jump_size: np.ndarray
    jump_ind: np.ndarray

    def __post_init__(self) -> None:
        self.precision = _finite_1d("precision", self.precision, min_len=1)
        self.mixture = _finite_1d("mixture", self.mixture, min_len=1)
        self.jump_size = _finite_1d("jump_size", self.jump_size, min_len=1)
        ind = np.array(self.jump_ind)
        if ind.ndim != 1:
            raise SizeError(f"jump_ind must be one-dimensional, got shape {ind.shape}")
        if not np.all((ind == 0) | (ind == 1)):
            raise ParameterError("jump_ind entries must be 0 or 1")
        self.jump_ind = ind.astype(np.int64)
        n = self.precision.size
        for name in ("mixture", "jump_size", "jump_ind"):
            if getattr(self, name).size != n:
                raise SizeError(f"{name} length {getattr(self, name).size} != precision length {n}")
        if not np.all(self.precision > 0):
            raise ParameterError("precision entries must be > 0")
        if not np.all(self.mixture > 0):
            raise ParameterError("mixture entries must be > 0")

    @property
    def jumps(self) -> np.ndarray:
        return self.jump_size * self.jump_ind

    def __len__(self) -> int:
        return int(self.precision.size)


@dataclass
class LatentSummary:
    """Per-time-step posterior summaries accumulated over retained draws.

    var_* columns summarize 1/lambda (variance scale), sd_* columns
    lambda**-0.5.  Interval columns are empirical 2.5%/97.5% quantiles when
    interval_method == "quantile"; for runs whose draw matrix exceeded the
    memory budget they fall back to mean +- 1.96 sd ("normal").
    """

    var_mean: np.ndarray
    var_lo95: np.ndarray
    var_hi95: np.ndarray
    sd_mean: np.ndarray
    sd_lo95: np.ndarray
    sd_hi95: np.ndarray
    mean_jump: np.ndarray
    prob_jump: np.ndarray
    freq_jump: np.ndarray
    mean_precision: np.ndarray
    mean_mixture: np.ndarray
    interval_method: str = "quantile"

    def __len__(self) -> int:
        return int(self.var_mean.size)


@dataclass(frozen=True)
class ChainMeta:
    """Everything needed to reproduce one chain exactly."""

    seed: int
    chain_id: int
    iterations: int
    burn_in: int
    thin_lag: int
    n_obs: int
    jumps_enabled: bool


@dataclass
class ChainOutput:
    """Thinned post-burn-in draws of one chain.

    Static-parameter draws are stored as flat arrays (one entry per retained
    draw); jump_prob/jump_mean/jump_var are None when the chain was run with
    jumps disabled.  log_lik holds the per-draw conditional log-likelihood.
    Full latent paths are kept only when the run requested them.
    """

    mu: np.ndarray
    jump_prob: Optional[np.ndarray]
    jump_mean: Optional[np.ndarray]
    jump_var: Optional[np.ndarray]
    log_lik: np.ndarray
    latent: LatentSummary
    meta: ChainMeta
    latent_draws: Optional[list] = None

    @property
    def n_draws(self) -> int:
        return int(self.mu.size)

    @property
    def static_names(self) -> list[str]:
        if self.jump_prob is None:
            return ["mu"]
        return ["mu", "jump_prob", "jump_mean", "jump_var"]

    def static_array(self, name: str) -> np.ndarray:
        if name not in self.static_names:
            raise KeyError(f"no static parameter named {name!r} in this chain")
        return getattr(self, name)

    def iter_draws(self):
        """Yield (StaticParams, LatentPath) pairs; needs latent_draws retained.

        For no-jump chains the jump fields of StaticParams are filled with
        neutral placeholders (the model has no such parameters).
        """
        if self.latent_draws is None:
            raise ParameterError("latent draws were not retained for this chain")
        for i, path in enumerate(self.latent_draws):
            params = StaticParams(
                mu=float(self.mu[i]),
                jump_prob=float(self.jump_prob[i]) if self.jump_prob is not None else 0.5,
                jump_mean=float(self.jump_mean[i]) if self.jump_mean is not None else 0.0,
                jump_var=float(self.jump_var[i]) if self.jump_var is not None else 1.0,
            )
            yield params, path


def prices_to_returns(prices, timestamps: Optional[Sequence[str]] = None) -> ReturnsSeries:
    """Convert a positive price series to log-returns x100%.

    returns[t] = 100 * (ln prices[t+1] - ln prices[t]); needs at least two
    prices.  When timestamps are given, each return keeps the label of the
    later of its two prices.
    """
    arr = _finite_1d("prices", prices, min_len=2)
    if not np.all(arr > 0):
        raise ParameterError("prices must all be > 0")
    rets = 100.0 * np.diff(np.log(arr))
    ts = None
    if timestamps is not None:
        ts = list(timestamps)
        if len(ts) != arr.size:
            raise SizeError(f"timestamps length {len(ts)} does not match prices length {arr.size}")
        ts = ts[1:]
    return ReturnsSeries(rets, ts)


def returns_to_prices(series, initial_price: float) -> np.ndarray:
    """Invert :func:`prices_to_returns` given the first price."""
    if not (np.isfinite(initial_price) and initial_price > 0):
        raise ParameterError(f"initial_price must be finite and > 0, got {initial_price}")
    rets = series.returns if isinstance(series, ReturnsSeries) else _finite_1d("returns", series, 1)
    prices = np.empty(rets.size + 1, dtype=float)
    prices[0] = initial_price
    prices[1:] = initial_price * np.exp(np.cumsum(rets) / 100.0)
    return prices

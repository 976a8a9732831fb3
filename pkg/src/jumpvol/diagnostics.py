"""Model comparison and chain-quality statistics.

Model fit is scored with the conditional likelihood

    log p(y | params) = sum_t log phi(y_t; mu + J_t, 1/(mixture_t * precision_t))

which conditions on the latent paths.  From the per-draw deviance
D = -2 log p(y | params) the report derives

    BIC = -2 log Lhat + k log n        (Lhat = best per-draw likelihood)
    pD  = mean(D) - D(at posterior mean)
    DIC = D(at posterior mean) + 2 pD

where "posterior mean" plugs in the element-wise posterior means of the
static parameters and latent paths.  Chain quality uses an
autocorrelation-based effective sample size (Geyer initial positive
sequence) and the split-chain potential scale reduction factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError, SizeError
from .model import ChainOutput, LatentSummary, ReturnsSeries
from .rng import log_normal_density

__all__ = [
    "conditional_log_lik",
    "compute_bic",
    "compute_dic",
    "coverage",
    "ess",
    "psrf",
    "ParamSummary",
    "DiagnosticsReport",
    "merge_latent",
    "build_report",
    "DEFAULT_K_JUMPS",
    "DEFAULT_K_NO_JUMPS",
]

# Parameter counts charged by the information criteria, configurable per call.
DEFAULT_K_JUMPS = 8
DEFAULT_K_NO_JUMPS = 4


def conditional_log_lik(y, mu: float, jumps, precision, mixture) -> float:
    """Log-likelihood of the returns given mean, jumps and both latent paths."""
    y_arr = y.returns if isinstance(y, ReturnsSeries) else np.asarray(y, dtype=float)
    jumps_arr = np.asarray(jumps, dtype=float)
    prec_arr = np.asarray(precision, dtype=float)
    mix_arr = np.asarray(mixture, dtype=float)
    if not (y_arr.shape == jumps_arr.shape == prec_arr.shape == mix_arr.shape):
        raise SizeError("y, jumps, precision and mixture must share one shape")
    weights = mix_arr * prec_arr
    if not np.all(weights > 0):
        raise ParameterError("mixture * precision must be > 0 everywhere")
    return float(np.sum(log_normal_density(y_arr, mu + jumps_arr, 1.0 / weights)))


def compute_bic(log_lik_hat: float, k: int, n: int) -> float:
    """-2 log Lhat + k log n."""
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ParameterError(f"k must be a positive integer, got {k}")
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ParameterError(f"n must be a positive integer, got {n}")
    if not np.isfinite(log_lik_hat):
        raise ParameterError(f"log_lik_hat must be finite, got {log_lik_hat}")
    return -2.0 * log_lik_hat + k * math.log(n)


def compute_dic(deviance_draws, deviance_at_mean: float) -> tuple[float, float]:
    """Return (dic, p_d) from per-draw deviances and the plug-in deviance."""
    draws = np.asarray(deviance_draws, dtype=float)
    if draws.size == 0:
        raise SizeError("deviance_draws must be non-empty")
    if not np.isfinite(deviance_at_mean):
        raise ParameterError(f"deviance_at_mean must be finite, got {deviance_at_mean}")
    p_d = float(np.mean(draws)) - deviance_at_mean
    return deviance_at_mean + 2.0 * p_d, p_d


def coverage(true_path, lower, upper) -> float:
    """Fraction of points with lower[t] <= true[t] <= upper[t]."""
    true_arr = np.asarray(true_path, dtype=float)
    lo_arr = np.asarray(lower, dtype=float)
    hi_arr = np.asarray(upper, dtype=float)
    if not (true_arr.shape == lo_arr.shape == hi_arr.shape):
        raise SizeError("true, lower and upper must share one shape")
    if true_arr.size == 0:
        raise SizeError("coverage needs at least one point")
    inside = (lo_arr <= true_arr) & (true_arr <= hi_arr)
    return float(np.mean(inside))


def ess(trace) -> float:
    """Effective sample size via Geyer's initial positive sequence.

    Autocorrelations are estimated by FFT, summed in lag pairs while the
    pair sums stay positive.  An iid trace comes back near its length
    (sampling noise can push it slightly above); a constant trace returns
    its length by convention.
    """
    x = np.asarray(trace, dtype=float)
    if x.ndim != 1:
        raise SizeError(f"trace must be one-dimensional, got shape {x.shape}")
    n = x.size
    if n < 4 or np.all(x == x[0]):
        return float(n)
    x = x - np.mean(x)
    var0 = float(np.dot(x, x)) / n
    if var0 == 0.0:
        return float(n)
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n].real / n
    rho = acov / acov[0]

    tau = 1.0  # rho_0
    for m in range(1, (n - 1) // 2 + 1):
        pair = rho[2 * m - 1] + rho[2 * m]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
    return n / tau


def psrf(traces: Sequence) -> float:
    """Split-chain potential scale reduction factor.

    Each trace is split into halves, giving 2m chains; values close to one
    indicate the chains sample the same distribution.
    """
    arrays = [np.asarray(t, dtype=float) for t in traces]
    if len(arrays) == 0:
        raise SizeError("psrf needs at least one trace")
    shortest = min(a.size for a in arrays)
    if shortest < 4:
        raise SizeError("psrf needs traces of length >= 4")
    half = shortest // 2
    chains = []
    for a in arrays:
        a = a[: 2 * half]
        chains.append(a[:half])
        chains.append(a[half:])
    stacked = np.stack(chains)
    m, length = stacked.shape
    within = float(np.mean(np.var(stacked, axis=1, ddof=1)))
    if within == 0.0:
        return 1.0
    between = length * float(np.var(np.mean(stacked, axis=1), ddof=1))
    pooled = (length - 1) / length * within + between / length
    return math.sqrt(pooled / within)


@dataclass
class ParamSummary:
    name: str
    mean: float
    sd: float
    mcse: float
    ess: float
    psrf: float


@dataclass
class DiagnosticsReport:
    """Everything the comparison tables and per-series plots need."""

    n_obs: int
    k: int
    log_lik_at_mean: float
    log_lik_max: float
    mean_deviance: float
    deviance_at_mean: float
    p_d: float
    dic: float
    bic: float
    params: list[ParamSummary]
    latent: LatentSummary


def merge_latent(chains: Sequence[ChainOutput]) -> LatentSummary:
    """Average the per-t summaries across chains (equal draw counts)."""
    if len(chains) == 0:
        raise SizeError("merge_latent needs at least one chain")
    if len(chains) == 1:
        return chains[0].latent
    fields = [
        "var_mean", "var_lo95", "var_hi95", "sd_mean", "sd_lo95", "sd_hi95",
        "mean_jump", "prob_jump", "freq_jump", "mean_precision", "mean_mixture",
    ]
    merged = {
        name: np.mean(np.stack([getattr(c.latent, name) for c in chains]), axis=0)
        for name in fields
    }
    methods = {c.latent.interval_method for c in chains}
    merged["interval_method"] = methods.pop() if len(methods) == 1 else "mixed"
    return LatentSummary(**merged)


def build_report(chains: Sequence[ChainOutput], y, k: Optional[int] = None) -> DiagnosticsReport:
    """Assemble the full diagnostics report from one or more chains.

    All chains must come from the same data and configuration.  The default
    parameter count k follows the model variant (jumps enabled or not).
    """
    if len(chains) == 0:
        raise SizeError("build_report needs at least one chain")
    meta = chains[0].meta
    for c in chains[1:]:
        if c.meta.n_obs != meta.n_obs or c.meta.jumps_enabled != meta.jumps_enabled:
            raise ParameterError("chains disagree on data length or model variant")
    y_arr = y.returns if isinstance(y, ReturnsSeries) else np.asarray(y, dtype=float)
    if y_arr.size != meta.n_obs:
        raise SizeError(f"series length {y_arr.size} != chain data length {meta.n_obs}")
    if k is None:
        k = DEFAULT_K_JUMPS if meta.jumps_enabled else DEFAULT_K_NO_JUMPS

    latent = merge_latent(chains)
    log_lik = np.concatenate([c.log_lik for c in chains])
    mu_bar = float(np.mean(np.concatenate([c.mu for c in chains])))
    log_lik_at_mean = conditional_log_lik(
        y_arr, mu_bar, latent.mean_jump, latent.mean_precision, latent.mean_mixture
    )
    deviance_at_mean = -2.0 * log_lik_at_mean
    dic, p_d = compute_dic(-2.0 * log_lik, deviance_at_mean)
    log_lik_max = float(np.max(log_lik))
    bic = compute_bic(log_lik_max, k, meta.n_obs)

    params = []
    for name in chains[0].static_names:
        pooled = np.concatenate([c.static_array(name) for c in chains])
        sd = float(np.std(pooled, ddof=1)) if pooled.size > 1 else 0.0
        total_ess = float(sum(ess(c.static_array(name)) for c in chains))
        params.append(
            ParamSummary(
                name=name,
                mean=float(np.mean(pooled)),
                sd=sd,
                mcse=sd / math.sqrt(total_ess) if total_ess > 0 else 0.0,
                ess=total_ess,
                psrf=psrf([c.static_array(name) for c in chains]),
            )
        )

    return DiagnosticsReport(
        n_obs=meta.n_obs,
        k=int(k),
        log_lik_at_mean=log_lik_at_mean,
        log_lik_max=log_lik_max,
        mean_deviance=float(np.mean(-2.0 * log_lik)),
        deviance_at_mean=deviance_at_mean,
        p_d=p_d,
        dic=dic,
        bic=bic,
        params=params,
        latent=latent,
    )

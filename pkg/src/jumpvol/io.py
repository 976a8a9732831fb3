"""Data ingestion, result persistence and config files.

All floating-point output is printed with 17 significant digits so every
file round-trips to the exact in-memory double.  CSV files use a comma
delimiter, a dot decimal point and LF line endings regardless of platform,
keeping repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .diagnostics import DiagnosticsReport
from .errors import DataFormatError, ParameterError, SizeError
from .gibbs import RunSpec
from .model import ChainOutput, LatentSummary, ModelConfig, Priors, ReturnsSeries, prices_to_returns
from .synthetic import SimConfig, SimOutput

__all__ = [
    "ingest_csv",
    "describe",
    "fmt17",
    "to_json17",
    "read_config_file",
    "write_draws_csv",
    "read_draws_csv",
    "write_latent_csv",
    "read_latent_csv",
    "write_sim_csv",
    "write_sim_params",
    "read_sim_csv",
    "report_payload",
    "write_report_json",
    "read_report_json",
    "FitResult",
]

_MODES = ("prices", "returns")
_VALUE_COLUMNS = {"prices": "price", "returns": "log_return_pct"}

LATENT_COLUMNS = [
    "t",
    "var_mean", "var_lo95", "var_hi95",
    "sd_mean", "sd_lo95", "sd_hi95",
    "mean_jump", "prob_jump", "freq_jump",
    "mean_precision", "mean_mixture",
]

SIM_COLUMNS = ["t", "return", "true_v", "true_jump", "true_N", "true_gamma"]


def fmt17(x: float) -> str:
    """Format a float with 17 significant digits (lossless round trip)."""
    value = float(x)
    if not math.isfinite(value):
        raise ParameterError(f"cannot serialize non-finite value {value}")
    return format(value, ".17g")


def to_json17(obj, indent: int = 0) -> str:
    """Serialize to JSON with sorted keys and 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt17(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise ParameterError(f"JSON keys must be strings, got {key!r}")
            items.append(f"{inner}{json.dumps(key)}: {to_json17(obj[key], indent + 1)}")
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{to_json17(item, indent + 1)}" for item in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise ParameterError(f"cannot serialize object of type {type(obj).__name__} to JSON")


def ingest_csv(path, mode: str) -> ReturnsSeries:
    """Read a returns or price CSV into a ReturnsSeries.

    Expects a UTF-8 file with a header row holding ``timestamp,price``
    (mode "prices") or ``timestamp,log_return_pct`` (mode "returns").
    Parse failures report the offending line number.
    """
    if mode not in _MODES:
        raise ParameterError(f"mode must be one of {_MODES}, got {mode!r}")
    value_col = _VALUE_COLUMNS[mode]
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path} is not valid UTF-8: {exc}") from exc

    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise DataFormatError(f"{path}: file is empty")
    header = [h.strip().lower() for h in rows[0]]
    if "timestamp" not in header:
        raise DataFormatError(f"{path}: line 1: missing required column 'timestamp'")
    if value_col not in header:
        raise DataFormatError(f"{path}: line 1: missing required column '{value_col}'")
    ts_idx = header.index("timestamp")
    val_idx = header.index(value_col)

    timestamps: list[str] = []
    values: list[float] = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(ts_idx, val_idx):
            raise DataFormatError(f"{path}: line {line_no}: expected {len(header)} columns, got {len(row)}")
        cell = row[val_idx].strip()
        try:
            value = float(cell)
        except ValueError:
            raise DataFormatError(
                f"{path}: line {line_no}: non-numeric {value_col} value {cell!r}"
            ) from None
        if not math.isfinite(value):
            raise DataFormatError(f"{path}: line {line_no}: non-finite {value_col} value {cell!r}")
        if mode == "prices" and value <= 0.0:
            raise DataFormatError(f"{path}: line {line_no}: price must be > 0, got {cell}")
        timestamps.append(row[ts_idx].strip())
        values.append(value)

    if len(values) < 2:
        raise DataFormatError(f"{path}: need at least 2 data rows, got {len(values)}")
    if mode == "prices":
        return prices_to_returns(np.array(values), timestamps)
    return ReturnsSeries(np.array(values), timestamps)


def describe(y) -> dict:
    """Descriptive statistics of a return series.

    Variance uses ddof=1; skewness is m3/m2^1.5 and kurtosis the plain
    (non-excess) m4/m2^2, both from central sample moments.
    """
    arr = y.returns if isinstance(y, ReturnsSeries) else np.asarray(y, dtype=float)
    if arr.size < 2:
        raise SizeError("describe needs at least 2 observations")
    centered = arr - np.mean(arr)
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    return {
        "n": int(arr.size),
        "mean": float(np.mean(arr)),
        "variance": float(np.var(arr, ddof=1)),
        "skewness": m3 / m2**1.5 if m2 > 0 else 0.0,
        "kurtosis": m4 / m2**2 if m2 > 0 else 0.0,
        "min": float(np.min(arr)),
        "max": float(np.max(arr)),
    }


def _write_rows(path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_draws_csv(path, chains: Sequence[ChainOutput]) -> None:
    """Write retained static draws of one or more chains.

    Columns: chain, iteration, mu[, jump_prob, jump_mean, jump_var], log_lik.
    Jump columns are omitted for no-jump fits.
    """
    if not chains:
        raise SizeError("write_draws_csv needs at least one chain")
    with_jumps = chains[0].jump_prob is not None
    header = ["chain", "iteration", "mu"]
    if with_jumps:
        header += ["jump_prob", "jump_mean", "jump_var"]
    header.append("log_lik")

    def rows():
        for chain in chains:
            meta = chain.meta
            for i in range(chain.n_draws):
                iteration = meta.burn_in + (i + 1) * meta.thin_lag
                row = [str(meta.chain_id), str(iteration), fmt17(chain.mu[i])]
                if with_jumps:
                    row += [
                        fmt17(chain.jump_prob[i]),
                        fmt17(chain.jump_mean[i]),
                        fmt17(chain.jump_var[i]),
                    ]
                row.append(fmt17(chain.log_lik[i]))
                yield row

    _write_rows(path, header, rows())


def read_draws_csv(path) -> dict:
    """Read a draws file back into arrays keyed by column name."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        data: dict[str, list] = {name: [] for name in header}
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: line {line_no}: expected {len(header)} columns, got {len(row)}"
                )
            for name, cell in zip(header, row):
                data[name].append(cell)
    if "mu" not in data or "log_lik" not in data:
        raise DataFormatError(f"{path}: missing required draw columns 'mu'/'log_lik'")
    out: dict[str, np.ndarray] = {}
    for name, cells in data.items():
        try:
            if name in ("chain", "iteration"):
                out[name] = np.array([int(c) for c in cells], dtype=np.int64)
            else:
                out[name] = np.array([float(c) for c in cells], dtype=float)
        except ValueError:
            raise DataFormatError(f"{path}: non-numeric value in column {name!r}") from None
    return out


def write_latent_csv(path, latent: LatentSummary) -> None:
    """Write the per-t latent summaries (plot-ready)."""
    def rows():
        for t in range(len(latent)):
            yield [str(t + 1)] + [
                fmt17(getattr(latent, name)[t]) for name in LATENT_COLUMNS[1:]
            ]

    _write_rows(path, LATENT_COLUMNS, rows())


def read_latent_csv(path) -> LatentSummary:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        if header != LATENT_COLUMNS:
            raise DataFormatError(f"{path}: unexpected latent summary header {header}")
        columns: list[list[float]] = [[] for _ in header]
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: line {line_no}: expected {len(header)} columns, got {len(row)}"
                )
            for i, cell in enumerate(row):
                try:
                    columns[i].append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: line {line_no}: non-numeric value {cell!r}"
                    ) from None
    arrays = {name: np.array(col) for name, col in zip(header, columns)}
    return LatentSummary(
        var_mean=arrays["var_mean"],
        var_lo95=arrays["var_lo95"],
        var_hi95=arrays["var_hi95"],
        sd_mean=arrays["sd_mean"],
        sd_lo95=arrays["sd_lo95"],
        sd_hi95=arrays["sd_hi95"],
        mean_jump=arrays["mean_jump"],
        prob_jump=arrays["prob_jump"],
        freq_jump=arrays["freq_jump"],
        mean_precision=arrays["mean_precision"],
        mean_mixture=arrays["mean_mixture"],
        interval_method="unknown",
    )


def write_sim_csv(path, sim: SimOutput) -> None:
    """Write a simulated realization with its latent truth."""
    returns = sim.returns.returns

    def rows():
        for t in range(returns.size):
            yield [
                str(t + 1),
                fmt17(returns[t]),
                fmt17(sim.true_variance[t]),
                fmt17(sim.true_jumps[t]),
                str(int(sim.true_jump_times[t])),
                fmt17(sim.true_mixture[t]),
            ]

    _write_rows(path, SIM_COLUMNS, rows())


def write_sim_params(path, sc: SimConfig) -> None:
    """Write the generating parameters next to a simulated dataset."""
    payload = {
        "n": sc.n,
        "mu": sc.mu,
        "jump_prob": sc.jump_prob,
        "jump_mean": sc.jump_mean,
        "jump_sd": sc.jump_sd,
        "nu": sc.nu,
        "delta": sc.delta,
        "theta": sc.theta,
        "kappa": sc.kappa,
        "sigma_v": sc.sigma_v,
        "corr": sc.corr,
        "v0": sc.start_variance,
        "seed": sc.seed,
    }
    Path(path).write_text(to_json17(payload) + "\n", encoding="utf-8")


def read_sim_csv(path) -> dict:
    """Read a simulation CSV back into arrays keyed by column name."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        if header != SIM_COLUMNS:
            raise DataFormatError(f"{path}: unexpected simulation header {header}")
        columns: list[list[float]] = [[] for _ in header]
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: line {line_no}: expected {len(header)} columns, got {len(row)}"
                )
            for i, cell in enumerate(row):
                try:
                    columns[i].append(float(cell))
                except ValueError:
                    raise DataFormatError(
                        f"{path}: line {line_no}: non-numeric value {cell!r}"
                    ) from None
    return {name: np.array(col) for name, col in zip(header, columns)}


def _priors_payload(priors: Priors) -> dict:
    return {
        "mu_mean": priors.mu_mean,
        "mu_var": priors.mu_var,
        "jump_mean_mean": priors.jump_mean_mean,
        "jump_mean_var": priors.jump_mean_var,
        "jump_var_shape": priors.jump_var_shape,
        "jump_var_scale": priors.jump_var_scale,
        "jump_prob_a": priors.jump_prob_a,
        "jump_prob_b": priors.jump_prob_b,
    }


def report_payload(
    report: DiagnosticsReport,
    cfg: Optional[ModelConfig] = None,
    spec: Optional[RunSpec] = None,
    data_stats: Optional[dict] = None,
    files: Optional[dict] = None,
) -> dict:
    """Build the JSON-ready report structure.

    Deliberately contains nothing non-deterministic (no timings, no
    timestamps) so repeated runs produce byte-identical files.
    """
    payload: dict = {
        "diagnostics": {
            "n_obs": report.n_obs,
            "k": report.k,
            "log_lik_at_mean": report.log_lik_at_mean,
            "log_lik_max": report.log_lik_max,
            "mean_deviance": report.mean_deviance,
            "deviance_at_mean": report.deviance_at_mean,
            "p_d": report.p_d,
            "dic": report.dic,
            "bic": report.bic,
            "interval_method": report.latent.interval_method,
        },
        "params": [
            {
                "name": p.name,
                "mean": p.mean,
                "sd": p.sd,
                "mcse": p.mcse,
                "ess": p.ess,
                "psrf": p.psrf,
            }
            for p in report.params
        ],
    }
    if cfg is not None:
        payload["model"] = {
            "nu": cfg.nu,
            "omega": cfg.omega,
            "jump_threshold": cfg.jump_threshold,
            "a0": cfg.a0,
            "b0": cfg.b0,
            "jumps_enabled": cfg.jumps_enabled,
            "priors": _priors_payload(cfg.priors),
        }
    if spec is not None:
        payload["run"] = {
            "iterations": spec.iterations,
            "burn_in": spec.burn_in,
            "thin_lag": spec.thin_lag,
            "n_chains": spec.n_chains,
            "seed": spec.seed,
        }
    if data_stats is not None:
        payload["data"] = data_stats
    if files is not None:
        payload["files"] = files
    return payload


def write_report_json(path, payload: dict) -> None:
    Path(path).write_text(to_json17(payload) + "\n", encoding="utf-8")


def read_report_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc


def read_config_file(path) -> dict[str, str]:
    """Parse a flat ``key = value`` config file.

    Blank lines and '#' comments are ignored.  Values stay strings; the
    CLI coerces them with the same rules as the matching flags.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read config {path}: {exc}") from exc
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataFormatError(f"{path}: line {line_no}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise DataFormatError(f"{path}: line {line_no}: empty key")
        out[key] = value.strip()
    return out


@dataclass
class FitResult:
    """In-memory record of one CLI fit.

    wall_seconds is reported on stderr only and never serialized, keeping
    output files identical across repeated seeded runs.
    """

    cfg: ModelConfig
    spec: RunSpec
    report: DiagnosticsReport
    draws_path: Path
    latent_path: Path
    report_path: Path
    wall_seconds: float

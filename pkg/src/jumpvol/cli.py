"""Command-line interface: fit, simulate, diagnose, summarize.

Settings resolve in deterministic precedence order: explicit flags override
config-file entries, which override built-in defaults.  Output files contain
no timestamps or timings, so a repeated invocation with the same seed is
byte-identical; wall-clock time goes to stderr.

Exit codes: 0 success, 2 usage/configuration error, 3 data error,
4 numerical abort mid-run.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io as jio
from .diagnostics import (
    DEFAULT_K_JUMPS,
    DEFAULT_K_NO_JUMPS,
    build_report,
    compute_bic,
    compute_dic,
    conditional_log_lik,
    coverage,
    ess,
    psrf,
)
from .errors import DataFormatError, JumpvolError, NumericalError, ParameterError, SizeError
from .gibbs import RunSpec, run_multi
from .model import ModelConfig, Priors
from .synthetic import SimConfig, simulate

__all__ = ["main", "build_parser", "run_fit"]

_FIT_DEFAULTS = {
    "mode": "returns",
    "nu": 30.0,
    "omega": 0.9,
    "threshold": 0.7,
    "a0": 0.1,
    "b0": 0.1,
    "iterations": 10000,
    "burn_in": 1000,
    "thin": 1,
    "chains": 1,
    "seed": 0,
    "no_jumps": False,
    "bic_k": None,
    "output_dir": "jumpvol_fit",
    "mu_prior_mean": 0.0,
    "mu_prior_var": 100.0,
    "jump_mean_prior_mean": 0.0,
    "jump_mean_prior_var": 100.0,
    "jump_var_prior_shape": 0.1,
    "jump_var_prior_scale": 0.1,
    "jump_prob_prior_a": 2.0,
    "jump_prob_prior_b": 40.0,
}

_FIT_COERCERS = {
    "mode": str,
    "iterations": int,
    "burn_in": int,
    "thin": int,
    "chains": int,
    "seed": int,
    "bic_k": int,
    "output_dir": str,
}


def _coerce_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"expected a boolean, got {value!r}")


def _resolve(key: str, flag_value, file_cfg: dict[str, str]):
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        raw = file_cfg[key]
        if key == "no_jumps":
            return _coerce_bool(raw)
        coerce = _FIT_COERCERS.get(key, float)
        try:
            return coerce(raw)
        except ValueError:
            raise ParameterError(f"config key {key!r}: cannot parse {raw!r}") from None
    return _FIT_DEFAULTS[key]


def _display(x: float) -> str:
    return format(float(x), ".6g")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpvol",
        description="Stochastic volatility with jumps in returns: fit, simulate, diagnose, summarize.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit the model to a returns or price CSV")
    fit.add_argument("--input", required=True, help="input CSV (timestamp,price or timestamp,log_return_pct)")
    fit.add_argument("--mode", choices=("prices", "returns"), default=None)
    fit.add_argument("--nu", type=float, default=None, help="mixture degrees of freedom")
    fit.add_argument("--omega", type=float, default=None, help="discount factor in (0,1]")
    fit.add_argument("--threshold", type=float, default=None, help="jump declaration cutoff in (0,1)")
    fit.add_argument("--iterations", type=int, default=None)
    fit.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    fit.add_argument("--thin", type=int, default=None)
    fit.add_argument("--chains", type=int, default=None)
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--no-jumps", dest="no_jumps", action="store_true", default=None,
                     help="fit the no-jump reduction")
    fit.add_argument("--bic-k", dest="bic_k", type=int, default=None,
                     help="parameter count for BIC (default 8 with jumps, 4 without)")
    fit.add_argument("--output-dir", dest="output_dir", default=None)
    fit.add_argument("--config", default=None, help="flat key = value file; flags override it")
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="generate a synthetic realization with latent truth")
    sim.add_argument("--n", type=int, default=5000)
    sim.add_argument("--mu", type=float, default=0.05)
    sim.add_argument("--jump-prob", dest="jump_prob", type=float, default=0.015)
    sim.add_argument("--jump-mean", dest="jump_mean", type=float, default=-2.5)
    sim.add_argument("--jump-sd", dest="jump_sd", type=float, default=4.0)
    sim.add_argument("--nu", type=float, default=30.0)
    sim.add_argument("--delta", type=float, default=1.0)
    sim.add_argument("--theta", type=float, default=0.8)
    sim.add_argument("--kappa", type=float, default=0.015)
    sim.add_argument("--sigma-v", dest="sigma_v", type=float, default=0.1)
    sim.add_argument("--corr", type=float, default=0.4)
    sim.add_argument("--v0", type=float, default=None)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--output", required=True, help="output CSV; parameters go to <stem>.params.json")
    sim.set_defaults(func=cmd_simulate)

    diag = sub.add_parser("diagnose", help="recompute chain diagnostics from draw files")
    diag.add_argument("--draws", action="append", required=True,
                      help="draws.csv file (repeat for multiple chains)")
    diag.add_argument("--n", type=int, default=None, help="sample size for BIC")
    diag.add_argument("--input", default=None, help="original data CSV (enables exact DIC)")
    diag.add_argument("--mode", choices=("prices", "returns"), default="returns")
    diag.add_argument("--latent-summary", dest="latent_summary", default=None,
                      help="latent_summary.csv from the fit (enables exact DIC)")
    diag.add_argument("--bic-k", dest="bic_k", type=int, default=None)
    diag.add_argument("--output", required=True, help="output report JSON")
    diag.set_defaults(func=cmd_diagnose)

    summ = sub.add_parser("summarize", help="score a fit against simulated truth")
    summ.add_argument("--truth", required=True, help="simulation CSV written by 'simulate'")
    summ.add_argument("--truth-params", dest="truth_params", default=None,
                      help="params JSON (default: <truth stem>.params.json)")
    summ.add_argument("--fit-dir", dest="fit_dir", required=True,
                      help="directory holding draws.csv and latent_summary.csv")
    summ.add_argument("--output", required=True, help="output summary CSV")
    summ.set_defaults(func=cmd_summarize)

    return parser


def cmd_fit(args) -> int:
    file_cfg = jio.read_config_file(args.config) if args.config else {}

    def get(key: str):
        return _resolve(key, getattr(args, key, None), file_cfg)

    priors = Priors(
        mu_mean=get("mu_prior_mean"),
        mu_var=get("mu_prior_var"),
        jump_mean_mean=get("jump_mean_prior_mean"),
        jump_mean_var=get("jump_mean_prior_var"),
        jump_var_shape=get("jump_var_prior_shape"),
        jump_var_scale=get("jump_var_prior_scale"),
        jump_prob_a=get("jump_prob_prior_a"),
        jump_prob_b=get("jump_prob_prior_b"),
    )
    cfg = ModelConfig(
        nu=get("nu"),
        omega=get("omega"),
        jump_threshold=get("threshold"),
        a0=get("a0"),
        b0=get("b0"),
        jumps_enabled=not get("no_jumps"),
        priors=priors,
    )
    spec = RunSpec(
        iterations=get("iterations"),
        burn_in=get("burn_in"),
        thin_lag=get("thin"),
        n_chains=get("chains"),
        seed=get("seed"),
    )
    bic_k = get("bic_k")

    series = jio.ingest_csv(args.input, get("mode"))
    stats = jio.describe(series)
    print(
        "data: " + " ".join(f"{key}={_display(stats[key])}" for key in
                            ("n", "mean", "variance", "skewness", "kurtosis", "min", "max"))
    )

    result = run_fit(series, cfg, spec, Path(get("output_dir")), k=bic_k, data_stats=stats)

    report = result.report
    for p in report.params:
        print(f"param {p.name}: mean={_display(p.mean)} sd={_display(p.sd)} "
              f"ess={_display(p.ess)} psrf={_display(p.psrf)}")
    print(f"log_lik_max={_display(report.log_lik_max)} bic={_display(report.bic)} "
          f"dic={_display(report.dic)} p_d={_display(report.p_d)}")
    print(f"wrote: {result.draws_path} {result.latent_path} {result.report_path}")
    print(f"fit completed in {result.wall_seconds:.2f} s", file=sys.stderr)
    return 0


def run_fit(series, cfg, spec, out_dir: Path, k=None, data_stats=None) -> jio.FitResult:
    """Run the chains and persist draws, latent summaries and the report.

    Returns the in-memory record of the fit; wall time lives only there and
    on stderr, never in the output files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    chains = run_multi(series, cfg, spec)
    wall = time.perf_counter() - start

    report = build_report(chains, series, k=k)
    draws_path = out_dir / "draws.csv"
    latent_path = out_dir / "latent_summary.csv"
    report_path = out_dir / "report.json"
    jio.write_draws_csv(draws_path, chains)
    jio.write_latent_csv(latent_path, report.latent)
    payload = jio.report_payload(
        report, cfg=cfg, spec=spec, data_stats=data_stats,
        files={"draws": draws_path.name, "latent_summary": latent_path.name},
    )
    jio.write_report_json(report_path, payload)
    return jio.FitResult(
        cfg=cfg,
        spec=spec,
        report=report,
        draws_path=draws_path,
        latent_path=latent_path,
        report_path=report_path,
        wall_seconds=wall,
    )


def cmd_simulate(args) -> int:
    sc = SimConfig(
        n=args.n,
        mu=args.mu,
        jump_prob=args.jump_prob,
        jump_mean=args.jump_mean,
        jump_sd=args.jump_sd,
        nu=args.nu,
        delta=args.delta,
        theta=args.theta,
        kappa=args.kappa,
        sigma_v=args.sigma_v,
        corr=args.corr,
        v0=args.v0,
        seed=args.seed,
    )
    sim = simulate(sc)
    out = Path(args.output)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    params_path = out.with_suffix(".params.json")
    jio.write_sim_csv(out, sim)
    jio.write_sim_params(params_path, sc)
    print(f"wrote: {out} {params_path}")
    return 0


def cmd_diagnose(args) -> int:
    chains: list[dict] = []
    for path in args.draws:
        data = jio.read_draws_csv(path)
        ids = np.unique(data["chain"]) if "chain" in data else np.array([0])
        for cid in ids:
            mask = data["chain"] == cid if "chain" in data else slice(None)
            chains.append({key: values[mask] for key, values in data.items()})
    if not chains:
        raise DataFormatError("no chains found in the given draw files")

    with_jumps = all("jump_prob" in c for c in chains)
    names = ["mu", "jump_prob", "jump_mean", "jump_var"] if with_jumps else ["mu"]

    params = []
    for name in names:
        pooled = np.concatenate([c[name] for c in chains])
        sd = float(np.std(pooled, ddof=1)) if pooled.size > 1 else 0.0
        total_ess = float(sum(ess(c[name]) for c in chains))
        params.append({
            "name": name,
            "mean": float(np.mean(pooled)),
            "sd": sd,
            "mcse": sd / math.sqrt(total_ess) if total_ess > 0 else 0.0,
            "ess": total_ess,
            "psrf": psrf([c[name] for c in chains]),
        })

    log_lik = np.concatenate([c["log_lik"] for c in chains])
    deviance = -2.0 * log_lik
    mean_deviance = float(np.mean(deviance))
    log_lik_max = float(np.max(log_lik))

    series = jio.ingest_csv(args.input, args.mode) if args.input else None
    n_obs = args.n if args.n is not None else (len(series) if series is not None else None)

    diagnostics: dict = {
        "mean_deviance": mean_deviance,
        "log_lik_max": log_lik_max,
        "n_draws": int(log_lik.size),
    }
    if n_obs is not None:
        k = args.bic_k if args.bic_k is not None else (
            DEFAULT_K_JUMPS if with_jumps else DEFAULT_K_NO_JUMPS
        )
        diagnostics["k"] = int(k)
        diagnostics["n_obs"] = int(n_obs)
        diagnostics["bic"] = compute_bic(log_lik_max, int(k), int(n_obs))

    if series is not None and args.latent_summary:
        latent = jio.read_latent_csv(args.latent_summary)
        mu_bar = float(np.mean(np.concatenate([c["mu"] for c in chains])))
        log_lik_at_mean = conditional_log_lik(
            series, mu_bar, latent.mean_jump, latent.mean_precision, latent.mean_mixture
        )
        dic, p_d = compute_dic(deviance, -2.0 * log_lik_at_mean)
        diagnostics.update({
            "log_lik_at_mean": log_lik_at_mean,
            "deviance_at_mean": -2.0 * log_lik_at_mean,
            "p_d": p_d,
            "dic": dic,
            "pd_method": "plug_in_mean",
        })
    else:
        # Draws-only fallback: half the deviance variance estimates the
        # effective parameter count.
        p_d = float(np.var(deviance, ddof=1)) / 2.0 if deviance.size > 1 else 0.0
        diagnostics.update({
            "p_d": p_d,
            "dic": mean_deviance + p_d,
            "pd_method": "half_variance",
        })

    jio.write_report_json(args.output, {"diagnostics": diagnostics, "params": params})
    print(f"wrote: {args.output}")
    return 0


def cmd_summarize(args) -> int:
    truth = jio.read_sim_csv(args.truth)
    params_path = args.truth_params or str(Path(args.truth).with_suffix(".params.json"))
    true_params = jio.read_report_json(params_path)
    fit_dir = Path(args.fit_dir)
    draws = jio.read_draws_csv(fit_dir / "draws.csv")
    latent = jio.read_latent_csv(fit_dir / "latent_summary.csv")

    if len(latent) != truth["true_v"].size:
        raise SizeError(
            f"latent summary length {len(latent)} != truth length {truth['true_v'].size}"
        )

    def param_row(name: str, draws_arr: np.ndarray, true_value: float) -> list[str]:
        mean = float(np.mean(draws_arr))
        sd = float(np.std(draws_arr, ddof=1)) if draws_arr.size > 1 else 0.0
        rmse = float(np.sqrt(np.mean((draws_arr - true_value) ** 2)))
        return [name, jio.fmt17(mean), jio.fmt17(sd), jio.fmt17(rmse)]

    rows = [param_row("mu", draws["mu"], float(true_params["mu"]))]
    if "jump_prob" in draws:
        rows.append(param_row("jump_prob", draws["jump_prob"], float(true_params["jump_prob"])))
        rows.append(param_row("jump_mean", draws["jump_mean"], float(true_params["jump_mean"])))
        rows.append(param_row("jump_sd", np.sqrt(draws["jump_var"]), float(true_params["jump_sd"])))

    vol_rmse = float(np.sqrt(np.mean((latent.var_mean - truth["true_v"]) ** 2)))
    jump_rmse = float(np.sqrt(np.mean((latent.mean_jump - truth["true_jump"]) ** 2)))
    vol_cover = coverage(truth["true_v"], latent.var_lo95, latent.var_hi95)
    rows.append(["volatility_path", "", "", jio.fmt17(vol_rmse)])
    rows.append(["jump_path", "", "", jio.fmt17(jump_rmse)])
    rows.append(["volatility_coverage_95", jio.fmt17(vol_cover), "", ""])

    out = Path(args.output)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("quantity,mean,sd,rmse\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    print(f"wrote: {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ParameterError, SizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except JumpvolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

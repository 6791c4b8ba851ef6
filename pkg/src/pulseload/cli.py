"""Batch command-line front end.

Subcommands::

    pulseload report   --input events.csv --seed 1 --out results/
    pulseload theta    --input events.csv --out theta/
    pulseload cox      --input events.csv --seed 1 --out cox/
    pulseload predict  --gumbel 0.026:157.4 --out horizons/
    pulseload simulate --marks max_ar --a 0.5 --n 1000 --seed 1 --out sim/

Every flag may also be given in a flat ``key = value`` file passed with
``--config``; command-line flags win. Exit codes: 0 success, 2 usage or
configuration error, 3 data error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import os
import shutil
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bayes import posterior_params
from .cox import CoxModel, empirical_mean_measure, fit_cox, mean_measure_moments, simulate_intensity
from .dependence import autocorrelation, run_length, scale_of_fluctuation
from .errors import DataError, NumericalError, PulseLoadError
from .extremal import fit_theta, runs_curve
from .maxdist import (
    GumbelModel,
    frechet_fit,
    gumbel_fit,
    horizon_table,
    mc_max_cdf_curve,
    reduced_variate_sse,
)
from .oracles import SyntheticSpec, gen_cox_stream, generate
from .series import (
    EventSeries,
    block_maxima,
    chi_squared_exponential_test,
    empirical_cdf,
    filter_above,
    interarrival_times,
    load_events,
    summarize,
    write_events,
)

log = logging.getLogger("pulseload")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULT_HORIZONS = "1,365,730,3650,18250,27375"
DEFAULT_THETAS = "1,fitted,0.75,0.5"
DAY_HOURS = 24.0


class UsageError(PulseLoadError):
    pass


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def exit_code(self) -> int:
        if isinstance(self.cause, UsageError):
            return EXIT_USAGE
        if isinstance(self.cause, (NumericalError, ArithmeticError, np.linalg.LinAlgError)):
            return EXIT_NUMERIC
        return EXIT_DATA


@contextlib.contextmanager
def stage(name: str):
    log.info("stage: %s", name)
    try:
        yield
    except StageError:
        raise
    except (PulseLoadError, ValueError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        raise StageError(name, exc) from exc


# ----------------------------------------------------------------- parsing


def parse_ladder(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in str(text).split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}")
    k = int(math.floor((stop - start) / step + 1e-9))
    return np.round(start + step * np.arange(k + 1), 10)


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_theta_list(text: str) -> list[str]:
    items = [v.strip() for v in str(text).split(",") if v.strip()]
    for v in items:
        if v != "fitted":
            try:
                th = float(v)
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad theta {v!r}") from None
            if not 0 < th <= 1:
                raise argparse.ArgumentTypeError(f"theta {v} outside (0, 1]")
    return items


def parse_cox(text: str) -> CoxModel:
    try:
        mu, sigma, tau0 = (float(v) for v in str(text).split(":"))
        return CoxModel(mu, sigma, tau0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected mu:sigma:tau0, got {text!r}") from None


def parse_gumbel(text: str) -> GumbelModel:
    try:
        alpha, mode = (float(v) for v in str(text).split(":"))
        return GumbelModel(alpha, mode)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected alpha:mode, got {text!r}") from None


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; keys use flag names."""
    out = {}
    for no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


# ----------------------------------------------------------------- output


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".10g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return None if math.isnan(v) or math.isinf(v) else float(format(v, ".12g"))
    return obj


class Outputs:
    """Files are staged in a sibling directory and moved into place only on success."""

    def __init__(self, out: Path):
        self.out = Path(out)
        self.staging = self.out.with_name(self.out.name + ".partial")
        self.written: list[str] = []

    def __enter__(self):
        if self.staging.exists():
            shutil.rmtree(self.staging)
        self.staging.mkdir(parents=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            shutil.rmtree(self.staging, ignore_errors=True)
            return False
        self.out.mkdir(parents=True, exist_ok=True)
        for name in self.written:
            dest = self.out / name
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(self.staging / name, dest)
        shutil.rmtree(self.staging, ignore_errors=True)
        return False

    def path(self, name: str) -> Path:
        p = self.staging / name
        p.parent.mkdir(parents=True, exist_ok=True)
        if name not in self.written:
            self.written.append(name)
        return p

    def csv(self, name: str, header, rows) -> None:
        with self.path(name).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])

    def json(self, name: str, obj) -> None:
        self.path(name).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------- stages


def _streams(seed: int, names):
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {n: np.random.default_rng(c) for n, c in zip(names, children)}


def ingest(args) -> EventSeries:
    with stage("ingest"):
        if not args.input:
            raise UsageError("--input is required")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            series = load_events(args.input, args.trigger, args.span)
        for w in caught:
            log.warning("%s", w.message)
        if len(series) < 2:
            raise DataError("need at least 2 events")
        return series


def interarrival_rows(series: EventSeries, thresholds, n_bins: int):
    rows = []
    for u in [series.trigger_level, *[u for u in thresholds if u > series.trigger_level]]:
        sub = filter_above(series, u) if u > series.trigger_level else series
        row = [u, len(sub), None, None, None, None]
        if len(sub) >= 2:
            d = interarrival_times(sub)
            row[2] = d.mean()
            try:
                res = chi_squared_exponential_test(d, n_bins)
                row[3:] = [res.statistic, res.degrees_of_freedom, res.significance]
            except DataError:
                pass
        rows.append(row)
    return rows


def default_ladder(series: EventSeries) -> np.ndarray:
    return np.quantile(series.magnitudes, np.linspace(0.80, 0.985, 16))


def check_ladder(series: EventSeries, ladder) -> np.ndarray:
    ladder = np.asarray(ladder, dtype=float)
    if ladder.size == 0:
        raise UsageError("empty threshold ladder")
    if ladder[0] < series.trigger_level or ladder[-1] >= series.magnitudes.max():
        raise UsageError(
            f"ladder [{ladder[0]}, {ladder[-1]}] must lie within the observed range "
            f"[{series.trigger_level}, {series.magnitudes.max()})"
        )
    return ladder


def dependence_stage(series: EventSeries, args, out: Outputs) -> dict:
    with stage("dependence"):
        mean_gap = float(interarrival_times(series).mean())
        info: dict = {"mean_interarrival_hours": mean_gap}
        rows, curves = [], {}
        seqs = {"events": (series.magnitudes, mean_gap)}
        for label, dt in (("hourly", 1.0), ("two_hourly", 2.0)):
            bm = block_maxima(series, dt)
            vals = bm.nonempty_values()
            info[f"{label}_empty_blocks"] = int(bm.empty.sum())
            if vals.size >= 8:
                seqs[label] = (vals, dt)
        for label, (vals, unit_hours) in seqs.items():
            max_lag = max(min(args.max_lag, vals.size // 4), 1)
            acf = autocorrelation(vals, max_lag)
            sof = scale_of_fluctuation(acf, range(1, max_lag + 2))
            curves[label] = (sof.windows, sof.estimates)
            rows += [(label, w, e, e * unit_hours) for w, e in zip(sof.windows, sof.estimates)]
            info[f"{label}_tau_c"] = sof.converged_value
            info[f"{label}_tau_c_hours"] = sof.converged_value * unit_hours
        out.csv("scale_of_fluctuation.csv", ["series", "window", "tau_c", "tau_c_hours"], rows)
        if args.run_length is not None:
            if args.run_length < 2:
                raise UsageError("--run-length must be >= 2")
            info["run_length"] = int(args.run_length)
            info["run_length_source"] = "override"
        else:
            info["run_length"] = run_length(info["events_tau_c"])
            info["run_length_source"] = "scale_of_fluctuation"
        if args.figures:
            from .plotting import plot_scale_of_fluctuation

            plot_scale_of_fluctuation(curves, out.path("figures/scale_of_fluctuation.png"))
        return info


def theta_stage(series: EventSeries, ladder, r: int, args, out: Outputs) -> dict:
    with stage("extremal_index"):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            q, th, ests = runs_curve(series.magnitudes, ladder, r)
        for w in caught:
            log.warning("%s", w.message)
        fit = fit_theta(q, th)
        out.csv(
            "theta_curve.csv",
            ["threshold", "q", "theta_hat", "n_exceedances", "n_clusters", "fitted"],
            [(e.threshold, qq, t, e.n_exceedances, e.n_cluster_starts, fit.predict(qq)) for e, qq, t in zip(ests, q, th)],
        )
        if args.figures:
            from .plotting import plot_theta_curve

            plot_theta_curve(q, th, fit, out.path("figures/theta_curve.png"))
        return {"theta": fit.theta, "beta1": fit.beta1, "beta2": fit.beta2, "sse": fit.sse, "r": r, "n_rungs": len(ests)}


def cox_stage(series: EventSeries, args, out: Outputs, rng) -> CoxModel:
    with stage("cox"):
        windows = parse_ladder(args.windows)
        curve = empirical_mean_measure(series, windows, args.stride)
        model = fit_cox(curve)
        fitted = [mean_measure_moments(model, t) for t in curve.t]
        out.csv(
            "cox_moments.csv",
            ["t_hours", "mean", "variance", "count_variance", "n_windows", "fitted_mean", "fitted_variance"],
            [
                (t, m, v, cv, n, f.mean, f.variance)
                for t, m, v, cv, n, f in zip(curve.t, curve.mean, curve.variance, curve.count_variance, curve.n_windows, fitted)
            ],
        )
        paths = [simulate_intensity(model, args.path_hours, rng, correlation=args.correlation) for _ in range(args.paths)]
        if paths:
            times = paths[0].times
            out.csv(
                "intensity_paths.csv",
                ["time_hours", *[f"path_{i + 1}" for i in range(len(paths))]],
                [(t, *[p.values[j] for p in paths]) for j, t in enumerate(times)],
            )
        if args.figures:
            from .plotting import plot_cox_moments, plot_intensity_paths

            plot_cox_moments(
                curve.t, curve.mean, curve.variance, [f.mean for f in fitted], [f.variance for f in fitted],
                out.path("figures/cox_moments.png"),
            )
            if paths:
                plot_intensity_paths(paths[0].times, [p.values for p in paths], out.path("figures/intensity_paths.png"))
        return model


def cox_manifest(model: CoxModel) -> dict:
    return {
        "mu": model.mu,
        "sigma": model.sigma,
        "tau0_hours": model.tau0,
        "mean_intensity": model.mean_intensity,
        "intensity_variance": model.intensity_variance,
    }


def maximum_stage(levels, p_hats, n: int, cox: CoxModel, args, out: Outputs, rng) -> tuple[GumbelModel, dict]:
    """Monte Carlo daily-maximum CDF at each level, then probability-paper fits."""
    with stage("maximum"):
        posts = [posterior_params(n, p, 1.0) for p in p_hats]
        pts = mc_max_cdf_curve(
            cox, levels, posts, DAY_HOURS, rng, args.sims, correlation=args.correlation
        )
        out.csv(
            "daily_max_cdf.csv",
            ["level", "p_hat", "k", "alpha1", "alpha2", "posterior_mean", "posterior_cov", "cdf", "std_error"],
            [(lv, p, po.k, po.alpha1, po.alpha2, po.mean, po.cov, pt.cdf, pt.mc_std_error)
             for lv, p, po, pt in zip(levels, p_hats, posts, pts)],
        )
        usable = [(pt.level, pt.cdf) for pt in pts if 0.0 < pt.cdf < 1.0]
        if len(usable) < 2:
            raise NumericalError("fewer than 2 levels with a CDF strictly inside (0, 1)")
        gum = gumbel_fit(usable)
        fre, fre_sse = frechet_fit(usable)
        gum_sse = reduced_variate_sse(gum, usable)
        lv = np.array([u[0] for u in usable])
        cdf = np.array([u[1] for u in usable])
        out.csv(
            "gumbel_plot.csv",
            ["level", "cdf", "reduced_variate", "gumbel_line", "ln_level", "frechet_line"],
            [(a, b, -math.log(-math.log(b)), gum.reduced_variate(a), math.log(a) if a > 0 else None,
              fre.reduced_variate(a) if a > 0 else None) for a, b in zip(lv, cdf)],
        )
        if args.figures:
            from .plotting import plot_probability_paper

            plot_probability_paper(lv, cdf, gum, fre, out.path("figures/probability_paper.png"))
        info = {
            "gumbel": {"alpha": gum.alpha, "mode": gum.mode, "sse": gum_sse},
            "frechet": {"shape": fre.shape, "scale": fre.scale, "sse": fre_sse},
            "preferred": "gumbel" if gum_sse <= fre_sse else "frechet",
            "posterior_theta": 1.0,
            "window_hours": DAY_HOURS,
            "sims": args.sims,
        }
        return gum, info


def horizon_stage(daily: GumbelModel, horizons, thetas, fitted_theta, out: Outputs) -> list[dict]:
    with stage("horizon"):
        resolved = []
        for th in thetas:
            if th == "fitted":
                if fitted_theta is None:
                    raise UsageError("theta list contains 'fitted' but no extremal index was estimated")
                resolved.append(fitted_theta)
            else:
                resolved.append(float(th))
        rows = horizon_table(daily, horizons, resolved)
        out.csv(
            "horizon_table.csv",
            ["horizon_days", "theta", "mean", "cov", "alpha", "mode"],
            [(r["horizon_days"], r["theta"], r["mean"], r["cov"], r["alpha"], r["mode"]) for r in rows],
        )
        return rows


MODEL_NOTES = {
    "mean_measure_variance": "2*var_L*(t*tau0 + tau0**2*(exp(-t/tau0)-1)); cubic tau0 term replaced by tau0**2",
    "mean_measure_tau0_squared_correction": True,
    "intensity_scale_read_as_variance": True,
    "intensity_scale_note": "an intensity spread of 1.50 with mean 1.99 is read as the stationary variance",
    "year_days": 365,
}


# ----------------------------------------------------------------- commands


def cmd_report(args) -> int:
    _require_seed(args)
    series = ingest(args)
    rng = _streams(args.seed, ["paths", "mc"])
    with Outputs(args.out) as out:
        with stage("config"):
            ladder = check_ladder(series, args.ladder if args.ladder is not None else default_ladder(series))
        with stage("ingest"):
            summary = summarize(series, args.bins)
            out.json("summary.json", summary)
            out.csv(
                "interarrival_tests.csv",
                ["threshold", "n", "mean_interarrival_hours", "chi2", "dof", "significance"],
                interarrival_rows(series, ladder, args.bins),
            )
        dep = dependence_stage(series, args, out)
        theta = theta_stage(series, ladder, dep["run_length"], args, out)
        cox = cox_stage(series, args, out, rng["paths"])
        with stage("maximum"):
            levels = np.asarray(args.levels if args.levels else [*ladder, math.floor(series.magnitudes.max()) + 1.0])
            p_hats = np.atleast_1d(empirical_cdf(series.magnitudes, levels))
        daily, maxinfo = maximum_stage(levels, p_hats, len(series), cox, args, out, rng["mc"])
        rows = horizon_stage(daily, args.horizons, args.theta_list, theta["theta"], out)
        out.json(
            "manifest.json",
            {
                "command": "report",
                "version": __version__,
                "seed": args.seed,
                "input": str(args.input),
                "correlation": args.correlation,
                "summary": summary,
                "dependence": dep,
                "extremal_index": theta,
                "ladder": ladder,
                "cox": cox_manifest(cox),
                "maximum": maxinfo,
                "horizons": rows,
                "notes": MODEL_NOTES,
                "files": sorted(out.written),
            },
        )
    return EXIT_OK


def cmd_theta(args) -> int:
    series = ingest(args)
    with Outputs(args.out) as out:
        with stage("config"):
            ladder = check_ladder(series, args.ladder if args.ladder is not None else default_ladder(series))
        dep = dependence_stage(series, args, out)
        theta = theta_stage(series, ladder, dep["run_length"], args, out)
        out.json(
            "manifest.json",
            {"command": "theta", "version": __version__, "input": str(args.input), "dependence": dep,
             "extremal_index": theta, "ladder": ladder, "files": sorted(out.written)},
        )
    return EXIT_OK


def cmd_cox(args) -> int:
    _require_seed(args)
    series = ingest(args)
    rng = _streams(args.seed, ["paths"])
    with Outputs(args.out) as out:
        cox = cox_stage(series, args, out, rng["paths"])
        out.json(
            "manifest.json",
            {"command": "cox", "version": __version__, "seed": args.seed, "input": str(args.input),
             "cox": cox_manifest(cox), "notes": MODEL_NOTES, "files": sorted(out.written)},
        )
    return EXIT_OK


def cmd_predict(args) -> int:
    manifest: dict = {"command": "predict", "version": __version__, "notes": MODEL_NOTES}
    with Outputs(args.out) as out:
        if args.gumbel is not None:
            daily = args.gumbel
            manifest["daily_gumbel"] = {"alpha": daily.alpha, "mode": daily.mode, "source": "injected"}
        else:
            _require_seed(args)
            if args.cox is None:
                raise StageError("predict", UsageError("--cox mu:sigma:tau0 or --gumbel alpha:mode is required"))
            if not args.levels:
                raise StageError("predict", UsageError("--levels is required"))
            if args.input:
                series = ingest(args)
                n = len(series)
                p_hats = np.atleast_1d(empirical_cdf(series.magnitudes, np.asarray(args.levels)))
            else:
                if args.n is None or args.phat is None or len(args.phat) != len(args.levels):
                    raise StageError("predict", UsageError("without --input give --n and one --phat per level"))
                n, p_hats = args.n, np.asarray(args.phat)
            rng = _streams(args.seed, ["mc"])
            daily, maxinfo = maximum_stage(args.levels, p_hats, n, args.cox, args, out, rng["mc"])
            manifest.update(seed=args.seed, n=n, cox=cox_manifest(args.cox), maximum=maxinfo, correlation=args.correlation)
        fitted = None
        if "fitted" in args.theta_list:
            if args.theta is None:
                raise StageError("horizon", UsageError("theta list contains 'fitted'; pass --theta"))
            fitted = args.theta
        manifest["horizons"] = horizon_stage(daily, args.horizons, args.theta_list, fitted, out)
        manifest["files"] = sorted(out.written + ["manifest.json"])
        out.json("manifest.json", manifest)
    return EXIT_OK


def cmd_simulate(args) -> int:
    _require_seed(args)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    with stage("simulate"):
        params: dict = {}
        if args.marks == "max_ar":
            if args.a is None:
                raise UsageError("--a is required for max_ar marks")
            params["a"] = args.a
        elif args.marks == "moving_maxima":
            if not args.weights:
                raise UsageError("--weights is required for moving_maxima marks")
            params["weights"] = list(args.weights)
        else:
            params["marginal"] = args.marginal
        if (args.n is None) == (args.horizon is None):
            raise UsageError("give exactly one of --n (event count) or --horizon (hours)")
    with Outputs(args.out) as out:
        with stage("simulate"):
            if args.n is not None:
                if args.n < 1:
                    raise UsageError("--n must be >= 1")
                spec = SyntheticSpec(args.marks, args.n, params)
                x = generate(spec, rng)
                times = np.cumsum(rng.exponential(1.0 / args.rate, size=args.n))
                marks = args.loc + args.scale * x
                series = EventSeries(times, marks, min(args.loc, float(marks.min())))
                arrivals = {"process": "poisson", "rate_per_hour": args.rate}
            else:
                model = args.cox if args.cox is not None else CoxModel(math.log(args.rate), 0.0, 1.0)
                spec = SyntheticSpec(args.marks, 0, params)
                series = gen_cox_stream(model, args.horizon, spec, rng, args.loc, args.scale)
                arrivals = {"process": "cox", **cox_manifest(model)}
            write_events(series, out.path("events.csv"))
            out.json(
                "manifest.json",
                {"command": "simulate", "version": __version__, "seed": args.seed, "marks": args.marks,
                 "parameters": params, "theta_true": spec.theta_true, "n": len(series),
                 "trigger": series.trigger_level, "loc": args.loc, "scale": args.scale, "arrivals": arrivals},
            )
    return EXIT_OK


def _require_seed(args) -> None:
    if args.seed is None:
        raise StageError("config", UsageError("--seed is required"))


# ----------------------------------------------------------------- parser


def _flag_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file of defaults")
    common.add_argument("--out", type=Path, required=False, default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", type=Path, help="event CSV with header time_hours,peak")
    data.add_argument("--trigger", type=float, default=None, help="recording trigger level (default: smallest peak)")
    data.add_argument("--span", type=float, default=None, help="observation span in hours (default: last event time)")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--sims", type=int, default=100_000)
    mc.add_argument("--horizons", type=parse_floats, default=DEFAULT_HORIZONS, help="horizons in days")
    mc.add_argument("--theta-list", type=parse_theta_list, default=DEFAULT_THETAS)
    mc.add_argument("--levels", type=parse_floats, default=None)
    mc.add_argument("--correlation", choices=["latent", "intensity"], default="latent")

    dep = argparse.ArgumentParser(add_help=False)
    dep.add_argument("--ladder", type=parse_ladder, default=None, help="threshold ladder start:stop:step")
    dep.add_argument("--run-length", type=int, default=None)
    dep.add_argument("--max-lag", type=int, default=200)
    dep.add_argument("--bins", type=int, default=10, help="chi-squared bins before merging")
    dep.add_argument("--figures", type=_flag_bool, nargs="?", const=True, default=False, help="also render PNG figures")

    cox = argparse.ArgumentParser(add_help=False)
    cox.add_argument("--windows", default="1:24:1", help="window lengths start:stop:step (hours)")
    cox.add_argument("--stride", type=float, default=0.5)
    cox.add_argument("--paths", type=int, default=10, help="sample intensity paths to write")
    cox.add_argument("--path-hours", type=float, default=72.0)

    p = argparse.ArgumentParser(prog="pulseload", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("report", parents=[common, data, dep, cox, mc], help="full analysis pipeline")
    s.set_defaults(func=cmd_report)
    s = sub.add_parser("theta", parents=[common, data, dep], help="run length and extremal index")
    s.set_defaults(func=cmd_theta)
    s = sub.add_parser("cox", parents=[common, data, cox], help="Cox arrival model fit")
    s.add_argument("--figures", type=_flag_bool, nargs="?", const=True, default=False)
    s.add_argument("--correlation", choices=["latent", "intensity"], default="latent")
    s.set_defaults(func=cmd_cox)
    s = sub.add_parser("predict", parents=[common, data, mc], help="maximum-load statistics from fitted models")
    s.add_argument("--gumbel", type=parse_gumbel, default=None, help="daily Gumbel alpha:mode")
    s.add_argument("--cox", type=parse_cox, default=None, help="Cox model mu:sigma:tau0")
    s.add_argument("--n", type=int, default=None, help="sample size behind --phat")
    s.add_argument("--phat", type=parse_floats, default=None, help="empirical CDF values, one per level")
    s.add_argument("--theta", type=float, default=None, help="value used for 'fitted' in --theta-list")
    s.add_argument("--figures", type=_flag_bool, nargs="?", const=True, default=False)
    s.set_defaults(func=cmd_predict)
    s = sub.add_parser("simulate", parents=[common], help="write a synthetic event stream")
    s.add_argument("--marks", choices=["iid", "max_ar", "moving_maxima"], default="iid")
    s.add_argument("--marginal", default="frechet")
    s.add_argument("--a", type=float, default=None)
    s.add_argument("--weights", type=parse_floats, default=None)
    s.add_argument("--n", type=int, default=None, help="number of events (Poisson arrivals)")
    s.add_argument("--horizon", type=float, default=None, help="hours of Cox arrivals")
    s.add_argument("--cox", type=parse_cox, default=None)
    s.add_argument("--rate", type=float, default=2.0, help="events per hour")
    s.add_argument("--loc", type=float, default=0.0)
    s.add_argument("--scale", type=float, default=1.0)
    s.set_defaults(func=cmd_simulate)
    return p


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            cfg = read_config(known.config)
        except (OSError, UsageError) as exc:
            parser.error(str(exc))
        sub = parser._subparsers._group_actions[0].choices  # type: ignore[union-attr]
        cmd = next((a for a in argv if a in sub), None)
        if cmd is not None:
            valid = {a.dest for a in sub[cmd]._actions}
            unknown = sorted(set(cfg) - valid)
            if unknown:
                parser.error(f"unknown config keys for {cmd}: {', '.join(unknown)}")
            sub[cmd].set_defaults(**cfg)
    args = parser.parse_args(argv)
    if args.out is None:
        parser.error("--out is required")
    for name in ("horizons", "theta_list"):
        v = getattr(args, name, None)
        if isinstance(v, str):
            setattr(args, name, parse_floats(v) if name == "horizons" else parse_theta_list(v))
    if isinstance(getattr(args, "figures", False), str):
        args.figures = _flag_bool(args.figures)
    if getattr(args, "sims", 1000) < 1000:
        parser.error("--sims must be >= 1000")
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"pulseload {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

"""Monte-Carlo experiments on the synthetic benchmarks.

Run ``k`` of an experiment uses seed ``base_seed + k``, so any single run can
be replayed in isolation. Failed runs are kept in the records with an error
tag and left out of the summaries.
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._validation import check_count, check_criterion
from .causality import GcaConfig, analyze_pair
from .entropy import CriterionConfig
from .exceptions import GrangerError, InvalidSpecError, LengthMismatchError, ReferenceUndefinedError
from .noise import NOISE_CASES, StableParams, SyntheticSpec, generate_causal_pair, generate_regression
from .solvers import benchmark_solver, fit_design
from .timeseries import LaggedDesign

logger = logging.getLogger(__name__)

TRUE_WEIGHTS = (2.0, 1.0)
DEFAULT_ALPHA_GRID = tuple(round(2.0 - 0.05 * k, 2) for k in range(31))
DEFAULT_N_GRID = (500, 1000, 2000, 4000, 8000)
EXPERIMENTS = ("table1", "table2", "fig1", "fig2")


def rmse(w_true, w_est):
    """Root mean squared coefficient error ``sqrt(||w_true - w_est||^2 / d)``."""
    a = np.asarray(w_true, dtype=np.float64).ravel()
    b = np.asarray(w_est, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise LengthMismatchError(f"weight vectors differ in length: {a.size} vs {b.size}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte-Carlo experiment.

    ``cases`` name entries of ``NOISE_CASES``. ``alpha_grid`` is used by
    ``fig2`` and ``n_grid`` by ``fig1``.
    """

    experiment: str
    runs: int = 100
    base_seed: int = 0
    cases: Tuple[str, ...] = ("case1", "case2", "case3")
    criteria: Tuple[str, ...] = ("MSE", "MEE", "QMEE")
    n: int = 500
    criterion_config: CriterionConfig = field(default_factory=CriterionConfig)
    p_max: int = 10
    n_grid: Tuple[int, ...] = DEFAULT_N_GRID
    alpha_grid: Tuple[float, ...] = DEFAULT_ALPHA_GRID
    timing_repeats: int = 3
    n_jobs: Optional[int] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS + ("custom",):
            raise InvalidSpecError(f"unknown experiment {self.experiment!r}")
        check_count(self.runs, "runs")
        check_count(self.n, "n", minimum=2)
        object.__setattr__(self, "criteria", tuple(check_criterion(c) for c in self.criteria))
        for c in self.cases:
            if c not in NOISE_CASES:
                raise InvalidSpecError(f"unknown noise case {c!r}")
        if self.experiment == "fig1" and not self.n_grid:
            raise InvalidSpecError("fig1 needs a non-empty n_grid")
        if self.experiment == "fig2":
            if not self.alpha_grid or any(not 0 < a <= 2 for a in self.alpha_grid):
                raise InvalidSpecError("alpha_grid must be non-empty and inside (0, 2]")
            if 2.0 not in self.alpha_grid:
                raise InvalidSpecError("alpha_grid must contain the reference point 2.0")

    def gca_config(self, criterion):
        return GcaConfig(criterion=criterion, criterion_config=self.criterion_config,
                         p_max=self.p_max)

    def as_dict(self):
        d = asdict(self)
        d["criterion_config"] = asdict(self.criterion_config)
        return d


def summarize(values):
    """Mean, std (population), median, min and max of the finite values."""
    arr = np.asarray([v for v in values if v is not None and np.isfinite(v)], dtype=np.float64)
    if arr.size == 0:
        nan = math.nan
        return {"mean": nan, "std": nan, "median": nan, "min": nan, "max": nan, "count": 0}
    return {
        "mean": float(arr.mean()),
        "std": float(arr.std()),
        "median": float(np.median(arr)),
        "min": float(arr.min()),
        "max": float(arr.max()),
        "count": int(arr.size),
    }


@dataclass
class ExperimentResult:
    """Per-run records plus summaries keyed by ``(group, criterion)``.

    ``group`` is the noise case (table1/table2), ``alpha=<value>`` (fig2) or
    ``timing`` (fig1).
    """

    spec: ExperimentSpec
    metrics: Tuple[str, ...]
    records: List[dict]
    summary: Dict[Tuple[str, str], Dict[str, dict]] = field(default_factory=dict)
    extra: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.summary:
            self.summary = self._summarize()

    def _summarize(self):
        out = {}
        keys = sorted({(r["group"], r["criterion"]) for r in self.records})
        for key in keys:
            rows = [r for r in self.records if (r["group"], r["criterion"]) == key]
            ok = [r for r in rows if not r.get("error")]
            stats = {m: summarize(r[m] for r in ok) for m in self.metrics}
            stats["failures"] = len(rows) - len(ok)
            out[key] = stats
        return out

    def values(self, group, criterion, metric):
        return [r[metric] for r in self.records
                if r["group"] == group and r["criterion"] == criterion and not r.get("error")]

    def write(self, outdir):
        """Write ``<experiment>_<group>_<criterion>.csv`` per group and a JSON summary.

        Returns the list of written paths.
        """
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        exp = self.spec.experiment
        columns = ["run", "seed", "group", "criterion", *self.metrics, "error"]
        paths = []
        for group, crit in self.summary:
            rows = [r for r in self.records if r["group"] == group and r["criterion"] == crit]
            path = outdir / f"{exp}_{group}_{crit.lower()}.csv"
            with open(path, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
                writer.writeheader()
                for r in rows:
                    writer.writerow({k: _fmt(r.get(k)) for k in columns})
            paths.append(path)
        summary_path = outdir / f"{exp}_summary.json"
        payload = {
            "experiment": exp,
            "spec": self.spec.as_dict(),
            "summary": [
                {"group": g, "criterion": c, **stats} for (g, c), stats in self.summary.items()
            ],
            **{k: v for k, v in self.extra.items()},
        }
        with open(summary_path, "w") as fh:
            json.dump(payload, fh, indent=2, default=_json_default)
        paths.append(summary_path)
        return paths


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else value


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _map_runs(fn, jobs, n_jobs):
    if n_jobs in (None, 1):
        return [fn(*job) for job in jobs]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=n_jobs)(delayed(fn)(*job) for job in jobs)


def _failed(exc):
    return f"{type(exc).__name__}: {exc}"


def _table1_run(spec, case, run):
    seed = spec.base_seed + run
    inputs, targets = generate_regression(
        SyntheticSpec("regression", NOISE_CASES[case], spec.n, seed, TRUE_WEIGHTS))
    design = LaggedDesign(inputs, targets, order_spec=(2,))
    out = []
    for crit in spec.criteria:
        rec = {"run": run, "seed": seed, "group": case, "criterion": crit}
        try:
            model = fit_design(design, crit, spec.criterion_config)
            rec.update(rmse=rmse(TRUE_WEIGHTS, model.coefficients),
                       w1=float(model.coefficients[0]), w2=float(model.coefficients[1]),
                       iterations=model.iterations_used)
        except (GrangerError, ArithmeticError) as exc:
            rec.update(rmse=None, error=_failed(exc))
        out.append(rec)
    return out


def _pair_run(spec, group, noise, run):
    seed = spec.base_seed + run
    x, y = generate_causal_pair(SyntheticSpec("causal_pair", noise, spec.n, seed))
    out = []
    for crit in spec.criteria:
        rec = {"run": run, "seed": seed, "group": group, "criterion": crit}
        try:
            rep = analyze_pair(x, y, spec.gca_config(crit))
            rec.update(f_xy=rep.f_xy, f_yx=rep.f_yx, rho=rep.rho,
                       p1=rep.orders[0], p2=rep.orders[1], p3=rep.orders[2], p4=rep.orders[3])
        except (GrangerError, ArithmeticError) as exc:
            rec.update(f_xy=None, f_yx=None, rho=None, error=_failed(exc))
        out.append(rec)
    return out


def _collect(nested):
    records = [r for batch in nested for r in batch]
    records.sort(key=lambda r: (r["group"], r["criterion"], r["run"]))
    return records


def run_table1(spec):
    """Coefficient RMSE of each criterion on the two-weight regression benchmark."""
    if spec.experiment != "table1":
        raise InvalidSpecError("run_table1 needs experiment='table1'")
    jobs = [(spec, case, k) for case in spec.cases for k in range(spec.runs)]
    records = _collect(_map_runs(_table1_run, jobs, spec.n_jobs))
    return ExperimentResult(spec, ("rmse",), records)


def run_table2(spec):
    """Causality indexes and discrimination index on the lagged causal pair."""
    if spec.experiment != "table2":
        raise InvalidSpecError("run_table2 needs experiment='table2'")
    jobs = [(spec, case, NOISE_CASES[case], k) for case in spec.cases for k in range(spec.runs)]
    records = _collect(_map_runs(_pair_run, jobs, spec.n_jobs))
    return ExperimentResult(spec, ("f_xy", "f_yx", "rho"), records)


def _alpha_group(alpha):
    return f"alpha={alpha:.2f}"


def run_rvr_sweep(spec):
    """Relative variation of the X->Y index as the noise moves from alpha=2 to heavier tails.

    Stable noise parameters are ``[alpha, 0, 0.4, 0]``. The index is averaged
    over ``spec.runs`` runs at every alpha, then
    ``xi(alpha) = |F(alpha) - F(2)| / |F(2)|``.

    Returns
    -------
    ExperimentResult
        ``extra['rvr']`` maps criterion to a list of ``(alpha, xi)`` pairs.
    """
    if spec.experiment != "fig2":
        raise InvalidSpecError("run_rvr_sweep needs experiment='fig2'")
    jobs = [(spec, _alpha_group(a), StableParams(float(a), 0.0, 0.4, 0.0), k)
            for a in spec.alpha_grid for k in range(spec.runs)]
    records = _collect(_map_runs(_pair_run, jobs, spec.n_jobs))
    result = ExperimentResult(spec, ("f_xy", "f_yx", "rho"), records)

    rvr = {}
    for crit in spec.criteria:
        ref = result.summary[(_alpha_group(2.0), crit)]["f_xy"]["mean"]
        if not ref or not np.isfinite(ref):
            raise ReferenceUndefinedError(f"{crit}: reference index F(2) = {ref}; RVR undefined")
        curve = []
        for a in spec.alpha_grid:
            f = result.summary[(_alpha_group(a), crit)]["f_xy"]["mean"]
            curve.append((float(a), abs((f - ref) / ref)))
        rvr[crit] = curve
    result.extra["rvr"] = rvr
    return result


def rvr_max(curve):
    return max(xi for _, xi in curve)


def run_fig1_timing(spec):
    """Mean solve time per sample size for the entropy criteria (serial)."""
    if spec.experiment != "fig1":
        raise InvalidSpecError("run_fig1_timing needs experiment='fig1'")
    records = []
    for crit in spec.criteria:
        if crit == "MSE":
            continue
        rows = benchmark_solver(crit, spec.n_grid, spec.criterion_config,
                                repeats=spec.timing_repeats, seed=spec.base_seed)
        for k, row in enumerate(rows):
            records.append({"run": k, "seed": spec.base_seed, "group": "timing",
                            "criterion": crit, "n": row["n"], "seconds": row["seconds"]})
    result = ExperimentResult(spec, ("seconds",), records)
    result.extra["timing"] = [{k: r[k] for k in ("criterion", "n", "seconds")} for r in records]
    return result


def loglog_slope(ns, seconds):
    """Least-squares slope of ``log(seconds)`` against ``log(n)``."""
    return float(np.polyfit(np.log(ns), np.log(seconds), 1)[0])


def run_experiment(spec):
    runner = {"table1": run_table1, "table2": run_table2, "fig1": run_fig1_timing,
              "fig2": run_rvr_sweep}.get(spec.experiment)
    if runner is None:
        raise InvalidSpecError(f"no runner for experiment {spec.experiment!r}")
    return runner(spec)

"""Benchmarks on random instances of the four-subsystem network."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linalg import rel_std_error
from .metanet import DEFAULT_K, MetaNetwork, build_meta_network
from .network import z_from_s
from .reduction import evaluate, evaluate_impedance, iterative_cascade, plan_reduction
from .update import SubsystemUpdate, update_subsystem

CSV_HEADER = ("experiment", "n_bus", "method", "subsystem", "median_time_s",
              "rel_std_err", "trials")
DEFAULT_N_BUS = (1, 2, 5, 10, 20, 50, 100)
EPS_GRID = tuple(np.logspace(-12, -2, 21))


def auto_trials(n_bus: int) -> int:
    return max(3, round(600 / n_bus))


@dataclass
class BenchConfig:
    """Settings shared by the benchmark runners.

    ``trials=None`` picks ``max(3, round(600 / n_bus))`` per point.
    """

    experiment: str = "methods-compare"
    n_bus: Sequence[int] = DEFAULT_N_BUS
    trials: int | None = None
    seed: int = 0
    k: complex = DEFAULT_K
    repetitions: int = 5
    epsilons: Sequence[float] = EPS_GRID
    subsystems: Sequence[str] = ("A", "C", "D")
    out: str | None = None

    def __post_init__(self):
        if any(int(n) < 1 for n in self.n_bus):
            raise ValueError("n_bus values must be >= 1")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    def trials_for(self, n_bus: int) -> int:
        return auto_trials(n_bus) if self.trials is None else int(self.trials)

    def trial_seed(self, n_bus: int, trial: int) -> int:
        return int(np.random.SeedSequence([self.seed, n_bus, trial]).generate_state(1)[0])


@dataclass
class BenchRow:
    experiment: str
    n_bus: int
    method: str
    subsystem: str
    median_time_s: float
    rel_std_err: float
    trials: int
    extra: dict = field(default_factory=dict)


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.experiment, r.n_bus, r.method, r.subsystem,
                        f"{r.median_time_s:.6e}", f"{r.rel_std_err:.6e}", r.trials])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": [asdict(r) for r in self.rows], "summary": self.summary},
                          indent=2)

    def write(self, path: str, fmt: str = "csv"):
        with open(path, "w") as fh:
            fh.write(self.to_csv() if fmt == "csv" else self.to_json())


def median_time(fn: Callable[[], object], repetitions: int = 5) -> float:
    """Median wall time of ``repetitions`` calls after one warm-up call."""
    fn()
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def method_runners(mn: MetaNetwork) -> dict[str, Callable[[], np.ndarray]]:
    scheme = mn.scheme
    plan = plan_reduction(scheme)
    return {
        "global": lambda: evaluate(scheme, keep_cache=False)[0],
        "reduced": lambda: evaluate(scheme, plan, keep_cache=False)[0],
        "iterative": lambda: iterative_cascade(scheme),
    }


def _aggregate(rows: dict, experiment: str, n_bus: int, trials: int, subsystem: str = "-"):
    out = []
    for method, (times, errs) in rows.items():
        out.append(BenchRow(experiment, n_bus, method, subsystem, float(np.median(times)),
                            float(np.mean(errs)), trials))
    return out


def run_methods_compare(cfg: BenchConfig) -> BenchReport:
    """Global, reduced and iterative evaluation against the glued-graph oracle.

    One block of rows per network variant: ``methods-compare`` (the full
    network) and ``methods-compare-modified`` (D without free ports).
    """
    report = BenchReport()
    for variant, modified in (("methods-compare", False), ("methods-compare-modified", True)):
        for n_bus in cfg.n_bus:
            trials = cfg.trials_for(n_bus)
            acc: dict = {m: ([], []) for m in ("global", "reduced", "iterative")}
            for t in range(trials):
                mn = build_meta_network(n_bus, cfg.trial_seed(n_bus, t), cfg.k, modified)
                ref = mn.oracle()[1].S
                for method, fn in method_runners(mn).items():
                    acc[method][1].append(rel_std_error(fn(), ref))
                    acc[method][0].append(median_time(fn, cfg.repetitions))
            report.rows.extend(_aggregate(acc, variant, n_bus, trials))
    _write(cfg, report)
    return report


def run_update_compare(cfg: BenchConfig) -> BenchReport:
    """Woodbury update versus global re-evaluation and iterative folding.

    Errors are measured against the glued-graph oracle of the updated network.
    """
    report = BenchReport()
    for n_bus in cfg.n_bus:
        trials = cfg.trials_for(n_bus)
        per_sub = {s: {m: ([], []) for m in ("update", "global", "iterative")}
                   for s in cfg.subsystems}
        for t in range(trials):
            seed = cfg.trial_seed(n_bus, t)
            mn = build_meta_network(n_bus, seed, cfg.k)
            _, cache = evaluate(mn.scheme)
            for j, name in enumerate(cfg.subsystems):
                new_sys, new_graph = mn.regenerate(name, [seed, 1000 + j])
                upd = SubsystemUpdate(name, new_sys.matrix)
                graphs = dict(mn.graphs)
                graphs[name] = new_graph
                new_mn = MetaNetwork(n_bus, mn.k, False, graphs,
                                     mn.scheme.with_system(name, new_sys))
                ref = new_mn.oracle()[1].S
                runners = {
                    "update": lambda: update_subsystem(cache, upd)[0],
                    "global": lambda: evaluate(new_mn.scheme, keep_cache=False)[0],
                    "iterative": lambda: iterative_cascade(new_mn.scheme),
                }
                for method, fn in runners.items():
                    per_sub[name][method][1].append(rel_std_error(fn(), ref))
                    per_sub[name][method][0].append(median_time(fn, cfg.repetitions))
        for name in cfg.subsystems:
            report.rows.extend(_aggregate(per_sub[name], "update-compare", n_bus, trials, name))
    _write(cfg, report)
    return report


def is_u_shaped(x, y, factor: float = 10.0) -> bool:
    """Interior minimum, both ends ``factor`` above it, falling then rising in log-log."""
    lx, ly = np.log10(np.asarray(x, float)), np.log10(np.asarray(y, float))
    i = int(np.argmin(ly))
    if i == 0 or i == len(ly) - 1:
        return False
    if ly[0] - ly[i] < np.log10(factor) or ly[-1] - ly[i] < np.log10(factor):
        return False
    left = np.polyfit(lx[: i + 1], ly[: i + 1], 1)[0]
    right = np.polyfit(lx[i:], ly[i:], 1)[0]
    return bool(left < 0 < right)


def run_epsilon_sweep(cfg: BenchConfig) -> BenchReport:
    """Impedance-path error versus the quasi-delta parameter.

    The reference is the glued-graph scattering matrix converted to Z.  The
    summary holds, per ``n_bus``, the minimizing epsilon, the minimum error and
    whether the curve is U-shaped.
    """
    eps = np.asarray(cfg.epsilons, dtype=float)
    if eps.min() > 1e-12 or eps.max() < 1e-2:
        raise ValueError("epsilon grid must span at least [1e-12, 1e-2]")
    report = BenchReport()
    for n_bus in cfg.n_bus:
        trials = cfg.trials_for(n_bus)
        errs = np.zeros((trials, eps.size))
        times = np.zeros((trials, eps.size))
        for t in range(trials):
            mn = build_meta_network(n_bus, cfg.trial_seed(n_bus, t), cfg.k)
            zref = z_from_s(mn.oracle()[1].S)
            for i, e in enumerate(eps):
                fn = lambda: evaluate_impedance(mn.scheme, epsilon=e)
                errs[t, i] = rel_std_error(fn(), zref)
                times[t, i] = median_time(fn, cfg.repetitions)
        curve = errs.mean(axis=0)
        for i, e in enumerate(eps):
            report.rows.append(BenchRow("epsilon-sweep", n_bus, f"eps={e:.3e}", "-",
                                        float(np.median(times[:, i])), float(curve[i]), trials,
                                        {"epsilon": float(e)}))
        i = int(np.argmin(curve))
        report.summary[str(n_bus)] = {
            "argmin_epsilon": float(eps[i]),
            "min_error": float(curve[i]),
            "u_shaped": is_u_shaped(eps, curve),
        }
    _write(cfg, report)
    return report


RUNNERS = {
    "methods-compare": run_methods_compare,
    "update-compare": run_update_compare,
    "epsilon-sweep": run_epsilon_sweep,
}


def _write(cfg: BenchConfig, report: BenchReport):
    if cfg.out:
        report.write(cfg.out, "json" if cfg.out.endswith(".json") else "csv")

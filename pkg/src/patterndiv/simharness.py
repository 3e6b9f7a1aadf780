"""Seeded Monte-Carlo driver for pattern-division experiments.

A trial drops ``G`` clusters in the sector, builds the overlap graph at the
requested array size, runs one pattern-assignment scheme, then evaluates the
two-layer precoder on freshly drawn channels.

Random streams
--------------
Every trial draws from independent ``numpy.random.SeedSequence`` children
keyed by integers, so results do not depend on execution order:

* geometry: ``spawn_key=(0, G, trialIndex)``
* channels: ``spawn_key=(1, G, trialIndex, M)``
* scheme:   ``spawn_key=(2, G, trialIndex, scheme_id, P)``

Geometry is shared by all schemes, array sizes and pattern budgets at the
same ``(G, trialIndex)``, and channels are shared by all schemes, so scheme
comparisons use common random numbers.

Config file
-----------
A JSON object with any of the keys below; missing keys take the defaults
shown (unknown keys are rejected)::

    {
      "M": 128, "D": 0.5, "Pt": 10.0, "sigma2": 1.0, "Kg": 2, "Vg": 2,
      "P": 4, "epsilon": 1.0, "wMin": 0.0, "seed": 0,
      "Mvalues": null, "Pvalues": null,
      "Gvalues": [2, 4, ..., 40],
      "schemes": ["ewvc_pd"],
      "trials": 100,
      "cellRadius": 600.0, "ringRadius": 30.0, "minDistance": 30.0,
      "outagePolicy": "structural",
      "rateThreshold": null,
      "oracleCap": 12,
      "outputPath": "report.csv"
    }

``Pt`` is linear; ``Pt_dB`` may be given instead.  ``Mvalues``/``Pvalues``
sweep the array size and pattern budget (defaulting to ``[M]`` and ``[P]``).
``outagePolicy`` is ``"structural"`` or ``"rateThreshold"``, the latter
requiring ``rateThreshold`` in bit/s/Hz.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import asrgraph, channel, coloring, precoding
from .channel import ConfigError, SystemConfig

__all__ = [
    "SCHEMES",
    "ExperimentConfig",
    "TrialMetrics",
    "ReportRow",
    "ExperimentReport",
    "ConfigError",
    "ExperimentError",
    "trial_rngs",
    "run_trial",
    "run_experiment",
    "write_report",
    "write_per_trial",
    "load_config",
    "config_from_dict",
    "REPORT_HEADER",
]

SCHEMES = ("ewvc_pd", "greedy", "random", "esa")
SCHEME_IDS = {name: i for i, name in enumerate(SCHEMES)}
OUTAGE_POLICIES = ("structural", "rateThreshold")

REPORT_HEADER = ["scheme", "M", "G", "P", "trials", "mean_sum_rate", "outage_prob", "mean_f",
                 "mean_patterns_used", "mean_solve_ns", "bypass_frac", "seed"]
TIMING_COLUMNS = ("mean_solve_ns",)

_SYSTEM_KEYS = {f.name for f in dataclasses.fields(SystemConfig)}


class ExperimentError(RuntimeError):
    """A trial failed; ``partial`` holds the report of completed points."""

    def __init__(self, message: str, partial: "ExperimentReport"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    Gvalues: tuple[int, ...] = tuple(range(2, 41, 2))
    schemes: tuple[str, ...] = ("ewvc_pd",)
    trials: int = 100
    cellRadius: float = 600.0
    ringRadius: float = 30.0
    minDistance: float = 30.0
    outagePolicy: str = "structural"
    rateThreshold: Optional[float] = None
    outputPath: str = "report.csv"
    oracleCap: int = coloring.DEFAULT_ORACLE_CAP
    Mvalues: Optional[tuple[int, ...]] = None
    Pvalues: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "Gvalues", tuple(self.Gvalues))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.Mvalues is not None:
            object.__setattr__(self, "Mvalues", tuple(self.Mvalues))
        if self.Pvalues is not None:
            object.__setattr__(self, "Pvalues", tuple(self.Pvalues))
        errors = self.violations()
        if errors:
            raise ConfigError(errors)

    @property
    def m_values(self) -> tuple[int, ...]:
        return self.Mvalues if self.Mvalues else (self.system.M,)

    @property
    def p_values(self) -> tuple[int, ...]:
        return self.Pvalues if self.Pvalues else (self.system.P,)

    def violations(self) -> list[str]:
        try:
            return self._violations()
        except (TypeError, ValueError) as exc:
            return [f"experiment parameters have the wrong type: {exc}"]

    def _violations(self) -> list[str]:
        errors = []
        if not self.Gvalues:
            errors.append("Gvalues must be non-empty")
        elif any(int(G) != G or G < 1 for G in self.Gvalues):
            errors.append("Gvalues must be positive integers")
        if not self.schemes:
            errors.append("schemes must be non-empty")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            errors.append(f"unknown schemes {unknown}; choose from {list(SCHEMES)}")
        if int(self.trials) != self.trials or self.trials < 1:
            errors.append("trials must be a positive integer")
        if not 0 < self.minDistance < self.cellRadius:
            errors.append("require 0 < minDistance < cellRadius")
        if not self.ringRadius > 0:
            errors.append("ringRadius must be positive")
        if self.outagePolicy not in OUTAGE_POLICIES:
            errors.append(f"outagePolicy must be one of {list(OUTAGE_POLICIES)}")
        elif self.outagePolicy == "rateThreshold" and (
                self.rateThreshold is None or not self.rateThreshold >= 0):
            errors.append("rateThreshold policy needs a non-negative rateThreshold")
        if int(self.oracleCap) != self.oracleCap or self.oracleCap < 1:
            errors.append("oracleCap must be a positive integer")
        if "esa" in self.schemes and self.Gvalues and max(self.Gvalues) > self.oracleCap:
            errors.append(f"esa requires max(Gvalues) <= oracleCap ({self.oracleCap}), "
                          f"got {max(self.Gvalues)}")
        if self.Mvalues is not None and any(int(M) != M or M < 1 for M in self.Mvalues):
            errors.append("Mvalues must be positive integers")
        if self.Pvalues is not None and any(int(P) != P or P < 1 for P in self.Pvalues):
            errors.append("Pvalues must be positive integers")
        return errors

    def with_(self, **changes) -> "ExperimentConfig":
        """Copy with top-level or system fields replaced."""
        sys_changes = {k: changes.pop(k) for k in list(changes) if k in _SYSTEM_KEYS}
        system = dataclasses.replace(self.system, **sys_changes) if sys_changes else self.system
        return dataclasses.replace(self, system=system, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self.system)
        for f in dataclasses.fields(self):
            if f.name != "system":
                value = getattr(self, f.name)
                out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from the flat JSON mapping, collecting every error."""
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])
    data = dict(data)
    errors = []
    if "Pt_dB" in data:
        if "Pt" in data:
            errors.append("give Pt or Pt_dB, not both")
        else:
            try:
                data["Pt"] = 10.0 ** (float(data.pop("Pt_dB")) / 10.0)
            except (TypeError, ValueError):
                errors.append("Pt_dB must be a number")
                data.pop("Pt_dB")
    top_keys = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"system"}
    unknown = sorted(set(data) - _SYSTEM_KEYS - top_keys)
    if unknown:
        errors.append(f"unknown config keys {unknown}")
    sys_kwargs = {k: data[k] for k in _SYSTEM_KEYS if k in data}
    top_kwargs = {k: data[k] for k in top_keys if k in data}
    try:
        system = SystemConfig(**sys_kwargs)
    except ConfigError as exc:
        errors += exc.errors
        system = SystemConfig()
    try:
        config = ExperimentConfig(system=system, **top_kwargs)
    except ConfigError as exc:
        errors += exc.errors
    except TypeError as exc:
        errors.append(f"experiment parameters have the wrong type: {exc}")
    if errors:
        raise ConfigError(errors)
    return config


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: not valid JSON ({exc})"]) from None
    return config_from_dict(data)


@dataclass(frozen=True)
class TrialMetrics:
    scheme: str
    G: int
    P: int
    M: int
    trialIndex: int
    sumRate: float
    fValue: float
    patternsUsed: int
    outage: bool
    solveNanos: int
    phase2Bypassed: bool
    buildNanos: int = 0
    infeasibleClusters: int = 0


@dataclass(frozen=True)
class ReportRow:
    scheme: str
    M: int
    G: int
    P: int
    trials: int
    meanSumRate: float
    outageProbability: float
    meanFValue: float
    meanPatternsUsed: float
    meanSolveNanos: float
    bypassFraction: float

    @classmethod
    def aggregate(cls, records: Sequence[TrialMetrics]) -> "ReportRow":
        first = records[0]
        n = len(records)
        return cls(
            scheme=first.scheme, M=first.M, G=first.G, P=first.P, trials=n,
            meanSumRate=float(np.mean([r.sumRate for r in records])),
            outageProbability=sum(r.outage for r in records) / n,
            meanFValue=float(np.mean([r.fValue for r in records])),
            meanPatternsUsed=float(np.mean([r.patternsUsed for r in records])),
            meanSolveNanos=float(np.mean([r.solveNanos for r in records])),
            bypassFraction=sum(r.phase2Bypassed for r in records) / n,
        )


@dataclass
class ExperimentReport:
    rows: list[ReportRow]
    seed: int
    config: Optional[dict] = None
    records: list[TrialMetrics] = field(default_factory=list)

    def row(self, scheme: str, G: int, P: Optional[int] = None, M: Optional[int] = None) -> ReportRow:
        for r in self.rows:
            if r.scheme == scheme and r.G == G and (P is None or r.P == P) and (M is None or r.M == M):
                return r
        raise KeyError((scheme, G, P, M))


def trial_rngs(seed: int, G: int, trialIndex: int, M: int, scheme: str, P: int):
    """Independent generators for geometry, channels and the scheme."""
    def make(*key):
        return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    return (make(0, G, trialIndex),
            make(1, G, trialIndex, M),
            make(2, G, trialIndex, SCHEME_IDS[scheme], P))


def _solve(scheme: str, graph, P: int, rng, oracle_cap: int):
    if scheme == "ewvc_pd":
        assignment, trace = coloring.ewvc_pd(graph, P)
        return assignment, trace.phase2Bypassed
    if scheme == "greedy":
        return coloring.greedy_baseline(graph, P), False
    if scheme == "random":
        return coloring.random_assignment(graph, P, rng), False
    if scheme == "esa":
        return coloring.esa_oracle(graph, P, oracle_cap)[0], False
    raise ValueError(f"unknown scheme {scheme!r}")


def run_trial(config: ExperimentConfig, G: int, scheme: str, trialIndex: int,
              M: Optional[int] = None, P: Optional[int] = None) -> TrialMetrics:
    """Run one Monte-Carlo trial and return its metrics.

    Outage under the structural policy means some cluster is left with
    fewer clean directions than users.  Under the rate-threshold policy it
    additionally covers any cluster whose rate falls below the threshold.
    Rank-deficient effective channels count as outage with zero rate.
    """
    sysc = config.system
    M = sysc.M if M is None else M
    P = sysc.P if P is None else P
    geo_rng, ch_rng, scheme_rng = trial_rngs(sysc.seed, G, trialIndex, M, scheme, P)

    geoms = channel.place_clusters(G, config.cellRadius, config.ringRadius, config.minDistance, geo_rng)
    supports = channel.support_sets(geoms, M, sysc.D)

    t0 = time.perf_counter_ns()
    graph = asrgraph.build_graph(supports, sysc.epsilon, sysc.wMin)
    build_ns = time.perf_counter_ns() - t0

    t0 = time.perf_counter_ns()
    assignment, bypassed = _solve(scheme, graph, P, scheme_rng, config.oracleCap)
    solve_ns = time.perf_counter_ns() - t0

    K = sysc.total_users(G)
    power_share = sysc.Pt / K
    rates = []
    infeasible = 0
    failed = False
    for g in range(G):
        # Draw every cluster's channel so the stream does not depend on the assignment.
        H = None
        if supports[g].rank:
            spectrum = channel.eigen_spectrum(geoms[g], supports[g], sysc.D, M)
            H = channel.sample_channel(spectrum, sysc.Kg, ch_rng)
        pre = precoding.prebeamformer(supports, assignment, g)
        if not precoding.feasibility(pre, sysc.Kg):
            infeasible += 1
            rates.append(0.0)
            continue
        Heff = precoding.effective_channel(H, pre, M)
        try:
            U2 = precoding.zf_precoder(Heff, sysc.Vg, power_share)
        except precoding.SingularChannelError:
            failed = True
            rates.append(0.0)
            continue
        rates.append(precoding.cluster_rate(Heff, U2, sysc.Pt, K, sysc.sigma2))

    outage = infeasible > 0 or failed
    if config.outagePolicy == "rateThreshold":
        outage = outage or any(r < config.rateThreshold for r in rates)

    return TrialMetrics(
        scheme=scheme, G=G, P=P, M=M, trialIndex=trialIndex,
        sumRate=float(sum(rates)),
        fValue=coloring.objective_f(graph, assignment),
        patternsUsed=assignment.patterns_used,
        outage=bool(outage),
        solveNanos=int(solve_ns),
        phase2Bypassed=bool(bypassed),
        buildNanos=int(build_ns),
        infeasibleClusters=infeasible,
    )


def _points(config: ExperimentConfig):
    schemes = [s for s in SCHEMES if s in config.schemes]
    for scheme in schemes:
        for G in sorted(set(config.Gvalues)):
            for M in sorted(set(config.m_values)):
                for P in sorted(set(config.p_values)):
                    yield scheme, G, M, P


def run_experiment(config: ExperimentConfig, keep_trials: bool = False) -> ExperimentReport:
    """Run every ``(scheme, G, M, P)`` point for ``config.trials`` trials.

    Trials run sequentially in one thread so solver timings are not
    perturbed.  On failure an :class:`ExperimentError` carries the report of
    the points completed so far.
    """
    report = ExperimentReport(rows=[], seed=config.system.seed, config=config.to_dict())
    for scheme, G, M, P in _points(config):
        try:
            records = [run_trial(config, G, scheme, t, M=M, P=P) for t in range(config.trials)]
        except Exception as exc:
            raise ExperimentError(
                f"trial failed at scheme={scheme} G={G} M={M} P={P}: {exc}", report) from exc
        report.rows.append(ReportRow.aggregate(records))
        if keep_trials:
            report.records.extend(records)
    return report


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_report(report: ExperimentReport, path: str | os.PathLike) -> None:
    """Write the aggregate CSV, one row per point in report order."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_HEADER)
            for r in report.rows:
                writer.writerow([
                    r.scheme, r.M, r.G, r.P, r.trials,
                    _fmt(r.meanSumRate), _fmt(r.outageProbability), _fmt(r.meanFValue),
                    _fmt(r.meanPatternsUsed), _fmt(r.meanSolveNanos), _fmt(r.bypassFraction),
                    report.seed,
                ])
    except OSError as exc:
        raise OSError(f"cannot write report to {os.fspath(path)!r}: {exc.strerror or exc}") from exc


PER_TRIAL_HEADER = [f.name for f in dataclasses.fields(TrialMetrics)]


def write_per_trial(records: Sequence[TrialMetrics], path: str | os.PathLike) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(PER_TRIAL_HEADER)
            for rec in records:
                row = []
                for name in PER_TRIAL_HEADER:
                    value = getattr(rec, name)
                    row.append(_fmt(value) if isinstance(value, float) else value)
                writer.writerow(row)
    except OSError as exc:
        raise OSError(f"cannot write per-trial CSV to {os.fspath(path)!r}: {exc.strerror or exc}") from exc

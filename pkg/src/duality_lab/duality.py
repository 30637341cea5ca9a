"""Experiment orchestration: evaluate the duality relations on single
configurations, overlap sweeps, and randomized campaigns.

Three scenarios are covered:

* ``pure_pure``    pure quanton, pure (vector) detectors; coherence and
  distinguishability sum to one exactly.
* ``mixed_pure``   mixed quanton, pure detectors; the sum falls short of
  one by a nonnegative slack, and the three terms form an identity.
* ``mixed_mixed``  mixed quanton, mixed detector state with per-path
  unitaries; coherence is bounded by its branch average and the duality
  survives as an inequality.

Every report records signed residuals, not just booleans, so regressions
in numerical quality stay visible.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .interference import scan_visibility, symmetric_detectors
from .linalg import principal_submatrix_margin, validate_density
from .measures import (
    DualityQuantities,
    coherence_bound_mixed_detector,
    coherence_normalized,
    distinguishability_mixed,
    distinguishability_mixed_detector,
    distinguishability_pure,
    mixed_duality_slack,
)
from .random import (
    haar_unitary,
    random_density,
    random_density_matrix,
    random_detectors,
    random_pure,
    stream,
)
from .states import (
    DetectorSet,
    MixedDetectorInteraction,
    MixedQuanton,
    PureQuanton,
    branch_overlaps,
    entangle_pure,
    reduce_quanton,
    reduce_quanton_mixed_detector,
)

TOLERANCE = 1e-9
MARGIN_TOL = 1e-10
SCENARIOS = ("pure_pure", "mixed_pure", "mixed_mixed")
THREADS_ENV = "DUALITY_LAB_THREADS"

CSV_COLUMNS = (
    "trial",
    "seed",
    "scenario",
    "n",
    "coherence",
    "distinguishability",
    "slack",
    "duality_sum",
    "slack_identity",
    "coherence_bound_margin",
    "psd_margin_min",
    "passed",
)


@dataclass(frozen=True)
class DualityReport:
    """Quantities, residuals, and verdicts for one configuration.

    relation_residuals carries signed values:

    * ``duality_sum``             coherence + distinguishability - 1
    * ``slack_identity``          coherence + distinguishability + slack - 1
      (mixed_pure only, an identity)
    * ``coherence_bound_margin``  branch-average bound minus coherence
      (mixed_mixed only, must be >= 0)
    * ``psd_margin_min``          smallest pairwise margin
      sqrt(rho_ii rho_jj) - |rho_ij| of the reduced quanton state

    ``slack`` is the identity residual term for mixed_pure, exactly zero
    for pure_pure, and the duality gap 1 - C - D for mixed_mixed.
    """

    scenario: str
    n: int
    coherence: float
    distinguishability: float
    slack: float
    visibility: float | None
    relation_residuals: dict[str, float]
    verdicts: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "n": self.n,
            "coherence": self.coherence,
            "distinguishability": self.distinguishability,
            "slack": self.slack,
            "visibility": self.visibility,
            "relation_residuals": {k: float(v) for k, v in self.relation_residuals.items()},
            "verdicts": {k: bool(v) for k, v in self.verdicts.items()},
            "passed": bool(self.passed),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _maybe_visibility(reduced: MixedQuanton, include: bool) -> float | None:
    return scan_visibility(reduced).visibility if include else None


def evaluate_pure(q: PureQuanton, d: DetectorSet, include_visibility: bool = False,
                  tol: float = TOLERANCE) -> DualityReport:
    """Entangle, trace the detector out, and check C + D_Q = 1.

    Coherence is read off the reduced state produced by the actual
    partial-trace pipeline, so the equality genuinely tests the numerics
    rather than an algebraic shortcut.
    """
    psi = entangle_pure(q, d)
    reduced = reduce_quanton(np.outer(psi, psi.conj()), q.n, d.dim)
    coherence = coherence_normalized(reduced.rho)
    dq = distinguishability_pure(q, d)
    quantities = DualityQuantities(n=q.n, coherence=coherence, distinguishability=dq, slack=0.0)
    duality_sum = coherence + dq - 1.0
    psd_margin = principal_submatrix_margin(reduced.rho.matrix)
    residuals = {"duality_sum": duality_sum, "psd_margin_min": psd_margin}
    verdicts = {
        "duality_sum": abs(duality_sum) <= tol,
        "psd_margin_min": psd_margin >= -MARGIN_TOL,
    }
    return DualityReport(
        scenario="pure_pure",
        n=q.n,
        coherence=quantities.coherence,
        distinguishability=quantities.distinguishability,
        slack=quantities.slack,
        visibility=_maybe_visibility(reduced, include_visibility),
        relation_residuals=residuals,
        verdicts=verdicts,
    )


def evaluate_mixed(q: MixedQuanton, d: DetectorSet, include_visibility: bool = False,
                   tol: float = TOLERANCE) -> DualityReport:
    """Mixed quanton, pure detectors: slack identity plus duality inequality.

    The reduced state is rho_ij <d_j|d_i> entrywise; C, D_Q, and the
    slack then satisfy C + D_Q + slack = 1 with slack >= 0.
    """
    if q.n != d.n:
        raise ValueError(f"path count mismatch: quanton has {q.n}, detectors have {d.n}")
    reduced = MixedQuanton(rho=validate_density(q.rho.matrix * d.gram.conj()))
    coherence = coherence_normalized(reduced.rho)
    dq = distinguishability_mixed(q, d.gram)
    slack = mixed_duality_slack(q, d.gram)
    quantities = DualityQuantities(n=q.n, coherence=coherence, distinguishability=dq, slack=slack)
    duality_sum = coherence + dq - 1.0
    slack_identity = coherence + dq + slack - 1.0
    psd_margin = principal_submatrix_margin(reduced.rho.matrix)
    residuals = {
        "duality_sum": duality_sum,
        "slack_identity": slack_identity,
        "psd_margin_min": psd_margin,
    }
    verdicts = {
        "duality_sum": duality_sum <= tol,
        "slack_identity": abs(slack_identity) <= tol,
        "psd_margin_min": psd_margin >= -MARGIN_TOL,
        "slack_nonnegative": slack >= -MARGIN_TOL,
    }
    return DualityReport(
        scenario="mixed_pure",
        n=q.n,
        coherence=quantities.coherence,
        distinguishability=quantities.distinguishability,
        slack=quantities.slack,
        visibility=_maybe_visibility(reduced, include_visibility),
        relation_residuals=residuals,
        verdicts=verdicts,
    )


def evaluate_mixed_detector(q: MixedQuanton, m: MixedDetectorInteraction,
                            include_visibility: bool = False,
                            tol: float = TOLERANCE) -> DualityReport:
    """Mixed quanton and mixed detector: the most general duality.

    Checks that the reduced coherence stays below its branch-averaged
    bound and that C + D_Q <= 1; ``slack`` records the observed gap.
    """
    reduced = reduce_quanton_mixed_detector(q, m)
    coherence = coherence_normalized(reduced.rho)
    branches = branch_overlaps(m)
    bound = coherence_bound_mixed_detector(q, branches)
    dq = distinguishability_mixed_detector(q, branches)
    gap = 1.0 - coherence - dq
    quantities = DualityQuantities(n=q.n, coherence=coherence, distinguishability=dq, slack=gap)
    duality_sum = coherence + dq - 1.0
    bound_margin = bound - coherence
    psd_margin = principal_submatrix_margin(reduced.rho.matrix)
    residuals = {
        "duality_sum": duality_sum,
        "coherence_bound_margin": bound_margin,
        "psd_margin_min": psd_margin,
    }
    verdicts = {
        "duality_sum": duality_sum <= tol,
        "coherence_bound_margin": bound_margin >= -MARGIN_TOL,
        "psd_margin_min": psd_margin >= -MARGIN_TOL,
    }
    return DualityReport(
        scenario="mixed_mixed",
        n=q.n,
        coherence=quantities.coherence,
        distinguishability=quantities.distinguishability,
        slack=quantities.slack,
        visibility=_maybe_visibility(reduced, include_visibility),
        relation_residuals=residuals,
        verdicts=verdicts,
    )


def sweep_overlap(n: int, gammas: Sequence[float],
                  quanton: PureQuanton | MixedQuanton) -> list[DualityReport]:
    """Evaluate the uniform-overlap detector family at each gamma.

    Along the sweep the coherence is nondecreasing and the
    distinguishability nonincreasing: raising every overlap hides path
    information and restores coherence in lockstep. Visibility is
    included for n <= 3 where the fringe correspondences apply.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValueError("gamma grid is empty")
    if any(not 0.0 <= g <= 1.0 for g in gammas):
        raise ValueError(f"gammas must lie in [0, 1], got {gammas!r}")
    if any(a > b for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gammas must be sorted ascending")
    if quanton.n != n:
        raise ValueError(f"quanton has {quanton.n} paths, sweep asked for {n}")
    include_v = n <= 3
    reports = []
    for gamma in gammas:
        detectors = symmetric_detectors(n, gamma)
        if isinstance(quanton, PureQuanton):
            reports.append(evaluate_pure(quanton, detectors, include_visibility=include_v))
        else:
            reports.append(evaluate_mixed(quanton, detectors, include_visibility=include_v))
    return reports


def _draw_report(scenario: str, rng: np.random.Generator, n_choices: Sequence[int],
                 detector_dim: int | None, rank: int | None) -> DualityReport:
    n = int(n_choices[rng.integers(len(n_choices))])
    dim = detector_dim if detector_dim is not None else int(rng.integers(n, 2 * n, endpoint=True))
    if scenario == "pure_pure":
        return evaluate_pure(random_pure(n, rng), random_detectors(n, dim, rng))
    if scenario == "mixed_pure":
        r = rank if rank is not None else int(rng.integers(1, n, endpoint=True))
        return evaluate_mixed(random_density(n, r, rng), random_detectors(n, dim, rng))
    if scenario == "mixed_mixed":
        r = rank if rank is not None else int(rng.integers(1, n, endpoint=True))
        quanton = random_density(n, r, rng)
        rank_d = int(rng.integers(1, dim, endpoint=True))
        rho_d = random_density_matrix(dim, rank_d, rng)
        unitaries = np.stack([haar_unitary(dim, rng) for _ in range(n)])
        interaction = MixedDetectorInteraction(rho_d=rho_d, unitaries=unitaries)
        return evaluate_mixed_detector(quanton, interaction)
    raise ValueError(f"unknown scenario {scenario!r}, expected one of {SCENARIOS}")


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class CampaignResult:
    """Per-trial reports plus order-independent aggregate statistics."""

    scenario: str
    trials: int
    seed: int
    reports: tuple[DualityReport, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def violations(self) -> list[int]:
        """Trial indices whose reports failed; replay with stream(seed, index)."""
        return [i for i, r in enumerate(self.reports) if not r.passed]

    def aggregate(self) -> dict:
        keys: list[str] = []
        for r in self.reports:
            for k in r.relation_residuals:
                if k not in keys:
                    keys.append(k)
        max_abs = {k: max(abs(r.relation_residuals[k]) for r in self.reports
                          if k in r.relation_residuals) for k in keys}
        mean_abs = {k: float(np.mean([abs(r.relation_residuals[k]) for r in self.reports
                                      if k in r.relation_residuals])) for k in keys}
        violating = self.violations()
        out = {
            "scenario": self.scenario,
            "trials": self.trials,
            "seed": self.seed,
            "violations": len(violating),
            "violating_trials": violating[:16],
            "max_abs_residuals": max_abs,
            "mean_abs_residuals": mean_abs,
            "max_duality_sum": max(r.relation_residuals["duality_sum"] for r in self.reports),
            "min_slack": min(r.slack for r in self.reports),
            "min_psd_margin": min(r.relation_residuals["psd_margin_min"] for r in self.reports),
            "passed": self.passed,
        }
        if self.scenario == "mixed_mixed":
            out["min_coherence_bound_margin"] = min(
                r.relation_residuals["coherence_bound_margin"] for r in self.reports
            )
        return out

    def to_csv(self, path_or_file) -> None:
        """One row per trial, fixed column order, 17 significant digits."""
        if hasattr(path_or_file, "write"):
            self._write_csv(path_or_file)
        else:
            with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for i, r in enumerate(self.reports):
            cells = [
                str(i),
                str(self.seed),
                r.scenario,
                str(r.n),
                f"{r.coherence:.17g}",
                f"{r.distinguishability:.17g}",
                f"{r.slack:.17g}",
            ]
            for key in ("duality_sum", "slack_identity", "coherence_bound_margin", "psd_margin_min"):
                value = r.relation_residuals.get(key)
                cells.append("" if value is None else f"{value:.17g}")
            cells.append("true" if r.passed else "false")
            fh.write(",".join(cells) + "\n")

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.aggregate(), indent=indent)


def run_campaign(scenario: str, trials: int, seed: int,
                 n: int | Sequence[int] = (2, 3, 4, 5, 6, 7, 8),
                 detector_dim: int | None = None,
                 rank: int | None = None) -> CampaignResult:
    """Evaluate `trials` seeded random instances of one scenario.

    Trial k draws everything from stream(seed, k), so results do not
    depend on execution order and any trial can be replayed in
    isolation. `n` may be a single path count or a set to draw from;
    detector dimension defaults to a uniform draw over n..2n and Ginibre
    rank over 1..n (detector-state rank over 1..dim). Honors the
    DUALITY_LAB_THREADS environment variable for parallel evaluation;
    the report order is fixed by trial index either way.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}, expected one of {SCENARIOS}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n_choices = (n,) if isinstance(n, int) else tuple(int(v) for v in n)
    if not n_choices or any(v < 2 for v in n_choices):
        raise ValueError(f"path counts must all be >= 2, got {n_choices!r}")

    def one(trial: int) -> DualityReport:
        return _draw_report(scenario, stream(seed, trial), n_choices, detector_dim, rank)

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = tuple(pool.map(one, range(trials)))
    else:
        reports = tuple(one(t) for t in range(trials))
    return CampaignResult(scenario=scenario, trials=trials, seed=seed, reports=reports)

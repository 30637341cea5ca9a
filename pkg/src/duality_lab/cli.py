"""Command-line front end.

Subcommands:

* ``verify``    evaluate one configuration and report every relation
* ``campaign``  run seeded random trials, write CSV rows + JSON aggregate
* ``sweep``     walk the uniform-overlap family over a gamma grid
* ``fringe``    emit a plot-ready intensity pattern with extracted V, C, D_Q

Exit status: 0 all relations passed, 1 a relation was violated, 2 the
configuration was malformed. Options may come from a JSON config file
(--config); explicit flags override the file, the file overrides
defaults. Campaigns require an explicit seed so reruns are exactly
reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .duality import (
    SCENARIOS,
    DualityReport,
    evaluate_mixed,
    evaluate_mixed_detector,
    evaluate_pure,
    run_campaign,
    sweep_overlap,
)
from .interference import MIN_GRID_POINTS, scan_visibility, symmetric_detectors
from .linalg import validate_density
from .measures import coherence_normalized, distinguishability_pure
from .random import (
    haar_unitary,
    random_density,
    random_density_matrix,
    random_detectors,
    random_pure,
    uniform_overlap_detectors,
)
from .states import MixedDetectorInteraction, MixedQuanton, PureQuanton, entangle_pure, reduce_quanton

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


def _parse_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot read complex number from {value!r}")


def _parse_amplitudes(raw) -> np.ndarray:
    if isinstance(raw, str):
        raw = [part for part in raw.split(",") if part.strip()]
    amps = np.array([_parse_complex(v) for v in raw], dtype=complex)
    if amps.size < 2:
        raise ConfigError("need at least 2 amplitudes")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ConfigError("amplitudes are all zero")
    return amps / norm


def _parse_rho(raw) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("rho must be a non-empty nested list")
    return np.array([[_parse_complex(v) for v in row] for row in raw], dtype=complex)


def _parse_gammas(cfg) -> list[float]:
    if cfg.get("gammas") is not None:
        raw = cfg["gammas"]
        if isinstance(raw, str):
            raw = [part for part in raw.split(",") if part.strip()]
        values = [float(v) for v in raw]
    elif cfg.get("gamma_range") is not None:
        parts = str(cfg["gamma_range"]).split(":")
        if len(parts) != 3:
            raise ConfigError("gamma-range must look like start:stop:count, e.g. 0:1:11")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("gamma-range count must be >= 1")
        values = [float(v) for v in np.linspace(start, stop, count)]
    else:
        raise ConfigError("need --gammas or --gamma-range")
    if not values:
        raise ConfigError("gamma grid is empty")
    return values


def _merged_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must contain a JSON object")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("config", "handler") or value is None:
            continue
        cfg[key] = value
    return cfg


def _require(cfg: dict, key: str, hint: str):
    if cfg.get(key) is None:
        raise ConfigError(f"missing required option: {hint}")
    return cfg[key]


def _write_text(output: str | None, text: str) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _report_csv(report: DualityReport, seed) -> str:
    lines = ["scenario,n,coherence,distinguishability,slack,visibility,"
             "duality_sum,slack_identity,coherence_bound_margin,psd_margin_min,passed,seed"]
    cells = [
        report.scenario,
        str(report.n),
        f"{report.coherence:.17g}",
        f"{report.distinguishability:.17g}",
        f"{report.slack:.17g}",
        "" if report.visibility is None else f"{report.visibility:.17g}",
    ]
    for key in ("duality_sum", "slack_identity", "coherence_bound_margin", "psd_margin_min"):
        value = report.relation_residuals.get(key)
        cells.append("" if value is None else f"{value:.17g}")
    cells.append("true" if report.passed else "false")
    cells.append("" if seed is None else str(seed))
    lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _verify_instance(cfg: dict) -> DualityReport:
    scenario = cfg.get("scenario", "pure_pure")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}, expected one of {SCENARIOS}")
    seed = cfg.get("seed")
    gamma = cfg.get("gamma")
    rho = _parse_rho(cfg["rho"]) if cfg.get("rho") is not None else None
    n = int(cfg["n"]) if cfg.get("n") is not None else (rho.shape[0] if rho is not None else None)
    if n is None:
        raise ConfigError("missing required option: --n (or a config rho)")
    include_v = n <= 3

    if scenario == "pure_pure":
        if cfg.get("amplitudes") is not None:
            quanton = PureQuanton(amplitudes=_parse_amplitudes(cfg["amplitudes"]))
        elif gamma is not None:
            quanton = PureQuanton(amplitudes=np.full(n, 1.0 / math.sqrt(n), dtype=complex))
        elif seed is not None:
            quanton = random_pure(n, seed)
        else:
            raise ConfigError("pure_pure needs --amplitudes, --gamma, or --seed")
        detectors = _verify_detectors(cfg, quanton.n)
        return evaluate_pure(quanton, detectors, include_visibility=include_v)

    if scenario == "mixed_pure":
        quanton = _verify_mixed_quanton(cfg, n, rho)
        detectors = _verify_detectors(cfg, quanton.n)
        return evaluate_mixed(quanton, detectors, include_visibility=include_v)

    if seed is None:
        raise ConfigError("mixed_mixed needs --seed to draw the detector state and unitaries")
    quanton = _verify_mixed_quanton(cfg, n, rho)
    rng = np.random.default_rng([int(seed), 1])
    dim = int(cfg.get("detector_dim") or quanton.n)
    rank_d = int(rng.integers(1, dim, endpoint=True))
    rho_d = random_density_matrix(dim, rank_d, rng)
    unitaries = np.stack([haar_unitary(dim, rng) for _ in range(quanton.n)])
    interaction = MixedDetectorInteraction(rho_d=rho_d, unitaries=unitaries)
    return evaluate_mixed_detector(quanton, interaction, include_visibility=include_v)


def _verify_mixed_quanton(cfg: dict, n: int, rho) -> MixedQuanton:
    if rho is not None:
        return MixedQuanton(rho=validate_density(rho))
    seed = cfg.get("seed")
    if seed is None:
        raise ConfigError("mixed scenarios need a config rho or --seed")
    # spawn key 0: the quanton; detectors use key 1 so the streams differ
    rng = np.random.default_rng([int(seed), 0])
    rank = int(cfg["rank"]) if cfg.get("rank") is not None else int(rng.integers(1, n, endpoint=True))
    return random_density(n, rank, rng)


def _verify_detectors(cfg: dict, n: int):
    gamma = cfg.get("gamma")
    dim = int(cfg.get("detector_dim") or n)
    if gamma is not None:
        return uniform_overlap_detectors(n, float(gamma), dim, cfg.get("seed", 0) or 0)
    if cfg.get("seed") is not None:
        # offset the stream so the detectors differ from the quanton draw
        return random_detectors(n, dim, np.random.default_rng([int(cfg["seed"]), 1]))
    raise ConfigError("need --gamma or --seed to build detectors")


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    report = _verify_instance(cfg)
    if cfg.get("format", "json") == "csv":
        text = _report_csv(report, cfg.get("seed"))
    else:
        text = report.to_json() + "\n"
    _write_text(cfg.get("output"), text)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_campaign(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    scenario = _require(cfg, "scenario", "--scenario")
    n = int(_require(cfg, "n", "--n"))
    trials = int(_require(cfg, "trials", "--trials"))
    seed = int(_require(cfg, "seed", "--seed (campaigns never use a silent entropy source)"))
    if trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {trials}")
    result = run_campaign(
        scenario,
        trials,
        seed,
        n=n,
        detector_dim=cfg.get("detector_dim"),
        rank=cfg.get("rank"),
    )
    prefix = cfg.get("output", "campaign")
    result.to_csv(f"{prefix}.csv")
    with open(f"{prefix}.json", "w", encoding="utf-8", newline="") as fh:
        fh.write(result.to_json() + "\n")
    aggregate = result.aggregate()
    print(
        f"{scenario}: {trials} trials, {aggregate['violations']} violations, "
        f"max duality sum {aggregate['max_duality_sum']:.3e} -> {prefix}.csv, {prefix}.json"
    )
    return EXIT_OK if result.passed else EXIT_VIOLATION


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    n = int(_require(cfg, "n", "--n"))
    scenario = cfg.get("scenario", "pure_pure")
    if scenario not in ("pure_pure", "mixed_pure"):
        raise ConfigError("sweep supports the pure_pure and mixed_pure scenarios")
    gammas = _parse_gammas(cfg)
    if scenario == "pure_pure":
        if cfg.get("seed") is not None:
            quanton = random_pure(n, int(cfg["seed"]))
        else:
            quanton = PureQuanton(amplitudes=np.full(n, 1.0 / math.sqrt(n), dtype=complex))
    else:
        seed = _require(cfg, "seed", "--seed (to draw the mixed quanton)")
        rng = np.random.default_rng(int(seed))
        rank = int(cfg["rank"]) if cfg.get("rank") is not None else 2
        quanton = random_density(n, min(rank, n), rng)
    reports = sweep_overlap(n, gammas, quanton)
    lines = ["gamma,coherence,distinguishability,slack,visibility"]
    for gamma, report in zip(gammas, reports):
        vis = "" if report.visibility is None else f"{report.visibility:.17g}"
        lines.append(
            f"{gamma:.17g},{report.coherence:.17g},{report.distinguishability:.17g},"
            f"{report.slack:.17g},{vis}"
        )
    _write_text(cfg.get("output"), "\n".join(lines) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_fringe(args: argparse.Namespace) -> int:
    cfg = _merged_config(args)
    n = int(_require(cfg, "n", "--n"))
    gamma = float(_require(cfg, "gamma", "--gamma"))
    grid_points = int(cfg.get("grid_points", 4096))
    if grid_points < MIN_GRID_POINTS:
        raise ConfigError(f"--grid-points must be >= {MIN_GRID_POINTS}, got {grid_points}")
    quanton = PureQuanton(amplitudes=np.full(n, 1.0 / math.sqrt(n), dtype=complex))
    detectors = symmetric_detectors(n, gamma)
    psi = entangle_pure(quanton, detectors)
    reduced = reduce_quanton(np.outer(psi, psi.conj()), n, detectors.dim)
    scan = scan_visibility(reduced, grid_points)
    coherence = coherence_normalized(reduced.rho)
    dq = distinguishability_pure(quanton, detectors)
    header = (
        f"n={n} gamma={gamma!r} visibility={scan.visibility!r} "
        f"coherence={coherence!r} distinguishability={dq!r}"
    )
    output = cfg.get("output")
    if output is None:
        scan.to_csv(sys.stdout, header_comment=header)
    else:
        scan.to_csv(output, header_comment=header)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duality-lab",
        description="Verify coherence / path-distinguishability duality in n-path interferometers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; explicit flags win over its values")
        p.add_argument("--n", type=int, help="number of paths/slits")
        p.add_argument("--seed", type=int, help="root seed (PCG64)")
        p.add_argument("--output", help="output path (default: stdout, campaigns: file prefix)")

    p = sub.add_parser("verify", help="evaluate one configuration")
    common(p)
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--gamma", type=float, help="uniform pairwise detector overlap in [0, 1]")
    p.add_argument("--amplitudes", help="comma-separated path amplitudes (normalized for you)")
    p.add_argument("--rank", type=int, help="Ginibre rank of the mixed quanton")
    p.add_argument("--detector-dim", dest="detector_dim", type=int)
    p.add_argument("--format", choices=("json", "csv"))
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("campaign", help="run seeded random trials")
    common(p)
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--trials", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--detector-dim", dest="detector_dim", type=int)
    p.set_defaults(handler=cmd_campaign)

    p = sub.add_parser("sweep", help="walk the uniform-overlap family over a gamma grid")
    common(p)
    p.add_argument("--scenario", choices=("pure_pure", "mixed_pure"))
    p.add_argument("--gammas", help="comma-separated gamma values, ascending")
    p.add_argument("--gamma-range", dest="gamma_range", help="start:stop:count, e.g. 0:1:11")
    p.add_argument("--rank", type=int)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("fringe", help="emit one intensity pattern as CSV")
    common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.set_defaults(handler=cmd_fringe)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

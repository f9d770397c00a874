"""Experiment harness: config -> sequence -> zeros -> diagram -> potentials.

A config is a flat JSON object; polynomial coefficients are strings in the
``"a/b+c/di"`` format so the data stays exact::

    {
      "name": "two_poles",
      "P": ["1"], "Q": ["0", "-1", "1"], "T": ["0", "1"],
      "n_list": [5, 10, 20],
      "precision_bits": null,
      "disk": {"center": "1/2", "rho": 3},
      "grid_h": 0.05,
      "eps_list": [0.1, 0.2, 0.5],
      "square": {"center": "-1/2", "half_width": 0.25},
      "skip": []
    }

``"Q_roots"`` may replace ``"Q"`` to give the poles directly.  Outputs:
``zeros.csv``, ``psi_grid.csv``, ``empirical_grid_<n>.csv``,
``voronoi.svg`` and ``summary.json``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .gauss_poly import (
    DerivativeSequence,
    GaussianRational,
    HypothesisViolation,
    ProblemInstance,
    SequenceEntry,
    Polynomial,
    closed_form_leading_coeff,
    closed_form_value_at_zero,
    generate_sequence,
    parse_coefficient,
    parse_polynomial,
    scale_translate_sequence,
    transform_instance,
)
from .potential import (
    LimitPotentialSpec,
    NormalizationViolated,
    growth_bound_series,
    l1_discrepancy,
    muS_log_potential,
    potential_grid,
    psi,
    sup_error,
    total_mass,
    write_field_csv,
)
from .rootfind import EmpiricalMeasure, certify_roots, default_precision, empirical_measure, find_roots, write_zeros_csv
from .voronoi import VoronoiDiagram, build_voronoi, distances_to_skeleton, voronoi_svg

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentSummary",
    "load_config",
    "run_experiment",
    "skeleton_fraction",
    "convergence_study",
    "main",
]

DIAGNOSTICS = ("zeros", "grids", "svg", "l1", "sup", "psi_minus_L", "far_field", "growth", "convergence")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    P: list[str]
    Q: list[str]
    T: list[str]
    n_list: list[int]
    precision_bits: int | None = None
    disk_center: str = "0"
    disk_rho: float = 3.0
    grid_h: float = 0.05
    eps_list: list[float] = field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8])
    square: tuple[str, float] | None = None
    skip: list[str] = field(default_factory=list)
    seed_offset: int = 0
    out_dir: str = "out"

    def __post_init__(self):
        if not self.n_list:
            raise ConfigError("n_list must not be empty")
        if any(n < 1 for n in self.n_list):
            raise ConfigError("n_list entries must be >= 1")
        if list(self.n_list) != sorted(set(self.n_list)):
            raise ConfigError("n_list must be strictly ascending")
        if self.grid_h <= 0:
            raise ConfigError("grid_h must be positive")
        if self.disk_rho <= 0:
            raise ConfigError("disk rho must be positive")
        if not self.eps_list or any(e <= 0 for e in self.eps_list):
            raise ConfigError("eps_list must be nonempty with positive entries")
        if self.precision_bits is not None and self.precision_bits < 64:
            raise ConfigError("precision_bits must be >= 64")
        unknown = set(self.skip) - set(DIAGNOSTICS)
        if unknown:
            raise ConfigError(f"unknown diagnostics in skip: {sorted(unknown)}")
        try:
            for poly in (self.P, self.Q, self.T):
                parse_polynomial(poly)
            parse_coefficient(self.disk_center)
            if self.square is not None:
                parse_coefficient(self.square[0])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentConfig:
        try:
            if "Q_roots" in data:
                Q = Polynomial.from_roots(data["Q_roots"]).to_strings()
            else:
                Q = list(data["Q"])
            disk = data.get("disk", {})
            square = data.get("square")
            return cls(
                name=data.get("name", "experiment"),
                P=list(data["P"]),
                Q=Q,
                T=list(data["T"]),
                n_list=[int(n) for n in data["n_list"]],
                precision_bits=data.get("precision_bits"),
                disk_center=str(disk.get("center", "0")),
                disk_rho=float(disk.get("rho", 3.0)),
                grid_h=float(data.get("grid_h", 0.05)),
                eps_list=[float(e) for e in data.get("eps_list", [0.2, 0.4, 0.6, 0.8])],
                square=None if square is None else (str(square["center"]), float(square["half_width"])),
                skip=list(data.get("skip", [])),
                seed_offset=int(data.get("seed_offset", 0)),
                out_dir=str(data.get("out_dir", "out")),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def enabled(self, name: str) -> bool:
        return name not in self.skip


def load_config(path: str | os.PathLike | None) -> ExperimentConfig:
    """Read a JSON config; ``None`` loads the bundled five-pole reference run."""
    if path is None:
        text = resources.files("shire.configs").joinpath("five_poles.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


@dataclass
class PerNRecord:
    n: int
    m_n: int
    degree_ok: bool
    leading_ok: bool
    value_at_pole_ok: bool | None
    P_n: list[str]
    precision_bits: int | None = None
    max_residual: float | None = None
    max_relative_residual: float | None = None
    min_separation: float | None = None
    skeleton_fraction: dict[str, float] = field(default_factory=dict)
    far_from_skeleton: dict[str, int] = field(default_factory=dict)  # zeros at distance >= eps
    l1: float | None = None
    l1_skipped_area: float | None = None
    sup_error: float | None = None
    b_n: float | None = None


@dataclass
class ExperimentSummary:
    name: str
    instance: dict
    per_n: list[PerNRecord]
    total_mass: float
    mass_formula: float
    l1_discrepancy_by_n: dict[str, float]
    psi_minus_L_max_abs: float | None
    far_field_residuals: dict[str, float]
    growth_limit: float | None = None
    convergence: dict | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def skeleton_fraction(measure: EmpiricalMeasure, diagram: VoronoiDiagram, eps: float) -> float:
    """Share of the atoms lying within ``eps`` of the Voronoi skeleton."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    dist = distances_to_skeleton(measure.locations(), diagram)
    return float(np.count_nonzero(dist < eps) / len(dist))


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------


def _rational_pole(instance: ProblemInstance) -> GaussianRational | None:
    """A pole that is exactly a Gaussian rational, preferring the origin."""
    if instance.Q[0].is_zero():
        return GaussianRational(0)
    for z in instance.Q_zeros:
        w = complex(z)
        a = GaussianRational(
            Fraction(w.real).limit_denominator(10**6), Fraction(w.imag).limit_denominator(10**6)
        )
        if instance.Q(a).is_zero():
            return a
    return None


def _normalized_growth(seq: DerivativeSequence, roots: dict[int, np.ndarray]):
    """Growth series after moving an exact pole to 0 with all others beyond |z| = 2."""
    inst = seq.instance
    a = _rational_pole(inst)
    if a is None:
        return None
    za = complex(a)
    others = [abs(complex(z) - za) for z in inst.Q_zeros if abs(complex(z) - za) > 1e-12]
    d_min = min(others)
    tau = Fraction(d_min / 3).limit_denominator(1000)
    if tau <= 0 or d_min / float(tau) <= 2:
        return None
    if tau == 1 and a.is_zero():
        hat_seq, hat_roots = seq, roots
    else:
        hat_inst = transform_instance(inst, tau, a)
        hat_seq = DerivativeSequence(
            hat_inst,
            [
                SequenceEntry(e.n, p := scale_translate_sequence(e.P_n, e.n, tau, a), p.leading, p.degree)
                for e in seq.entries
            ],
        )
        hat_roots = {n: (r - za) / float(tau) for n, r in roots.items()}
    try:
        return growth_bound_series(hat_seq, hat_roots, rho=1.0)
    except NormalizationViolated:
        return None


def _sample_points(diagram: VoronoiDiagram, spec: LimitPotentialSpec, center: complex, rho: float,
                   count: int, seed: int = 0) -> list[complex]:
    rng = np.random.default_rng(seed)
    pts: list[complex] = []
    while len(pts) < count:
        r = rho * math.sqrt(rng.uniform())
        z = center + r * complex(math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a))
        if distances_to_skeleton(np.array([z]), diagram)[0] <= 0.1:
            continue
        if min(abs(z - w) for w in spec.zeros) <= 0.1:
            continue
        pts.append(z)
    return pts


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class _State:
    config: ExperimentConfig
    instance: ProblemInstance
    seq: DerivativeSequence
    spec: LimitPotentialSpec
    diagram: VoronoiDiagram
    records: list[PerNRecord]
    roots: dict
    measures: dict
    residuals: dict
    growth: Any = None


def _compute(config: ExperimentConfig) -> _State:
    n_top = config.n_list[-1]
    prec0 = config.precision_bits or default_precision(n_top)
    instance = ProblemInstance.create(config.P, config.Q, config.T, precision_bits=prec0)
    seq = generate_sequence(instance, n_top)

    # exact checks first
    records: list[PerNRecord] = []
    pole_at_zero = instance.Q[0].is_zero()
    for n in config.n_list:
        e = seq[n]
        records.append(
            PerNRecord(
                n=n,
                m_n=e.m_n,
                degree_ok=e.m_n == instance.degree(n),
                leading_ok=e.A_n == closed_form_leading_coeff(n, instance),
                value_at_pole_ok=(e.P_n[0] == closed_form_value_at_zero(n, instance)) if pole_at_zero else None,
                P_n=e.P_n.to_strings(),
            )
        )
    bad = [r.n for r in records if not (r.degree_ok and r.leading_ok and r.value_at_pole_ok is not False)]
    if bad:
        raise AssertionError(f"exact identities failed for n in {bad}")

    spec = LimitPotentialSpec.from_instance(instance)
    diagram = build_voronoi(spec.zeros)
    center = complex(parse_coefficient(config.disk_center))

    roots, measures, residuals = {}, {}, {}
    for rec in records:
        n = rec.n
        prec = config.precision_bits or default_precision(n)
        rs = find_roots(seq[n].P_n, precision_bits=prec, seed_offset=config.seed_offset)
        cert = certify_roots(seq[n].P_n, rs)
        roots[n] = rs
        measures[n] = empirical_measure(rs, n)
        rec.precision_bits = prec
        rec.max_residual = cert.max_residual
        rec.max_relative_residual = max(cert.relative_residuals)
        rec.min_separation = cert.min_separation if len(rs) > 1 else None
        residuals[n] = cert.residuals
        rec.skeleton_fraction = {
            repr(eps): skeleton_fraction(measures[n], diagram, eps) for eps in config.eps_list
        }
        dist = distances_to_skeleton(measures[n].locations(), diagram)
        rec.far_from_skeleton = {repr(eps): int(np.count_nonzero(dist >= eps)) for eps in config.eps_list}
        if config.enabled("l1"):
            est = l1_discrepancy(measures[n], spec, diagram, (center, config.disk_rho), config.grid_h)
            rec.l1, rec.l1_skipped_area = est.value, est.skipped_area
        if config.enabled("sup") and config.square is not None:
            sq = (complex(parse_coefficient(config.square[0])), config.square[1])
            rec.sup_error = sup_error(measures[n], spec, sq, config.grid_h / 2)

    state = _State(config, instance, seq, spec, diagram, records, roots, measures, residuals)
    if config.enabled("growth"):
        g = _normalized_growth(seq, {n: r.as_complex() for n, r in roots.items()})
        if g is not None:
            state.growth = g
            for rec in records:
                if rec.n in g.ns:
                    rec.b_n = g.values[g.ns.index(rec.n)]
    return state


def _convergence_table(state: _State) -> dict:
    rows = [
        {
            "n": r.n,
            "sup_error": r.sup_error,
            "l1": r.l1,
            "skeleton_fraction": r.skeleton_fraction,
            "b_n": r.b_n,
        }
        for r in state.records
    ]

    def decreasing(key):
        vals = [row[key] for row in rows]
        if any(v is None for v in vals):
            return None
        return all(b < a for a, b in zip(vals, vals[1:]))

    return {
        "rows": rows,
        "sup_error_decreasing": decreasing("sup_error"),
        "l1_decreasing": decreasing("l1"),
        "mass_target": state.spec.mass,
    }


def convergence_study(config: ExperimentConfig) -> dict:
    """Table of per-``n`` errors with monotonicity flags (needs >= 3 values of n)."""
    if len(config.n_list) < 3:
        raise ConfigError("convergence study needs at least three values of n")
    return _convergence_table(_compute(config))


def run_experiment(config: ExperimentConfig, out_dir: str | os.PathLike | None = None) -> ExperimentSummary:
    """Run the whole pipeline and write the artifacts to ``out_dir`` (default ``config.out_dir``)."""
    state = _compute(config)
    spec, diagram = state.spec, state.diagram
    out = Path(config.out_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    center = complex(parse_coefficient(config.disk_center))

    psi_minus_L = None
    if config.enabled("psi_minus_L"):
        pts = _sample_points(diagram, spec, center, config.disk_rho, 20)
        psi_minus_L = max(abs(psi(z, spec) - (muS_log_potential(z, diagram, spec) - spec.D)) for z in pts)

    far = {}
    if config.enabled("far_field"):
        for R in (1e2, 1e3, 1e4):
            z = center + R * complex(math.cos(0.3), math.sin(0.3))
            far[f"{R:g}"] = abs(muS_log_potential(z, diagram, spec) - spec.mass * math.log(abs(z)))

    convergence = None
    if config.enabled("convergence") and len(config.n_list) >= 3:
        convergence = _convergence_table(state)

    inst = state.instance
    summary = ExperimentSummary(
        name=config.name,
        instance={
            "P": inst.P.to_strings(),
            "Q": inst.Q.to_strings(),
            "T": inst.T.to_strings(),
            "p": inst.p,
            "q": inst.q,
            "t": inst.t,
            "poles": [[complex(z).real, complex(z).imag] for z in spec.zeros],
            "D": spec.D,
        },
        per_n=state.records,
        total_mass=total_mass(diagram, spec),
        mass_formula=spec.mass,
        l1_discrepancy_by_n={str(r.n): r.l1 for r in state.records if r.l1 is not None},
        psi_minus_L_max_abs=psi_minus_L,
        far_field_residuals=far,
        growth_limit=state.growth.limit if state.growth is not None else None,
        convergence=convergence,
    )

    if config.enabled("zeros"):
        buf = io.StringIO()
        write_zeros_csv(buf, ((n, state.roots[n], state.residuals[n]) for n in config.n_list))
        _atomic_write(out / "zeros.csv", buf.getvalue())
    if config.enabled("grids"):
        buf = io.StringIO()
        write_field_csv(buf, potential_grid("closed_form_psi", spec, center, config.disk_rho, config.grid_h))
        _atomic_write(out / "psi_grid.csv", buf.getvalue())
        for r in state.records:
            buf = io.StringIO()
            fld = potential_grid(
                "empirical_shifted", spec, center, config.disk_rho, config.grid_h, state.measures[r.n]
            )
            write_field_csv(buf, fld)
            _atomic_write(out / f"empirical_grid_{r.n}.csv", buf.getvalue())
    if config.enabled("svg"):
        top = config.n_list[-1]
        svg = voronoi_svg(diagram, state.roots[top].as_complex(), title=f"{config.name}: zeros of P_{top}")
        _atomic_write(out / "voronoi.svg", svg)
    _atomic_write(out / "summary.json", summary.to_json())
    return summary


# --------------------------------------------------------------------------
# command line
# --------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shire",
        description="Zeros of iterated derivatives of (P/Q)exp(T) against the Voronoi-skeleton limit.",
    )
    ap.add_argument("--config", help="JSON config (default: bundled five-pole reference run)")
    ap.add_argument("--out", help="output directory (default: the config's out_dir, else ./out)")
    ap.add_argument("--n", type=_int_list, help="comma-separated override of n_list")
    ap.add_argument("--precision-bits", type=int)
    ap.add_argument("--grid-h", type=float)
    ap.add_argument("--seed-offset", type=int, help="rotation of the initial root placement")
    ap.add_argument("--skip", default="", help=f"comma-separated diagnostics to skip: {','.join(DIAGNOSTICS)}")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides: dict[str, Any] = {}
        if args.n is not None:
            overrides["n_list"] = args.n
        if args.precision_bits is not None:
            overrides["precision_bits"] = args.precision_bits
        if args.grid_h is not None:
            overrides["grid_h"] = args.grid_h
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.seed_offset is not None:
            overrides["seed_offset"] = args.seed_offset
        if args.skip:
            overrides["skip"] = sorted(set(cfg.skip) | {s for s in args.skip.split(",") if s})
        if overrides:
            cfg = ExperimentConfig(**{**cfg.__dict__, **overrides})
        summary = run_experiment(cfg)
    except (ConfigError, HypothesisViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for rec in summary.per_n:
        fr = ", ".join(f"eps={k}: {v:.3f}" for k, v in rec.skeleton_fraction.items())
        print(f"n={rec.n:3d}  m_n={rec.m_n:4d}  max rel. residual={rec.max_relative_residual:.2e}  skeleton fraction [{fr}]")
    print(f"total mass {summary.total_mass:.12f}  (formula {summary.mass_formula:.12f})")
    print(f"outputs written to {Path(cfg.out_dir).resolve()}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Parameter sweeps, threshold reports and result serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .config import GeometrySpec, RunConfig, SweepSpec
from .core import PhysicsContext, Position3
from .exceptions import ConfigurationError
from .integrals import (
    CutoffPair,
    RadialModeGrid,
    SeparationGeometry,
    asymptotic_slope,
    charge_decoherence_scaling,
    mass_decoherence_scaling,
    total_photon_number,
    visibility,
)
from .tomography import (
    Config,
    TomographyScenario,
    build_state_and_reduce,
    entropy_from_overlap,
    expect_C_RL,
    field_gram,
)

__all__ = [
    "ResultRecord",
    "RECORD_FIELDS",
    "evaluate_geometry",
    "evaluate_scenario",
    "run_sweep",
    "report_threshold",
    "records_to_csv",
    "records_to_json",
    "write_results",
    "worker_count",
]

NOMINAL_THRESHOLD = 137.0


@dataclass(frozen=True)
class ResultRecord:
    index: int
    mode: str
    axis: str
    value: float
    delta_r: float
    q: float
    q_B: float
    k_min: float
    k_max: float
    mass: float
    n: float
    visibility: float
    c_rl: float
    subspace_weight: float
    entropy_bits: float
    charge_scaling: float
    mass_scaling: float

    def as_dict(self) -> dict:
        return asdict(self)


RECORD_FIELDS = tuple(ResultRecord.__dataclass_fields__)


def worker_count(default: int | None = None) -> int:
    """Worker cap from ``GHOSTSIM_THREADS`` (falls back to the CPU count)."""
    raw = os.environ.get("GHOSTSIM_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ConfigurationError(f"GHOSTSIM_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise ConfigurationError("GHOSTSIM_THREADS must be at least 1")
        return n
    return default or min(8, os.cpu_count() or 1)


def evaluate_geometry(spec: GeometrySpec, ctx: PhysicsContext, *, index: int = 0, axis: str = "", value: float = 0.0) -> ResultRecord:
    """Single charge superposed across ``spec.geometry``; B is absent."""
    n = total_photon_number(spec.geometry, spec.q, spec.cutoffs, spec.grid, ctx)
    vis = visibility(n)
    return ResultRecord(
        index=index,
        mode="geometry",
        axis=axis,
        value=value,
        delta_r=spec.geometry.delta_r,
        q=spec.q,
        q_B=0.0,
        k_min=spec.cutoffs.k_min,
        k_max=spec.cutoffs.k_max,
        mass=spec.mass,
        n=n,
        visibility=vis,
        c_rl=vis,
        subspace_weight=0.5,
        entropy_bits=entropy_from_overlap(vis),
        charge_scaling=charge_decoherence_scaling(abs(spec.q), ctx),
        mass_scaling=mass_decoherence_scaling(spec.mass, ctx),
    )


def evaluate_scenario(
    scn: TomographyScenario,
    ctx: PhysicsContext,
    *,
    reference: str = "L",
    mass: float = 0.0,
    index: int = 0,
    axis: str = "",
    value: float = 0.0,
) -> ResultRecord:
    gram = field_gram(scn, ctx)
    n = float(gram.log_distance[Config.AR_BL, Config.AL_BR])
    rho = build_state_and_reduce(scn, ctx)
    c_rl, weight = expect_C_RL(rho)
    left, right = Config[f"AL_B{reference}"], Config[f"AR_B{reference}"]
    return ResultRecord(
        index=index,
        mode="scenario",
        axis=axis,
        value=value,
        delta_r=scn.r_AL.distance(scn.r_AR),
        q=scn.q_A,
        q_B=scn.q_B,
        k_min=scn.cutoffs.k_min,
        k_max=scn.cutoffs.k_max,
        mass=mass,
        n=n,
        visibility=visibility(n),
        c_rl=c_rl,
        subspace_weight=weight,
        entropy_bits=entropy_from_overlap(gram[left, right]),
        charge_scaling=charge_decoherence_scaling(abs(scn.q_A), ctx),
        mass_scaling=mass_decoherence_scaling(mass, ctx),
    )


def _rescaled(a: Position3, b: Position3, separation: float) -> tuple[np.ndarray, np.ndarray]:
    """Move ``a`` and ``b`` symmetrically about their midpoint to the given separation."""
    pa, pb = a.as_array(), b.as_array()
    mid = 0.5 * (pa + pb)
    d = pb - pa
    norm = np.linalg.norm(d)
    u = d / norm if norm > 0 else np.array([1.0, 0.0, 0.0])
    return mid - 0.5 * separation * u, mid + 0.5 * separation * u


def _cutoffs_with(cut: CutoffPair, axis: str, value: float) -> CutoffPair:
    if axis == "k_max":
        return CutoffPair(cut.k_min, value)
    if axis == "k_min":
        return CutoffPair(value, cut.k_max)
    return cut


def _geometry_point(spec: GeometrySpec, axis: str, value: float) -> GeometrySpec:
    if axis == "delta_r":
        ra, rb = _rescaled(spec.geometry.r_a, spec.geometry.r_b, value)
        return replace(spec, geometry=SeparationGeometry(Position3.of(ra), Position3.of(rb)))
    if axis == "charge":
        return replace(spec, q=value)
    if axis == "mass":
        return replace(spec, mass=value)
    return replace(spec, cutoffs=_cutoffs_with(spec.cutoffs, axis, value))


def _scenario_point(scn: TomographyScenario, axis: str, value: float) -> TomographyScenario:
    if axis == "delta_r":
        al, ar = _rescaled(scn.r_AL, scn.r_AR, value)
        bl, br = _rescaled(scn.r_BL, scn.r_BR, value)
        return replace(scn, r_AL=al, r_AR=ar, r_BL=bl, r_BR=br)
    if axis == "charge":
        q_B = scn.q_B * value / scn.q_A if scn.q_A != 0 else scn.q_B
        return replace(scn, q_A=value, q_B=q_B)
    if axis in ("k_min", "k_max"):
        cut = _cutoffs_with(scn.cutoffs, axis, value)
        return replace(scn, cutoffs=cut, grid=RadialModeGrid.for_cutoffs(cut, scn.grid.n_nodes, scn.grid.points_per_panel))
    return scn


def _least_squares_slope(x, y) -> float:
    slope, _ = np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)
    return float(slope)


def run_sweep(cfg: RunConfig, spec: SweepSpec | None = None, workers: int | None = None) -> tuple[list[ResultRecord], dict]:
    """Evaluate every point of the sweep, in input order.

    Every point is built (and so validated) before any is evaluated, so a bad
    range fails with :class:`ConfigurationError` without partial output.
    """
    spec = spec or cfg.sweep
    if spec is None:
        raise ConfigurationError("no [sweep] section", field="sweep")
    if cfg.scenario is None and cfg.geometry is None:
        raise ConfigurationError("a sweep needs a [geometry] or [scenario] section")
    if cfg.scenario is not None and cfg.geometry is not None:
        raise ConfigurationError("give either [geometry] or [scenario] for a sweep, not both")
    values = spec.values()
    ctx = cfg.ctx

    jobs = []
    for i, v in enumerate(values):
        v = float(v)
        try:
            if cfg.geometry is not None:
                point = _geometry_point(cfg.geometry, spec.axis, v)
                jobs.append(lambda p=point, i=i, v=v: evaluate_geometry(p, ctx, index=i, axis=spec.axis, value=v))
            else:
                point = _scenario_point(cfg.scenario, spec.axis, v)
                mass = v if spec.axis == "mass" else cfg.scenario_mass
                jobs.append(
                    lambda p=point, i=i, v=v, m=mass: evaluate_scenario(
                        p, ctx, reference=cfg.reference, mass=m, index=i, axis=spec.axis, value=v
                    )
                )
        except (ConfigurationError, ValueError) as exc:
            message = getattr(exc, "message", str(exc))
            raise ConfigurationError(f"sweep point {i} ({spec.axis}={v!r}) is invalid: {message}", field=f"sweep.{spec.axis}") from None

    n_workers = max(1, min(workers or worker_count(), len(jobs)))
    if n_workers == 1:
        records = [job() for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(lambda job: job(), jobs))

    summary: dict = {"axis": spec.axis, "count": len(records), "mode": records[0].mode}
    if spec.axis == "delta_r":
        summary["slope_n_vs_ln_delta_r"] = _least_squares_slope(np.log([r.delta_r for r in records]), [r.n for r in records])
        if cfg.geometry is not None:
            summary["expected_slope"] = asymptotic_slope(cfg.geometry.q, ctx)
    elif spec.axis == "charge":
        summary["slope_n_vs_q_squared"] = _least_squares_slope([r.q**2 for r in records], [r.n for r in records])
    return records, summary


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_FIELDS)
    for r in records:
        writer.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])
    return buf.getvalue()


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def records_to_json(records, summary: dict | None = None) -> str:
    payload = {
        "fields": list(RECORD_FIELDS),
        "records": [{k: _json_safe(v) for k, v in r.as_dict().items()} for r in records],
    }
    if summary is not None:
        payload["summary"] = {k: _json_safe(v) for k, v in summary.items()}
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_results(records, summary: dict, output: Path, fmt: str = "csv") -> list[Path]:
    """Write CSV and/or JSON; ``fmt="both"`` puts the JSON next to the CSV."""
    output = Path(output)
    targets = []
    if fmt in ("csv", "both"):
        targets.append((output, records_to_csv(records)))
    if fmt == "json":
        targets.append((output, records_to_json(records, summary)))
    if fmt == "both":
        targets.append((output.with_suffix(".json"), records_to_json(records, summary)))
    written = []
    for path, text in targets:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigurationError(f"cannot write output {str(path)!r}: {exc.strerror}", field="sweep.output") from None
        written.append(path)
    return written


def report_threshold(spec: GeometrySpec, ctx: PhysicsContext) -> dict:
    """Charges at which the superposition stops being locally detectable.

    ``q_star_n1`` solves ``n(Q) = 1`` and ``q_star_half_visibility`` solves
    ``exp(-n/2) = 1/2``, using ``n(Q) = n(q) (Q/q)^2``. Both are in units of e.
    """
    n_q = total_photon_number(spec.geometry, spec.q, spec.cutoffs, spec.grid, ctx)
    report = {
        "delta_r": spec.geometry.delta_r,
        "ln_delta_r_over_r0": math.log(spec.geometry.delta_r) if spec.geometry.delta_r > 0 else -math.inf,
        "k_min": spec.cutoffs.k_min,
        "k_max": spec.cutoffs.k_max,
        "q": spec.q,
        "n_at_q": n_q,
        "nominal_threshold": NOMINAL_THRESHOLD,
        "inverse_alpha": 1.0 / ctx.alpha,
        "inverse_sqrt_alpha": 1.0 / math.sqrt(ctx.alpha),
    }
    if n_q <= 0.0:
        report.update(
            bounded=False,
            n_per_e2=0.0,
            q_star_n1=math.inf,
            q_star_half_visibility=math.inf,
            n_at_nominal=0.0,
            visibility_at_nominal=1.0,
            message="no coupling: visibility stays 1 for every charge (threshold unbounded)",
        )
        return report
    n_e = n_q / spec.q**2
    n_nominal = n_e * NOMINAL_THRESHOLD**2
    report.update(
        bounded=True,
        n_per_e2=n_e,
        q_star_n1=1.0 / math.sqrt(n_e),
        q_star_half_visibility=math.sqrt(2.0 * math.log(2.0) / n_e),
        n_at_nominal=n_nominal,
        visibility_at_nominal=visibility(n_nominal),
        message="",
    )
    return report

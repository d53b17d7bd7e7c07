"""Batch front door: config ingestion, solve/verify orchestration, plot data.

Subcommands: solve (continuation run, persists the final field and a log),
verify (geometry/verification suite on a persisted field), sweep (several
configs concurrently), emit-plots (CSV + manifest for the figure renderer).
Exit codes: 0 pass, 1 criterion failure, 2 usage/config error, 3 runtime.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import configparser
import csv
import io as stringio
import sys
from dataclasses import dataclass, fields as dc_fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as pio
from .analysis import (
    growth_fit,
    nondegeneracy_check,
    pointwise_inequality_check,
)
from .core import GridField, ProblemParams, build_grid, eval_coefficient
from .errors import (
    ConfigurationError,
    DomainError,
    FieldIOError,
    FitError,
    ParameterError,
    PobsError,
)
from .freeboundary import (
    box_count_measure,
    default_tau_pos,
    extract_free_boundary,
    gradient_smallness_measure,
    porosity_estimate,
    positivity_set,
)
from .solver import BumpSpec, continuation_solve, default_seed_spec
from .stencil import gradient_magnitude

EXIT_PASS = 0
EXIT_CRITERIA = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

FIELD_FILENAME = "field_final.pobs"
LOG_FILENAME = "solve_log.json"
REPORT_FILENAME = "report.json"
MANIFEST_FILENAME = "manifest.json"

PLOT_FAMILIES = ("growth", "nondegeneracy", "porosity", "boxcount", "sigma_scaling")


@dataclass(frozen=True)
class RunConfig:
    """Complete description of one solve/verify run; round-trips through INI."""

    p: float = 2.0
    lam: float = 4.0
    m1: float = 1.0
    m2: float = 1.0
    delta_reg: float = 1e-8
    tol_res: float = 1e-8
    extents: tuple[tuple[float, float], ...] = ((0.0, 7.0), (0.0, 7.0))
    cells: tuple[int, ...] = (64, 64)
    coefficient: str = "constant"
    coefficient_params: tuple[tuple[str, float], ...] = (("value", 1.0),)
    eps0: float = 0.1
    factor: float = 0.5
    steps: int = 6
    seed_center: Optional[tuple[float, ...]] = None
    seed_radius: Optional[float] = None
    seed_amplitude: float = 1.0
    growth: bool = True
    nondegeneracy: bool = True
    porosity: bool = True
    boxcount: bool = True
    sigma_scaling: bool = True
    pointwise_check: bool = True
    growth_radii_cells: tuple[int, ...] = (6, 8, 10, 12)
    nondeg_radii_cells: tuple[int, ...] = (5, 6, 7, 8)
    porosity_radii_cells: tuple[int, ...] = (8, 16, 32, 64)
    boxcount_scales_cells: tuple[int, ...] = (1, 2, 4, 8, 16)
    sigma_values: tuple[float, ...] = (0.16, 0.32, 0.64)
    sigma_radii_cells: tuple[int, ...] = (6, 8, 12)
    save_intermediate: bool = False
    outdir: str = "out"
    rng_seed: int = 0

    def __post_init__(self):
        if len(self.extents) != len(self.cells):
            raise ConfigurationError("extents and cells must have the same length")
        if self.lam <= self.p:
            raise ConfigurationError(
                f"exponent window violated: need p < lambda, got p={self.p}, "
                f"lambda={self.lam}"
            )
        if self.steps < 1:
            raise ConfigurationError(f"need steps >= 1, got {self.steps}")
        if not 0 < self.eps0 < 1:
            raise ConfigurationError(f"need 0 < eps0 < 1, got {self.eps0}")
        if not 0 < self.factor < 1:
            raise ConfigurationError(f"need factor in (0,1), got {self.factor}")

    @property
    def dim(self) -> int:
        return len(self.cells)

    def final_eps(self) -> float:
        return self.eps0 * self.factor ** (self.steps - 1)

    def params(self, eps: Optional[float] = None) -> ProblemParams:
        return ProblemParams(
            p=self.p,
            lam=self.lam,
            m1=self.m1,
            m2=self.m2,
            dim=self.dim,
            eps=self.final_eps() if eps is None else eps,
            delta_reg=self.delta_reg,
            tol_res=self.tol_res,
        )


def _coefficient_callable(cfg: RunConfig, grid):
    opts = dict(cfg.coefficient_params)
    if cfg.coefficient == "constant":
        value = opts.get("value", 1.0)

        def spec(*coords):
            return value * np.ones_like(coords[0])

    elif cfg.coefficient == "sinusoidal":
        base = opts.get("base", 2.0)
        amp = opts.get("amp", 0.5)
        lo, hi = grid.extents[0]

        def spec(*coords):
            return base + amp * np.sin(np.pi * (coords[0] - lo) / (hi - lo))

    else:
        raise ConfigurationError(f"unknown coefficient form '{cfg.coefficient}'")
    return spec


def make_coefficient(cfg: RunConfig, grid):
    return eval_coefficient(_coefficient_callable(cfg, grid), grid)


def make_grid(cfg: RunConfig):
    return build_grid(cfg.extents, cfg.cells)


def make_seed(cfg: RunConfig, grid) -> BumpSpec:
    if cfg.seed_center is None or cfg.seed_radius is None:
        return default_seed_spec(grid)
    return BumpSpec(
        center=cfg.seed_center, radius=cfg.seed_radius, amplitude=cfg.seed_amplitude
    )


# ---------------------------------------------------------------------------
# config (de)serialization


def _fmt(v) -> str:
    return repr(float(v))


def serialize_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp["problem"] = {
        "p": _fmt(cfg.p),
        "lam": _fmt(cfg.lam),
        "m1": _fmt(cfg.m1),
        "m2": _fmt(cfg.m2),
        "delta_reg": _fmt(cfg.delta_reg),
        "tol_res": _fmt(cfg.tol_res),
    }
    cp["grid"] = {
        "extents": " ".join(f"{_fmt(lo)},{_fmt(hi)}" for lo, hi in cfg.extents),
        "cells": " ".join(str(n) for n in cfg.cells),
    }
    cp["coefficient"] = {"name": cfg.coefficient}
    for key, val in cfg.coefficient_params:
        cp["coefficient"][key] = _fmt(val)
    cp["schedule"] = {
        "eps0": _fmt(cfg.eps0),
        "factor": _fmt(cfg.factor),
        "steps": str(cfg.steps),
    }
    cp["seed"] = {}
    if cfg.seed_center is not None:
        cp["seed"]["center"] = " ".join(_fmt(c) for c in cfg.seed_center)
    if cfg.seed_radius is not None:
        cp["seed"]["radius"] = _fmt(cfg.seed_radius)
    cp["seed"]["amplitude"] = _fmt(cfg.seed_amplitude)
    cp["analysis"] = {
        "growth": str(cfg.growth).lower(),
        "nondegeneracy": str(cfg.nondegeneracy).lower(),
        "porosity": str(cfg.porosity).lower(),
        "boxcount": str(cfg.boxcount).lower(),
        "sigma_scaling": str(cfg.sigma_scaling).lower(),
        "pointwise_check": str(cfg.pointwise_check).lower(),
        "growth_radii_cells": " ".join(map(str, cfg.growth_radii_cells)),
        "nondeg_radii_cells": " ".join(map(str, cfg.nondeg_radii_cells)),
        "porosity_radii_cells": " ".join(map(str, cfg.porosity_radii_cells)),
        "boxcount_scales_cells": " ".join(map(str, cfg.boxcount_scales_cells)),
        "sigma_values": " ".join(_fmt(s) for s in cfg.sigma_values),
        "sigma_radii_cells": " ".join(map(str, cfg.sigma_radii_cells)),
        "rng_seed": str(cfg.rng_seed),
    }
    cp["output"] = {
        "outdir": cfg.outdir,
        "save_intermediate": str(cfg.save_intermediate).lower(),
    }
    buf = stringio.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _get_bool(section, key, default) -> bool:
    raw = section.get(key)
    if raw is None:
        return default
    raw = raw.strip().lower()
    if raw in ("true", "1", "yes", "on"):
        return True
    if raw in ("false", "0", "no", "off"):
        return False
    raise ConfigurationError(f"boolean expected for {key}, got '{raw}'")


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc
    defaults = RunConfig()
    try:
        prob = cp["problem"] if cp.has_section("problem") else {}
        grid_s = cp["grid"] if cp.has_section("grid") else {}
        coef = cp["coefficient"] if cp.has_section("coefficient") else {}
        sched = cp["schedule"] if cp.has_section("schedule") else {}
        seed = cp["seed"] if cp.has_section("seed") else {}
        ana = cp["analysis"] if cp.has_section("analysis") else {}
        out = cp["output"] if cp.has_section("output") else {}

        extents = defaults.extents
        if "extents" in grid_s:
            extents = tuple(
                tuple(float(x) for x in token.split(","))
                for token in grid_s["extents"].split()
            )
            if any(len(e) != 2 for e in extents):
                raise ConfigurationError("each extent must be lo,hi")
        cells = defaults.cells
        if "cells" in grid_s:
            cells = tuple(int(x) for x in grid_s["cells"].split())

        coef_name = coef.get("name", defaults.coefficient)
        coef_params = tuple(
            sorted((k, float(v)) for k, v in coef.items() if k != "name")
        ) or defaults.coefficient_params

        seed_center = None
        if "center" in seed:
            seed_center = tuple(float(x) for x in seed["center"].split())
        seed_radius = float(seed["radius"]) if "radius" in seed else None

        def ints(section, key, default):
            return (
                tuple(int(x) for x in section[key].split())
                if key in section
                else default
            )

        def floats(section, key, default):
            return (
                tuple(float(x) for x in section[key].split())
                if key in section
                else default
            )

        return RunConfig(
            p=float(prob.get("p", defaults.p)),
            lam=float(prob.get("lam", defaults.lam)),
            m1=float(prob.get("m1", defaults.m1)),
            m2=float(prob.get("m2", defaults.m2)),
            delta_reg=float(prob.get("delta_reg", defaults.delta_reg)),
            tol_res=float(prob.get("tol_res", defaults.tol_res)),
            extents=extents,
            cells=cells,
            coefficient=coef_name,
            coefficient_params=coef_params,
            eps0=float(sched.get("eps0", defaults.eps0)),
            factor=float(sched.get("factor", defaults.factor)),
            steps=int(sched.get("steps", defaults.steps)),
            seed_center=seed_center,
            seed_radius=seed_radius,
            seed_amplitude=float(seed.get("amplitude", defaults.seed_amplitude)),
            growth=_get_bool(ana, "growth", defaults.growth),
            nondegeneracy=_get_bool(ana, "nondegeneracy", defaults.nondegeneracy),
            porosity=_get_bool(ana, "porosity", defaults.porosity),
            boxcount=_get_bool(ana, "boxcount", defaults.boxcount),
            sigma_scaling=_get_bool(ana, "sigma_scaling", defaults.sigma_scaling),
            pointwise_check=_get_bool(
                ana, "pointwise_check", defaults.pointwise_check
            ),
            growth_radii_cells=ints(ana, "growth_radii_cells", defaults.growth_radii_cells),
            nondeg_radii_cells=ints(ana, "nondeg_radii_cells", defaults.nondeg_radii_cells),
            porosity_radii_cells=ints(
                ana, "porosity_radii_cells", defaults.porosity_radii_cells
            ),
            boxcount_scales_cells=ints(
                ana, "boxcount_scales_cells", defaults.boxcount_scales_cells
            ),
            sigma_values=floats(ana, "sigma_values", defaults.sigma_values),
            sigma_radii_cells=ints(ana, "sigma_radii_cells", defaults.sigma_radii_cells),
            save_intermediate=_get_bool(
                out, "save_intermediate", defaults.save_intermediate
            ),
            outdir=out.get("outdir", defaults.outdir),
            rng_seed=int(ana.get("rng_seed", defaults.rng_seed)),
        )
    except (ValueError, KeyError) as exc:
        raise ConfigurationError(f"invalid config value: {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def config_echo(cfg: RunConfig) -> dict:
    echo = {}
    for f in dc_fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = [list(x) if isinstance(x, tuple) else x for x in v]
        echo[f.name] = v
    return echo


# ---------------------------------------------------------------------------
# solve


def run_solve(cfg: RunConfig) -> tuple[dict, int]:
    """Continuation solve; persists the final field and a JSON log."""
    grid = make_grid(cfg)
    a = make_coefficient(cfg, grid)
    params = cfg.params(eps=cfg.eps0)
    seed_spec = make_seed(cfg, grid)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    cont = continuation_solve(
        a, params, eps0=cfg.eps0, factor=cfg.factor, steps=cfg.steps,
        seed_spec=seed_spec,
    )
    final = cont.solutions[-1]
    pio.write_field(outdir / FIELD_FILENAME, final.u)
    if cfg.save_intermediate:
        for k, sol in enumerate(cont.solutions):
            pio.write_field(outdir / f"field_eps_{k}.pobs", sol.u)

    log = {
        "config": config_echo(cfg),
        "schedule": list(cont.schedule),
        "converged": [s.converged for s in cont.solutions],
        "residual_norms": [s.residual_norm for s in cont.solutions],
        "iterations": [s.iterations for s in cont.solutions],
        "sup_norm_track": list(cont.sup_norm_track),
        "grad_sup_track": list(cont.grad_sup_track),
        "drift": list(cont.drift),
        "nontrivial": [s.nontrivial for s in cont.solutions],
        "min_before_clamp": [s.min_before_clamp for s in cont.solutions],
        "energy_total": [s.energy.total for s in cont.solutions],
        "failure_index": cont.failure_index,
        "field_file": FIELD_FILENAME,
    }
    pio.write_report(outdir / LOG_FILENAME, log)
    code = EXIT_PASS if cont.failure_index is None else EXIT_CRITERIA
    return log, code


# ---------------------------------------------------------------------------
# verify


def _criterion(passed: bool, slack, **extras) -> dict:
    entry = {"pass": bool(passed), "slack": slack}
    entry.update(extras)
    return entry


def run_verify(cfg: RunConfig, field_path) -> tuple[dict, int]:
    """Geometry/verification suite on a persisted field; persists a report."""
    field_path = Path(field_path)
    if not field_path.exists():
        raise FieldIOError(f"field file not found: {field_path}")
    u = pio.read_field(field_path)
    grid = u.grid
    if grid.extents != tuple(tuple(e) for e in cfg.extents) or grid.cells != tuple(
        cfg.cells
    ):
        raise FieldIOError(
            f"field grid {grid.extents}/{grid.cells} does not match config "
            f"{cfg.extents}/{cfg.cells}"
        )
    a = make_coefficient(cfg, grid)
    params = cfg.params()
    h = float(max(grid.h))
    q = params.p / (params.p - 1.0)
    tau = default_tau_pos(grid, params.p)
    mask = positivity_set(u, tau)
    fb = extract_free_boundary(mask)

    report: dict = {
        "config": config_echo(cfg),
        "tau_pos": tau,
        "free_boundary_cells": len(fb),
        "criteria": {},
    }
    criteria = report["criteria"]

    def boundary_margin(pt) -> float:
        return min(
            min(c - lo, hi - c) for (lo, hi), c in zip(grid.extents, pt)
        )

    if cfg.growth:
        radii = [k * h for k in cfg.growth_radii_cells]
        band = (q - 0.2, q + 0.2)
        entries = []
        for pt in fb.points:
            if boundary_margin(pt) < max(radii):
                continue
            try:
                gf = growth_fit(u, pt, radii)
            except FitError:
                continue
            entries.append(
                {
                    "center": list(map(float, pt)),
                    "radii": list(gf.radii),
                    "sup_values": list(gf.sup_values),
                    "slope": gf.slope,
                    "c1_growth": gf.c1_growth,
                    "grad_slope": gf.grad_slope,
                }
            )
        frac = (
            float(np.mean([band[0] <= e["slope"] <= band[1] for e in entries]))
            if entries
            else 0.0
        )
        report["growth"] = entries
        criteria["growth"] = _criterion(
            bool(entries) and frac >= 0.8,
            {"band": list(band), "min_fraction": 0.8},
            fraction_in_band=frac,
            points=len(entries),
        )

    if cfg.nondegeneracy:
        radii = [k * h for k in cfg.nondeg_radii_cells]
        usable = [
            pt for pt in fb.points if boundary_margin(pt) >= max(radii)
        ]
        if usable:
            keep = np.array(
                [boundary_margin(pt) >= max(radii) for pt in fb.points]
            )
            sub = replace_fb(fb, keep)
            rep = nondegeneracy_check(u, sub, radii, params, a.a1)
            report["nondegeneracy"] = {
                "c2": rep.c2_theoretical,
                "entries": [
                    {
                        "center": list(e.center),
                        "radius": e.radius,
                        "sup": e.sup_value,
                        "margin": e.margin,
                        "pass": e.passed,
                    }
                    for e in rep.entries
                ],
            }
            criteria["nondegeneracy"] = _criterion(
                rep.all_pass, rep.slack, min_margin=rep.min_margin
            )
        else:
            report["nondegeneracy"] = {"entries": []}
            criteria["nondegeneracy"] = _criterion(False, 0.9, reason="no points")

    if cfg.porosity:
        max_side = max(hi - lo for lo, hi in grid.extents)
        radii = [k * h for k in cfg.porosity_radii_cells if k * h <= max_side]
        try:
            table = porosity_estimate(fb, mask, radii)
        except DomainError as exc:
            report["porosity"] = {}
            criteria["porosity"] = _criterion(
                False, {"min_delta": 0.05}, reason=str(exc)
            )
        else:
            report["porosity"] = {repr(r): d for r, d in table.items()}
            criteria["porosity"] = _criterion(
                all(d >= 0.05 for d in table.values()),
                {"min_delta": 0.05},
                min_delta=min(table.values()),
            )

    if cfg.boxcount:
        scales = [k * h for k in cfg.boxcount_scales_cells]
        try:
            bc = box_count_measure(fb, scales)
        except FitError as exc:
            report["boxcount"] = {}
            criteria["boxcount"] = _criterion(
                False,
                {"dimension_band": [0.85, 1.15], "max_proxy_variation": 0.30},
                reason=str(exc),
            )
        else:
            finest = sorted(bc.measure_proxy[:3])
            variation = (
                (finest[-1] - finest[0]) / finest[0] if finest[0] > 0 else float("inf")
            )
            report["boxcount"] = {
                "scales": list(bc.scales),
                "counts": list(bc.counts),
                "dimension": bc.dimension,
                "measure_proxy": list(bc.measure_proxy),
            }
            criteria["boxcount"] = _criterion(
                0.85 <= bc.dimension <= 1.15 and variation <= 0.30,
                {"dimension_band": [0.85, 1.15], "max_proxy_variation": 0.30},
                dimension=bc.dimension,
                proxy_variation=variation,
            )

    if cfg.sigma_scaling:
        center = None
        best = -np.inf
        for pt in fb.points:
            m = boundary_margin(pt)
            if m > best:
                best, center = m, pt
        rows = []
        ok = True
        for kcells in cfg.sigma_radii_cells:
            r = kcells * h
            if center is None or r > best:
                continue
            for sigma in cfg.sigma_values:
                hi_v = gradient_smallness_measure(
                    u, params.p, sigma, center, r, tau_pos=tau
                )
                lo_v = gradient_smallness_measure(
                    u, params.p, sigma / 2.0, center, r, tau_pos=tau
                )
                ratio = lo_v / hi_v if hi_v > 0 else None
                if ratio is not None and ratio > 0.7:
                    ok = False
                rows.append(
                    {
                        "radius": r,
                        "sigma": sigma,
                        "integral": hi_v,
                        "integral_half": lo_v,
                        "ratio": ratio,
                    }
                )
        report["sigma_scaling"] = {
            "center": list(map(float, center)) if center is not None else None,
            "rows": rows,
        }
        criteria["sigma_scaling"] = _criterion(
            ok and bool(rows), {"max_ratio": 0.7}
        )

    if cfg.pointwise_check:
        pw = pointwise_inequality_check(u, a.a1, params)
        report["pointwise"] = {
            "c3": pw.c3,
            "max_ratio": pw.max_ratio,
            "worst_node": list(pw.worst_node),
        }
        criteria["pointwise"] = _criterion(
            pw.max_ratio <= 1.2, {"max_ratio": 1.2}, max_ratio=pw.max_ratio
        )

    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    pio.write_report(outdir / REPORT_FILENAME, report)
    passed = all(c["pass"] for c in criteria.values())
    return report, EXIT_PASS if passed else EXIT_CRITERIA


def replace_fb(fb, keep: np.ndarray):
    from .freeboundary import FreeBoundary

    return FreeBoundary(fb.grid, fb.cells[keep], fb.points[keep])


# ---------------------------------------------------------------------------
# plot data emission


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def emit_plot_data(report: dict, outdir, fields=None) -> dict:
    """One CSV per figure family present in the report, plus a JSON manifest."""
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FieldIOError(f"cannot create output directory {outdir}: {exc}") from exc
    families = []

    if "growth" in report:
        rows = []
        for i, e in enumerate(report["growth"]):
            for r, s in zip(e["radii"], e["sup_values"]):
                rows.append([i, *e["center"], float(r), float(s), float(e["slope"])])
        ncoord = len(report["growth"][0]["center"]) if report["growth"] else 2
        header = ["point", *[f"center_{k}" for k in range(ncoord)], "r", "sup_u", "slope"]
        _write_csv(outdir / "growth.csv", header, rows)
        families.append({"name": "growth", "csv": "growth.csv"})

    if "nondegeneracy" in report:
        rows = [
            [*e["center"], float(e["radius"]), float(e["sup"]), float(e["margin"]),
             int(e["pass"])]
            for e in report["nondegeneracy"]["entries"]
        ]
        nc = len(rows[0]) - 4 if rows else 2
        header = [*[f"center_{k}" for k in range(nc)], "r", "sup_u", "margin", "pass"]
        _write_csv(outdir / "nondegeneracy.csv", header, rows)
        families.append({"name": "nondegeneracy", "csv": "nondegeneracy.csv"})

    if "porosity" in report:
        rows = [
            [float(r), float(d)]
            for r, d in sorted(
                ((float(k), v) for k, v in report["porosity"].items())
            )
        ]
        _write_csv(outdir / "porosity.csv", ["r", "delta_min"], rows)
        families.append({"name": "porosity", "csv": "porosity.csv"})

    if "boxcount" in report:
        b = report["boxcount"]
        rows = [
            [float(s), int(c), float(p)]
            for s, c, p in zip(b["scales"], b["counts"], b["measure_proxy"])
        ]
        _write_csv(outdir / "boxcount.csv", ["scale", "count", "measure_proxy"], rows)
        families.append({"name": "boxcount", "csv": "boxcount.csv"})

    if "sigma_scaling" in report:
        rows = [
            [float(r["radius"]), float(r["sigma"]), float(r["integral"]),
             float(r["integral_half"]),
             "" if r["ratio"] is None else float(r["ratio"])]
            for r in report["sigma_scaling"]["rows"]
        ]
        _write_csv(
            outdir / "sigma_scaling.csv",
            ["r", "sigma", "integral", "integral_half", "ratio"],
            rows,
        )
        families.append({"name": "sigma_scaling", "csv": "sigma_scaling.csv"})

    manifest = {
        "families": families,
        "report": REPORT_FILENAME if "criteria" in report else None,
        "config": report.get("config"),
    }
    pio.write_report(outdir / MANIFEST_FILENAME, manifest)
    return manifest


# ---------------------------------------------------------------------------
# sweep


def _sweep_one(path: str) -> int:
    cfg = load_config(path)
    _, code = run_solve(cfg)
    return code


def run_sweep(config_paths, workers: int = 2) -> int:
    codes = []
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(_sweep_one, str(p)): p for p in config_paths}
        for fut in concurrent.futures.as_completed(futures):
            codes.append(fut.result())
    return max(codes) if codes else EXIT_PASS


# ---------------------------------------------------------------------------
# entry point


def _apply_overrides(cfg: RunConfig, pairs) -> RunConfig:
    if not pairs:
        return cfg
    text = serialize_config(cfg)
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text)
    for item in pairs:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigurationError(
                f"override must look like section.key=value, got '{item}'"
            )
        key, value = item.split("=", 1)
        section, name = key.split(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp[section][name.strip()] = value.strip()
    buf = stringio.StringIO()
    cp.write(buf)
    return parse_config(buf.getvalue())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pobs",
        description="Penalized obstacle-type solver and free-boundary suite",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the continuation solve")
    p_solve.add_argument("config")
    p_solve.add_argument("--set", action="append", default=[], dest="overrides",
                         metavar="SECTION.KEY=VALUE")

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("config")
    p_verify.add_argument("field")
    p_verify.add_argument("--set", action="append", default=[], dest="overrides",
                          metavar="SECTION.KEY=VALUE")

    p_sweep = sub.add_parser("sweep", help="solve several configs concurrently")
    p_sweep.add_argument("configs", nargs="+")
    p_sweep.add_argument("--workers", type=int, default=2)

    p_emit = sub.add_parser("emit-plots", help="emit CSV plot data from a report")
    p_emit.add_argument("report")
    p_emit.add_argument("outdir")

    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            cfg = _apply_overrides(load_config(args.config), args.overrides)
            _, code = run_solve(cfg)
            return code
        if args.command == "verify":
            cfg = _apply_overrides(load_config(args.config), args.overrides)
            _, code = run_verify(cfg, args.field)
            return code
        if args.command == "sweep":
            return run_sweep(args.configs, workers=args.workers)
        if args.command == "emit-plots":
            report = pio.read_report(args.report)
            emit_plot_data(report, args.outdir)
            return EXIT_PASS
    except (ConfigurationError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PobsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

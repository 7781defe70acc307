"""Command-line front end: ``ingest``, ``run`` and ``validate``.

``run`` evaluates a JSON configuration over its separation/temperature grid
and writes one CSV row per grid point, plus a provenance sidecar holding
the fully resolved configuration.  Rows are computed in parallel but
assembled in grid order by a single writer.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import (
    ConfigError,
    RunConfig,
    body_to_dict,
    ingest_material,
    load_config,
    write_atomic,
)
from .core import (
    ConvergenceError,
    EntropyStepError,
    GeometryThermal,
    casimir_entropy,
    casimir_pressure,
    force_gradient_sphere_plate,
    free_energy,
)
from .experiments import (
    Diagnostics,
    SpherePlateSetup,
    direction,
    drude_plasma_comparison,
    graphene_ratio_detailed,
    magnetic_stripes_detailed,
    nernst_entropy_scan,
    optical_modulation_detailed,
)
from .kernel import BACKEND
from .layered import get_provider

COMMON_COLUMNS = ("a_m", "T_K", "value", "unit", "l_max", "remainder_est", "evals", "status")

EXTRA_COLUMNS = {
    "free-energy": (),
    "pressure": (),
    "gradient": ("R_m",),
    "entropy": ("dT_K",),
    "compare": ("R_m", "drude_value", "plasma_value", "rel_diff_percent", "verdict"),
    "diff-force": ("R_m", "scheme", "approach", "overlayer_m"),
    "nernst": ("T_max_K", "S0_stderr", "classification"),
    "graphene-ratio": ("provider",),
}

UNITS = {
    "free-energy": "J/m^2",
    "pressure": "N/m^2",
    "gradient": "N/m",
    "entropy": "J/(K m^2)",
    "compare": "N/m",
    "diff-force": "N",
    "nernst": "J/(K m^2)",
    "graphene-ratio": "1",
}


def columns(kind):
    """CSV header for a computation kind."""
    return COMMON_COLUMNS + EXTRA_COLUMNS[kind]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def grid_points(cfg: RunConfig):
    """(a in m, T in K) pairs in output order."""
    if cfg.kind == "nernst":
        return [(a / 1e9, None) for a in cfg.a_nm]
    return [(a / 1e9, T) for a in cfg.a_nm for T in cfg.T_K]


def _row(kind, a, T, value, diag: Diagnostics, status="ok", **extra):
    row = {"a_m": a, "T_K": T, "value": value, "unit": UNITS[kind], "l_max": diag.l_max,
           "remainder_est": diag.remainder, "evals": diag.evals, "status": status}
    row.update(extra)
    return row


def evaluate_point(cfg: RunConfig, bodies, a, T):
    """Compute one CSV row; convergence problems are reported in the status column."""
    kind, q, opts = cfg.kind, cfg.quadrature, cfg.options
    R = None if cfg.R_um is None else cfg.R_um / 1e6
    try:
        if kind == "nernst":
            temps = cfg.T_K
            scan = nernst_entropy_scan(bodies["body1"], bodies["body2"], a, temps, q,
                                       dT_fraction=opts["dT_fraction"])
            return _row(kind, a, temps[-1], scan.S0, scan.diagnostics, T_max_K=temps[0],
                        S0_stderr=scan.S0_stderr, classification=scan.classification.value)
        g = GeometryThermal(a, T)
        if kind in ("free-energy", "pressure"):
            fn = free_energy if kind == "free-energy" else casimir_pressure
            r = fn(bodies["body1"], bodies["body2"], g, q)
            return _row(kind, a, T, r.value, Diagnostics.of(r))
        if kind == "entropy":
            dT = opts["dT_fraction"] * T
            r = casimir_entropy(bodies["body1"], bodies["body2"], g, q, dT=dT,
                                step_rtol=opts["step_rtol"])
            return _row(kind, a, T, r.value, Diagnostics.of(r), dT_K=dT)
        if kind == "gradient":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                r = force_gradient_sphere_plate(bodies["sphere"], bodies["plate"], R, g, q)
            return _row(kind, a, T, r.value, Diagnostics.of(r), R_m=R)
        if kind == "compare":
            setup = SpherePlateSetup(R, bodies["sphere"], bodies["plate"], (a,), T,
                                     allow_large_ratio=True)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                p = drude_plasma_comparison(setup, q).points[0]
            verdict = None if p.drude is None else direction(p.drude, p.plasma)
            return _row(kind, a, T, p.drude, p.diagnostics, p.status, R_m=R,
                        drude_value=p.drude, plasma_value=p.plasma,
                        rel_diff_percent=p.rel_diff_percent, verdict=verdict)
        if kind == "diff-force":
            d = opts["overlayer_nm"] / 1e9
            if opts["scheme"] == "magnetic_stripes":
                value, diag = magnetic_stripes_detailed(R, d, a, T, opts["approach"], q=q)
            else:
                value, diag = optical_modulation_detailed(
                    bodies["sphere"], bodies["plate_metallic"], bodies["plate_dielectric"],
                    R, a, T, q)
                d = None
            return _row(kind, a, T, value, diag, R_m=R, scheme=opts["scheme"],
                        approach=opts["approach"], overlayer_m=d)
        if kind == "graphene-ratio":
            provider = get_provider(opts["provider"], **opts["provider_params"])
            value, diag = graphene_ratio_detailed(bodies["plate"], provider, a, T, q)
            return _row(kind, a, T, value, diag, provider=opts["provider"])
    except EntropyStepError as exc:
        return _row(kind, a, T, None, Diagnostics.of(exc.partial), "entropy_step_failure")
    except ConvergenceError as exc:
        return _row(kind, a, T, None, Diagnostics.of(exc.partial), "convergence_failure")
    raise ConfigError(f"unsupported kind {kind!r}")  # pragma: no cover


def run_config(cfg: RunConfig, threads=1):
    """Rows for every grid point, in grid order."""
    bodies = cfg.build_bodies()
    points = grid_points(cfg)

    def work(point):
        return evaluate_point(cfg, bodies, *point)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, points))
    return [work(p) for p in points]


def render_csv(kind, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = columns(kind)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in header])
    return buf.getvalue()


def provenance(cfg: RunConfig, tolerance=None):
    """Resolved configuration and environment facts; no timestamps."""
    return {"package_version": __version__, "kernel_backend": BACKEND,
            "tolerance_override": tolerance, "columns": list(columns(cfg.kind)),
            "config": cfg.to_dict(),
            "resolved_bodies": {r: body_to_dict(b) for r, b in cfg.build_bodies().items()}}


def _apply_tolerance(cfg: RunConfig, tolerance):
    if tolerance is None:
        return cfg
    if not tolerance > 0:
        raise ConfigError("--tolerance must be positive")
    q = replace(cfg.quadrature, rtol=tolerance, matsubara_rtol=tolerance)
    return replace(cfg, quadrature=q)


def cmd_validate(args):
    cfg = _apply_tolerance(load_config(args.config), args.tolerance)
    print(f"ok: kind={cfg.kind} points={len(grid_points(cfg))}")
    return 0


def cmd_run(args):
    cfg = _apply_tolerance(load_config(args.config), args.tolerance)
    out = args.out or cfg.output
    if out is None:
        raise ConfigError("no output path: pass --out or set 'output' in the configuration")
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1")
    rows = run_config(cfg, args.threads)
    out = Path(out)
    write_atomic(out, render_csv(cfg.kind, rows))
    sidecar = out.with_name(out.name + ".provenance.json")
    write_atomic(sidecar, json.dumps(provenance(cfg, args.tolerance), indent=2, sort_keys=True) + "\n")
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"wrote {len(rows)} rows to {out} ({failed} with convergence problems)")
    return 0


def cmd_ingest(args):
    extrapolation = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"extrapolation config not found: {path}")
        try:
            extrapolation = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if args.l_max is not None:
        extrapolation["cache_l_max"] = args.l_max
    spec = ingest_material(args.csv, extrapolation)
    write_atomic(args.out, json.dumps(spec, indent=2) + "\n")
    print(f"wrote material with {len(spec['permittivity']['table']['omega_eV'])} samples to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="lifshitz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="convert an optical-data CSV into a material file")
    p.add_argument("csv", help="CSV with columns omega_eV, im_eps")
    p.add_argument("--config", help="JSON with 'low', 'high' extrapolations and optional 'mu0'")
    p.add_argument("--out", required=True, help="material JSON to write")
    p.add_argument("--l-max", type=int, default=None,
                   help="number of cached Matsubara permittivities at 300 K (default 200)")
    p.set_defaults(func=cmd_ingest)

    for name, func, text in (("run", cmd_run, "evaluate a run configuration"),
                             ("validate", cmd_validate, "check a run configuration only")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--tolerance", type=float, default=None,
                       help="relative tolerance for both quadrature and Matsubara sum")
        if name == "run":
            p.add_argument("--out", help="CSV output path (overrides 'output')")
            p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

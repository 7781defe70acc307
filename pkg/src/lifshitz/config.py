"""JSON material files and run configurations.

Every dimensional quantity carries its unit in the key name (``a_nm``,
``T_K``, ``omega_p_eV``, ``sigma0_S_m``).  Parsing resolves defaults
explicitly so that the fully resolved configuration can be echoed next to
the results.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .constants import EPS0_SI, ev_to_rad_s, rad_s_to_ev, sigma_si_to_gaussian
from .core import QuadratureSpec
from .layered import LayeredBody, PerfectReflector, get_provider, provider_names
from .materials import library
from .materials.kramers_kronig import (
    ConstantEps,
    DrudeTail,
    PlasmaTail,
    PowerLawTail,
    SpectralTable,
    SpectralTableError,
)
from .materials.models import (
    CoreOscillators,
    DcDielectric,
    Drude,
    NONMAGNETIC,
    MagneticLaw,
    Oscillator,
    Plasma,
    RelaxationLaw,
    Tabulated,
    Vacuum,
)
from .waves import matsubara_frequency


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


BUILTINS = {
    "vacuum": Vacuum,
    "gold_drude": library.gold_drude,
    "gold_plasma": library.gold_plasma,
    "nickel_drude": library.nickel_drude,
    "nickel_plasma": library.nickel_plasma,
    "silicon": library.silicon,
    "sapphire": library.sapphire,
    "mica": library.mica,
    "fused_silica": library.fused_silica,
}


def _number(spec, key, default=None, positive=False, where="material"):
    if key not in spec:
        if default is None:
            raise ConfigError(f"{where}: missing required key {key!r}")
        return default
    value = spec[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}: {key!r} must be a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{where}: {key!r} must be positive, got {value!r}")
    return float(value)


# --- materials -------------------------------------------------------------------


def _oscillators(items):
    out = []
    for i, o in enumerate(items):
        where = f"oscillator {i}"
        out.append(Oscillator(_number(o, "strength", positive=True, where=where),
                              ev_to_rad_s(_number(o, "frequency_eV", positive=True, where=where)),
                              ev_to_rad_s(_number(o, "relaxation_eV", 0.0, where=where))))
    return CoreOscillators(tuple(out))


def _core(perm, base_dir):
    if "core" not in perm:
        return CoreOscillators(())
    core = _permittivity(perm["core"], NONMAGNETIC, base_dir)
    if not isinstance(core, (CoreOscillators, Vacuum)):
        raise ConfigError("a 'core' must be a vacuum, oscillators or two_oscillator permittivity")
    return core if isinstance(core, CoreOscillators) else CoreOscillators(())


def _tail(spec, where):
    if spec is None:
        return None
    kind = spec.get("type")
    if kind == "drude":
        return DrudeTail(ev_to_rad_s(_number(spec, "omega_p_eV", positive=True, where=where)),
                         ev_to_rad_s(_number(spec, "gamma_eV", positive=True, where=where)))
    if kind == "plasma":
        return PlasmaTail(ev_to_rad_s(_number(spec, "omega_p_eV", positive=True, where=where)))
    if kind == "constant":
        eps0 = spec.get("eps0")
        return ConstantEps(None if eps0 is None else _number(spec, "eps0", where=where))
    if kind == "power_law":
        return PowerLawTail(_number(spec, "exponent", positive=True, where=where))
    raise ConfigError(f"{where}: unknown extrapolation type {kind!r}")


def _table(perm, table_path, base_dir):
    if "table" in perm:
        t = perm["table"]
        omega_eV, im = t.get("omega_eV"), t.get("im_eps")
        if omega_eV is None or im is None or len(omega_eV) != len(im):
            raise ConfigError("table needs equal-length 'omega_eV' and 'im_eps' lists")
    elif table_path is not None:
        omega_eV, im = read_spectral_csv(_resolve(table_path, base_dir))
    else:
        raise ConfigError("a tabulated permittivity needs an embedded 'table' or a 'spectral_table'")
    low = _tail(perm.get("low"), "low-frequency extrapolation")
    high = _tail(perm.get("high"), "high-frequency extrapolation")
    if isinstance(low, PowerLawTail):
        raise ConfigError("power_law is a high-frequency extrapolation only")
    if high is not None and not isinstance(high, PowerLawTail):
        raise ConfigError("the high-frequency extrapolation must be power_law")
    try:
        return SpectralTable(tuple(ev_to_rad_s(float(w)) for w in omega_eV),
                             tuple(float(v) for v in im), low=low, high=high)
    except SpectralTableError as exc:
        raise ConfigError(str(exc)) from exc


def _permittivity(perm, magnetic, base_dir, table_path=None):
    if not isinstance(perm, dict):
        raise ConfigError(f"permittivity must be an object, got {perm!r}")
    kind = perm.get("model")
    where = f"permittivity {kind!r}"
    try:
        if kind == "vacuum":
            return Vacuum()
        if kind == "oscillators":
            return CoreOscillators(_oscillators(perm.get("oscillators", [])).oscillators, magnetic)
        if kind == "two_oscillator":
            core = library.two_oscillator_dielectric(
                *(_number(perm, k, positive=True, where=where)
                  for k in ("eps_static", "eps_infrared", "uv_eV", "ir_eV")))
            return CoreOscillators(core.oscillators, magnetic)
        if kind == "dc_dielectric":
            sigma = _number(perm, "sigma0_S_m", positive=True, where=where)
            return DcDielectric(_core(perm, base_dir), sigma_si_to_gaussian(sigma), magnetic)
        if kind == "drude":
            gamma = _number(perm, "gamma_eV", 0.0, where=where)
            relax = None if gamma == 0 else RelaxationLaw(
                ev_to_rad_s(gamma), _number(perm, "T_ref_K", 300.0, positive=True, where=where),
                _number(perm, "exponent", 1.0, where=where))
            omega_p = ev_to_rad_s(_number(perm, "omega_p_eV", positive=True, where=where))
            return Drude(_core(perm, base_dir), omega_p, relax, magnetic)
        if kind == "plasma":
            omega_p = ev_to_rad_s(_number(perm, "omega_p_eV", positive=True, where=where))
            return Plasma(_core(perm, base_dir), omega_p, magnetic)
        if kind == "tabulated":
            table = _table(perm, table_path, base_dir)
            cache = None
            if "cache" in perm:
                c = perm["cache"]
                cache = (_number(c, "T_K", positive=True, where="cache"),
                         tuple(float(v) for v in c.get("eps", [])))
            return Tabulated(table, magnetic, cache)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"unknown permittivity model {kind!r}")


def material_from_dict(spec, base_dir="."):
    """Build a material model from its JSON description.

    Accepted forms are ``{"file": path}``, ``{"builtin": name}`` and the
    material-file layout ``{"name", "permittivity", "permeability",
    "spectral_table"}``.
    """
    if not isinstance(spec, dict):
        raise ConfigError(f"material description must be an object, got {spec!r}")
    if "file" in spec:
        return load_material(_resolve(spec["file"], base_dir))
    if "builtin" in spec:
        name = spec["builtin"]
        if name not in BUILTINS:
            raise ConfigError(f"unknown builtin material {name!r}; known: {sorted(BUILTINS)}")
        return BUILTINS[name]()
    if "permittivity" not in spec:
        raise ConfigError("material needs 'permittivity', 'file' or 'builtin'")
    perm_mu = spec.get("permeability", {})
    magnetic = MagneticLaw(_number(perm_mu, "mu0", 1.0, positive=True, where="permeability"))
    return _permittivity(spec["permittivity"], magnetic, base_dir, spec.get("spectral_table"))


def _tail_to_dict(tail):
    if tail is None:
        return None
    if isinstance(tail, DrudeTail):
        return {"type": "drude", "omega_p_eV": rad_s_to_ev(tail.omega_p),
                "gamma_eV": rad_s_to_ev(tail.gamma)}
    if isinstance(tail, PlasmaTail):
        return {"type": "plasma", "omega_p_eV": rad_s_to_ev(tail.omega_p)}
    if isinstance(tail, ConstantEps):
        return {"type": "constant", "eps0": tail.eps0}
    return {"type": "power_law", "exponent": tail.exponent}


def _permittivity_to_dict(model):
    if isinstance(model, Vacuum):
        return {"model": "vacuum"}
    if isinstance(model, CoreOscillators):
        return {"model": "oscillators", "oscillators": [
            {"strength": o.strength, "frequency_eV": rad_s_to_ev(o.frequency),
             "relaxation_eV": rad_s_to_ev(o.relaxation)} for o in model.oscillators]}
    if isinstance(model, Tabulated):
        t = model.table
        return {"model": "tabulated",
                "table": {"omega_eV": [rad_s_to_ev(w) for w in t.omega], "im_eps": list(t.im_eps)},
                "low": _tail_to_dict(t.low), "high": _tail_to_dict(t.high)}
    out = {"core": _permittivity_to_dict(model.core)}
    if isinstance(model, DcDielectric):
        out.update(model="dc_dielectric", sigma0_S_m=model.sigma0 * 4.0 * math.pi * EPS0_SI)
    elif isinstance(model, Drude):
        out.update(model="drude", omega_p_eV=rad_s_to_ev(model.omega_p))
        if model.relaxation is not None:
            r = model.relaxation
            out.update(gamma_eV=rad_s_to_ev(r.gamma_ref), T_ref_K=r.T_ref, exponent=r.exponent)
    elif isinstance(model, Plasma):
        out.update(model="plasma", omega_p_eV=rad_s_to_ev(model.omega_p))
    else:
        raise ConfigError(f"cannot describe {type(model).__name__}")
    return out


def material_to_dict(model, name=None):
    """JSON description of a material model with all parameters explicit."""
    out = {"permittivity": _permittivity_to_dict(model),
           "permeability": {"mu0": model.magnetic.mu0}}
    if name is not None:
        out = {"name": name, **out}
    return out


def body_to_dict(body):
    """JSON description of a built body, used for provenance records."""
    if isinstance(body, PerfectReflector):
        return {"perfect_reflector": True}
    if not isinstance(body, LayeredBody):
        return material_to_dict(body)
    out = {"substrate": material_to_dict(body.substrate),
           "layers": [{**material_to_dict(m), "thickness_nm": d * 1e9} for m, d in body.layers]}
    if body.graphene is not None:
        out["graphene"] = {"provider": type(body.graphene).__name__,
                           "parameters": {k: v for k, v in vars(body.graphene).items()
                                          if k != "metadata"}}
    return out


def _resolve(path, base_dir):
    p = Path(path)
    return p if p.is_absolute() else Path(base_dir) / p


def load_material(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"material file not found: {path}")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return material_from_dict(spec, path.parent)


# --- optical data ingestion ----------------------------------------------------------


def read_spectral_csv(path):
    """Read ``omega_eV, im_eps`` columns; errors name the offending file line."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"optical data file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"omega_eV", "im_eps"} <= set(reader.fieldnames):
            raise ConfigError(f"{path}: header must contain 'omega_eV' and 'im_eps'")
        omega, im = [], []
        for row in reader:
            line = reader.line_num
            try:
                w, v = float(row["omega_eV"]), float(row["im_eps"])
            except (TypeError, ValueError):
                raise ConfigError(f"{path}: row {line}: non-numeric value") from None
            if not (math.isfinite(w) and math.isfinite(v)):
                raise ConfigError(f"{path}: row {line}: non-finite value")
            if w <= 0:
                raise ConfigError(f"{path}: row {line}: frequency must be positive")
            if v < 0:
                raise ConfigError(f"{path}: row {line}: Im eps < 0 violates passivity")
            if omega and w <= omega[-1]:
                raise ConfigError(f"{path}: row {line}: frequencies must be strictly increasing")
            omega.append(w)
            im.append(v)
    if len(omega) < 2:
        raise ConfigError(f"{path}: at least 2 data rows are required")
    return omega, im


def ingest_material(csv_path, extrapolation=None, l_cap=200, T=300.0):
    """Material description embedding a spectral table and cached eps(i xi_l) at ``T``."""
    extrapolation = dict(extrapolation or {})
    omega, im = read_spectral_csv(csv_path)
    perm = {"model": "tabulated", "table": {"omega_eV": omega, "im_eps": im},
            "low": extrapolation.get("low"), "high": extrapolation.get("high")}
    spec = {"name": extrapolation.get("name", Path(csv_path).stem), "permittivity": perm,
            "permeability": {"mu0": extrapolation.get("mu0", 1.0)}}
    l_cap = int(extrapolation.get("cache_l_max", l_cap))
    if l_cap < 0:
        raise ConfigError("the cache size must be non-negative")
    model = material_from_dict(spec)
    xi = [matsubara_frequency(l, T) for l in range(1, l_cap + 1)]
    eps = [float(e) for e in model.epsilon(xi, T)] if xi else []
    perm["cache"] = {"T_K": T, "eps": eps}
    return spec


# --- run configuration ----------------------------------------------------------------

KINDS = ("free-energy", "pressure", "gradient", "entropy", "compare", "diff-force", "nernst",
         "graphene-ratio")

ROLES = {
    "free-energy": ("body1", "body2"),
    "pressure": ("body1", "body2"),
    "entropy": ("body1", "body2"),
    "nernst": ("body1", "body2"),
    "gradient": ("sphere", "plate"),
    "compare": ("sphere", "plate"),
    "graphene-ratio": ("plate",),
}

DIFF_SCHEMES = {
    "magnetic_stripes": (),
    "optical_modulation": ("sphere", "plate_metallic", "plate_dielectric"),
}

OPTION_DEFAULTS = {
    "entropy": {"dT_fraction": 0.125, "step_rtol": 0.05},
    "nernst": {"dT_fraction": 0.125},
    "diff-force": {"scheme": "magnetic_stripes", "approach": "drude", "overlayer_nm": 30.0},
    "graphene-ratio": {"provider": "conductivity", "provider_params": {}},
}

NEEDS_RADIUS = ("gradient", "compare", "diff-force")


@dataclass(frozen=True)
class BodySpec:
    """Declarative body: a perfect reflector or a substrate with layers and graphene."""

    substrate: dict | None = None
    layers: tuple = ()
    graphene: dict | None = None
    perfect_reflector: bool = False

    @classmethod
    def parse(cls, spec, where):
        if not isinstance(spec, dict):
            raise ConfigError(f"{where}: body must be an object")
        if spec.get("perfect_reflector"):
            return cls(perfect_reflector=True)
        if "substrate" in spec:
            layers = []
            for i, layer in enumerate(spec.get("layers", [])):
                d = _number(layer, "thickness_nm", positive=True, where=f"{where} layer {i}")
                layers.append(({k: v for k, v in layer.items() if k != "thickness_nm"}, d))
            graphene = spec.get("graphene")
            if graphene is not None and graphene.get("provider") not in provider_names():
                raise ConfigError(f"{where}: unknown graphene provider {graphene.get('provider')!r}")
            return cls(spec["substrate"], tuple(layers), graphene)
        return cls(spec)

    def to_dict(self):
        if self.perfect_reflector:
            return {"perfect_reflector": True}
        if not self.layers and self.graphene is None:
            return dict(self.substrate)
        out = {"substrate": self.substrate,
               "layers": [{**m, "thickness_nm": d} for m, d in self.layers]}
        if self.graphene is not None:
            out["graphene"] = self.graphene
        return out

    def build(self, base_dir="."):
        if self.perfect_reflector:
            return PerfectReflector()
        substrate = material_from_dict(self.substrate, base_dir)
        if not self.layers and self.graphene is None:
            return substrate
        layers = tuple((material_from_dict(m, base_dir), d / 1e9) for m, d in self.layers)
        graphene = None
        if self.graphene is not None:
            graphene = get_provider(self.graphene["provider"], **self.graphene.get("params", {}))
        return LayeredBody(substrate, layers, graphene)


def _float_list(values, key):
    if not isinstance(values, list) or not values:
        raise ConfigError(f"grid: {key!r} must be a non-empty list")
    return tuple(_number({key: v}, key, positive=True, where="grid") for v in values)


@dataclass(frozen=True)
class RunConfig:
    """Parsed run request.  Grid values keep the units of their keys."""

    kind: str
    bodies: dict
    a_nm: tuple
    T_K: tuple
    R_um: float | None = None
    quadrature: QuadratureSpec = QuadratureSpec()
    options: dict = field(default_factory=dict)
    output: str | None = None
    base_dir: str = field(default=".", compare=False)

    @classmethod
    def parse(cls, data, base_dir="."):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        kind = data.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"unknown computation kind {kind!r}; choose from {KINDS}")
        options = {**OPTION_DEFAULTS.get(kind, {}), **data.get("options", {})}
        if kind == "diff-force":
            if options["scheme"] not in DIFF_SCHEMES:
                raise ConfigError(f"unknown diff-force scheme {options['scheme']!r}")
            if options["approach"] not in ("drude", "plasma"):
                raise ConfigError("diff-force approach must be 'drude' or 'plasma'")
            roles = DIFF_SCHEMES[options["scheme"]]
        else:
            roles = ROLES[kind]
        raw_bodies = data.get("bodies", {})
        missing = [r for r in roles if r not in raw_bodies]
        if missing:
            raise ConfigError(f"kind {kind!r} needs bodies {list(roles)}; missing {missing}")
        bodies = {r: BodySpec.parse(raw_bodies[r], f"body {r!r}") for r in roles}
        grid = data.get("grid", {})
        a_nm = _float_list(grid.get("a_nm"), "a_nm")
        T_K = _float_list(grid.get("T_K", [300.0]), "T_K")
        R_um = None
        if kind in NEEDS_RADIUS:
            R_um = _number(grid, "R_um", positive=True, where="grid")
        if kind == "nernst":
            if len(T_K) < 4 or any(b >= a for a, b in zip(T_K, T_K[1:])):
                raise ConfigError("nernst needs at least 4 strictly descending temperatures")
        qd = data.get("quadrature", {})
        unknown = set(qd) - {"rtol", "matsubara_rtol", "l_max", "max_evals"}
        if unknown:
            raise ConfigError(f"unknown quadrature keys {sorted(unknown)}")
        try:
            quadrature = QuadratureSpec(**qd)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"quadrature: {exc}") from exc
        cfg = cls(kind, bodies, a_nm, T_K, R_um, quadrature, options, data.get("output"),
                  str(base_dir))
        cfg.build_bodies()
        return cfg

    def to_dict(self):
        grid = {"a_nm": list(self.a_nm), "T_K": list(self.T_K)}
        if self.R_um is not None:
            grid["R_um"] = self.R_um
        q = self.quadrature
        out = {"kind": self.kind,
               "bodies": {r: b.to_dict() for r, b in self.bodies.items()},
               "grid": grid,
               "quadrature": {"rtol": q.rtol, "matsubara_rtol": q.matsubara_rtol,
                              "l_max": q.l_max, "max_evals": q.max_evals},
               "options": self.options}
        if self.output is not None:
            out["output"] = self.output
        return out

    def build_bodies(self):
        """Instantiate every body; raises :class:`ConfigError` on bad references."""
        try:
            return {r: b.build(self.base_dir) for r, b in self.bodies.items()}
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"body construction failed: {exc}") from exc


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return RunConfig.parse(data, path.parent)


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a sibling temporary file and rename."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()

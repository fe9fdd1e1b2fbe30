"""Run configuration: YAML with nested sections.

Grammar (every key optional unless marked required; unknown keys are errors)::

    scenario: n_blob_localization     # required, see SCENARIOS
    alpha: 0.5                        # required, 0 <= alpha < 1
    seed: 0
    output_dir: runs/n_blob           # default runs/<scenario>
    integration:
      dt: 0.01                        # step at the largest epsilon
      t_end: 1.0
      diagnostic_every: 10            # integration steps per diagnostics row
      scale_dt_with_epsilon: true     # dt * (eps / max eps)**(2 + alpha)
    discretization:
      particles_per_diameter: 32      # >= 8
      smoothing_factor: 2.0           # smoothing = factor * lattice spacing
      profile: uniform                # uniform | radial_taper
      max_density: null               # the constant M; null = profile peak
    localization:
      epsilons: [0.1]                 # each in (0, 1)
      beta: 0.2                       # in (0, 1/2); >= beta_bound(alpha) warns
      probe_radii: [0.5, 1.0, 2.0]    # exterior-mass radii, in units of epsilon
    blobs:                            # one entry per blob (radius = epsilon)
      - {center: [0.0, 0.0], intensity: 1.0}
    external:                         # see msqglab.external.FIELD_KEYS
      kind: zero
    calibration:                      # two_vortex_calibration only
      intensity: 1.0
      separation: 1.0
      periods: 1.0
    triple:                           # expanding_triple only
      growth: 3.0
      steps: 20000
      collapse_fraction: 0.01
      protect_radius: 0.0
      search: {...}                   # fields of TripleSearchConfig
"""
from __future__ import annotations

import copy
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from ..diagnostics import beta_bound
from ..errors import ConfigError
from ..external import FIELD_KEYS
from ..pseudo_vortex import TripleSearchConfig

SCENARIOS = {
    "single_blob_free": "one blob alone in the plane (F = 0); checks conservation of B and I",
    "single_blob_driven": "one blob in an external field; checks the inertia / centre growth envelopes",
    "n_blob_localization": "N blobs tracked against co-evolving pseudo-vortices for each epsilon",
    "expanding_triple": "search and integrate a self-similar expanding pseudo-vortex triple",
    "two_vortex_calibration": "co-rotating and counter-propagating pairs against closed forms",
}


@dataclass
class Integration:
    dt: float = 0.01
    t_end: float = 1.0
    diagnostic_every: int = 10
    scale_dt_with_epsilon: bool = True


@dataclass
class Discretization:
    particles_per_diameter: int = 32
    smoothing_factor: float = 2.0
    profile: str = "uniform"
    max_density: Optional[float] = None


@dataclass
class Localization:
    epsilons: List[float] = field(default_factory=lambda: [0.1])
    beta: float = 0.2
    probe_radii: List[float] = field(default_factory=lambda: [0.5, 1.0, 2.0])


@dataclass
class Calibration:
    intensity: float = 1.0
    separation: float = 1.0
    periods: float = 1.0


@dataclass
class Triple:
    growth: float = 3.0
    steps: int = 20000
    collapse_fraction: float = 0.01
    protect_radius: float = 0.0
    search: Dict[str, Any] = field(default_factory=dict)


@dataclass
class RunConfig:
    scenario: str
    alpha: float
    seed: int = 0
    output_dir: Optional[str] = None
    integration: Integration = field(default_factory=Integration)
    discretization: Discretization = field(default_factory=Discretization)
    localization: Localization = field(default_factory=Localization)
    blobs: List[Dict[str, Any]] = field(default_factory=list)
    external: Dict[str, Any] = field(default_factory=lambda: {"kind": "zero"})
    calibration: Calibration = field(default_factory=Calibration)
    triple: Triple = field(default_factory=Triple)
    warnings: List[str] = field(default_factory=list, compare=False)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("warnings")
        return d

    def search_config(self) -> TripleSearchConfig:
        kw = dict(self.triple.search)
        for key in ("intensity_range", "side_ratio_range"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return TripleSearchConfig(**kw)


_SECTIONS = {
    "integration": Integration,
    "discretization": Discretization,
    "localization": Localization,
    "calibration": Calibration,
    "triple": Triple,
}
_TOP_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"warnings"}
_SEARCH_KEYS = {f.name for f in dataclasses.fields(TripleSearchConfig)}


def _default_blobs(scenario: str) -> List[Dict[str, Any]]:
    if scenario == "n_blob_localization":
        return [{"center": [-1.0, 0.0], "intensity": 1.0}, {"center": [1.0, 0.0], "intensity": 1.0}]
    return [{"center": [0.0, 0.0], "intensity": 1.0}]


def _num(errors, where, value, *, integer=False, lo=None, hi=None, lo_open=False, hi_open=False):
    """Coerce and range-check a number, appending to ``errors`` on failure."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{where}: expected a number, got {value!r}")
        return None
    if integer and (not float(value).is_integer()):
        errors.append(f"{where}: expected an integer, got {value!r}")
        return None
    v = int(value) if integer else float(value)
    if not math.isfinite(v):
        errors.append(f"{where}: must be finite")
        return None
    if lo is not None and (v <= lo if lo_open else v < lo):
        errors.append(f"{where}: must be {'>' if lo_open else '>='} {lo}, got {v}")
    if hi is not None and (v >= hi if hi_open else v > hi):
        errors.append(f"{where}: must be {'<' if hi_open else '<='} {hi}, got {v}")
    return v


def _vec2(errors, where, value):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        errors.append(f"{where}: expected a 2-vector, got {value!r}")
        return None
    out = [_num(errors, f"{where}[{i}]", v) for i, v in enumerate(value)]
    return None if None in out else out


def _section(errors, name, cls, raw):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        errors.append(f"{name}: expected a mapping")
        return cls()
    known = {f.name for f in dataclasses.fields(cls)}
    for key in raw:
        if key not in known:
            errors.append(f"{name}: unknown key {key!r}")
    return cls(**{k: v for k, v in raw.items() if k in known})


def validate_config(text: str) -> RunConfig:
    """Parse, fill defaults and check a config; raises ConfigError listing
    every violated field. Non-fatal issues are collected in ``.warnings``."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"malformed YAML: {exc}"]) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a mapping"])
    raw = copy.deepcopy(raw)
    errors: List[str] = []
    warnings: List[str] = []

    for key in raw:
        if key not in _TOP_KEYS:
            errors.append(f"unknown key {key!r}")

    scenario = raw.get("scenario")
    if scenario is None:
        errors.append("scenario: required")
    elif scenario not in SCENARIOS:
        errors.append(f"scenario: unknown scenario {scenario!r}; expected one of {sorted(SCENARIOS)}")
    alpha = raw.get("alpha")
    if alpha is None:
        errors.append("alpha: required")
    else:
        n_err = len(errors)
        alpha = _num(errors, "alpha", alpha, lo=0.0, hi=1.0, hi_open=True)
        if len(errors) > n_err:
            alpha = None

    sections = {name: _section(errors, name, cls, raw.get(name)) for name, cls in _SECTIONS.items()}
    cfg = RunConfig(
        scenario=scenario if scenario in SCENARIOS else "",
        alpha=alpha if alpha is not None else 0.0,
        seed=raw.get("seed", 0),
        output_dir=raw.get("output_dir"),
        blobs=raw.get("blobs") if raw.get("blobs") is not None else _default_blobs(scenario),
        external=raw.get("external")
        if raw.get("external") is not None
        else ({"kind": "rigid_rotation", "omega": 1.0} if scenario == "single_blob_driven" else {"kind": "zero"}),
        **sections,
    )

    cfg.seed = _num(errors, "seed", cfg.seed, integer=True, lo=0)
    if cfg.output_dir is None and cfg.scenario:
        cfg.output_dir = f"runs/{cfg.scenario}"
    elif cfg.output_dir is not None and not isinstance(cfg.output_dir, str):
        errors.append("output_dir: expected a string")

    it = cfg.integration
    it.dt = _num(errors, "integration.dt", it.dt, lo=0.0, lo_open=True)
    it.t_end = _num(errors, "integration.t_end", it.t_end, lo=0.0, lo_open=True)
    it.diagnostic_every = _num(errors, "integration.diagnostic_every", it.diagnostic_every,
                               integer=True, lo=1)
    if not isinstance(it.scale_dt_with_epsilon, bool):
        errors.append("integration.scale_dt_with_epsilon: expected true/false")

    disc = cfg.discretization
    disc.particles_per_diameter = _num(errors, "discretization.particles_per_diameter",
                                       disc.particles_per_diameter, integer=True, lo=8)
    disc.smoothing_factor = _num(errors, "discretization.smoothing_factor", disc.smoothing_factor,
                                 lo=0.0)
    if disc.profile not in ("uniform", "radial_taper"):
        errors.append(f"discretization.profile: unknown profile {disc.profile!r}")
    if disc.max_density is not None:
        disc.max_density = _num(errors, "discretization.max_density", disc.max_density,
                                lo=0.0, lo_open=True)

    loc = cfg.localization
    if not isinstance(loc.epsilons, list) or not loc.epsilons:
        errors.append("localization.epsilons: expected a nonempty list")
        loc.epsilons = []
    loc.epsilons = [_num(errors, f"localization.epsilons[{i}]", e, lo=0.0, hi=1.0,
                         lo_open=True, hi_open=True) for i, e in enumerate(loc.epsilons)]
    loc.beta = _num(errors, "localization.beta", loc.beta, lo=0.0, hi=0.5, lo_open=True,
                    hi_open=True)
    if not isinstance(loc.probe_radii, list):
        errors.append("localization.probe_radii: expected a list")
        loc.probe_radii = []
    loc.probe_radii = [_num(errors, f"localization.probe_radii[{i}]", h, lo=0.0, lo_open=True)
                       for i, h in enumerate(loc.probe_radii)]
    if alpha is not None and loc.beta is not None and loc.beta >= beta_bound(alpha):
        warnings.append(
            f"beta={loc.beta} >= beta_bound(alpha={alpha}) = {beta_bound(alpha):.6g}: "
            "run is outside the localization regime"
        )

    blobs = cfg.blobs
    if not isinstance(blobs, list) or not blobs:
        errors.append("blobs: expected a nonempty list")
        blobs = []
    clean = []
    for i, b in enumerate(blobs):
        if not isinstance(b, dict):
            errors.append(f"blobs[{i}]: expected a mapping")
            continue
        for key in b:
            if key not in ("center", "intensity"):
                errors.append(f"blobs[{i}]: unknown key {key!r}")
        c = _vec2(errors, f"blobs[{i}].center", b.get("center", [0.0, 0.0]))
        a = _num(errors, f"blobs[{i}].intensity", b.get("intensity", 1.0))
        if a == 0.0:
            errors.append(f"blobs[{i}].intensity: must be nonzero")
        clean.append({"center": c, "intensity": a})
    cfg.blobs = clean
    if cfg.scenario in ("single_blob_free", "single_blob_driven") and len(clean) != 1:
        errors.append(f"blobs: scenario {cfg.scenario} needs exactly one blob, got {len(clean)}")
    eps_ok = [e for e in loc.epsilons if e is not None]
    if eps_ok and all(b["center"] is not None for b in clean):
        emax = max(eps_ok)
        for i in range(len(clean)):
            for j in range(i + 1, len(clean)):
                d = math.dist(clean[i]["center"], clean[j]["center"])
                if d <= 2.0 * emax:
                    errors.append(f"blobs[{i}], blobs[{j}]: disks of radius {emax} overlap")

    ext = cfg.external
    if not isinstance(ext, dict):
        errors.append("external: expected a mapping")
    else:
        kind = ext.get("kind", "zero")
        if kind not in FIELD_KEYS:
            errors.append(f"external.kind: unknown kind {kind!r}")
        else:
            allowed = FIELD_KEYS[kind] | ({"sources"} if kind == "other_vortices" else set())
            for key in ext:
                if key not in allowed:
                    errors.append(f"external: unknown key {key!r} for kind {kind}")
            if "omega" in ext:
                _num(errors, "external.omega", ext["omega"])
            if "rate" in ext:
                _num(errors, "external.rate", ext["rate"])
            for vkey in ("center", "velocity"):
                if vkey in ext:
                    _vec2(errors, f"external.{vkey}", ext[vkey])
            if kind == "other_vortices":
                if cfg.scenario != "single_blob_driven":
                    errors.append("external.kind other_vortices is only available in single_blob_driven")
                src = ext.get("sources")
                if not isinstance(src, list) or not src:
                    errors.append("external.sources: other_vortices needs a nonempty list of sources")
                else:
                    for i, s in enumerate(src):
                        if not isinstance(s, dict):
                            errors.append(f"external.sources[{i}]: expected a mapping")
                            continue
                        _vec2(errors, f"external.sources[{i}].center", s.get("center"))
                        _num(errors, f"external.sources[{i}].intensity", s.get("intensity"))
                if "protect_radius" in ext:
                    _num(errors, "external.protect_radius", ext["protect_radius"], lo=0.0)
        if cfg.scenario not in ("", "single_blob_driven") and kind != "zero":
            errors.append(f"external: scenario {cfg.scenario} takes no external field (kind must be zero)")

    cal = cfg.calibration
    cal.intensity = _num(errors, "calibration.intensity", cal.intensity)
    if cal.intensity == 0.0:
        errors.append("calibration.intensity: must be nonzero")
    cal.separation = _num(errors, "calibration.separation", cal.separation, lo=0.0, lo_open=True)
    cal.periods = _num(errors, "calibration.periods", cal.periods, lo=0.0, lo_open=True)

    tr = cfg.triple
    tr.growth = _num(errors, "triple.growth", tr.growth, lo=1.0, lo_open=True)
    tr.steps = _num(errors, "triple.steps", tr.steps, integer=True, lo=10)
    tr.collapse_fraction = _num(errors, "triple.collapse_fraction", tr.collapse_fraction,
                                lo=0.0, hi=1.0, lo_open=True, hi_open=True)
    tr.protect_radius = _num(errors, "triple.protect_radius", tr.protect_radius, lo=0.0)
    if not isinstance(tr.search, dict):
        errors.append("triple.search: expected a mapping")
        tr.search = {}
    for key in tr.search:
        if key not in _SEARCH_KEYS:
            errors.append(f"triple.search: unknown key {key!r}")
    if cfg.scenario in ("two_vortex_calibration", "expanding_triple") and alpha == 0.0:
        errors.append(f"alpha: scenario {cfg.scenario} needs alpha > 0")

    if errors:
        raise ConfigError(errors)
    cfg.warnings = warnings
    return cfg


def config_to_yaml(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)

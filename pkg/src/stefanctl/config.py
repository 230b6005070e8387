"""Run configuration: YAML schema, object construction, and validation.

Schema (all values SI; per-gram heat quantities accepted via *_per_gram
keys, which the loader multiplies by 1000):

    material:       rho, cp | cp_per_gram, k, latent_heat | latent_heat_per_gram, Tm
    solid_material: same keys (two-phase runs only)
    domain:         L, N, dt_policy {kind: cfl|fixed, safety, value, cap}
    initial:        s0, profile {kind, amplitude | x,T}, solid_profile {...}
    schedule:       kind (periodic|uniform|explicit), r, R, seed, horizon, instants
    controller:     kind (zoh|open-loop|zero), c, s_r, phase (one-phase|two-phase)
    output:         stride, transform_energy (bool), transform_eps
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import control, core
from .core import (
    ConfigError,
    DomainSpec,
    InitialData,
    MaterialParams,
    Profile,
    Schedule,
    StefanError,
    TwoPhaseInitialData,
    TwoPhaseParams,
    Violation,
)

# Paraffin wax (liquid phase); heat capacity and latent heat converted from
# per-gram data sheets.  Conductivity is in W/(m K).
DEFAULT_MATERIAL = {
    "rho": 790.0,
    "cp": 2380.0,
    "k": 0.220,
    "latent_heat": 210000.0,
    "Tm": 37.0,
}


@dataclass
class RunConfig:
    material: MaterialParams
    dom: DomainSpec
    init: InitialData | TwoPhaseInitialData
    schedule: dict
    horizon: float
    controller: control.ControllerConfig
    controller_kind: str = "zoh"
    solid_material: MaterialParams | None = None
    stride: float | None = None
    transform_energy: bool = True
    transform_eps: float | None = None
    raw: dict = field(default_factory=dict)

    @property
    def phase(self) -> str:
        return self.controller.phase

    @property
    def params(self):
        if self.phase == "two-phase":
            return TwoPhaseParams(liquid=self.material, solid=self.solid_material)
        return self.material

    def build_schedule(self, seed_override: int | None = None) -> Schedule:
        d = dict(self.schedule)
        if seed_override is not None:
            d["seed"] = seed_override
        return core.make_schedule(
            d.get("kind", "periodic"), self.horizon, r=d.get("r"),
            R=d.get("R"), seed=d.get("seed"), instants=d.get("instants"))


def _require(d: dict, key: str, section: str):
    if key not in d:
        raise ConfigError([Violation("missing-key", f"{section}.{key} is required",
                                     {"section": section, "key": key})])
    return d[key]


def _material_from_dict(d: dict, section: str) -> MaterialParams:
    cp = d.get("cp", 1000.0 * d["cp_per_gram"] if "cp_per_gram" in d else None)
    lh = d.get("latent_heat",
               1000.0 * d["latent_heat_per_gram"] if "latent_heat_per_gram" in d
               else None)
    if cp is None or lh is None:
        raise ConfigError([Violation(
            "missing-key", f"{section} needs cp(_per_gram) and latent_heat(_per_gram)")])
    try:
        return MaterialParams(rho=float(_require(d, "rho", section)), cp=float(cp),
                              k=float(_require(d, "k", section)),
                              latent_heat=float(lh),
                              Tm=float(_require(d, "Tm", section)))
    except core.ParameterError as err:
        raise ConfigError([Violation("bad-material", f"{section}: {err}")]) from err


def _profile_from_dict(d: dict) -> Profile:
    kind = d.get("kind", "linear")
    if kind == "table":
        return Profile(kind="table", x=tuple(d["x"]), T=tuple(d["T"]))
    return Profile(kind=kind, amplitude=float(d.get("amplitude", 0.0)))


def _domain_from_dict(d: dict) -> DomainSpec:
    policy = d.get("dt_policy", {}) or {}
    kind = policy.get("kind", "cfl")
    dt = None
    safety = float(policy.get("safety", 1.0))
    if kind == "fixed":
        dt = float(_require(policy, "value", "domain.dt_policy"))
    elif kind != "cfl":
        raise ConfigError([Violation("bad-dt-policy",
                                     f"unknown dt_policy kind {kind!r}")])
    try:
        return DomainSpec(L=float(_require(d, "L", "domain")),
                          N=int(_require(d, "N", "domain")),
                          dt=dt, cfl_safety=safety)
    except core.ParameterError as err:
        raise ConfigError([Violation("bad-domain", str(err))]) from err


def load_config(path: str | Path) -> RunConfig:
    """Parse and structurally validate a YAML run configuration."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError([Violation("bad-config", f"{path}: not a mapping")])
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    material = _material_from_dict(_require(raw, "material", "config"), "material")
    dom = _domain_from_dict(_require(raw, "domain", "config"))
    ctrl_d = _require(raw, "controller", "config")
    phase = ctrl_d.get("phase", "one-phase")
    try:
        ctrl = control.ControllerConfig(c=float(_require(ctrl_d, "c", "controller")),
                                        s_r=float(_require(ctrl_d, "s_r", "controller")),
                                        phase=phase)
    except core.ParameterError as err:
        raise ConfigError([Violation("bad-controller", str(err))]) from err
    kind = ctrl_d.get("kind", "zoh")
    if kind not in ("zoh", "open-loop", "zero"):
        raise ConfigError([Violation("bad-controller",
                                     f"unknown controller kind {kind!r}")])

    init_d = _require(raw, "initial", "config")
    s0 = float(_require(init_d, "s0", "initial"))
    profile = _profile_from_dict(init_d.get("profile", {"kind": "linear"}))
    solid_material = None
    if phase == "two-phase":
        solid_material = _material_from_dict(
            _require(raw, "solid_material", "config"), "solid_material")
        solid_profile = _profile_from_dict(
            _require(init_d, "solid_profile", "initial"))
        init: InitialData | TwoPhaseInitialData = TwoPhaseInitialData(
            s0=s0, liquid=profile, solid=solid_profile)
    else:
        init = InitialData(s0=s0, profile=profile)

    sched_d = dict(_require(raw, "schedule", "config"))
    horizon = float(_require(sched_d, "horizon", "schedule"))
    out_d = raw.get("output", {}) or {}
    stride = out_d.get("stride")
    return RunConfig(
        material=material, dom=dom, init=init, schedule=sched_d, horizon=horizon,
        controller=ctrl, controller_kind=kind, solid_material=solid_material,
        stride=float(stride) if stride is not None else None,
        transform_energy=bool(out_d.get("transform_energy", True)),
        transform_eps=(float(out_d["transform_eps"])
                       if out_d.get("transform_eps") is not None else None),
        raw=raw,
    )


def validate_config(rc: RunConfig, schedule: Schedule) -> list[Violation]:
    """All pre-run checks: initial data, gain vs schedule, setpoint bounds."""
    out: list[Violation] = []
    if rc.phase == "two-phase":
        out += core.validate_two_phase_initial_data(rc.init, rc.dom, rc.params)
    else:
        out += core.validate_initial_data(rc.init, rc.dom, rc.material)
    out += core.validate_gain_vs_schedule(rc.controller.c, schedule)
    if not out:
        out += control.validate_setpoint(rc.init, rc.controller, rc.params, rc.dom)
    return out

"""Command-line interface: simulate | sweep | verify | oracle.

Exit codes are frozen for scripting: 0 success, 1 validity violation or
aborted run, 2 configuration/validation error.  STEFAN_LOG selects the log
level (DEBUG/INFO/WARNING/...).
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import control, diagnostics, kernels, one_phase, oracle, trajectory, two_phase
from .config import DEFAULT_MATERIAL, RunConfig, config_from_dict, load_config, validate_config
from .core import ConfigError, MaterialParams, StefanError

log = logging.getLogger("stefanctl")

EXIT_OK = 0
EXIT_VALIDITY = 1
EXIT_CONFIG = 2

TOL_ENERGY = 1e-3


def _setup_logging():
    level = os.environ.get("STEFAN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _report_violations(violations) -> None:
    for v in violations:
        print(f"config error [{v.code}]: {v.message}", file=sys.stderr)


def _make_flux(rc: RunConfig, schedule, p):
    if rc.controller_kind == "zoh":
        return control.ZohController(rc.controller, p, schedule)
    if rc.controller_kind == "zero":
        return control.ConstantFlux(0.0)
    # open-loop: the analytic sequence seeded by the discrete initial energy
    if rc.phase == "two-phase":
        state = two_phase.make_state(rc.init, p, rc.dom)
    else:
        state = one_phase.make_state(rc.init, rc.dom, p)
    E0 = control.internal_energy(state, p, rc.controller.s_r)
    return control.SequenceFlux(control.open_loop_sequence(E0, rc.controller.c,
                                                           schedule))


def run_config(rc: RunConfig, seed: int | None = None):
    """Validate and run one configuration; returns (trajectory, summary)."""
    schedule = rc.build_schedule(seed_override=seed)
    violations = validate_config(rc, schedule)
    if violations:
        raise ConfigError(violations)
    p = rc.params
    transform = None
    if rc.transform_energy and rc.phase == "one-phase":
        transform = diagnostics.BacksteppingConfig.from_params(
            rc.material, rc.controller.c, eps=rc.transform_eps)
    if rc.phase == "two-phase":
        flux = _make_flux(rc, schedule, p)
        traj = two_phase.simulate(rc.init, p, rc.dom, flux, rc.controller.s_r,
                                  schedule=schedule, horizon=rc.horizon,
                                  stride=rc.stride)
        traj.meta["s_inf"] = two_phase.s_infinity(rc.init, p, rc.dom)
    else:
        flux = _make_flux(rc, schedule, p)
        traj = one_phase.simulate(rc.init, p, rc.dom, flux, rc.controller.s_r,
                                  schedule=schedule, horizon=rc.horizon,
                                  stride=rc.stride, transform=transform)
    summary = summarize(rc, schedule, traj)
    return traj, summary


def summarize(rc: RunConfig, schedule, traj: trajectory.Trajectory) -> dict:
    p = rc.params
    b = control.decay_rate_bound(rc.controller, p, rc.dom)
    window_start = schedule.instants[1] if len(schedule.instants) > 1 else None
    decay = diagnostics.decay_fit(traj.t, traj.psi, b, window_start=window_start)
    energy_res = diagnostics.energy_conservation_residual(traj.t, traj.energy, traj.q)
    recursion = diagnostics.sampled_energy_recursion_residual(
        traj.samples, rc.controller.c)
    summary = {
        "schema": "stefanctl-summary/1",
        "phase": rc.phase,
        "backend": kernels.BACKEND,
        "status": traj.status,
        "n_rows": len(traj),
        "n_samples": len(traj.samples),
        "iterations": traj.meta.get("n_steps"),
        "config": rc.raw,
        "final": {"t": float(traj.t[-1]), "s": float(traj.s[-1]),
                  "q": float(traj.q[-1])},
        "setpoint": rc.controller.s_r,
        "gain": rc.controller.c,
        "decay": {
            "b": b,
            "M_hat": decay.M_hat,
            "tail_slope": decay.slope,
            "passed": decay.passed,
            "trivially_converged": decay.trivially_converged,
        },
        "energy": {
            "max_rel_step_residual": energy_res["max_rel"],
            "max_rel_recursion_residual": recursion["max_rel"],
            "E0": float(traj.samples[0].energy) if traj.samples else None,
            "q0": float(traj.samples[0].q) if traj.samples else None,
        },
    }
    if rc.phase == "two-phase":
        s_inf = traj.meta.get("s_inf")
        validity = two_phase.validity_monitor(traj, p, rc.dom, s_inf)
        summary["validity"] = validity
        summary["solid_decay"] = solid_decay_check(traj, p, rc.dom)
    else:
        validity = diagnostics.validity_report_one_phase(
            traj, rc.dom.L, rc.controller.s_r)
        validity["min_T_boundary_span"] = traj.meta.get("min_T_boundary")
        validity["min_front_increment_span"] = traj.meta.get("min_front_increment")
        summary["validity"] = validity
    summary["passed"] = bool(traj.completed and validity["passed"])
    return summary


def solid_decay_check(traj: trajectory.Trajectory, p, dom, slack: float = 1.05) -> dict:
    """Solid-phase squared-norm envelope V2(t) <= slack * V2(0) e^{-a_s t/(2L^2)}."""
    rate = p.solid.alpha / (2.0 * dom.L**2)
    t = np.asarray(traj.t)
    V2 = np.asarray(traj.V2)
    envelope = slack * V2[0] * np.exp(-rate * t)
    ok = bool(np.all(V2 <= envelope + 1e-30))
    worst = float(np.max(V2 / np.maximum(envelope, 1e-300)))
    return {"rate": rate, "passed": ok, "max_envelope_ratio": worst, "V2_0": float(V2[0])}


def cmd_simulate(args) -> int:
    try:
        rc = load_config(args.config)
        if args.two_phase and rc.phase != "two-phase":
            raise ConfigError([core_violation("phase-flag",
                                              "--two-phase given but the config is one-phase")])
        traj, summary = run_config(rc, seed=args.seed)
    except ConfigError as err:
        _report_violations(err.violations)
        return EXIT_CONFIG
    except StefanError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traj.write_csv(out / "trajectory.csv")
    traj.write_samples_csv(out / "samples.csv")
    trajectory.write_summary(out / "summary.json", summary)
    log.info("wrote %s", out / "trajectory.csv")
    print(json.dumps({"status": traj.status, "final_s": summary["final"]["s"],
                      "passed": summary["passed"], "out_dir": str(out)}))
    return EXIT_OK if summary["passed"] else EXIT_VALIDITY


def core_violation(code, message):
    from .core import Violation

    return Violation(code, message)


def _sweep_one(payload) -> dict:
    raw, combo, out_dir, seed = payload
    import copy

    raw = copy.deepcopy(raw)
    raw["controller"]["c"] = combo["c"]
    raw["controller"]["s_r"] = combo["s_r"]
    raw["schedule"]["R"] = combo["R"]
    if raw["schedule"].get("kind", "periodic") == "periodic":
        raw["schedule"].pop("r", None)
    row = dict(combo)
    try:
        rc = config_from_dict(raw)
        traj, summary = run_config(rc, seed=seed)
    except ConfigError as err:
        row.update(status="rejected",
                   reject_codes=";".join(v.code for v in err.violations))
        return row
    except StefanError as err:
        row.update(status="error", reject_codes=str(err))
        return row
    row.update(
        status=traj.status,
        b=summary["decay"]["b"],
        b_fit=summary["decay"]["tail_slope"],
        M_hat=summary["decay"]["M_hat"],
        final_s=summary["final"]["s"],
        monotone=summary["validity"].get("front_nondecreasing", ""),
        valid=summary["validity"]["passed"],
        energy_residual=summary["energy"]["max_rel_recursion_residual"],
        reject_codes="",
    )
    return row


def cmd_sweep(args) -> int:
    try:
        rc = load_config(args.config)  # structural check of the base config
        with open(args.sweep) as fh:
            import yaml

            spec = yaml.safe_load(fh)
    except (ConfigError, OSError) as err:
        if isinstance(err, ConfigError):
            _report_violations(err.violations)
        else:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    cs = spec.get("c", [rc.controller.c])
    Rs = spec.get("R", [rc.schedule.get("R")])
    srs = spec.get("s_r", [rc.controller.s_r])
    combos = [{"c": float(c), "R": float(R), "s_r": float(sr)}
              for c, R, sr in itertools.product(cs, Rs, srs)]
    payloads = [(rc.raw, combo, args.out_dir, args.seed) for combo in combos]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_one, payloads))
    else:
        rows = [_sweep_one(p) for p in payloads]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = ["c", "R", "s_r", "status", "b", "b_fit", "M_hat", "final_s",
            "monotone", "valid", "energy_residual", "reject_codes"]
    with open(out / "sweep.csv", "w", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(str(row.get(c, "")) for c in cols) + "\n")
    print(json.dumps({"runs": len(rows),
                      "rejected": sum(r["status"] == "rejected" for r in rows),
                      "out": str(out / "sweep.csv")}))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        rc = load_config(args.config)
        traj = trajectory.trajectory_from_csv(args.trajectory)
    except (ConfigError, OSError, ValueError) as err:
        if isinstance(err, ConfigError):
            _report_violations(err.violations)
        else:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    schedule = rc.build_schedule(seed_override=args.seed)
    p = rc.params
    checks: dict[str, bool] = {}
    t = np.asarray(traj.t)
    checks["strictly_increasing_t"] = bool(np.all(np.diff(t) > 0))
    energy_res = diagnostics.energy_conservation_residual(t, traj.energy, traj.q)
    checks["energy_conservation"] = energy_res["max_rel"] <= TOL_ENERGY
    # held input must change only at schedule instants
    q = np.asarray(traj.q)
    changes = np.nonzero(np.abs(np.diff(q)) > 1e-12 * max(1.0, float(np.max(np.abs(q)))))[0]
    tol = 1e-6 * max(1.0, schedule.horizon)
    instants = schedule.instants
    checks["piecewise_constant_input"] = all(
        np.min(np.abs(instants - t[i + 1])) <= tol for i in changes)
    checks["validity_flags"] = bool(np.all(np.asarray(traj.valid) > 0.5))
    b = control.decay_rate_bound(rc.controller, p, rc.dom)
    window_start = schedule.instants[1] if len(schedule.instants) > 1 else None
    decay = diagnostics.decay_fit(t, traj.psi, b, window_start=window_start)
    checks["decay_envelope"] = bool(decay.passed)
    report = {"checks": checks, "energy_max_rel_residual": energy_res["max_rel"],
              "decay": {"b": b, "tail_slope": decay.slope, "M_hat": decay.M_hat}}
    if traj.phase == "two-phase":
        s_inf = two_phase.s_infinity(rc.init, p, rc.dom)
        validity = two_phase.validity_monitor(traj, p, rc.dom, s_inf)
        checks["two_phase_validity"] = validity["passed"]
        report["two_phase_validity"] = validity
        report["solid_decay"] = solid_decay_check(traj, p, rc.dom)
        checks["solid_decay_envelope"] = report["solid_decay"]["passed"]
    else:
        validity = diagnostics.validity_report_one_phase(traj, rc.dom.L,
                                                         rc.controller.s_r)
        checks["one_phase_validity"] = validity["passed"]
        report["one_phase_validity"] = validity
    ok = all(checks.values())
    report["passed"] = ok
    print(json.dumps(report, indent=2, default=trajectory._json_default))
    return EXIT_OK if ok else EXIT_VALIDITY


def cmd_oracle(args) -> int:
    if any(n < 10 for n in args.n):
        print("config error: oracle grids below N=10 are too coarse for the "
              "convergence ladder", file=sys.stderr)
        return EXIT_CONFIG
    p = MaterialParams(**DEFAULT_MATERIAL)
    rows = oracle.convergence_table(p, sorted(args.n))
    out_lines = ["N,max_rel_error,observed_order"]
    for r in rows:
        out_lines.append(f"{r['N']},{r['max_rel_error']:.6e},"
                         f"{r.get('observed_order', float('nan')):.3f}")
    table = "\n".join(out_lines)
    print(table)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle_convergence.csv").write_text(table + "\n")
    finest_order = rows[-1].get("observed_order", 0.0)
    if finest_order < 1.8:
        print(f"convergence order {finest_order:.3f} below 1.8", file=sys.stderr)
        return EXIT_VALIDITY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stefanctl",
                                 description="Sampled-data boundary control of "
                                             "melting-front systems")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one configuration")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out-dir", default="out")
    sim.add_argument("--seed", type=int, default=None,
                     help="override the schedule RNG seed")
    sim.add_argument("--two-phase", action="store_true",
                     help="require a two-phase config")
    sim.set_defaults(fn=cmd_simulate)

    sw = sub.add_parser("sweep", help="Cartesian parameter sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--sweep", required=True, help="YAML with lists c/R/s_r")
    sw.add_argument("--out-dir", default="out")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--seed", type=int, default=None)
    sw.set_defaults(fn=cmd_sweep)

    ver = sub.add_parser("verify", help="re-check invariants of a stored run")
    ver.add_argument("--trajectory", required=True)
    ver.add_argument("--config", required=True)
    ver.add_argument("--seed", type=int, default=None)
    ver.set_defaults(fn=cmd_verify)

    orc = sub.add_parser("oracle", help="similarity-solution convergence ladder")
    orc.add_argument("--n", type=int, nargs="+", default=[100, 200, 400])
    orc.add_argument("--out-dir", default=None)
    orc.set_defaults(fn=cmd_oracle)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

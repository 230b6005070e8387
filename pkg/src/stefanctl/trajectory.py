"""Trajectory container and the CSV/JSON file formats.

The trajectory CSV has one row per output stride plus one row at every
sampling instant (so the held input is constant between consecutive rows).
Column headers carry units in brackets; writers format floats with %.17g so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# columns common to both phases, in file order
_BASE_COLUMNS = [
    ("t[s]", "t"),
    ("s[m]", "s"),
    ("sdot[m/s]", "sdot"),
    ("q_c[W/m^2]", "q"),
    ("T_boundary[degC]", "T_boundary"),
    ("E_tilde[J/m^2]", "energy"),
    ("Psi[K^2.m+m^2]", "psi"),
    ("V[mixed]", "V"),
    ("valid[0/1]", "valid"),
]
_TWO_PHASE_COLUMNS = [
    ("V2[K^2.m]", "V2"),
    ("grad_liq[K/m]", "grad_liq"),
    ("grad_sol[K/m]", "grad_sol"),
]


@dataclass
class SampleRecord:
    """Controller bookkeeping at one sampling instant."""

    j: int
    t: float
    energy: float
    q: float
    tau: float  # gap to the next sampling instant (nan for the last record)


@dataclass
class Trajectory:
    """Recorded time series of one run plus per-sample controller records."""

    phase: str
    t: np.ndarray
    s: np.ndarray
    sdot: np.ndarray
    q: np.ndarray
    T_boundary: np.ndarray
    energy: np.ndarray
    psi: np.ndarray
    V: np.ndarray
    valid: np.ndarray
    V2: np.ndarray | None = None
    grad_liq: np.ndarray | None = None
    grad_sol: np.ndarray | None = None
    samples: list[SampleRecord] = field(default_factory=list)
    status: str = "completed"
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def columns(self) -> list[tuple[str, str]]:
        cols = list(_BASE_COLUMNS)
        if self.phase == "two-phase":
            cols += _TWO_PHASE_COLUMNS
        return cols

    def write_csv(self, path: str | Path) -> None:
        t = np.asarray(self.t)
        if np.any(np.diff(t) <= 0):
            raise ValueError("trajectory rows must have strictly increasing t")
        cols = self.columns()
        arrays = [np.asarray(getattr(self, attr), dtype=float) for _, attr in cols]
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(name for name, _ in cols) + "\n")
            for i in range(len(t)):
                fh.write(",".join(_fmt(a[i]) for a in arrays) + "\n")

    def write_samples_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("j,t[s],E_tilde[J/m^2],q_c[W/m^2],tau[s]\n")
            for r in self.samples:
                fh.write(f"{r.j},{_fmt(r.t)},{_fmt(r.energy)},{_fmt(r.q)},{_fmt(r.tau)}\n")


def _fmt(x: float) -> str:
    return "%.17g" % x


def strip_units(name: str) -> str:
    return name.split("[", 1)[0]


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Read a trajectory (or samples) CSV into a dict keyed by unit-less names."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty CSV")
        names = [strip_units(h) for h in header.split(",")]
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: header/body column mismatch")
    return {name: data[:, i] for i, name in enumerate(names)}


def trajectory_from_csv(path: str | Path) -> Trajectory:
    """Rebuild a Trajectory from its CSV (samples and meta not included)."""
    cols = read_csv(path)
    phase = "two-phase" if "V2" in cols else "one-phase"
    return Trajectory(
        phase=phase,
        t=cols["t"],
        s=cols["s"],
        sdot=cols["sdot"],
        q=cols["q_c"],
        T_boundary=cols["T_boundary"],
        energy=cols["E_tilde"],
        psi=cols["Psi"],
        V=cols["V"],
        valid=cols["valid"],
        V2=cols.get("V2"),
        grad_liq=cols.get("grad_liq"),
        grad_sol=cols.get("grad_sol"),
    )


def samples_from_csv(path: str | Path) -> list[SampleRecord]:
    cols = read_csv(path)
    return [
        SampleRecord(int(j), t, e, q, tau)
        for j, t, e, q, tau in zip(cols["j"], cols["t"], cols["E_tilde"],
                                   cols["q_c"], cols["tau"])
    ]


def write_summary(path: str | Path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")

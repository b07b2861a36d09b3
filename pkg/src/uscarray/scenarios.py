"""Canonical scenarios and the scenario runner.

Each canonical id reproduces one published-figure dataset: level diagrams
(fig2a, fig2b, fig6), vacuum Rabi and localized-photon dynamics (fig3a,
fig4a, fig7a-c), Gaussian-pulse excitation (fig3b, fig4b) and the
normal-mode spatial profile versus central-cavity detuning (fig5b).

Every physical parameter is pinned in the registry; values the runner
resolves at run time (the anticrossing qubit frequency, midpoint carrier
frequencies, effective couplings, manifold weights) land in the metadata
sidecar.  Pulse widths and area scales are calibrated constants: the
quoted drive amplitudes produce pi-like pulse areas only for a
peak-amplitude envelope, so the canonical driven scenarios set
amplitude_scale = tau * sqrt(2) * pi times an area factor (see README).
Driven scenarios restrict the drive coupling to the lowest six dressed
levels, matching the few-level treatment the figures describe; the full
propagation space remains available through evolution.level_cap = null.
"""

from __future__ import annotations

import math
import time as _time

import numpy as np

from . import __version__ as _pkg_version
from .config import (
    ScenarioConfig,
    parse_omega_d_directive,
    parse_omega_q_directive,
    validate_config,
)
from .dynamics import (
    DressedFrame,
    ObservableSpec,
    default_step,
    evolve_driven,
    evolve_free,
)
from .errors import ConfigError
from .fock import eig_hermitian
from .io import OUTPUT_SCHEMA_VERSION, write_csv, write_json, write_metadata
from .model import (
    PulseSpec,
    build_hamiltonian,
    label_state,
    supermode_transform,
)
from .spectrum import find_min_gap, sweep_levels

# ---------------------------------------------------------------------------
# canonical registry

_N2_SYSTEM = {"n_cavities": 2, "omega_q": "argmin_gap:3,4:0.55,0.70",
              "n_max": 6}
_N3_SYSTEM = {"n_cavities": 3, "omega_q": "argmin_gap:4,5:0.63,0.69:3",
              "delta": 0.0, "n_max": 6}
_N3_DETUNED = {"n_cavities": 3, "omega_q": "argmin_gap:4,5:0.652,0.670:3",
               "delta": 0.5, "n_max": 6}

_N2_MANIFOLD = [3, 4, 5]
_N3_MANIFOLD = [3, 4, 5, 6]


def _proj(name, label, basis, levels):
    return {"kind": "state_projector", "name": name, "label": label,
            "basis": basis, "dressed_levels": levels}


def _n2_trajectory_obs(kind):
    lv = _N2_MANIFOLD
    p_ee = _proj("p_ee", [0, 0, "e", "e"], "supermode", lv)
    if kind == "antisymmetric":
        return [_proj("p_1a", [1, 0, "g", "g"], "supermode", lv),
                _proj("p_11", [1, 0, "g", "g"], "bare", lv), p_ee]
    return [_proj("p_11", [1, 0, "g", "g"], "bare", lv),
            _proj("p_12", [0, 1, "g", "g"], "bare", lv), p_ee]


def _n3_trajectory_obs(with_antisymmetric):
    lv = _N3_MANIFOLD
    obs = []
    if with_antisymmetric:
        obs.append(_proj("p_1a", [0, 0, 1, "g", "g"], "supermode", lv))
    obs += [_proj("p_11", [1, 0, 0, "g", "g"], "bare", lv),
            _proj("p_12", [0, 1, 0, "g", "g"], "bare", lv),
            _proj("p_13", [0, 0, 1, "g", "g"], "bare", lv),
            _proj("p_ee", [0, 0, 0, "e", "e"], "supermode", lv)]
    return obs


CANONICAL: dict[str, dict] = {
    "fig2a": {
        "scenario_id": "fig2a",
        "description": "two-cavity dressed levels vs qubit frequency; "
                       "avoided crossing where one photon meets two qubits",
        "mode": "spectrum_sweep",
        "system": {"n_cavities": 2, "omega_q": 0.5, "n_max": 6},
        "sweep": {"min": 0.40, "max": 0.80, "points": 201, "n_levels": 9},
    },
    "fig2b": {
        "scenario_id": "fig2b",
        "description": "two-cavity anticrossing region, opposite vs equal "
                       "coupling phases (selection-rule swap)",
        "mode": "spectrum_sweep",
        "system": {"n_cavities": 2, "omega_q": 0.5, "n_max": 6},
        "sweep": {"min": 0.58, "max": 0.75, "points": 171, "n_levels": 7,
                  "compare_phases": True},
    },
    "fig3a": {
        "scenario_id": "fig3a",
        "description": "vacuum Rabi oscillation: antisymmetric photon "
                       "jointly absorbed by the two qubits",
        "mode": "free_evolution",
        "system": _N2_SYSTEM,
        "init": {"label": [1, 0, "g", "g"], "basis": "supermode",
                 "dressed_levels": _N2_MANIFOLD},
        "time": {"t_max": 800.0, "dt": 0.4},
        "observables": _n2_trajectory_obs("antisymmetric"),
    },
    "fig3b": {
        "scenario_id": "fig3b",
        "description": "narrow Gaussian pulse on cavity 1 prepares the "
                       "antisymmetric photon, then joint absorption",
        "mode": "driven_evolution",
        "system": _N2_SYSTEM,
        "init": {"ground_state": True},
        "pulse": {"amplitude": 0.042, "omega_d": "mid:3,4", "tau": 90.0,
                  "amplitude_scale": 324.2},
        "time": {"t_max": 1900.0, "dt": 0.009, "output_stride": 56},
        "evolution": {"level_cap": 6},
        "observables": _n2_trajectory_obs("antisymmetric"),
    },
    "fig4a": {
        "scenario_id": "fig4a",
        "description": "photon initially localized in cavity 1: hopping "
                       "plus joint qubit excitation reaching one half",
        "mode": "free_evolution",
        "system": _N2_SYSTEM,
        "init": {"label": [1, 0, "g", "g"], "basis": "bare",
                 "dressed_levels": _N2_MANIFOLD},
        "time": {"t_max": 800.0, "dt": 0.2},
        "observables": _n2_trajectory_obs("localized"),
    },
    "fig4b": {
        "scenario_id": "fig4b",
        "description": "broad Gaussian pulse localizes a photon in cavity 1 "
                       "before hopping and joint absorption set in",
        "mode": "driven_evolution",
        "system": _N2_SYSTEM,
        "init": {"ground_state": True},
        "pulse": {"amplitude": 0.27, "omega_d": "mid:3,4,5,5", "tau": 18.0,
                  "amplitude_scale": 34.7},
        "time": {"t_max": 800.0, "dt": 0.009, "output_stride": 23},
        "evolution": {"level_cap": 6},
        "observables": _n2_trajectory_obs("localized"),
    },
    "fig5b": {
        "scenario_id": "fig5b",
        "description": "three-cavity normal-mode profile vs central-cavity "
                       "detuning: A unaffected, S2 localizes centrally",
        "mode": "supermode_profile",
        "system": {"n_cavities": 3, "omega_q": 0.5, "n_max": 1},
        "profile": {"delta_min": 0.0, "delta_max": 1.0, "points": 101},
    },
    "fig6": {
        "scenario_id": "fig6",
        "description": "three-cavity dressed levels vs qubit frequency: two "
                       "crossings (symmetric modes) flanking the "
                       "antisymmetric avoided crossing",
        "mode": "spectrum_sweep",
        "system": {"n_cavities": 3, "omega_q": 0.5, "delta": 0.0, "n_max": 6},
        "sweep": {"min": 0.50, "max": 0.78, "points": 141, "n_levels": 10},
    },
    "fig7a": {
        "scenario_id": "fig7a",
        "description": "three cavities, resonant: antisymmetric photon "
                       "jointly excites both qubits, central cavity empty",
        "mode": "free_evolution",
        "system": _N3_SYSTEM,
        "init": {"label": [0, 0, 1, "g", "g"], "basis": "supermode",
                 "dressed_levels": _N3_MANIFOLD},
        "time": {"t_max": 3600.0, "dt": 1.8},
        "observables": _n3_trajectory_obs(True),
    },
    "fig7b": {
        "scenario_id": "fig7b",
        "description": "three cavities, resonant: photon starting in cavity "
                       "1 hops through the array while both qubits absorb",
        "mode": "free_evolution",
        "system": _N3_SYSTEM,
        "init": {"label": [1, 0, 0, "g", "g"], "basis": "bare",
                 "dressed_levels": _N3_MANIFOLD},
        "time": {"t_max": 3600.0, "dt": 0.9},
        "observables": _n3_trajectory_obs(False),
    },
    "fig7c": {
        "scenario_id": "fig7c",
        "description": "three cavities with central detuning delta = 0.5: "
                       "the photon tunnels between end cavities through the "
                       "barely-populated central cavity",
        "mode": "free_evolution",
        "system": _N3_DETUNED,
        "init": {"label": [1, 0, 0, "g", "g"], "basis": "bare",
                 "dressed_levels": _N3_MANIFOLD},
        "time": {"t_max": 7600.0, "dt": 1.9},
        "observables": _n3_trajectory_obs(False),
    },
}


def canonical_ids() -> list[str]:
    return list(CANONICAL)


def canonical_config(scenario_id: str) -> ScenarioConfig:
    try:
        raw = CANONICAL[scenario_id]
    except KeyError:
        raise ConfigError([("scenario_id",
                            f"unknown canonical scenario {scenario_id!r}")])
    return validate_config(raw)


def list_scenarios() -> list[tuple[str, str]]:
    """(id, description) pairs; every canonical config validates."""
    out = []
    for sid in canonical_ids():
        cfg = canonical_config(sid)
        out.append((sid, cfg.description))
    return out


# ---------------------------------------------------------------------------
# runner


class ScenarioRun:
    """Result handle: column table plus metadata, ready for serialisation."""

    def __init__(self, config, columns, rows, metadata):
        self.config = config
        self.columns = columns
        self.rows = rows
        self.metadata = metadata

    def write(self, out_dir, fmt=None):
        import os

        fmt = fmt or self.config.output["format"]
        name = self.config.output["path"] or f"{self.config.scenario_id}.{fmt}"
        os.makedirs(out_dir, exist_ok=True)
        data_path = os.path.join(out_dir, name)
        if fmt == "csv":
            write_csv(data_path, self.columns, self.rows)
        else:
            write_json(data_path, self.config.scenario_id, self.columns,
                       self.rows)
        meta_path = os.path.join(
            out_dir, f"{self.config.scenario_id}.meta.json")
        write_metadata(meta_path, self.metadata)
        return data_path, meta_path


def _resolve_omega_q(cfg: ScenarioConfig, meta: dict):
    raw = cfg.omega_q_raw
    if not isinstance(raw, str):
        meta["omega_q"] = float(raw)
        return cfg.system.with_(omega_q=float(raw))
    pair, bracket, prescan = parse_omega_q_directive(raw)
    crossing = find_min_gap(cfg.system, pair, bracket, basis=cfg.basis,
                            prescan_n_max=prescan)
    meta["omega_q_directive"] = raw
    meta["omega_q"] = crossing.omega_q_star
    meta["gap_min"] = crossing.gap_min
    meta["omega_eff"] = crossing.omega_eff
    meta["gap_level_pair"] = list(pair)
    return cfg.system.with_(omega_q=crossing.omega_q_star)


def _resolve_omega_d(pulse_cfg, eig, meta):
    raw = pulse_cfg["omega_d"]
    if not isinstance(raw, str):
        meta["omega_d"] = float(raw)
        return float(raw)
    idx = parse_omega_d_directive(raw)
    rel = eig.eigenvalues - eig.eigenvalues[0]
    if max(idx) >= len(rel):
        raise ConfigError([("pulse.omega_d",
                            f"level index {max(idx)} out of range")])
    if len(idx) == 2:
        value = (rel[idx[0]] + rel[idx[1]]) / 2.0
    else:
        value = ((rel[idx[0]] + rel[idx[1]]) / 2.0
                 + (rel[idx[2]] + rel[idx[3]]) / 2.0) / 2.0
    meta["omega_d_directive"] = raw
    meta["omega_d"] = float(value)
    meta["omega_d_levels"] = {f"w{i}0": float(rel[i]) for i in sorted(set(idx))}
    return float(value)


def _observable_specs(cfg: ScenarioConfig):
    specs = []
    for rec in cfg.observables:
        if rec["kind"] == "state_projector":
            specs.append(ObservableSpec(
                kind="state_projector", name=rec["name"], label=rec["label"],
                label_basis=rec["basis"],
                dressed_levels=tuple(rec["dressed_levels"])
                if rec.get("dressed_levels") else None))
        elif rec["kind"] == "qubit_joint_excited":
            specs.append(ObservableSpec(kind="qubit_joint_excited",
                                        name=rec["name"]))
        else:
            specs.append(ObservableSpec(kind="photon_number",
                                        name=rec["name"],
                                        mode_index=rec["mode_index"]))
    return specs


def _initial_state(cfg, p, eig, meta):
    if cfg.init["ground_state"]:
        meta["initial_state"] = "ground"
        return eig.state(0)
    label, basis = cfg.init["label"], cfg.init["basis"]
    levels = cfg.init["dressed_levels"]
    meta["initial_state"] = {"label": [str(v) for v in label],
                             "basis": basis, "dressed_levels": levels}
    if levels:
        frame = DressedFrame(p, cfg.basis, levels, eig)
        product = label_state(p, label, basis, cfg.basis)
        meta["initial_manifold_weight"] = frame.manifold_weight(product)
        return frame.label_state(label, basis)
    return label_state(p, label, basis, cfg.basis)


def _output_times(cfg):
    t = cfg.time
    step = t["dt"] * t["output_stride"] if t["dt"] else None
    if step is None:
        raise ConfigError([("time.dt", "required for this mode")])
    n = int(math.floor(t["t_max"] / step + 1e-9)) + 1
    return np.arange(n) * step


def run_scenario(cfg: ScenarioConfig, n_max_override: int | None = None,
                 deterministic_flag: bool = False) -> ScenarioRun:
    """Execute a validated scenario and return its table plus metadata."""
    started = _time.perf_counter()
    if n_max_override is not None:
        cfg.system = cfg.system.with_(n_max=n_max_override)

    meta = {
        "schema": OUTPUT_SCHEMA_VERSION,
        "package_version": _pkg_version,
        "resolved_config": cfg.resolved_dict(),
        "seedless_deterministic": bool(deterministic_flag),
    }
    if n_max_override is not None:
        meta["n_max_override"] = n_max_override

    if cfg.mode == "spectrum_sweep":
        columns, rows = _run_sweep(cfg, meta)
    elif cfg.mode == "gap_search":
        columns, rows = _run_gap_search(cfg, meta)
    elif cfg.mode == "supermode_profile":
        columns, rows = _run_profile(cfg, meta)
    else:
        columns, rows = _run_evolution(cfg, meta)

    meta["wall_time_s"] = round(_time.perf_counter() - started, 3)
    return ScenarioRun(cfg, columns, rows, meta)


def _run_sweep(cfg, meta):
    p = _resolve_omega_q(cfg, meta)
    sw = cfg.sweep
    grid = np.linspace(sw["min"], sw["max"], sw["points"])
    res = sweep_levels(p, grid, sw["n_levels"], basis=cfg.basis,
                       auto_converge=sw["auto_converge"])
    meta["n_max_resolved"] = res.n_max
    columns = ["omega_q"] + [f"w{i}0" for i in range(1, sw["n_levels"])]
    blocks = [grid[:, None], res.relative_levels[:, 1:]]
    if sw["compare_phases"]:
        flipped = p.with_(phases=(cfg.system.phases[0], cfg.system.phases[0]))
        res2 = sweep_levels(flipped, grid, sw["n_levels"], basis=cfg.basis)
        columns += [f"w{i}0_same" for i in range(1, sw["n_levels"])]
        blocks.append(res2.relative_levels[:, 1:])
        meta["compare_phases"] = {"primary": list(p.phases),
                                  "secondary": list(flipped.phases)}
    table = np.hstack(blocks)
    return columns, table.tolist()


def _run_gap_search(cfg, meta):
    p = _resolve_omega_q(cfg, meta)
    g = cfg.gap
    res = find_min_gap(p, tuple(g["level_pair"]), tuple(g["bracket"]),
                       basis=cfg.basis, prescan_n_max=g["prescan_n_max"])
    crossing = res.gap_min < g["classify_threshold"]
    meta["branch_labels"] = res.branch_labels
    meta["classification"] = "crossing" if crossing else "avoided"
    columns = ["omega_q_star", "gap_min", "omega_eff", "level_i", "level_j",
               "is_crossing"]
    rows = [[res.omega_q_star, res.gap_min, res.omega_eff,
             float(res.level_pair[0]), float(res.level_pair[1]),
             1.0 if crossing else 0.0]]
    return columns, rows


def _run_profile(cfg, meta):
    pr = cfg.profile
    deltas = np.linspace(pr["delta_min"], pr["delta_max"], pr["points"])
    columns = ["delta", "omega_s1", "omega_a", "omega_s2"]
    columns += [f"{m}_c{n}" for m in ("s1", "a", "s2") for n in (1, 2, 3)]
    rows = []
    for d in deltas:
        t = supermode_transform(cfg.system.with_(delta=float(d)))
        row = [d, t.frequency("S1"), t.frequency("A"), t.frequency("S2")]
        for lab in ("S1", "A", "S2"):
            row.extend(t.row(lab))
        rows.append([float(v) for v in row])
    meta["row_order"] = ["S1", "A", "S2"]
    return columns, rows


def _run_evolution(cfg, meta):
    p = _resolve_omega_q(cfg, meta)
    h = build_hamiltonian(p, cfg.basis)
    eig = eig_hermitian(h)
    specs = _observable_specs(cfg)
    psi0 = _initial_state(cfg, p, eig, meta)
    times = _output_times(cfg)

    if cfg.mode == "free_evolution":
        traj = evolve_free(h, psi0, times, specs, p=p, basis=cfg.basis,
                           eig=eig)
    else:
        pl = cfg.pulse
        omega_d = _resolve_omega_d(pl, eig, meta)
        pulse = PulseSpec(amplitude=pl["amplitude"], omega_d=omega_d,
                          t0=pl["t0"], tau=pl["tau"], envelope=pl["envelope"],
                          amplitude_scale=pl["amplitude_scale"])
        meta["pulse_resolved"] = {
            "amplitude": pulse.amplitude, "omega_d": omega_d,
            "t0": pulse.t0, "tau": pulse.tau, "envelope": pulse.envelope,
            "amplitude_scale": pulse.amplitude_scale,
        }
        dt = cfg.time["dt"] or default_step(eig)
        traj = evolve_driven(p, pulse, psi0, times, specs, basis=cfg.basis,
                             dt=dt, level_cap=cfg.evolution.get("level_cap"),
                             eig=eig)
        meta["integrator"] = {"dt": traj.meta["dt"],
                              "level_cap": traj.meta["level_cap"],
                              "integrated_window":
                                  list(traj.meta["integrated_window"])}

    meta["norm_drift"] = traj.norm_drift
    names = [s.name for s in specs]
    columns = ["time"] + names
    table = np.column_stack([traj.times] + [traj.observables[n] for n in names])
    return columns, table.tolist()

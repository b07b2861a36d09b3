"""Scenario configuration: parsing, validation, defaults.

Configs are JSON documents (the canonical scenarios are dicts of the same
shape).  Validation gathers every problem in one pass and reports each with
its field path; unknown keys are errors, since a silently ignored physics
parameter is the worst failure mode.  ``validate_config`` returns a
ScenarioConfig with every default filled in, and the resolved values are
echoed into the run metadata.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import BARE, SUPERMODE, SystemParams

MODES = ("spectrum_sweep", "free_evolution", "driven_evolution",
         "gap_search", "supermode_profile")
FORMATS = ("csv", "json")
OBSERVABLE_KINDS = ("state_projector", "qubit_joint_excited", "photon_number")

_NUMERIC_CONSTANTS = {
    "pi": math.pi,
    "pi/2": math.pi / 2,
    "pi/3": math.pi / 3,
    "pi/4": math.pi / 4,
    "pi/6": math.pi / 6,
    "-pi": -math.pi,
    "0": 0.0,
}


@dataclass
class ScenarioConfig:
    """Validated scenario description with defaults filled in."""

    scenario_id: str
    mode: str
    system: SystemParams          # omega_q may still carry a directive below
    omega_q_raw: float | str
    basis: str
    description: str = ""
    sweep: dict = field(default_factory=dict)
    gap: dict = field(default_factory=dict)
    profile: dict = field(default_factory=dict)
    init: dict = field(default_factory=dict)
    pulse: dict = field(default_factory=dict)
    time: dict = field(default_factory=dict)
    evolution: dict = field(default_factory=dict)
    observables: list = field(default_factory=list)
    output: dict = field(default_factory=dict)

    def resolved_dict(self) -> dict:
        """Echo of the fully-defaulted configuration for metadata."""
        return {
            "scenario_id": self.scenario_id,
            "mode": self.mode,
            "basis": self.basis,
            "description": self.description,
            "system": {
                "n_cavities": self.system.n_cavities,
                "omega_q": self.omega_q_raw,
                "omega_c": self.system.omega_c,
                "delta": self.system.delta,
                "J": self.system.J,
                "g_abs": self.system.g_abs,
                "phases": list(self.system.phases),
                "theta": self.system.theta,
                "n_max": self.system.n_max,
            },
            "sweep": self.sweep, "gap": self.gap, "profile": self.profile,
            "init": self.init, "pulse": self.pulse, "time": self.time,
            "evolution": self.evolution,
            "observables": self.observables, "output": self.output,
        }


class _Checker:
    """Collects (field_path, message) issues while reading a nested dict."""

    def __init__(self):
        self.issues = []

    def fail(self, path, msg):
        self.issues.append((path, msg))

    def number(self, raw, path, *, allow=None, lo=None, hi=None,
               lo_strict=None, default=None, required=False):
        if raw is None:
            if required:
                self.fail(path, "required field missing")
            return default
        if isinstance(raw, str):
            if allow and any(raw.startswith(a) for a in allow):
                return raw
            if raw in _NUMERIC_CONSTANTS:
                raw = _NUMERIC_CONSTANTS[raw]
            else:
                self.fail(path, f"expected a number, got {raw!r}")
                return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.fail(path, f"expected a number, got {type(raw).__name__}")
            return default
        v = float(raw)
        if lo is not None and v < lo:
            self.fail(path, f"must be >= {lo}, got {v}")
        if lo_strict is not None and v <= lo_strict:
            self.fail(path, f"must be > {lo_strict}, got {v}")
        if hi is not None and v > hi:
            self.fail(path, f"must be <= {hi}, got {v}")
        return v

    def integer(self, raw, path, *, lo=None, hi=None, default=None,
                required=False):
        if raw is None:
            if required:
                self.fail(path, "required field missing")
            return default
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.fail(path, f"expected an integer, got {raw!r}")
            return default
        if lo is not None and raw < lo:
            self.fail(path, f"must be >= {lo}, got {raw}")
        if hi is not None and raw > hi:
            self.fail(path, f"must be <= {hi}, got {raw}")
        return raw

    def choice(self, raw, path, options, default=None, required=False):
        if raw is None:
            if required:
                self.fail(path, "required field missing")
            return default
        if raw not in options:
            self.fail(path, f"must be one of {options}, got {raw!r}")
            return default
        return raw

    def boolean(self, raw, path, default=False):
        if raw is None:
            return default
        if not isinstance(raw, bool):
            self.fail(path, f"expected true/false, got {raw!r}")
            return default
        return raw

    def subdict(self, raw, path, known):
        if raw is None:
            return {}
        if not isinstance(raw, dict):
            self.fail(path, "expected a mapping")
            return {}
        for key in raw:
            if key not in known:
                self.fail(f"{path}.{key}", "unknown key")
        return raw


def _parse_phase(raw, path, check):
    v = check.number(raw, path, required=True)
    if v is None:
        return 0.0
    return v


def load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError([(str(path), "config file not found")])
    except json.JSONDecodeError as exc:
        raise ConfigError([(str(path), f"JSON parse error: {exc}")])


def validate_config(raw: dict) -> ScenarioConfig:
    """Validate a raw config mapping; raises ConfigError listing every issue."""
    check = _Checker()
    if not isinstance(raw, dict):
        raise ConfigError([("", "config must be a JSON object")])

    known_top = {"scenario_id", "mode", "basis", "description", "system",
                 "sweep", "gap", "profile", "init", "pulse", "time",
                 "evolution", "observables", "output"}
    for key in raw:
        if key not in known_top:
            check.fail(key, "unknown key")

    scenario_id = raw.get("scenario_id")
    if not isinstance(scenario_id, str) or not scenario_id:
        check.fail("scenario_id", "required non-empty string")
        scenario_id = "unnamed"
    mode = check.choice(raw.get("mode"), "mode", MODES, required=True)
    basis = check.choice(raw.get("basis"), "basis", (SUPERMODE, BARE),
                         default=SUPERMODE)
    description = raw.get("description", "")
    if not isinstance(description, str):
        check.fail("description", "must be a string")
        description = ""

    # --- system ------------------------------------------------------------
    sys_known = {"n_cavities", "omega_q", "omega_c", "delta", "J", "g_abs",
                 "phases", "theta", "n_max"}
    sys_raw = check.subdict(raw.get("system"), "system", sys_known)
    n_cavities = check.integer(sys_raw.get("n_cavities"), "system.n_cavities",
                               lo=2, hi=3, required=True)
    omega_q_raw = check.number(sys_raw.get("omega_q"), "system.omega_q",
                               allow=("argmin_gap:",), lo_strict=0.0,
                               required=True)
    omega_c = check.number(sys_raw.get("omega_c"), "system.omega_c",
                           lo_strict=0.0, default=1.0)
    delta = check.number(sys_raw.get("delta"), "system.delta", default=0.0)
    j_hop = check.number(sys_raw.get("J"), "system.J", lo_strict=0.0,
                         default=0.05)
    g_abs = check.number(sys_raw.get("g_abs"), "system.g_abs", lo=0.0,
                         default=0.3)
    theta = check.number(sys_raw.get("theta"), "system.theta",
                         default=math.pi / 6)
    n_max = check.integer(sys_raw.get("n_max"), "system.n_max", lo=1, hi=12,
                          default=6)
    phases_raw = sys_raw.get("phases", [0.0, math.pi])
    phases = [0.0, math.pi]
    if not isinstance(phases_raw, (list, tuple)) or len(phases_raw) != 2:
        check.fail("system.phases", "expected two entries (one per qubit)")
    else:
        phases = [_parse_phase(v, f"system.phases[{k}]", check)
                  for k, v in enumerate(phases_raw)]

    system = None
    if not check.issues and n_cavities is not None:
        placeholder = 0.5 if isinstance(omega_q_raw, str) else float(omega_q_raw)
        try:
            system = SystemParams(
                n_cavities=n_cavities, omega_q=placeholder, omega_c=omega_c,
                delta=delta, J=j_hop, g_abs=g_abs, phases=tuple(phases),
                theta=theta, n_max=n_max)
        except ValueError as exc:
            check.fail("system", str(exc))

    # --- per-mode sections ---------------------------------------------------
    sweep = check.subdict(raw.get("sweep"), "sweep",
                          {"min", "max", "points", "n_levels",
                           "compare_phases", "auto_converge"})
    gap = check.subdict(raw.get("gap"), "gap",
                        {"level_pair", "bracket", "prescan_n_max",
                         "classify_threshold"})
    profile = check.subdict(raw.get("profile"), "profile",
                            {"delta_min", "delta_max", "points"})
    init = check.subdict(raw.get("init"), "init",
                         {"label", "basis", "dressed_levels", "ground_state"})
    pulse = check.subdict(raw.get("pulse"), "pulse",
                          {"amplitude", "omega_d", "t0", "tau", "envelope",
                           "amplitude_scale"})
    time = check.subdict(raw.get("time"), "time",
                         {"t_max", "dt", "output_stride"})
    evolution = check.subdict(raw.get("evolution"), "evolution", {"level_cap"})
    output = check.subdict(raw.get("output"), "output", {"path", "format"})

    sweep_out, gap_out, profile_out = {}, {}, {}
    init_out, pulse_out, time_out, evo_out = {}, {}, {}, {}

    if mode == "spectrum_sweep":
        sweep_out = {
            "min": check.number(sweep.get("min"), "sweep.min", lo_strict=0.0,
                                required=True),
            "max": check.number(sweep.get("max"), "sweep.max", lo_strict=0.0,
                                required=True),
            "points": check.integer(sweep.get("points"), "sweep.points",
                                    lo=2, default=201),
            "n_levels": check.integer(sweep.get("n_levels"), "sweep.n_levels",
                                      lo=2, default=8),
            "compare_phases": check.boolean(sweep.get("compare_phases"),
                                            "sweep.compare_phases"),
            "auto_converge": check.boolean(sweep.get("auto_converge"),
                                           "sweep.auto_converge"),
        }
        if (sweep_out["min"] is not None and sweep_out["max"] is not None
                and sweep_out["min"] >= sweep_out["max"]):
            check.fail("sweep.max", "must exceed sweep.min")
    elif mode == "gap_search":
        pair = gap.get("level_pair")
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, int) for v in pair)
                or not 0 <= pair[0] < pair[1]):
            check.fail("gap.level_pair", "expected [i, j] with 0 <= i < j")
            pair = [3, 4]
        bracket = gap.get("bracket")
        if (not isinstance(bracket, (list, tuple)) or len(bracket) != 2):
            check.fail("gap.bracket", "expected [lo, hi]")
            bracket = [0.0, 1.0]
        lo = check.number(bracket[0], "gap.bracket[0]", required=True)
        hi = check.number(bracket[1], "gap.bracket[1]", required=True)
        if lo is not None and hi is not None and lo >= hi:
            check.fail("gap.bracket", "lo must be below hi")
        gap_out = {
            "level_pair": list(pair), "bracket": [lo, hi],
            "prescan_n_max": check.integer(gap.get("prescan_n_max"),
                                           "gap.prescan_n_max", lo=1),
            "classify_threshold": check.number(
                gap.get("classify_threshold"), "gap.classify_threshold",
                lo_strict=0.0, default=1e-5),
        }
    elif mode == "supermode_profile":
        if n_cavities != 3:
            check.fail("mode", "supermode_profile needs system.n_cavities = 3")
        profile_out = {
            "delta_min": check.number(profile.get("delta_min"),
                                      "profile.delta_min", default=0.0),
            "delta_max": check.number(profile.get("delta_max"),
                                      "profile.delta_max", default=1.0),
            "points": check.integer(profile.get("points"), "profile.points",
                                    lo=2, default=101),
        }

    if mode in ("free_evolution", "driven_evolution"):
        ground = check.boolean(init.get("ground_state"), "init.ground_state")
        label = init.get("label")
        if not ground:
            if not isinstance(label, (list, tuple)) or not label:
                check.fail("init.label", "required occupation list "
                                         "(or set init.ground_state)")
                label = []
        init_out = {
            "ground_state": ground,
            "label": list(label) if isinstance(label, (list, tuple)) else [],
            "basis": check.choice(init.get("basis"), "init.basis",
                                  (SUPERMODE, BARE), default=basis),
            "dressed_levels": _levels_list(init.get("dressed_levels"),
                                           "init.dressed_levels", check),
        }
        time_out = {
            "t_max": check.number(time.get("t_max"), "time.t_max",
                                  lo_strict=0.0, required=True),
            "dt": check.number(time.get("dt"), "time.dt", lo_strict=0.0,
                               required=(mode == "free_evolution")),
            "output_stride": check.integer(time.get("output_stride"),
                                           "time.output_stride", lo=1,
                                           default=1),
        }
        evo_out = {
            "level_cap": check.integer(evolution.get("level_cap"),
                                       "evolution.level_cap", lo=2),
        }

    if mode == "driven_evolution":
        pulse_out = {
            "amplitude": check.number(pulse.get("amplitude"),
                                      "pulse.amplitude", lo=0.0,
                                      required=True),
            "omega_d": check.number(pulse.get("omega_d"), "pulse.omega_d",
                                    allow=("mid:",), lo_strict=0.0,
                                    required=True),
            "tau": check.number(pulse.get("tau"), "pulse.tau", lo_strict=0.0,
                                required=True),
            "t0": check.number(pulse.get("t0"), "pulse.t0"),
            "envelope": check.choice(pulse.get("envelope"), "pulse.envelope",
                                     ("literal", "sqrt2pi"),
                                     default="literal"),
            "amplitude_scale": check.number(pulse.get("amplitude_scale"),
                                            "pulse.amplitude_scale",
                                            lo_strict=0.0, default=1.0),
        }
        if pulse_out["t0"] is None and pulse_out["tau"] is not None:
            pulse_out["t0"] = 5.0 * pulse_out["tau"]

    # --- observables ---------------------------------------------------------
    obs_out = []
    if mode in ("free_evolution", "driven_evolution"):
        raw_obs = raw.get("observables")
        if not isinstance(raw_obs, list) or not raw_obs:
            check.fail("observables", "at least one observable is required")
            raw_obs = []
        for k, entry in enumerate(raw_obs):
            path = f"observables[{k}]"
            if not isinstance(entry, dict):
                check.fail(path, "expected a mapping")
                continue
            for key in entry:
                if key not in {"kind", "name", "label", "basis",
                               "dressed_levels", "mode_index"}:
                    check.fail(f"{path}.{key}", "unknown key")
            kind = check.choice(entry.get("kind"), f"{path}.kind",
                                OBSERVABLE_KINDS, required=True)
            name = entry.get("name")
            if not isinstance(name, str) or not name:
                check.fail(f"{path}.name", "required non-empty string")
                name = f"obs{k}"
            rec = {"kind": kind, "name": name}
            if kind == "state_projector":
                label = entry.get("label")
                if not isinstance(label, (list, tuple)) or not label:
                    check.fail(f"{path}.label", "required occupation list")
                    label = []
                rec["label"] = list(label)
                rec["basis"] = check.choice(entry.get("basis"),
                                            f"{path}.basis",
                                            (SUPERMODE, BARE), default=basis)
                rec["dressed_levels"] = _levels_list(
                    entry.get("dressed_levels"), f"{path}.dressed_levels",
                    check)
            elif kind == "photon_number":
                rec["mode_index"] = check.integer(entry.get("mode_index"),
                                                  f"{path}.mode_index", lo=0,
                                                  required=True)
            obs_out.append(rec)
        names = [o["name"] for o in obs_out]
        if len(set(names)) != len(names):
            check.fail("observables", "observable names must be unique")

    fmt = check.choice(output.get("format"), "output.format", FORMATS,
                       default="csv")
    out_path = output.get("path")
    if out_path is not None and not isinstance(out_path, str):
        check.fail("output.path", "must be a string")
        out_path = None
    output_out = {"path": out_path, "format": fmt}

    if check.issues:
        raise ConfigError(check.issues)

    return ScenarioConfig(
        scenario_id=scenario_id, mode=mode, system=system,
        omega_q_raw=omega_q_raw, basis=basis, description=description,
        sweep=sweep_out, gap=gap_out, profile=profile_out, init=init_out,
        pulse=pulse_out, time=time_out, evolution=evo_out,
        observables=obs_out, output=output_out)


def _levels_list(raw, path, check):
    if raw is None:
        return None
    if (not isinstance(raw, (list, tuple)) or not raw
            or not all(isinstance(v, int) and v >= 0 for v in raw)):
        check.fail(path, "expected a list of non-negative level indices")
        return None
    return sorted(set(raw))


def parse_omega_q_directive(raw):
    """Split 'argmin_gap:i,j:lo,hi[:prescan_n_max]' into its parts."""
    parts = raw.split(":")
    try:
        if parts[0] != "argmin_gap" or len(parts) not in (3, 4):
            raise ValueError
        i, j = (int(v) for v in parts[1].split(","))
        lo, hi = (float(v) for v in parts[2].split(","))
        prescan = int(parts[3]) if len(parts) == 4 else None
        if not (0 <= i < j and lo < hi):
            raise ValueError
    except (ValueError, IndexError):
        raise ConfigError([("system.omega_q",
                            f"malformed directive {raw!r}; expected "
                            "'argmin_gap:i,j:lo,hi[:prescan_n_max]'")])
    return (i, j), (lo, hi), prescan


def parse_omega_d_directive(raw):
    """Split 'mid:i,j' or 'mid:i,j,k,l' into level indices."""
    parts = raw.split(":")
    try:
        if parts[0] != "mid" or len(parts) != 2:
            raise ValueError
        idx = tuple(int(v) for v in parts[1].split(","))
        if len(idx) not in (2, 4) or any(v < 0 for v in idx):
            raise ValueError
    except (ValueError, IndexError):
        raise ConfigError([("pulse.omega_d",
                            f"malformed directive {raw!r}; expected "
                            "'mid:i,j' or 'mid:i,j,k,l'")])
    return idx

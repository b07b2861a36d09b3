"""Hamiltonian builders for two- and three-cavity qubit arrays.

Physical model (units of the end-cavity frequency omega_c = 1, hbar = 1):

* each cavity n carries a truncated Fock ladder and frequency omega_c
  (the central cavity of a three-site array may be detuned by delta);
* nearest-neighbour photon hopping J with the rotating-wave approximation
  applied to the hopping term only;
* each end cavity couples ultrastrongly to one two-level qubit through
  |g| e^{i phi} (a + a^dag)(cos(theta) sigma_x + sin(theta) sigma_z),
  keeping all counter-rotating terms.  Only phi in {0, pi} is supported
  (general complex phases would break Hermiticity as written).

Two bases are provided.  The bare basis uses per-cavity Fock ladders,
mode order |c1, c2(, c3), q1, q2>.  The supermode basis uses normal modes
of the empty cavity array, mode order |A, S, q1, q2> for two cavities and
|S1, S2, A, q1, q2> for three.

Sign conventions for the three-cavity normal modes: the public
normal-mode transform (``supermode_transform``) takes the S1 row with
positive end-cavity components, while the supermode-basis Hamiltonian is
built with the opposite S1 sign (the form whose coupling reads
(X_S2 - X_S1)/sqrt(2)).  The two differ by the sign gauge of the S1 mode
only; spectra and occupation probabilities are identical.  State
preparation inside the supermode basis uses the Hamiltonian's gauge so
cross-basis dynamics agree (see ``_builder_gauge_rows``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .fock import (
    QUBIT,
    HilbertSpace,
    Operator,
    QuantumState,
    annihilation,
    basis_state,
    cavity_mode,
    embed,
    make_space,
    qubit_mode,
)

PHASE_TOL = 1e-12

BARE = "bare"
SUPERMODE = "supermode"


def _phase_sign(phi: float) -> float:
    """Map phi in {0, pi} (mod 2pi) to the real coupling sign e^{i phi}."""
    c, s = math.cos(phi), math.sin(phi)
    if abs(s) > PHASE_TOL or abs(abs(c) - 1.0) > PHASE_TOL:
        raise ValueError(
            f"coupling phase {phi} unsupported: only 0 and pi keep the "
            "interaction Hermitian as written"
        )
    return 1.0 if c > 0 else -1.0


@dataclass(frozen=True)
class SystemParams:
    """Full physical parameter record, all rates in units of omega_c."""

    n_cavities: int
    omega_q: float
    omega_c: float = 1.0
    delta: float = 0.0
    J: float = 0.05
    g_abs: float = 0.3
    phases: tuple[float, float] = (0.0, math.pi)
    theta: float = math.pi / 6
    n_max: int = 6

    def __post_init__(self):
        if self.n_cavities not in (2, 3):
            raise ValueError("n_cavities must be 2 or 3")
        if self.J <= 0:
            raise ValueError("J must be positive")
        if self.g_abs < 0:
            raise ValueError("g_abs must be non-negative")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be positive")
        if self.n_cavities == 2 and self.delta != 0.0:
            raise ValueError("delta applies to the central cavity of a 3-cavity array")
        phases = tuple(float(p) for p in self.phases)
        if len(phases) != 2:
            raise ValueError("phases must hold one entry per qubit (two entries)")
        object.__setattr__(self, "phases", phases)
        for p in phases:
            _phase_sign(p)

    @property
    def phase_signs(self) -> tuple[float, float]:
        return tuple(_phase_sign(p) for p in self.phases)

    @property
    def cavity_frequencies(self) -> tuple[float, ...]:
        """Bare cavity frequencies, site order."""
        if self.n_cavities == 2:
            return (self.omega_c, self.omega_c)
        return (self.omega_c, self.omega_c + self.delta, self.omega_c)

    @property
    def qubit_frequencies(self) -> tuple[float, float]:
        return (self.omega_q, self.omega_q)

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def two_cavity_defaults(omega_q: float, **overrides) -> SystemParams:
    return SystemParams(n_cavities=2, omega_q=omega_q, **overrides)


def three_cavity_defaults(omega_q: float, delta: float = 0.0, **overrides) -> SystemParams:
    return SystemParams(n_cavities=3, omega_q=omega_q, delta=delta, **overrides)


# ---------------------------------------------------------------------------
# spaces


@lru_cache(maxsize=64)
def _space_cached(n_cavities: int, n_max: int, basis: str) -> HilbertSpace:
    if basis == BARE:
        cav_labels = ("c1", "c2", "c3")[:n_cavities]
    elif basis == SUPERMODE:
        cav_labels = ("A", "S") if n_cavities == 2 else ("S1", "S2", "A")
    else:
        raise ValueError(f"unknown basis {basis!r}")
    modes = [cavity_mode(n_max, lab) for lab in cav_labels]
    modes += [qubit_mode("q1"), qubit_mode("q2")]
    return make_space(modes)


def bare_space(p: SystemParams) -> HilbertSpace:
    """Per-cavity Fock ladders then the two qubits: |c1,..,cN,q1,q2>."""
    return _space_cached(p.n_cavities, p.n_max, BARE)


def supermode_space(p: SystemParams) -> HilbertSpace:
    """Normal-mode ladders then qubits: |A,S,q1,q2> or |S1,S2,A,q1,q2>."""
    return _space_cached(p.n_cavities, p.n_max, SUPERMODE)


def space_for(p: SystemParams, basis: str) -> HilbertSpace:
    return _space_cached(p.n_cavities, p.n_max, basis)


# ---------------------------------------------------------------------------
# normal-mode transform


@dataclass(frozen=True)
class SupermodeTransform:
    """Orthogonal map from bare cavity operators to normal-mode operators.

    Row order is (S, A) for two cavities and (S1, A, S2) for three;
    ``mode_frequencies`` follows the same order.
    """

    matrix: np.ndarray
    mode_frequencies: tuple[float, ...]
    row_labels: tuple[str, ...]

    def row(self, label: str) -> np.ndarray:
        return self.matrix[self.row_labels.index(label)]

    def frequency(self, label: str) -> float:
        return self.mode_frequencies[self.row_labels.index(label)]


def splitting_of_symmetric_modes(p: SystemParams) -> float:
    """Energy splitting Omega = sqrt(8 J^2 + delta^2) of the two symmetric
    normal modes of a three-cavity array."""
    return math.sqrt(8.0 * p.J**2 + p.delta**2)


def supermode_transform(p: SystemParams) -> SupermodeTransform:
    """Normal modes of the empty coupled-cavity array.

    Two cavities: a_{S(A)} = (a_1 +- a_2)/sqrt(2) with frequencies
    omega_c +- J.  Three cavities: a flat antisymmetric mode at omega_c and
    two symmetric modes split by Omega = sqrt(8 J^2 + delta^2).
    """
    wc, J, d = p.omega_c, p.J, p.delta
    if p.n_cavities == 2:
        s = 1.0 / math.sqrt(2.0)
        m = np.array([[s, s], [s, -s]])
        return SupermodeTransform(m, (wc + J, wc - J), ("S", "A"))
    omega = splitting_of_symmetric_modes(p)
    n_minus = math.sqrt(8.0 * J**2 + (d - omega) ** 2)
    n_plus = math.sqrt(8.0 * J**2 + (d + omega) ** 2)
    s = 1.0 / math.sqrt(2.0)
    m = np.array(
        [
            [2 * J / n_minus, (d - omega) / n_minus, 2 * J / n_minus],
            [-s, 0.0, s],
            [2 * J / n_plus, (d + omega) / n_plus, 2 * J / n_plus],
        ]
    )
    freqs = ((2 * wc + d - omega) / 2, wc, (2 * wc + d + omega) / 2)
    return SupermodeTransform(m, freqs, ("S1", "A", "S2"))


def _builder_gauge_rows(p: SystemParams) -> dict[str, np.ndarray]:
    """Normal-mode rows in the sign gauge of the supermode Hamiltonian.

    For three cavities the S1 row is the negative of the public transform
    row, matching the (X_S2 - X_S1)/sqrt(2) coupling form; S2 and A agree.
    """
    t = supermode_transform(p)
    rows = {lab: t.row(lab).copy() for lab in t.row_labels}
    if p.n_cavities == 3:
        rows["S1"] = -rows["S1"]
    return rows


def _supermode_frequencies_in_space_order(p: SystemParams) -> tuple[float, ...]:
    t = supermode_transform(p)
    if p.n_cavities == 2:
        return (t.frequency("A"), t.frequency("S"))
    return (t.frequency("S1"), t.frequency("S2"), t.frequency("A"))


# ---------------------------------------------------------------------------
# Hamiltonians


def _qubit_number_matrix(space: HilbertSpace) -> np.ndarray:
    """Sum of sigma_+ sigma_- over both qubits (coefficient of omega_q)."""
    total = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for label in ("q1", "q2"):
        i = space.mode_index(label)
        total += embed(space, i, np.diag([0.0, 1.0]).astype(complex))
    return total


def _coupling_local(theta: float) -> np.ndarray:
    # cos(theta) sigma_x + sin(theta) sigma_z in the (g, e) basis
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[-s, c], [c, s]], dtype=complex)


def _bare_static_parts(p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """(H at omega_q = 0, qubit excitation number) in the bare basis."""
    space = bare_space(p)
    n = space.total_dim
    h = np.zeros((n, n), dtype=complex)

    ladders = [annihilation(space, i).matrix for i in range(p.n_cavities)]
    for wc_n, a in zip(p.cavity_frequencies, ladders):
        h += wc_n * (a.conj().T @ a)
    for a, b in zip(ladders, ladders[1:]):
        hop = a.conj().T @ b
        h += p.J * (hop + hop.conj().T)

    qubit_cavity = ((0, 0), (1, 1)) if p.n_cavities == 2 else ((0, 0), (1, 2))
    coupling = _coupling_local(p.theta)
    for (q_idx, c_idx), sign in zip(qubit_cavity, p.phase_signs):
        a = ladders[c_idx]
        x = a + a.conj().T
        s_op = embed(space, space.mode_index(f"q{q_idx + 1}"), coupling)
        h += p.g_abs * sign * (x @ s_op)

    return h, _qubit_number_matrix(space)


def _supermode_static_parts(p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """(H at omega_q = 0, qubit excitation number) in the supermode basis.

    Built directly from the normal-mode form: photon terms are diagonal in
    the normal modes; the qubits couple through the quadratures X_k with
    the combinations Phi_{x,z}^{+-} = (e^{i phi_1} sigma^{(1)} +-
    e^{i phi_2'} sigma^{(2)})/sqrt(2).
    """
    space = supermode_space(p)
    n = space.total_dim
    h = np.zeros((n, n), dtype=complex)

    n_cav = p.n_cavities
    quadratures = []
    for i in range(n_cav):
        a = annihilation(space, i).matrix
        wk = _supermode_frequencies_in_space_order(p)[i]
        h += wk * (a.conj().T @ a)
        quadratures.append(a + a.conj().T)

    sign1, sign2 = p.phase_signs
    coupling = _coupling_local(p.theta)
    s1_op = embed(space, space.mode_index("q1"), coupling)
    s2_op = embed(space, space.mode_index("q2"), coupling)
    sqrt2 = math.sqrt(2.0)
    phi_minus = (sign1 * s1_op - sign2 * s2_op) / sqrt2
    phi_plus = (sign1 * s1_op + sign2 * s2_op) / sqrt2

    if n_cav == 2:
        x_a = quadratures[space.mode_index("A")]
        x_s = quadratures[space.mode_index("S")]
        h += p.g_abs * (x_a @ phi_minus + x_s @ phi_plus)
    else:
        # general-detuning coefficients; at delta = 0 these reduce to
        # -+ 1/sqrt(2) for S1/S2 and -1 for A
        omega = splitting_of_symmetric_modes(p)
        n_minus = math.sqrt(8.0 * p.J**2 + (p.delta - omega) ** 2)
        n_plus = math.sqrt(8.0 * p.J**2 + (p.delta + omega) ** 2)
        c_s1 = -2.0 * sqrt2 * p.J / n_minus
        c_s2 = 2.0 * sqrt2 * p.J / n_plus
        x_s1 = quadratures[space.mode_index("S1")]
        x_s2 = quadratures[space.mode_index("S2")]
        x_a = quadratures[space.mode_index("A")]
        h += p.g_abs * ((c_s1 * x_s1 + c_s2 * x_s2) @ phi_plus - x_a @ phi_minus)

    return h, _qubit_number_matrix(space)


@lru_cache(maxsize=32)
def _hamiltonian_parts_cached(p: SystemParams, basis: str) -> tuple[np.ndarray, np.ndarray]:
    if basis == BARE:
        h0, q = _bare_static_parts(p)
    elif basis == SUPERMODE:
        h0, q = _supermode_static_parts(p)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    h0.setflags(write=False)
    q.setflags(write=False)
    return h0, q


def hamiltonian_parts(p: SystemParams, basis: str) -> tuple[np.ndarray, np.ndarray]:
    """Cached (H(omega_q = 0), qubit number) pair; H = parts[0] + omega_q * parts[1].

    The cache key drops omega_q, so qubit-frequency sweeps reuse the static
    part.  The returned arrays are shared -- treat them as read-only.
    """
    return _hamiltonian_parts_cached(p.with_(omega_q=0.0), basis)


def hamiltonian_matrix(p: SystemParams, basis: str) -> np.ndarray:
    h0, q = hamiltonian_parts(p, basis)
    return h0 + p.omega_q * q


def build_bare_hamiltonian(p: SystemParams) -> Operator:
    """Array Hamiltonian in the bare (per-cavity) basis."""
    return Operator(bare_space(p), hamiltonian_matrix(p, BARE), hermitian=True)


def build_supermode_hamiltonian(p: SystemParams) -> Operator:
    """Array Hamiltonian in the normal-mode basis."""
    return Operator(supermode_space(p), hamiltonian_matrix(p, SUPERMODE), hermitian=True)


def build_hamiltonian(p: SystemParams, basis: str) -> Operator:
    return Operator(space_for(p, basis), hamiltonian_matrix(p, basis), hermitian=True)


# ---------------------------------------------------------------------------
# drive


ENVELOPE_LITERAL = "literal"      # denominator tau * sqrt(2) * pi
ENVELOPE_SQRT2PI = "sqrt2pi"      # denominator tau * sqrt(2 pi)


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian drive pulse.

    ``omega_d`` may be a number or a midpoint directive string such as
    ``"mid:3,4"`` (resolved against the spectrum by the scenario layer).
    ``amplitude_scale`` is a recorded calibration factor multiplying the
    envelope; the canonical driven scenarios use it to realise a
    peak-amplitude pulse (scale = tau*sqrt(2)*pi) because the quoted
    amplitudes only produce pi-like pulse areas in that convention.
    """

    amplitude: float
    omega_d: float | str
    t0: float
    tau: float
    envelope: str = ENVELOPE_LITERAL
    amplitude_scale: float = 1.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.envelope not in (ENVELOPE_LITERAL, ENVELOPE_SQRT2PI):
            raise ValueError(f"unknown envelope convention {self.envelope!r}")

    def carrier_frequency(self) -> float:
        if isinstance(self.omega_d, str):
            raise ValueError(
                f"carrier directive {self.omega_d!r} has not been resolved to a number"
            )
        return float(self.omega_d)


def gaussian_envelope(pulse: PulseSpec, t) -> np.ndarray | float:
    """Pulse envelope E(t); supports scalar or array ``t``."""
    if pulse.envelope == ENVELOPE_LITERAL:
        denom = pulse.tau * math.sqrt(2.0) * math.pi
    else:
        denom = pulse.tau * math.sqrt(2.0 * math.pi)
    arg = -((np.asarray(t, dtype=float) - pulse.t0) ** 2) / (2.0 * pulse.tau**2)
    out = pulse.amplitude * pulse.amplitude_scale * np.exp(arg) / denom
    return out if isinstance(t, np.ndarray) else float(out)


def drive_quadrature(p: SystemParams, basis: str = BARE) -> Operator:
    """Time-independent operator through which the pulse feeds cavity 1.

    Bare basis: X_1 = a_1 + a_1^dag.  Supermode basis, two cavities:
    X_S + X_A (the normal-mode form used with the quoted drive amplitudes,
    sqrt(2) times the bare quadrature).  Supermode basis, three cavities:
    X_1 expanded over the normal modes.
    """
    space = space_for(p, basis)
    if basis == BARE:
        a = annihilation(space, 0).matrix
        return Operator(space, a + a.conj().T, hermitian=True)
    n_cav = p.n_cavities
    x = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    if n_cav == 2:
        for lab in ("S", "A"):
            a = annihilation(space, space.mode_index(lab)).matrix
            x += a + a.conj().T
    else:
        rows = _builder_gauge_rows(p)
        for lab in ("S1", "S2", "A"):
            a = annihilation(space, space.mode_index(lab)).matrix
            x += rows[lab][0] * (a + a.conj().T)
    return Operator(space, x, hermitian=True)


def drive_hamiltonian(p: SystemParams, pulse: PulseSpec, t: float,
                      basis: str = BARE) -> Operator:
    """H_d(t) = E(t) cos(omega_d t) X_1 on the chosen basis space."""
    scalar = gaussian_envelope(pulse, t) * math.cos(pulse.carrier_frequency() * t)
    x = drive_quadrature(p, basis)
    return Operator(x.space, scalar * x.matrix, hermitian=True)


# ---------------------------------------------------------------------------
# label states


def _parse_label(space: HilbertSpace, label) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a mixed occupation list into photon and qubit occupations.

    Qubit entries accept 'g'/'e' or 0/1.
    """
    entries = list(label)
    if len(entries) != len(space.modes):
        raise ValueError(
            f"label length {len(entries)} does not match mode count {len(space.modes)}"
        )
    photons, qubits = [], []
    for entry, mode in zip(entries, space.modes):
        if mode.kind == QUBIT:
            if entry in ("g", "G", 0):
                qubits.append(0)
            elif entry in ("e", "E", 1):
                qubits.append(1)
            else:
                raise ValueError(f"qubit occupation must be g/e, got {entry!r}")
        else:
            occ = int(entry)
            if not 0 <= occ < mode.dim:
                raise ValueError(
                    f"occupation {occ} exceeds truncation for mode {mode.label!r}"
                )
            photons.append(occ)
    return tuple(photons), tuple(qubits)


def bare_label_state(space: HilbertSpace, label) -> QuantumState:
    """Computational-basis state |label> on the given space."""
    photons, qubits = _parse_label(space, label)
    return basis_state(space, photons + qubits)


def _polynomial_label_state(space: HilbertSpace, coeff_rows: np.ndarray,
                            photons, qubits) -> QuantumState:
    """Apply products of linear combinations of creation operators to the
    vacuum: prod_k (sum_n c_{k n} a_n^dag)^{m_k} |vac>, then attach qubits.

    ``coeff_rows[k]`` are the coefficients of label-mode k over the space's
    cavity modes (space order).  Rows are assumed unit-norm so the result
    normalises by sqrt(prod m_k!).
    """
    n_cav = coeff_rows.shape[0]
    creators = [annihilation(space, i).matrix.conj().T for i in range(n_cav)]
    vac_occs = [0] * len(space.modes)
    for q_pos, occ in enumerate(qubits):
        vac_occs[n_cav + q_pos] = occ
    vec = basis_state(space, vac_occs).amplitudes.copy()
    norm_sq = 1.0
    for k, m_k in enumerate(photons):
        if m_k == 0:
            continue
        b_dag = sum(c * creators[n] for n, c in enumerate(coeff_rows[k]))
        for _ in range(m_k):
            vec = b_dag @ vec
        norm_sq *= math.factorial(m_k)
    state = QuantumState(space, vec / math.sqrt(norm_sq))
    if abs(state.norm() - 1.0) > 1e-9:
        raise ValueError(
            "normal-mode occupation too close to the truncation edge; "
            "raise n_max"
        )
    return state


def _supermode_rows_in_space_order(p: SystemParams, gauge: str) -> np.ndarray:
    rows = (
        _builder_gauge_rows(p)
        if gauge == "builder"
        else {lab: supermode_transform(p).row(lab) for lab in supermode_transform(p).row_labels}
    )
    order = ("A", "S") if p.n_cavities == 2 else ("S1", "S2", "A")
    return np.array([rows[lab] for lab in order])


def supermode_label_state(p: SystemParams, label) -> QuantumState:
    """Normal-mode Fock state expressed in the bare basis.

    The label follows supermode-space mode order (|A,S,q1,q2> or
    |S1,S2,A,q1,q2>); the photon part is built by applying the public
    transform's creation-operator combinations to the bare vacuum.
    """
    target = bare_space(p)
    photons, qubits = _parse_label(supermode_space(p), label)
    rows = _supermode_rows_in_space_order(p, gauge="public")
    return _polynomial_label_state(target, rows, photons, qubits)


def label_state(p: SystemParams, label, label_basis: str,
                target_basis: str) -> QuantumState:
    """State for a bare or supermode occupation label on either basis space.

    Cross-basis construction maps creation operators through the
    normal-mode transform.  Bare labels realised on the supermode space use
    the supermode Hamiltonian's sign gauge so that dynamics in either basis
    agree.
    """
    if label_basis == target_basis:
        return bare_label_state(space_for(p, target_basis), label)
    if label_basis == SUPERMODE and target_basis == BARE:
        return supermode_label_state(p, label)
    # bare label on the supermode space: a_n^dag = sum_k M_{k n} a_k^dag
    target = supermode_space(p)
    photons, qubits = _parse_label(bare_space(p), label)
    rows = _supermode_rows_in_space_order(p, gauge="builder")
    return _polynomial_label_state(target, rows.T.copy(), photons, qubits)

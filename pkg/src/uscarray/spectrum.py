"""Energy-level sweeps, avoided-crossing location and classification.

Levels are tracked by energy order (ascending) and reported relative to the
ground state, omega_i0 = omega_i - omega_0.  Dominant-basis-label
annotations let consumers detect branch exchange through anticrossings --
adiabatic tracking by overlap is deliberately avoided (fragile at
near-degeneracies).

The minimum-gap search runs a coarse scan over the bracket (bracket
validation plus diagnostics) followed by golden-section refinement.  For
three-cavity systems the coarse scan may run at a reduced truncation
(``prescan_n_max``) to keep runtimes in seconds; the refinement always
evaluates at full truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BracketError, ConvergenceError
from .fock import eig_hermitian, eigvalsh_matrix
from .model import SUPERMODE, SystemParams, build_hamiltonian, hamiltonian_matrix

GOLDEN_TOL = 1e-7          # absolute omega_q refinement width
CROSSING_THRESHOLD = 1e-5  # gaps below this count as true crossings
PRESCAN_POINTS = 201


@lru_cache(maxsize=4096)
def eigenvalues_at(p: SystemParams, basis: str) -> np.ndarray:
    """Cached ascending eigenvalues of the array Hamiltonian."""
    w = eigvalsh_matrix(hamiltonian_matrix(p, basis))
    w.setflags(write=False)
    return w


def relative_levels_at(p: SystemParams, basis: str, n_levels: int) -> np.ndarray:
    w = eigenvalues_at(p, basis)
    return w[:n_levels] - w[0]


def _gap_function(p: SystemParams, level_pair, basis: str):
    i, j = level_pair
    if not 0 <= i < j:
        raise ValueError(f"level pair must satisfy 0 <= i < j, got {level_pair}")

    def gap(omega_q: float) -> float:
        w = eigenvalues_at(p.with_(omega_q=float(omega_q)), basis)
        return float(w[j] - w[i])

    return gap


@dataclass(frozen=True)
class SweepResult:
    """Relative levels omega_i0 over a qubit-frequency grid.

    ``relative_levels[k, i]`` is level i at grid point k (column 0 is
    identically zero).  ``dominant_labels[k][i]`` is the basis ket with the
    largest weight in eigenvector i and that weight.
    """

    omega_q_grid: np.ndarray
    relative_levels: np.ndarray
    dominant_labels: tuple
    basis: str
    n_max: int


@dataclass(frozen=True)
class AvoidedCrossing:
    """Located gap minimum between two energy-ordered levels."""

    omega_q_star: float
    gap_min: float
    omega_eff: float
    level_pair: tuple[int, int]
    branch_labels: dict

    @property
    def is_crossing(self) -> bool:
        return self.gap_min < CROSSING_THRESHOLD


def _dominant_labels(p: SystemParams, basis: str, n_levels: int):
    h = build_hamiltonian(p, basis)
    dec = eig_hermitian(h)
    out = []
    for i in range(n_levels):
        v = dec.eigenvectors[:, i]
        k = int(np.argmax(np.abs(v)))
        out.append((h.space.basis_label(k), float(np.abs(v[k]) ** 2)))
    return tuple(out), dec


def converged_n_max(p: SystemParams, basis: str, n_levels: int,
                    drift_tol: float = 1e-8, n_max_guard: int = 12,
                    step: int = 2) -> int:
    """Smallest truncation (starting at p.n_max) whose tracked levels move
    less than drift_tol when raised by ``step``."""
    n_max = p.n_max
    prev = relative_levels_at(p, basis, n_levels)
    while n_max + step <= n_max_guard:
        cand = n_max + step
        cur = relative_levels_at(p.with_(n_max=cand), basis, n_levels)
        if np.abs(cur - prev).max() < drift_tol:
            return n_max
        n_max, prev = cand, cur
    raise ConvergenceError(
        f"levels still drift more than {drift_tol} at n_max = {n_max_guard}; "
        "raise the guard or loosen the tolerance"
    )


def sweep_levels(p: SystemParams, grid, n_levels: int, basis: str = SUPERMODE,
                 auto_converge: bool = False, drift_tol: float = 1e-8,
                 n_max_guard: int = 12) -> SweepResult:
    """Diagonalise along a qubit-frequency grid; lowest ``n_levels`` levels.

    With ``auto_converge`` the truncation is raised (checked at the grid
    midpoint) until the tracked levels drift less than ``drift_tol``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError("grid must hold at least two points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must ascend strictly")
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")

    if auto_converge:
        probe = p.with_(omega_q=float(grid[len(grid) // 2]))
        p = p.with_(n_max=converged_n_max(probe, basis, n_levels,
                                          drift_tol, n_max_guard))

    levels = np.empty((len(grid), n_levels))
    labels = []
    for k, wq in enumerate(grid):
        pk = p.with_(omega_q=float(wq))
        doms, dec = _dominant_labels(pk, basis, n_levels)
        levels[k] = dec.eigenvalues[:n_levels] - dec.eigenvalues[0]
        labels.append(doms)
    return SweepResult(grid, levels, tuple(labels), basis, p.n_max)


def _golden_minimize(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def find_min_gap(p: SystemParams, level_pair, bracket, basis: str = SUPERMODE,
                 prescan_points: int = PRESCAN_POINTS,
                 prescan_n_max: int | None = None,
                 refine_tol: float = GOLDEN_TOL) -> AvoidedCrossing:
    """Locate the gap minimum between two energy-ordered levels.

    The bracket must contain exactly one interior local minimum of the gap
    (validated by the coarse pre-scan); golden-section refinement then
    resolves omega_q* to ``refine_tol``.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    pair = (int(level_pair[0]), int(level_pair[1]))

    scan_p = p if prescan_n_max is None else p.with_(n_max=prescan_n_max)
    scan_gap = _gap_function(scan_p, pair, basis)
    grid = np.linspace(lo, hi, prescan_points)
    gaps = np.array([scan_gap(w) for w in grid])

    interior = [
        k for k in range(1, len(grid) - 1)
        if gaps[k] <= gaps[k - 1] and gaps[k] <= gaps[k + 1]
    ]
    # collapse plateau runs of equal neighbours into one minimum
    minima = []
    for k in interior:
        if minima and k == minima[-1][-1] + 1 and gaps[k] == gaps[minima[-1][-1]]:
            minima[-1].append(k)
        else:
            minima.append([k])
    if not minima:
        raise BracketError(
            f"no interior gap minimum for levels {pair} in [{lo}, {hi}]"
        )
    if len(minima) > 1:
        spots = ", ".join(f"{grid[m[0]]:.6g}" for m in minima)
        raise BracketError(
            f"bracket [{lo}, {hi}] holds {len(minima)} local gap minima for "
            f"levels {pair} (near {spots}); tighten the bracket"
        )

    gap = _gap_function(p, pair, basis)
    omega_star, gap_min = _golden_minimize(gap, lo, hi, refine_tol)
    edge = 10.0 * refine_tol
    if omega_star - lo < edge or hi - omega_star < edge:
        raise BracketError(
            f"refined minimum {omega_star:.8g} sits at the bracket edge; "
            "the true minimum may lie outside the bracket"
        )

    branch_labels = {}
    for side, wq in (("left", lo), ("right", hi)):
        doms, _ = _dominant_labels(p.with_(omega_q=wq), basis, pair[1] + 1)
        branch_labels[side] = (doms[pair[0]][0], doms[pair[1]][0])

    return AvoidedCrossing(
        omega_q_star=float(omega_star),
        gap_min=float(gap_min),
        omega_eff=float(gap_min) / 2.0,
        level_pair=pair,
        branch_labels=branch_labels,
    )


def classify_crossing(p: SystemParams, level_pair, bracket,
                      threshold: float = CROSSING_THRESHOLD,
                      basis: str = SUPERMODE, **search_kwargs) -> str:
    """'crossing' if the located gap minimum falls below ``threshold``."""
    result = find_min_gap(p, level_pair, bracket, basis=basis, **search_kwargs)
    return "crossing" if result.gap_min < threshold else "avoided"


def identify_state(vec, candidates) -> list[tuple[str, float]]:
    """Rank candidate states by squared overlap with ``vec``, descending.

    ``candidates`` is an iterable of (label, QuantumState).
    """
    from .fock import overlap

    ranked = [
        (label, float(abs(overlap(cand, vec)) ** 2)) for label, cand in candidates
    ]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


@dataclass(frozen=True)
class ConvergenceReport:
    """Eigenvalue drift per truncation step for the tracked levels."""

    n_max_ladder: tuple[int, ...]
    levels: np.ndarray          # (len(ladder), n_levels) relative levels
    drifts: np.ndarray          # (len(ladder) - 1, n_levels) absolute steps

    def max_drift(self, step: int = -1) -> float:
        return float(self.drifts[step].max())


def convergence_report(p: SystemParams, n_max_ladder, n_levels: int = 8,
                       basis: str = SUPERMODE) -> ConvergenceReport:
    """Track the lowest relative levels over an ascending truncation ladder."""
    ladder = tuple(int(n) for n in n_max_ladder)
    if list(ladder) != sorted(set(ladder)) or len(ladder) < 2:
        raise ValueError("n_max_ladder must ascend strictly with >= 2 entries")
    rows = [relative_levels_at(p.with_(n_max=n), basis, n_levels) for n in ladder]
    levels = np.vstack(rows)
    drifts = np.abs(np.diff(levels, axis=0))
    return ConvergenceReport(ladder, levels, drifts)

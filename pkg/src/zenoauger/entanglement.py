"""Pairwise mode entanglement of the emitted electron.

Each continuum level is treated as a fermionic mode with occupation 0 or
1.  For a pure state carrying at most one continuum excitation the
two-mode reduced density matrix is an X-matrix whose Wootters concurrence
reduces to the closed form 2 |b_k| |b_k'|; the eigenvalue route is kept
as an independent path for validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .units import au_to_ev, au_to_fs

if TYPE_CHECKING:  # pragma: no cover - types only
    from .propagator import StateVector

EMISSION_FLOOR = 1e-12

# sigma_y (x) sigma_y in the occupation basis {|00>, |01>, |10>, |11>}
_SPIN_FLIP = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=float)


def reduced_two_mode_density(psi: "StateVector", k: int, kp: int) -> np.ndarray:
    """Density matrix of modes (k, k') in the basis {|00>, |01>, |10>, |11>}.

    All other modes and the bound amplitudes are traced out; with a single
    continuum excitation the doubly-occupied sector stays empty.
    """
    if k == kp:
        raise ValueError("the two modes must be distinct")
    b = psi.b
    b_k = b[k]
    b_kp = b[kp]
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - abs(b_k) ** 2 - abs(b_kp) ** 2
    rho[1, 1] = abs(b_kp) ** 2
    rho[2, 2] = abs(b_k) ** 2
    rho[1, 2] = b_kp * np.conj(b_k)
    rho[2, 1] = np.conj(rho[1, 2])
    return rho


def wootters_concurrence(rho: np.ndarray) -> float:
    """Concurrence of a two-qubit density matrix (eigenvalue route).

    C = max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of
    the eigenvalues of rho @ rho_tilde, rho_tilde the spin-flipped
    conjugate.
    """
    rho_tilde = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    evals = np.real(np.linalg.eigvals(rho @ rho_tilde))
    # zero out sub-machine-scale noise so the square root cannot amplify
    # it; the spectrum of rho @ rho_tilde is non-negative in exact math
    evals[np.abs(evals) < 1e-13] = 0.0
    lams = np.sqrt(np.sort(np.abs(evals))[::-1])
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def two_mode_concurrence(psi: "StateVector", k: int, kp: int) -> float:
    """Concurrence between continuum modes k and k' of a pure state."""
    return wootters_concurrence(reduced_two_mode_density(psi, k, kp))


@dataclass(frozen=True, eq=False)
class ConcurrenceMatrix:
    """Symmetric, zero-diagonal concurrence over all continuum modes.

    Modes are ordered S region then P region; ``mode_energies`` carries
    the matching emission energies.  ``n_s`` splits the two regions.
    """

    mode_energies: np.ndarray
    C: np.ndarray
    n_s: int
    time_stamp: float

    def block(self, row_region: str, col_region: str) -> np.ndarray:
        sel = {"S": slice(0, self.n_s), "P": slice(self.n_s, len(self.C))}
        return self.C[sel[row_region], sel[col_region]]

    def to_sparse_triplets(self, floor: float = EMISSION_FLOOR):
        """Upper-triangle (eps_k, eps_k', C) entries with C >= floor."""
        rows, cols = np.nonzero(np.triu(self.C, k=1) >= floor)
        return [(float(self.mode_energies[i]), float(self.mode_energies[j]),
                 float(self.C[i, j])) for i, j in zip(rows, cols)]


def write_concurrence(cmat: ConcurrenceMatrix, directory,
                      floor: float = EMISSION_FLOOR) -> Path:
    """Emit a concurrence matrix as sparse triplets plus a JSON header.

    ``concurrence.csv`` holds one upper-triangle (eps_k, eps_k', C) row
    per pair at or above the floor (a full matrix spans many decades, so
    thresholded triplets are the file default); ``concurrence.json``
    records the snapshot time, the energy ranges of the two regions and
    the flooring applied.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    fmt = "%.17g"
    lines = ["eps_k_eV,eps_kp_eV,concurrence"]
    for e_k, e_kp, value in cmat.to_sparse_triplets(floor):
        lines.append(",".join((fmt % au_to_ev(e_k), fmt % au_to_ev(e_kp),
                               fmt % value)))
    (out / "concurrence.csv").write_text("\n".join(lines) + "\n",
                                         encoding="utf-8")
    energies = cmat.mode_energies
    header = "\n".join((
        "{",
        f'  "floor": {fmt % floor},',
        '  "regions": {',
        f'    "P": [{fmt % au_to_ev(energies[cmat.n_s:].min())}, '
        f'{fmt % au_to_ev(energies[cmat.n_s:].max())}],',
        f'    "S": [{fmt % au_to_ev(energies[:cmat.n_s].min())}, '
        f'{fmt % au_to_ev(energies[:cmat.n_s].max())}]',
        "  },",
        f'  "time_fs": {fmt % au_to_fs(cmat.time_stamp)}',
        "}",
    ))
    (out / "concurrence.json").write_text(header + "\n", encoding="utf-8")
    return out


def concurrence_matrix(psi: "StateVector",
                       mode_energies: np.ndarray | None = None) -> ConcurrenceMatrix:
    """Full pairwise concurrence via the single-excitation closed form.

    C_{kk'} = 2 |b_k| |b_k'| for k != k'; validated against the Wootters
    eigenvalue route in the test suite.
    """
    mags = np.abs(psi.b)
    c = 2.0 * np.outer(mags, mags)
    np.fill_diagonal(c, 0.0)
    if mode_energies is None:
        mode_energies = np.arange(len(mags), dtype=float)
    return ConcurrenceMatrix(
        mode_energies=np.asarray(mode_energies, dtype=float),
        C=c,
        n_s=psi.n_s,
        time_stamp=psi.time_stamp,
    )

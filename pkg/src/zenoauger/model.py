"""Two-bound-state / two-continuum decay model.

A fast-decaying state |1> is coupled to an s-type continuum region and a
slower state |2> to a p-type region.  Each region is discretized on a
uniform energy grid spanning a window around its emission energy, with the
level density folded into the per-level couplings so that the golden-rule
width at the window center reproduces the requested lifetime exactly.

All quantities are in Hartree atomic units (hbar = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse

from .units import au_to_ev, au_to_fs, ev_to_au

REGIONS = ("S", "P")

# Coupling a level at the window center with lifetime tau gives a decay
# width 1/tau; resolving that width with at least this many grid points is
# required for trustworthy lineshapes (soft bound, see validate_resolution).
POINTS_PER_LINEWIDTH = 10.0
RECURRENCE_SAFETY = 1.5


@dataclass(frozen=True)
class LevelScheme:
    """Bound-state energies, core level and target lifetimes (a.u.).

    ``tau2 = inf`` means state |2> does not decay.  The emission energies
    epsA1/epsA2 are measured from the continuum threshold and must be
    positive: the ejected electron carries positive kinetic energy.
    """

    E1: float
    E2: float
    eps_c: float
    tau1: float
    tau2: float = math.inf

    def __post_init__(self):
        if not self.tau1 > 0:
            raise ValueError(f"tau1 must be positive, got {self.tau1}")
        if not self.tau2 > 0:
            raise ValueError(f"tau2 must be positive or inf, got {self.tau2}")
        if self.epsA1 <= 0 or self.epsA2 <= 0:
            raise ValueError(
                "emission energies must be positive "
                f"(epsA1={self.epsA1}, epsA2={self.epsA2})"
            )

    @property
    def delta_e(self) -> float:
        """Bound-state separation E2 - E1."""
        return self.E2 - self.E1

    @property
    def epsA1(self) -> float:
        return self.E1 - self.eps_c

    @property
    def epsA2(self) -> float:
        return self.E2 - self.eps_c


@dataclass(frozen=True, eq=False)
class ContinuumGrid:
    """Uniform discretization of one continuum region.

    energies   strictly increasing grid eps_k (kinetic energy from threshold)
    couplings  per-level coupling m_k, m_k = M sqrt(rho(eps_k) d_eps / rho(epsA))
    """

    region: str
    energies: np.ndarray
    couplings: np.ndarray
    window: float
    eps_center: float
    n_exponent: int
    tau: float

    @property
    def n_points(self) -> int:
        return len(self.energies)

    @property
    def d_eps(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def recurrence_time(self) -> float:
        """Artificial revival time 2*pi/d_eps of the discretized continuum."""
        return 2.0 * math.pi / self.d_eps


def density_of_states(eps, n_exponent: int):
    """Continuum density profile rho(eps) ~ eps^((n-2)/2), unnormalized."""
    return np.asarray(eps, dtype=float) ** ((n_exponent - 2) / 2.0)


def lifetime_to_coupling(tau: float, rho_at_epsA: float) -> float:
    """Coupling strength M reproducing lifetime tau by the golden rule.

    Inverts Gamma = 2*pi*M^2*rho(epsA) = 1/tau.  An infinite lifetime maps
    to zero coupling.
    """
    if math.isinf(tau):
        return 0.0
    if not tau > 0:
        raise ValueError(f"lifetime must be positive, got {tau}")
    if not rho_at_epsA > 0:
        raise ValueError(f"density of states must be positive, got {rho_at_epsA}")
    return math.sqrt(1.0 / (2.0 * math.pi * tau * rho_at_epsA))


def build_grid(
    region: str,
    epsA: float,
    window: float,
    n_points: int,
    n_exponent: int,
    tau: float,
) -> ContinuumGrid:
    """Discretize one continuum region on [epsA - window, epsA + window].

    The density profile enters through the couplings only, normalized to
    the window center, so the overall normalization of rho cancels and
    the local golden-rule width at epsA equals 1/tau exactly.
    """
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")
    if n_points < 3:
        raise ValueError(f"need at least 3 grid points, got {n_points}")
    if n_exponent not in (1, 2, 3):
        raise ValueError(f"density exponent must be 1, 2 or 3, got {n_exponent}")
    if not 0 < window < epsA:
        raise ValueError(
            f"window must satisfy 0 < W < epsA to keep all energies positive "
            f"(W={window}, epsA={epsA})"
        )
    energies = np.linspace(epsA - window, epsA + window, n_points)
    d_eps = energies[1] - energies[0]
    m_center = lifetime_to_coupling(tau, 1.0)
    # m_k ~ sqrt(rho(eps_k)/rho(epsA)); rho normalization cancels here.
    shape = np.sqrt(density_of_states(energies, n_exponent)
                    / density_of_states(epsA, n_exponent))
    couplings = m_center * math.sqrt(d_eps) * shape
    return ContinuumGrid(
        region=region,
        energies=energies,
        couplings=couplings,
        window=window,
        eps_center=epsA,
        n_exponent=n_exponent,
        tau=tau,
    )


def default_window(tau_min: float, omega_rabi_max: float = 0.0) -> float:
    """Default half-width: hold the decay tails and any Stark-split peaks."""
    return max(15.0 / tau_min if not math.isinf(tau_min) else 0.0,
               5.0 * omega_rabi_max,
               ev_to_au(2.0))


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Arrowhead Hamiltonian: two bound states, two continuum blocks.

    The static part holds the diagonal energies and the bound-continuum
    couplings (|1> to region S only, |2> to region P only).  The single
    time-dependent element g(t) on |1><2| is supplied per matrix-vector
    product, which keeps the product cost linear in the grid size.

    ``frame`` records whether the diagonal has been shifted into the frame
    rotating at the drive frequency (used by the rotating-wave modes).
    """

    diag: np.ndarray
    m_s: np.ndarray
    m_p: np.ndarray
    frame: str = "lab"
    frame_shift: float = 0.0

    @property
    def n_s(self) -> int:
        return len(self.m_s)

    @property
    def n_p(self) -> int:
        return len(self.m_p)

    @property
    def dimension(self) -> int:
        return len(self.diag)

    @property
    def s_block(self) -> slice:
        return slice(2, 2 + self.n_s)

    @property
    def p_block(self) -> slice:
        return slice(2 + self.n_s, self.dimension)

    def apply(self, psi: np.ndarray, g: complex = 0.0) -> np.ndarray:
        """H(t) @ psi with drive element g = <2|H|1> at this instant."""
        out = self.diag * psi
        b_s = psi[self.s_block]
        b_p = psi[self.p_block]
        out[0] += np.conj(g) * psi[1] + self.m_s @ b_s
        out[1] += g * psi[0] + self.m_p @ b_p
        out[self.s_block] += self.m_s * psi[0]
        out[self.p_block] += self.m_p * psi[1]
        return out

    @cached_property
    def static_csr(self) -> scipy.sparse.csr_matrix:
        """Sparse form of the drive-free part, for the propagation hot loop.

        Equivalent to dense(0); the time-dependent (0, 1) element is added
        per product by the propagator.
        """
        n = self.dimension
        s_idx = np.arange(2, 2 + self.n_s)
        p_idx = np.arange(2 + self.n_s, n)
        rows = np.concatenate((np.arange(n), np.zeros(self.n_s, dtype=int),
                               s_idx, np.ones(self.n_p, dtype=int), p_idx))
        cols = np.concatenate((np.arange(n), s_idx,
                               np.zeros(self.n_s, dtype=int), p_idx,
                               np.ones(self.n_p, dtype=int)))
        vals = np.concatenate((self.diag, self.m_s, self.m_s,
                               self.m_p, self.m_p)).astype(complex)
        return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def dense(self, g: complex = 0.0) -> np.ndarray:
        """Full matrix, for small-system cross-checks only."""
        n = self.dimension
        h = np.zeros((n, n), dtype=complex)
        np.fill_diagonal(h, self.diag)
        h[1, 0] = g
        h[0, 1] = np.conj(g)
        h[0, self.s_block] = self.m_s
        h[self.s_block, 0] = self.m_s
        h[1, self.p_block] = self.m_p
        h[self.p_block, 1] = self.m_p
        return h


def assemble(levels: LevelScheme, grid_s: ContinuumGrid,
             grid_p: ContinuumGrid) -> Hamiltonian:
    """Build the static Hamiltonian from a level scheme and two grids.

    The grids must have been built against the emission energies of the
    level scheme; continuum level energies are eps_c + eps_k.
    """
    if grid_s.region != "S" or grid_p.region != "P":
        raise ValueError("grids must be built for regions S and P respectively")
    for grid, eps_a in ((grid_s, levels.epsA1), (grid_p, levels.epsA2)):
        if not math.isclose(grid.eps_center, eps_a, rel_tol=1e-9):
            raise ValueError(
                f"grid {grid.region} centered at {grid.eps_center} but the "
                f"level scheme emits at {eps_a}"
            )
    diag = np.concatenate((
        [levels.E1, levels.E2],
        levels.eps_c + grid_s.energies,
        levels.eps_c + grid_p.energies,
    )).astype(float)
    return Hamiltonian(diag=diag, m_s=grid_s.couplings.copy(),
                       m_p=grid_p.couplings.copy())


def rotating_frame(ham: Hamiltonian, omega: float) -> Hamiltonian:
    """Shift |2> and the P block down by the drive frequency.

    In this frame a resonant rotating-wave drive becomes the constant
    coupling Omega/2; any detuning appears as a static offset on |2>.
    Continuum populations are frame-independent, so spectra and
    entanglement measures read identically in either frame.
    """
    diag = ham.diag.copy()
    diag[1] -= omega
    diag[ham.p_block] -= omega
    return Hamiltonian(diag=diag, m_s=ham.m_s, m_p=ham.m_p,
                       frame="rotating", frame_shift=omega)


@dataclass(frozen=True)
class ResolutionReport:
    """Outcome of the grid-resolution checks for a planned simulation.

    The recurrence bound is hard: running into the revival of the
    discretized continuum invalidates the decay dynamics.  The
    linewidth-sampling bound only degrades spectra, so it is reported as
    a named diagnostic without blocking the run.
    """

    recurrence_ok: bool
    linewidth_ok: bool
    recurrence_time: float
    points_per_linewidth: float
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.recurrence_ok


def validate_resolution(grid: ContinuumGrid, t_sim: float, tau: float,
                        safety: float = RECURRENCE_SAFETY) -> ResolutionReport:
    """Check a grid against a planned simulation span and lifetime."""
    t_rec = grid.recurrence_time
    recurrence_ok = t_sim * safety < t_rec
    if math.isinf(tau):
        linewidth_ok = True
        points = math.inf
    else:
        linewidth = 1.0 / tau
        points = linewidth / grid.d_eps
        linewidth_ok = points > POINTS_PER_LINEWIDTH
    diagnostics = []
    if not recurrence_ok:
        diagnostics.append(
            f"recurrence bound violated in region {grid.region}: "
            f"T_sim*safety = {au_to_fs(t_sim * safety):.3f} fs exceeds "
            f"T_rec = {au_to_fs(t_rec):.3f} fs; decrease d_eps"
        )
    if not linewidth_ok:
        diagnostics.append(
            f"linewidth sampling in region {grid.region}: "
            f"{points:.2f} points per linewidth is below the "
            f"{POINTS_PER_LINEWIDTH:.0f}-point rule "
            f"(d_eps = {au_to_ev(grid.d_eps):.5f} eV); spectra will be coarse"
        )
    return ResolutionReport(
        recurrence_ok=recurrence_ok,
        linewidth_ok=linewidth_ok,
        recurrence_time=t_rec,
        points_per_linewidth=points,
        diagnostics=tuple(diagnostics),
    )

"""Time-dependent coupling between the two bound states.

The measurement protocol is a train of square pi-pulses: a pulse of
duration t_pi = pi/Omega swaps the populations of |1> and |2>, the system
waits a time t_m, a second pulse swaps them back, and after a delay
dt_delay the cycle repeats.  A continuous mode (envelope identically one)
and rotating-wave variants of both are also provided.

The full-field coupling is g(t) = Omega f(t) sin(omega t) with f the
square envelope; the rotating-wave modes use the constant g = Omega/2
inside each window with the frame shift applied to the Hamiltonian
diagonal (see model.rotating_frame).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODES = ("pulsed", "continuous", "rwa_pulsed", "rwa_continuous", "off")
ENVELOPES = ("square", "cosine_ramp")


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    """Resolved drive protocol over a fixed simulation span.

    ``windows`` is an (n, 2) array of [start, end) intervals where the
    envelope is nonzero, non-overlapping and sorted.  ``cycle_boundaries``
    marks the time after each completed pulse-wait-pulse-delay cycle;
    populations sampled there are free of the intra-cycle Rabi swing.
    """

    mode: str
    Omega: float
    omega: float
    delta: float
    t_m: float
    dt_delay: float
    T_total: float
    windows: np.ndarray
    cycle_boundaries: np.ndarray
    envelope: str = "square"
    ramp: float = 0.0
    phase_reset: bool = False

    @property
    def t_pi(self) -> float:
        """Duration of a population-swapping pulse, pi/Omega."""
        return math.pi / self.Omega if self.Omega > 0 else math.inf

    @property
    def is_rwa(self) -> bool:
        return self.mode.startswith("rwa")

    @property
    def drive_active(self) -> bool:
        return self.mode != "off" and len(self.windows) > 0

    @property
    def cycle_period(self) -> float:
        return 2.0 * self.t_pi + self.t_m + self.dt_delay

    def total_on_time(self) -> float:
        if len(self.windows) == 0:
            return 0.0
        return float(np.sum(self.windows[:, 1] - self.windows[:, 0]))


def build_schedule(
    Omega: float,
    omega: float,
    delta: float,
    t_m: float,
    dt_delay: float,
    mode: str,
    T_total: float,
    envelope: str = "square",
    ramp: float = 0.0,
    phase_reset: bool = False,
) -> PulseSchedule:
    """Resolve a drive protocol into explicit pulse windows.

    Pulsed modes emit [pulse][t_m][pulse][dt_delay] cycles until T_total,
    clipping a trailing partial cycle; continuous modes emit the single
    window [0, T_total).  With the cosine_ramp envelope each window is
    lengthened by the ramp time so the pulse area stays pi.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if envelope not in ENVELOPES:
        raise ValueError(f"envelope must be one of {ENVELOPES}, got {envelope!r}")
    if not T_total > 0:
        raise ValueError(f"T_total must be positive, got {T_total}")
    if t_m < 0 or dt_delay < 0 or ramp < 0:
        raise ValueError("t_m, dt_delay and ramp must be non-negative")

    if mode == "off":
        windows = np.zeros((0, 2))
        boundaries = np.zeros(0)
        return PulseSchedule(mode, 0.0, omega, delta, t_m, dt_delay, T_total,
                             windows, boundaries, envelope, ramp, phase_reset)

    if not Omega > 0:
        raise ValueError(f"driven modes need Omega > 0, got {Omega}")

    if mode in ("continuous", "rwa_continuous"):
        windows = np.array([[0.0, T_total]])
        boundaries = np.zeros(0)
        return PulseSchedule(mode, Omega, omega, delta, t_m, dt_delay, T_total,
                             windows, boundaries, envelope, ramp, phase_reset)

    t_pi = math.pi / Omega
    width = t_pi + (ramp if envelope == "cosine_ramp" else 0.0)
    windows = []
    boundaries = []
    start = 0.0
    while start < T_total:
        for w_start in (start, start + width + t_m):
            if w_start >= T_total:
                break
            windows.append((w_start, min(w_start + width, T_total)))
        cycle_end = start + 2.0 * width + t_m + dt_delay
        if cycle_end <= T_total * (1.0 + 1e-12):
            boundaries.append(min(cycle_end, T_total))
        if cycle_end <= start:  # degenerate all-zero cycle cannot advance
            raise ValueError("cycle period must be positive")
        start = cycle_end
    return PulseSchedule(mode, Omega, omega, delta, t_m, dt_delay, T_total,
                         np.asarray(windows), np.asarray(boundaries),
                         envelope, ramp, phase_reset)


def _window_index(schedule: PulseSchedule, t: float) -> int:
    """Index of the window containing t, or -1."""
    starts = schedule.windows[:, 0]
    idx = int(np.searchsorted(starts, t, side="right")) - 1
    if idx >= 0 and t < schedule.windows[idx, 1]:
        return idx
    return -1


def envelope_at(schedule: PulseSchedule, t: float) -> float:
    """Envelope value f(t): 1 inside a window, 0 outside, 0 for t < 0."""
    if t < 0 or not schedule.drive_active:
        return 0.0
    idx = _window_index(schedule, t)
    if idx < 0:
        return 0.0
    if schedule.envelope == "square" or schedule.ramp == 0.0:
        return 1.0
    a, b = schedule.windows[idx]
    r = min(schedule.ramp, 0.5 * (b - a))
    if t < a + r:
        return math.sin(0.5 * math.pi * (t - a) / r) ** 2
    if t > b - r:
        return math.sin(0.5 * math.pi * (b - t) / r) ** 2
    return 1.0


def coupling_at(schedule: PulseSchedule, t: float) -> complex:
    """Instantaneous drive element g(t) = <2|H(t)|1>.

    Full-field modes: Omega f(t) sin(omega t), with the carrier phase
    referenced to the absolute simulation time unless phase_reset is set.
    Rotating-wave modes: Omega/2 f(t), to be used with the frame-shifted
    Hamiltonian (any detuning sits on the diagonal there).
    """
    if t < 0 or not schedule.drive_active:
        return 0.0 + 0.0j
    f = envelope_at(schedule, t)
    if f == 0.0:
        return 0.0 + 0.0j
    if schedule.is_rwa:
        return complex(0.5 * schedule.Omega * f)
    phase_t = t
    if schedule.phase_reset:
        idx = _window_index(schedule, t)
        phase_t = t - schedule.windows[idx, 0]
    return complex(schedule.Omega * f * math.sin(schedule.omega * phase_t))


def pi_pulse_transfer_check(
    Omega: float,
    omega: float,
    delta: float,
    mode: str = "rwa_pulsed",
    dt_max: float | None = None,
    residual_tol: float = 1e-13,
) -> float:
    """Propagate |1> through one pulse with decay disabled; return P2.

    A two-level system with splitting omega - delta is driven for exactly
    t_pi.  The exact two-level result is
    P2 = Omega^2/(Omega^2 + delta^2) * sin^2(sqrt(Omega^2 + delta^2) t_pi / 2);
    note that the often-quoted Omega^2/(Omega^2 + delta^2) alone drops the
    sine factor and only agrees at delta = 0.  On resonance the
    rotating-wave result is 1 up to solver tolerance, while the full field
    picks up counter-rotating corrections of order Omega/omega.
    """
    from .model import Hamiltonian, rotating_frame
    from .propagator import evolve_interval

    splitting = omega - delta
    ham = Hamiltonian(diag=np.array([0.0, splitting]),
                      m_s=np.zeros(0), m_p=np.zeros(0))
    schedule = build_schedule(Omega, omega, delta, t_m=0.0, dt_delay=0.0,
                              mode=mode, T_total=math.pi / Omega)
    if schedule.is_rwa:
        ham = rotating_frame(ham, omega)
    if dt_max is None:
        dt_max = schedule.t_pi / 200.0
        if not schedule.is_rwa:
            dt_max = min(dt_max, (2.0 * math.pi / omega) / 40.0)
    psi = np.zeros(2, dtype=complex)
    psi[0] = 1.0
    psi = evolve_interval(psi, 0.0, schedule.t_pi, ham, schedule, dt_max,
                          krylov_dim=8, residual_tol=residual_tol)
    return float(abs(psi[1]) ** 2)

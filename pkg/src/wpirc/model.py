"""Domain types and closed-form evaluators for the harvest-then-transmit link.

Everything in this module is a pure function of its (immutable) inputs:
harvested energy at the transmitter, radar mutual information and
communication rate of the OFDM waveform, constraint bookkeeping, and
baseband waveform synthesis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

LN2 = float(np.log(2.0))

__all__ = [
    "SolveStatus",
    "SystemParams",
    "ChannelRealization",
    "Solution",
    "ConstraintRecord",
    "FeasibilityReport",
    "WaveformSpec",
    "harvested_energy",
    "radar_mi",
    "comm_rate",
    "check_constraints",
    "synthesize_ofdm",
]


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    ZERO_DEMAND = "zero_demand"
    ERROR = "error"


@dataclass(frozen=True)
class SystemParams:
    """Static scenario constants.

    Units: ``delta_f`` Hz, ``symbol_duration``/``total_time`` seconds,
    ``power_cap`` watts, ``mi_floor``/``rate_floor`` bits, ``efficiency``
    dimensionless in [0, 1].
    """

    n_subcarriers: int
    n_antennas: int
    delta_f: float
    symbol_duration: float
    total_time: float
    power_cap: float
    efficiency: float
    mi_floor: float = 0.0
    rate_floor: float = 0.0

    def __post_init__(self) -> None:
        if self.n_subcarriers < 1 or self.n_antennas < 1:
            raise ValueError("n_subcarriers and n_antennas must be positive")
        for name in ("delta_f", "symbol_duration", "total_time", "power_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if self.mi_floor < 0 or self.rate_floor < 0:
            raise ValueError("rate floors must be nonnegative")
        if self.symbol_duration > self.total_time:
            raise ValueError("symbol_duration must not exceed total_time")


@dataclass(frozen=True)
class ChannelRealization:
    """One random draw: station-to-transmitter gains plus per-subcarrier SNRs.

    ``h`` is the complex channel vector seen by the energy beamformer;
    ``radar_snr`` and ``comm_snr`` are the effective per-subcarrier SNR
    gains of the sensing and data links (everything that multiplies the
    per-subcarrier power inside the two log terms).
    """

    h: np.ndarray
    radar_snr: np.ndarray
    comm_snr: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", np.asarray(self.h, dtype=complex))
        object.__setattr__(self, "radar_snr", np.asarray(self.radar_snr, dtype=float))
        object.__setattr__(self, "comm_snr", np.asarray(self.comm_snr, dtype=float))
        if self.h.ndim != 1 or self.radar_snr.ndim != 1 or self.comm_snr.ndim != 1:
            raise ValueError("channel fields must be one-dimensional")
        if self.radar_snr.shape != self.comm_snr.shape:
            raise ValueError("radar_snr and comm_snr must have equal length")
        if np.any(self.radar_snr < 0) or np.any(self.comm_snr < 0):
            raise ValueError("SNR vectors must be elementwise nonnegative")

    @property
    def n_subcarriers(self) -> int:
        return self.radar_snr.size


@dataclass
class Solution:
    """A complete allocation returned by a solver.

    ``gamma`` holds per-subcarrier energies (joules, already multiplied by
    the transmit slot), ``covariance_bar`` the time-scaled beamforming
    covariance whose trace is the station's transmission energy.
    """

    status: SolveStatus
    beam_vector: np.ndarray
    tau1: float
    tau2: float
    gamma: np.ndarray
    energy: float
    covariance_bar: np.ndarray

    @classmethod
    def empty(cls, status: SolveStatus, params: "SystemParams") -> "Solution":
        nt, nc = params.n_antennas, params.n_subcarriers
        return cls(
            status=status,
            beam_vector=np.zeros(nt, dtype=complex),
            tau1=0.0,
            tau2=params.total_time if status is SolveStatus.ZERO_DEMAND else 0.0,
            gamma=np.zeros(nc),
            energy=0.0,
            covariance_bar=np.zeros((nt, nt), dtype=complex),
        )


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool


@dataclass(frozen=True)
class FeasibilityReport:
    records: tuple[ConstraintRecord, ...]
    tolerance: float

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.records)

    def __getitem__(self, name: str) -> ConstraintRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)


@dataclass(frozen=True)
class WaveformSpec:
    """Amplitudes and phase codes of the integrated OFDM waveform."""

    center_freq: float
    n_symbols: int
    phase_codes: np.ndarray  # (N_c, N_s), unit modulus
    amplitudes: np.ndarray  # (N_c,), sqrt(W)

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase_codes", np.asarray(self.phase_codes, dtype=complex))
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=float))
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be positive")
        if self.phase_codes.shape != (self.amplitudes.size, self.n_symbols):
            raise ValueError("phase_codes must be (n_subcarriers, n_symbols)")
        if np.any(np.abs(np.abs(self.phase_codes) - 1.0) > 1e-9):
            raise ValueError("phase codes must be unit modulus")
        if np.any(self.amplitudes < 0):
            raise ValueError("amplitudes must be nonnegative")


def harvested_energy(h: np.ndarray, w: np.ndarray, tau1: float, eta: float) -> float:
    """Energy collected during a harvesting slot of length ``tau1``.

    Equals ``eta * tau1 * |h^H w|^2`` for channel ``h`` and beamforming
    vector ``w``.
    """
    h = np.asarray(h, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if h.shape != w.shape:
        raise ValueError("h and w must have the same length")
    if tau1 < 0:
        raise ValueError("tau1 must be nonnegative")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return float(eta * tau1 * np.abs(np.vdot(h, w)) ** 2)


def _checked_rate_inputs(gamma, snr, tau2):
    gamma = np.asarray(gamma, dtype=float)
    snr = np.asarray(snr, dtype=float)
    if gamma.shape != snr.shape:
        raise ValueError("gamma and SNR vector must have equal length")
    if np.any(gamma < 0) or np.any(snr < 0) or tau2 < 0:
        raise ValueError("gamma, SNR and tau2 must be nonnegative")
    return gamma, snr


def radar_mi(gamma, radar_snr, tau2: float, delta_f: float) -> float:
    """Conditional mutual information of the sensing link, in bits.

    The perspective form ``(delta_f * tau2 / 2) * sum log2(1 + gamma_m *
    v_m / tau2)``; the ``tau2 -> 0`` limit is defined as 0.
    """
    gamma, snr = _checked_rate_inputs(gamma, radar_snr, tau2)
    if tau2 == 0.0:
        return 0.0
    return float(0.5 * delta_f * tau2 * np.sum(np.log2(1.0 + gamma * snr / tau2)))


def comm_rate(gamma, comm_snr, tau2: float, delta_f: float) -> float:
    """Total data rate of the communication link, in bits.

    Same perspective form as :func:`radar_mi` without the 1/2 prefactor.
    """
    gamma, snr = _checked_rate_inputs(gamma, comm_snr, tau2)
    if tau2 == 0.0:
        return 0.0
    return float(delta_f * tau2 * np.sum(np.log2(1.0 + gamma * snr / tau2)))


def check_constraints(
    params: SystemParams,
    chan: ChannelRealization,
    sol: Solution,
    tol: float = 1e-6,
) -> FeasibilityReport:
    """Evaluate the six allocation constraints against a candidate solution.

    Slacks are signed so that nonnegative means satisfied; a constraint is
    flagged satisfied when ``slack >= -tol * max(1, |rhs|)``.
    """
    if sol.gamma.size != chan.n_subcarriers:
        raise ValueError("gamma length does not match channel")
    if sol.beam_vector.size != chan.h.size:
        raise ValueError("beam_vector length does not match channel")

    mi = radar_mi(sol.gamma, chan.radar_snr, sol.tau2, params.delta_f)
    rate = comm_rate(sol.gamma, chan.comm_snr, sol.tau2, params.delta_f)
    harvested = harvested_energy(chan.h, sol.beam_vector, sol.tau1, params.efficiency)
    demand = float(np.sum(sol.gamma))
    trace = float(np.trace(sol.covariance_bar).real)

    entries = [
        ("mi_floor", mi, params.mi_floor, mi - params.mi_floor),
        ("rate_floor", rate, params.rate_floor, rate - params.rate_floor),
        ("energy_causality", demand, harvested, harvested - demand),
        ("power_budget", trace, sol.tau1 * params.power_cap, sol.tau1 * params.power_cap - trace),
        (
            "time_budget",
            sol.tau1 + sol.tau2,
            params.total_time,
            min(params.total_time - sol.tau1 - sol.tau2, sol.tau1, sol.tau2),
        ),
        ("nonnegativity", float(np.min(sol.gamma)), 0.0, float(np.min(sol.gamma))),
    ]
    records = tuple(
        ConstraintRecord(
            name=name,
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            satisfied=slack >= -tol * max(1.0, abs(rhs)),
        )
        for name, lhs, rhs, slack in entries
    )
    return FeasibilityReport(records=records, tolerance=tol)


def synthesize_ofdm(
    spec: WaveformSpec,
    params: SystemParams,
    sample_rate: float,
    symbol_index: int,
) -> np.ndarray:
    """Sample one baseband OFDM symbol of the integrated waveform.

    Returns ``sum_m a_m c_{m,n} exp(j 2 pi m delta_f (t - n T_s))`` on a
    uniform grid of ``round(sample_rate * T_s)`` points covering the
    symbol window. The carrier factor is omitted (complex envelope).
    """
    n_c = spec.amplitudes.size
    if sample_rate < n_c * params.delta_f:
        raise ValueError("sample_rate below the Nyquist rate of the occupied band")
    if not 0 <= symbol_index < spec.n_symbols:
        raise ValueError("symbol_index out of range")
    n_samples = int(round(sample_rate * params.symbol_duration))
    t_rel = np.arange(n_samples) / sample_rate
    tones = np.exp(2j * np.pi * params.delta_f * np.outer(np.arange(n_c), t_rel))
    weights = spec.amplitudes * spec.phase_codes[:, symbol_index]
    return weights @ tones

"""Minimum-energy solver: water-filling inner allocation, analytic
maximum-ratio beamforming, and an outer root search on the time split.

The problem is reduced in two stages.  For a fixed transmit slot ``tau2``
the cheapest per-subcarrier energy profile ``gamma`` is found by solving
the two-constraint water-filling problem in its Lagrangian dual (one
multiplier per rate floor).  The beamforming block then collapses to the
maximum-ratio direction, leaving a scalar feasibility function of
``tau2`` whose largest root gives the optimal time split.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .model import (
    LN2,
    ChannelRealization,
    Solution,
    SolveStatus,
    SystemParams,
    comm_rate,
    radar_mi,
)

__all__ = [
    "DualPair",
    "InnerResult",
    "SolverOptions",
    "SolverError",
    "InfeasibleSignalError",
    "subcarrier_gamma",
    "inner_allocation",
    "inner_dual_value",
    "mrt_covariance",
    "solve",
    "solve_with_allocation",
]


class SolverError(RuntimeError):
    """Raised when an iterative stage fails to converge."""


class InfeasibleSignalError(ValueError):
    """Raised when positive energy is demanded over a zero channel."""


@dataclass(frozen=True)
class DualPair:
    """Multipliers of the sensing and data-rate floors."""

    lambda_r: float
    lambda_c: float

    def __post_init__(self) -> None:
        if self.lambda_r < 0 or self.lambda_c < 0:
            raise ValueError("multipliers must be nonnegative")


@dataclass
class InnerResult:
    gamma: np.ndarray
    duals: DualPair
    stationarity_residual: float
    active: str  # "none" | "mi" | "rate" | "both"


@dataclass(frozen=True)
class SolverOptions:
    max_bisect: int = 200
    dual_tol: float = 1e-10  # absolute, on normalized constraint residuals
    constraint_tol: float = 1e-8  # relative
    time_tol: float = 1e-9  # relative to total_time


DEFAULT_OPTIONS = SolverOptions()


def _gamma_profile(
    lambda_r: float,
    lambda_c: float,
    v: np.ndarray,
    w: np.ndarray,
    tau2: float,
    delta_f: float,
) -> np.ndarray:
    """Stationary per-subcarrier energies for fixed multipliers.

    Solves ``1 = A/(1 + x v) + B/(1 + x w)`` for ``x = gamma / tau2`` on
    each subcarrier, with ``A = lambda_r delta_f v / (2 ln 2)`` and
    ``B = lambda_c delta_f w / ln 2``; the positive root exists exactly
    when ``A + B > 1`` and is otherwise clamped to zero.
    """
    A = lambda_r * delta_f * v / (2.0 * LN2)
    B = lambda_c * delta_f * w / LN2
    x = np.zeros_like(v, dtype=float)

    c = 1.0 - A - B
    active = c < 0.0
    both = active & (v > 0) & (w > 0)
    single = active & ~both & ((v > 0) | (w > 0))

    if np.any(both):
        a = v[both] * w[both]
        b = v[both] + w[both] - A[both] * w[both] - B[both] * v[both]
        disc = b * b - 4.0 * a * c[both]
        # larger quadratic root in the cancellation-free form; b + sqrt(disc)
        # is strictly positive because disc > b^2 when c < 0
        x[both] = -2.0 * c[both] / (b + np.sqrt(disc))
    if np.any(single):
        gain = np.where(v[single] > 0, v[single], w[single])
        scale = np.where(v[single] > 0, 1.0 - B[single], 1.0 - A[single])
        x[single] = -c[single] / (gain * scale)

    return tau2 * np.maximum(x, 0.0)


def subcarrier_gamma(
    duals: DualPair, v: float, w: float, tau2: float, delta_f: float
) -> float:
    """Water-filling energy of a single subcarrier with gains ``v``, ``w``."""
    if tau2 <= 0:
        raise ValueError("tau2 must be positive")
    if v < 0 or w < 0:
        raise ValueError("gains must be nonnegative")
    out = _gamma_profile(
        duals.lambda_r, duals.lambda_c, np.array([v]), np.array([w]), tau2, delta_f
    )
    return float(out[0])


def _water_level(snr: np.ndarray, target_logsum: float) -> float:
    """Exact single-constraint water level.

    Finds ``a`` such that ``sum over active of log2(a * snr_m)`` equals
    ``target_logsum`` with active set ``{m : a * snr_m > 1}``; the optimal
    per-subcarrier loading is then ``x_m = max(0, a - 1/snr_m)``.
    """
    v = np.sort(snr[snr > 0])[::-1]
    if v.size == 0:
        raise SolverError("rate floor demanded over an all-zero SNR vector")
    prefix = np.cumsum(np.log2(v))
    for k in range(1, v.size + 1):
        exponent = (target_logsum - prefix[k - 1]) / k
        a = np.inf if exponent > 1000.0 else 2.0 ** exponent
        if a * v[k - 1] >= 1.0 - 1e-14 and (k == v.size or a * v[k] < 1.0):
            return a
    # fall back to the all-active candidate (boundary rounding)
    return 2.0 ** ((target_logsum - prefix[-1]) / v.size)


def _single_constraint_gamma(
    snr: np.ndarray, target_logsum: float, tau2: float
) -> tuple[np.ndarray, float]:
    """Optimal profile and water level for one active rate constraint."""
    a = _water_level(snr, target_logsum)
    x = np.zeros_like(snr)
    pos = snr > 0
    x[pos] = np.maximum(0.0, a - 1.0 / snr[pos])
    return tau2 * x, a


def inner_allocation(
    tau2: float,
    chan: ChannelRealization,
    params: SystemParams,
    options: SolverOptions = DEFAULT_OPTIONS,
) -> InnerResult:
    """Minimize total transmit-phase energy subject to both rate floors.

    Returns the optimal ``gamma`` together with the dual pair that
    regenerates it through :func:`subcarrier_gamma`.  The two
    single-constraint cases are solved in closed form first; only when
    both floors bind does a nested root search on the multipliers run.
    """
    if tau2 <= 0:
        raise ValueError("tau2 must be positive")
    v = chan.radar_snr
    w = chan.comm_snr
    r_r, r_c = params.mi_floor, params.rate_floor
    df = params.delta_f

    def mi(g):
        return radar_mi(g, v, tau2, df)

    def rate(g):
        return comm_rate(g, w, tau2, df)

    if r_r == 0.0 and r_c == 0.0:
        return InnerResult(np.zeros_like(v), DualPair(0.0, 0.0), 0.0, "none")

    tol_r = options.dual_tol * max(1.0, r_r)
    tol_c = options.dual_tol * max(1.0, r_c)

    lam_r1 = lam_c1 = 0.0
    if r_r > 0.0:
        g1, level_a = _single_constraint_gamma(v, 2.0 * r_r / (df * tau2), tau2)
        lam_r1 = level_a * 2.0 * LN2 / df
        if rate(g1) >= r_c - tol_c:
            duals = DualPair(lam_r1, 0.0)
            res = _kkt_residual(duals, g1, mi(g1), rate(g1), r_r, r_c)
            return InnerResult(g1, duals, res, "mi")
    if r_c > 0.0:
        g2, level_b = _single_constraint_gamma(w, r_c / (df * tau2), tau2)
        lam_c1 = level_b * LN2 / df
        if mi(g2) >= r_r - tol_r:
            duals = DualPair(0.0, lam_c1)
            res = _kkt_residual(duals, g2, mi(g2), rate(g2), r_r, r_c)
            return InnerResult(g2, duals, res, "rate")

    # Both constraints active: outer root search on lambda_r with the data
    # multiplier matched to its floor at every probe.  The single-constraint
    # multipliers bracket both searches: adding the other multiplier only
    # raises every subcarrier's water level.
    def lambda_c_for(lr: float) -> float:
        def slack(lc: float) -> float:
            return rate(_gamma_profile(lr, lc, v, w, tau2, df)) - r_c

        if slack(0.0) >= 0.0:
            return 0.0
        hi = lam_c1
        for _ in range(options.max_bisect):
            if slack(hi) >= 0.0:
                break
            hi *= 2.0
        else:
            raise SolverError("failed to bracket the data-rate multiplier")
        return brentq(slack, 0.0, hi, xtol=1e-300, rtol=1e-13, maxiter=options.max_bisect)

    def mi_gap(lr: float) -> float:
        lc = lambda_c_for(lr)
        return mi(_gamma_profile(lr, lc, v, w, tau2, df)) - r_r

    lo, hi = 0.0, lam_r1
    if mi_gap(hi) < 0.0:
        for _ in range(options.max_bisect):
            lo, hi = hi, hi * 2.0
            if mi_gap(hi) >= 0.0:
                break
        else:
            raise SolverError("failed to bracket the sensing multiplier")
    lam_r = brentq(mi_gap, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=options.max_bisect)
    lam_c = lambda_c_for(lam_r)
    gamma = _gamma_profile(lam_r, lam_c, v, w, tau2, df)
    duals = DualPair(lam_r, lam_c)
    res = _kkt_residual(duals, gamma, mi(gamma), rate(gamma), r_r, r_c)
    if res > 1e3 * options.dual_tol:
        raise SolverError(f"inner allocation did not converge (residual {res:.3e})")
    active = "both" if lam_c > 0.0 else "mi"
    return InnerResult(gamma, duals, res, active)


def _kkt_residual(
    duals: DualPair, gamma: np.ndarray, mi: float, rate: float, r_r: float, r_c: float
) -> float:
    """Normalized primal-feasibility plus complementary-slackness residual."""
    nr = (mi - r_r) / max(1.0, r_r)
    nc = (rate - r_c) / max(1.0, r_c)
    res = max(-nr, -nc, 0.0)
    if duals.lambda_r > 0.0:
        res = max(res, abs(nr))
    if duals.lambda_c > 0.0:
        res = max(res, abs(nc))
    return res


def inner_dual_value(
    duals: DualPair,
    tau2: float,
    chan: ChannelRealization,
    params: SystemParams,
) -> tuple[float, tuple[float, float]]:
    """Dual function of the inner allocation and its gradient.

    The gradient with respect to the two multipliers is the pair of
    constraint gaps ``(mi_floor - MI, rate_floor - rate)`` evaluated at
    the minimizing profile.
    """
    gamma = _gamma_profile(
        duals.lambda_r, duals.lambda_c, chan.radar_snr, chan.comm_snr, tau2, params.delta_f
    )
    mi = radar_mi(gamma, chan.radar_snr, tau2, params.delta_f)
    rate = comm_rate(gamma, chan.comm_snr, tau2, params.delta_f)
    value = (
        float(np.sum(gamma))
        + duals.lambda_r * (params.mi_floor - mi)
        + duals.lambda_c * (params.rate_floor - rate)
    )
    return value, (params.mi_floor - mi, params.rate_floor - rate)


def mrt_covariance(
    h: np.ndarray, total_irc_energy: float, eta: float
) -> tuple[np.ndarray, float]:
    """Minimum-trace covariance delivering a required harvest.

    The rank-one matrix ``S / (eta ||h||^4) * h h^H`` meets the harvest
    demand with equality and minimizes the trace: any feasible covariance
    satisfies ``trace(h h^H Q) <= ||h||^2 trace(Q)``.
    """
    h = np.asarray(h, dtype=complex)
    s = float(total_irc_energy)
    if s < 0:
        raise ValueError("energy demand must be nonnegative")
    nt = h.size
    if s == 0.0:
        return np.zeros((nt, nt), dtype=complex), 0.0
    hn2 = float(np.real(np.vdot(h, h)))
    if hn2 == 0.0 or eta <= 0.0:
        raise InfeasibleSignalError("positive demand with no harvestable channel")
    q = (s / (eta * hn2 * hn2)) * np.outer(h, h.conj())
    q = 0.5 * (q + q.conj().T)
    return q, s / (eta * hn2)


def _largest_phi_root(
    phi: Callable[[float], float],
    total_time: float,
    options: SolverOptions,
) -> Optional[float]:
    """Largest root of the convex feasibility function on (0, T).

    Returns None when ``phi`` is positive on the whole interval.  A
    golden-section descent locates a nonpositive point (early exit on the
    first one found); bisection then walks to the rightmost root.
    """
    t_hi = total_time * (1.0 - 1e-9)
    if phi(t_hi) <= 0.0:
        lo, up = t_hi, total_time  # phi(T) > 0 whenever demand is positive
    else:
        lo = _find_nonpositive(phi, total_time * 1e-12, t_hi, options)
        if lo is None:
            return None
        up = t_hi
    xtol = options.time_tol * total_time
    root = brentq(phi, lo, up, xtol=xtol, rtol=1e-15, maxiter=options.max_bisect)
    # step back to the feasible (nonpositive) side of the root if needed
    for _ in range(options.max_bisect):
        if phi(root) <= 0.0:
            return root
        root -= xtol
    raise SolverError("failed to land on the feasible side of the time split")


def _find_nonpositive(
    phi: Callable[[float], float], a: float, b: float, options: SolverOptions
) -> Optional[float]:
    """Golden-section search for any point with phi <= 0 on [a, b]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = phi(c), phi(d)
    for _ in range(options.max_bisect):
        if fc <= 0.0:
            return c
        if fd <= 0.0:
            return d
        if b - a <= options.time_tol * max(b, 1e-300):
            return None
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = phi(d)
    return None


def solve_with_allocation(
    params: SystemParams,
    chan: ChannelRealization,
    allocator: Callable[[float], np.ndarray],
    options: SolverOptions = DEFAULT_OPTIONS,
) -> Solution:
    """Outer time-split search shared by the optimal and benchmark schemes.

    ``allocator(tau2)`` returns the cheapest per-subcarrier energy profile
    that the scheme allows at that transmit-slot length.  The optimal slot
    is the largest root of ``phi(tau2) = sum(gamma) - eta ||h||^2 P (T -
    tau2)``; at that point the harvest constraint is met with equality by
    the maximum-ratio covariance.
    """
    from .certify import rank_one_extract

    _validate_instance(params, chan)
    if params.mi_floor == 0.0 and params.rate_floor == 0.0:
        return Solution.empty(SolveStatus.ZERO_DEMAND, params)

    h = chan.h
    hn2 = float(np.real(np.vdot(h, h)))
    budget_rate = params.efficiency * hn2 * params.power_cap
    if budget_rate == 0.0:
        return Solution.empty(SolveStatus.INFEASIBLE, params)

    total_time = params.total_time
    cache: dict[float, float] = {}

    def demand(t2: float) -> float:
        if t2 not in cache:
            cache[t2] = float(np.sum(allocator(t2)))
        return cache[t2]

    def phi(t2: float) -> float:
        return demand(t2) - budget_rate * (total_time - t2)

    tau2 = _largest_phi_root(phi, total_time, options)
    if tau2 is None:
        return Solution.empty(SolveStatus.INFEASIBLE, params)

    tau1 = total_time - tau2
    gamma = allocator(tau2)
    total = float(np.sum(gamma))
    q_bar, trace = mrt_covariance(h, total, params.efficiency)
    beam = rank_one_extract(q_bar, tau1)
    return Solution(
        status=SolveStatus.OPTIMAL,
        beam_vector=beam,
        tau1=tau1,
        tau2=tau2,
        gamma=gamma,
        energy=trace,
        covariance_bar=q_bar,
    )


def solve(
    params: SystemParams,
    chan: ChannelRealization,
    options: SolverOptions = DEFAULT_OPTIONS,
) -> Solution:
    """Jointly optimal time split, subcarrier energies and beamformer."""

    def allocator(t2: float) -> np.ndarray:
        return inner_allocation(t2, chan, params, options).gamma

    return solve_with_allocation(params, chan, allocator, options)


def _validate_instance(params: SystemParams, chan: ChannelRealization) -> None:
    if chan.h.size != params.n_antennas:
        raise ValueError("channel vector length does not match n_antennas")
    if chan.n_subcarriers != params.n_subcarriers:
        raise ValueError("SNR vector length does not match n_subcarriers")

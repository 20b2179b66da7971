"""Equal-power benchmark scheme and feasibility-frontier probe."""
from __future__ import annotations

from dataclasses import replace

import numpy as np
from scipy.optimize import brentq

from .model import ChannelRealization, Solution, SolveStatus, SystemParams, comm_rate, radar_mi
from .solver import (
    DEFAULT_OPTIONS,
    SolverError,
    SolverOptions,
    solve,
    solve_with_allocation,
)

__all__ = ["eq_solve", "feasibility_frontier"]


def _common_gamma(
    snr: np.ndarray, floor: float, tau2: float, delta_f: float, half: bool, max_iter: int
) -> float:
    """Smallest common per-subcarrier energy meeting one rate floor."""
    if floor <= 0.0:
        return 0.0
    if not np.any(snr > 0):
        raise SolverError("rate floor demanded over an all-zero SNR vector")
    rate_fn = radar_mi if half else comm_rate

    def gap(g: float) -> float:
        return rate_fn(np.full(snr.size, g), snr, tau2, delta_f) - floor

    hi = tau2
    for _ in range(max_iter):
        if gap(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise SolverError("failed to bracket the equal-power level")
    return brentq(gap, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=max_iter)


def eq_solve(
    params: SystemParams,
    chan: ChannelRealization,
    options: SolverOptions = DEFAULT_OPTIONS,
) -> Solution:
    """Solve the restriction with equal energy on every subcarrier.

    Only the power profile is restricted; the time split and the
    beamformer are optimized exactly as in :func:`wpirc.solver.solve`.
    """

    def allocator(tau2: float) -> np.ndarray:
        g_r = _common_gamma(
            chan.radar_snr, params.mi_floor, tau2, params.delta_f, True, options.max_bisect
        )
        g_c = _common_gamma(
            chan.comm_snr, params.rate_floor, tau2, params.delta_f, False, options.max_bisect
        )
        return np.full(params.n_subcarriers, max(g_r, g_c))

    return solve_with_allocation(params, chan, allocator, options)


def feasibility_frontier(
    params: SystemParams,
    chan: ChannelRealization,
    target: str,
    scheme: str = "op",
    tol_bits: float = 0.1,
    options: SolverOptions = DEFAULT_OPTIONS,
) -> float:
    """Largest rate/MI floor (bits) that keeps the instance feasible.

    ``target`` selects which floor is swept ("mi" or "rate"); the other
    floor is left at its configured value.  Found by doubling then
    bisecting on the solver's feasibility status.
    """
    if target not in ("mi", "rate"):
        raise ValueError("target must be 'mi' or 'rate'")
    if scheme not in ("op", "eq"):
        raise ValueError("scheme must be 'op' or 'eq'")
    solve_fn = solve if scheme == "op" else eq_solve
    floor_field = "mi_floor" if target == "mi" else "rate_floor"

    def feasible(r: float) -> bool:
        trial = replace(params, **{floor_field: r})
        return solve_fn(trial, chan, options).status is not SolveStatus.INFEASIBLE

    if not feasible(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(options.max_bisect):
        if not feasible(hi):
            break
        lo, hi = hi, hi * 2.0
    else:
        raise SolverError("feasibility frontier exceeds the search cap")
    while hi - lo > tol_bits:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo

"""Sequential rank-one constraint relaxation (SROCR).

After the semidefinite relaxation is solved, the rank-one constraint is
restored gradually: each round adds the alignment constraint
``q^H X q >= w * tr(X)`` with ``q`` the principal eigenvector of the previous
round's solution, and re-solves while pushing ``w`` toward 1.  A Gaussian
randomization fallback guarantees a feasible vector even when the schedule
stalls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sdp
from .sdp import SdpProblem, SdpSolution


class SrocrError(ValueError):
    pass


@dataclass(frozen=True)
class SrocrParams:
    w_init: float | None = None   # None: start at the achieved lambda1/tr
    delta_init: float = 0.1
    rank_tol: float = 0.999
    max_outer: int = 30
    shrink: float = 0.5
    n_randomizations: int = 200

    def __post_init__(self):
        if self.w_init is not None and not (0.0 <= self.w_init < 1.0):
            raise SrocrError(f"w_init must be in [0, 1), got {self.w_init}")
        if self.delta_init <= 0:
            raise SrocrError(f"delta_init must be > 0, got {self.delta_init}")
        if not (0.9 < self.rank_tol <= 1.0):
            raise SrocrError(f"rank_tol must be in (0.9, 1], got {self.rank_tol}")
        if not (0.0 < self.shrink < 1.0):
            raise SrocrError(f"shrink must be in (0, 1), got {self.shrink}")


@dataclass
class RankOneResult:
    x: np.ndarray
    vector: np.ndarray
    ratio: float
    iterations: int
    feasible: bool
    objective: float


def rank_one_ratio(x: np.ndarray) -> float:
    """lambda_1 / tr as a rank-one progress measure, in [1/n, 1]."""
    tr = float(np.trace(x).real)
    if tr <= 0:
        raise SrocrError(f"trace must be > 0, got {tr}")
    lam, _ = sdp.principal_eigpair(x)
    return min(lam / tr, 1.0)


def _align_direction(x: np.ndarray, unit_modulus: bool) -> np.ndarray:
    """Eigenvector-based alignment direction for the next tightening round.

    For unit-modulus problems the raw eigenvector can have a (near) zero
    entry, e.g. the homogenizing entry when the direct link is attenuated
    away; aligning with it caps lambda_1 strictly below tr(X) and stalls
    the schedule.  Projecting every entry onto equal modulus keeps full
    alignment achievable by a feasible rank-one point.
    """
    _, q = sdp.principal_eigpair(x)
    if not unit_modulus:
        return q
    n = q.size
    mod = np.abs(q)
    unit = np.where(mod > 1e-12, q / np.maximum(mod, 1e-300), 1.0)
    return unit / np.sqrt(n)


def refine(problem: SdpProblem, relaxed: SdpSolution,
           params: SrocrParams = SrocrParams(),
           tol: float = 1e-7, unit_modulus: bool = False) -> RankOneResult:
    """Tighten the relaxed solution toward rank one."""
    if relaxed.status != "optimal":
        raise SrocrError(f"relaxed solution status is {relaxed.status}")

    x = relaxed.x
    ratio = rank_one_ratio(x)
    if ratio >= params.rank_tol:
        lam, q = sdp.principal_eigpair(x)
        return RankOneResult(x=x, vector=np.sqrt(max(lam, 0.0)) * q,
                             ratio=ratio, iterations=0, feasible=True,
                             objective=relaxed.objective)

    w = params.w_init if params.w_init is not None else ratio
    delta = params.delta_init
    best = (x, ratio, relaxed.objective)
    n = problem.dim
    iterations = 0
    while iterations < params.max_outer:
        iterations += 1
        q = _align_direction(best[0], unit_modulus)
        w_try = min(1.0, w + delta)
        # q^H X q >= w * tr(X)  <=>  tr((q q^H - w I) X) >= 0
        aligned = problem.with_constraint(
            np.outer(q, q.conj()) - w_try * np.eye(n), ">=", 0.0)
        sol = sdp.solve(aligned, tol=tol)
        if sol.status != "optimal":
            delta *= params.shrink
            if delta < 1e-6:
                break
            continue
        w = w_try
        ratio = rank_one_ratio(sol.x)
        best = (sol.x, ratio, sol.objective)
        if ratio >= params.rank_tol or w >= 1.0:
            break

    x, ratio, objective = best
    lam, q = sdp.principal_eigpair(x)
    feasible = ratio >= params.rank_tol
    return RankOneResult(x=x, vector=np.sqrt(max(lam, 0.0)) * q, ratio=ratio,
                         iterations=iterations, feasible=feasible,
                         objective=objective)


def extract_vector(result: RankOneResult, target: str) -> np.ndarray:
    """Turn an effectively rank-one X into the design vector.

    ``beamformer``: sqrt(lambda_1) q_1.  ``phases``: the homogenized vector
    rotated so its last entry is exactly 1; callers take entrywise angles.
    """
    if not result.feasible:
        raise SrocrError("solution not rank-one; use the randomization fallback")
    if target == "beamformer":
        return result.vector
    if target == "phases":
        return _anchor_last(result.vector)
    raise SrocrError(f"unknown target {target!r}")


def _anchor_last(vec: np.ndarray) -> np.ndarray:
    last = vec[-1]
    if abs(last) < 1e-12:
        raise SrocrError("homogenizing entry is numerically zero")
    return vec * (abs(last) / last) / abs(last)


def randomize_phases(problem: SdpProblem, relaxed_x: np.ndarray,
                     rng: np.random.Generator,
                     n_draws: int = 200) -> np.ndarray:
    """Gaussian randomization fallback for the unit-modulus problem.

    Draws candidates from CN(0, X), projects every entry to unit modulus,
    and keeps the best feasible candidate under the problem objective.  If
    no draw is feasible, returns the least-violating candidate instead:
    phases are always unit-modulus, and the caller repairs any residual
    interference overshoot by scaling the beamformer down.
    """
    n = problem.dim
    x_psd = 0.5 * (relaxed_x + relaxed_x.conj().T)
    vals, vecs = np.linalg.eigh(x_psd)
    root = vecs * np.sqrt(np.maximum(vals, 0.0))
    best_val, best_vec = -np.inf, None
    least_viol, least_vec = np.inf, None
    _, q = sdp.principal_eigpair(x_psd)
    candidates = [q]
    g = (rng.standard_normal((n_draws, n))
         + 1j * rng.standard_normal((n_draws, n))) / np.sqrt(2.0)
    candidates.extend(g @ root.conj().T)
    for cand in candidates:
        mod = np.abs(cand)
        if np.any(mod < 1e-15):
            continue
        unit = cand / mod
        xx = np.outer(unit, unit.conj())
        viol = problem.constraint_violation(xx)
        if viol > 1e-8:
            if viol < least_viol:
                least_viol, least_vec = viol, unit
            continue
        val = float(np.tensordot(problem.c.conj(), xx).real)
        if val > best_val:
            best_val, best_vec = val, unit
    if best_vec is None:
        best_vec = least_vec
    if best_vec is None:
        raise SrocrError("randomization produced no usable candidate")
    return _anchor_last(best_vec)

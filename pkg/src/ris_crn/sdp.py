"""Dense semidefinite programming over small Hermitian matrices.

Solves  maximize tr(C X)  s.t.  tr(A_i X) {<=,=,>=} b_i,  X >= 0 (PSD)
with a primal-dual path-following interior-point method (Mehrotra
predictor-corrector, HKM direction) run directly in complex Hermitian
arithmetic.  Problem dimensions here stay below ~70, so everything is dense.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

HERM_TOL = 1e-12


class SdpError(ValueError):
    pass


def check_hermitian(mat: np.ndarray, name: str = "matrix") -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise SdpError(f"{name} must be square, got shape {mat.shape}")
    scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
    if np.abs(mat - mat.conj().T).max(initial=0.0) > HERM_TOL * scale:
        raise SdpError(f"{name} is not Hermitian")
    return 0.5 * (mat + mat.conj().T)


def hermitian_to_real(c: np.ndarray) -> np.ndarray:
    """Standard [[Re, -Im], [Im, Re]] embedding of a Hermitian matrix.

    The embedding is linear, maps PSD to PSD, duplicates every eigenvalue,
    and satisfies tr(C X) = 0.5 * tr(embed(C) embed(X)).
    """
    c = check_hermitian(c, "embedding input")
    re, im = c.real, c.imag
    return np.block([[re, -im], [im, re]])


@dataclass(frozen=True)
class SdpConstraint:
    a: np.ndarray       # Hermitian coefficient matrix
    relation: str       # one of "<=", "=", ">="
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", check_hermitian(self.a, "constraint matrix"))
        if self.relation not in ("<=", "=", ">="):
            raise SdpError(f"unknown relation {self.relation!r}")
        if not np.isfinite(self.b):
            raise SdpError("constraint bound must be finite")


@dataclass(frozen=True)
class SdpProblem:
    """maximize tr(C X) subject to the listed trace constraints and X PSD."""
    c: np.ndarray
    constraints: list[SdpConstraint] = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "c", check_hermitian(self.c, "objective"))
        n = self.c.shape[0]
        for con in self.constraints:
            if con.a.shape != (n, n):
                raise SdpError(f"constraint matrix shape {con.a.shape} does "
                               f"not match objective dimension {n}")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def with_constraint(self, a, relation, b) -> "SdpProblem":
        return SdpProblem(self.c,
                          list(self.constraints) + [SdpConstraint(a, relation, b)])

    def constraint_violation(self, x: np.ndarray) -> float:
        """Worst relative violation of the trace constraints at X = x."""
        worst = 0.0
        for con in self.constraints:
            val = float(np.tensordot(con.a.conj(), x).real)
            scale = 1.0 + abs(con.b)
            if con.relation == "<=":
                worst = max(worst, (val - con.b) / scale)
            elif con.relation == ">=":
                worst = max(worst, (con.b - val) / scale)
            else:
                worst = max(worst, abs(val - con.b) / scale)
        return worst

    def to_json(self) -> str:
        def dump(m):
            return {"re": np.asarray(m).real.tolist(),
                    "im": np.asarray(m).imag.tolist()}
        return json.dumps({
            "objective": dump(self.c),
            "constraints": [{"a": dump(c.a), "relation": c.relation,
                             "b": c.b} for c in self.constraints],
        })

    @staticmethod
    def from_json(text: str) -> "SdpProblem":
        doc = json.loads(text)

        def load(m):
            return np.array(m["re"]) + 1j * np.array(m["im"])
        return SdpProblem(load(doc["objective"]),
                          [SdpConstraint(load(c["a"]), c["relation"], c["b"])
                           for c in doc["constraints"]])


@dataclass
class SdpSolution:
    x: np.ndarray
    objective: float
    status: str  # optimal | infeasible | max-iterations | numerical-failure
    iterations: int
    primal_residual: float
    dual_residual: float
    gap: float


def principal_eigpair(x: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and unit eigenvector, canonical global phase."""
    x = check_hermitian(x, "eigpair input")
    vals, vecs = np.linalg.eigh(x)
    lam = float(vals[-1])
    q = vecs[:, -1]
    # rotate so the first entry of non-negligible modulus has phase 0
    idx = np.flatnonzero(np.abs(q) > 1e-12 * np.abs(q).max())
    if idx.size:
        pivot = q[idx[0]]
        q = q * (abs(pivot) / pivot)
    return lam, q


def _chol_inverse(mat: np.ndarray):
    """Inverse of the lower Cholesky factor, or None if not PD."""
    try:
        ell = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        return None
    linv, info = sla.lapack.ztrtri(ell, lower=1)
    if info != 0:
        return None
    return np.tril(linv)


def _max_step_factored(linv: np.ndarray, dmat: np.ndarray) -> float:
    """Largest alpha with mat + alpha*dmat PSD, mat = (linv^-1)(linv^-1)^H."""
    w = linv @ dmat @ linv.conj().T
    lam_min = float(np.linalg.eigvalsh(0.5 * (w + w.conj().T))[0])
    if lam_min >= 0:
        return np.inf
    return -1.0 / lam_min


def solve(problem: SdpProblem, tol: float = 1e-7,
          max_iters: int = 100) -> SdpSolution:
    """Interior-point solve; deterministic for fixed inputs."""
    n = problem.dim
    m = len(problem.constraints)
    if m == 0:
        raise SdpError("problem needs at least one constraint bounding X")

    # normalize: flip >= to <=, scale objective and constraints to unit size
    c_scale = max(float(np.linalg.norm(problem.c)), 1e-30)
    cmat = problem.c / c_scale
    amats = np.empty((m, n, n), dtype=complex)
    bvec = np.empty(m)
    ineq = np.empty(m, dtype=bool)
    row_scale = np.empty(m)
    for i, con in enumerate(problem.constraints):
        sgn = -1.0 if con.relation == ">=" else 1.0
        sc = max(float(np.linalg.norm(con.a)), abs(con.b), 1e-30)
        amats[i] = sgn * con.a / sc
        bvec[i] = sgn * con.b / sc
        ineq[i] = con.relation != "="
        row_scale[i] = sc
    k = int(ineq.sum())
    aconj_flat = amats.conj().reshape(m, n * n)
    a_flat = amats.reshape(m, n * n)

    def opA(xmat):  # <A_i, X> for all i
        return (aconj_flat @ xmat.ravel()).real

    def opAt(yvec):  # sum_i y_i A_i
        return (yvec @ a_flat).reshape(n, n)

    ident = np.eye(n)
    tau = max(1.0, float(np.abs(bvec).max(initial=1.0)))
    x = tau * ident.astype(complex)
    z = max(1.0, float(np.linalg.norm(cmat))) * ident.astype(complex)
    y = np.zeros(m)
    y[ineq] = 1.0
    s = np.zeros(m)
    s[ineq] = tau

    b_norm = 1.0 + float(np.linalg.norm(bvec))
    c_norm = 1.0 + float(np.linalg.norm(cmat))
    status = "max-iterations"
    iters = 0

    for iters in range(1, max_iters + 1):
        rp = bvec - opA(x) - s                     # primal residual
        rd = cmat - opAt(y) + z                    # dual residual (Hermitian)
        mu = (float(np.tensordot(x.conj(), z).real) + float(s @ y)) / (n + max(k, 1))
        pobj = float(np.tensordot(cmat.conj(), x).real)
        dobj = float(bvec @ y)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        pres = float(np.linalg.norm(rp)) / b_norm
        dres = float(np.linalg.norm(rd)) / c_norm

        if pres <= tol and dres <= tol and gap <= tol:
            status = "optimal"
            break
        if (dobj < -1e9 * b_norm or np.linalg.norm(y) > 1e10) and pres > tol:
            status = "infeasible"
            break
        if not np.isfinite(mu) or mu < 0:
            status = "numerical-failure"
            break

        linv_x = _chol_inverse(x)
        linv_z = _chol_inverse(z)
        if linv_x is None or linv_z is None:
            status = "numerical-failure"
            break
        zinv = linv_z.conj().T @ linv_z
        zinv = 0.5 * (zinv + zinv.conj().T)

        # Schur complement M_ij = <A_i, X A_j Zinv> (+ s_i/y_i on the diagonal)
        t = x @ amats @ zinv                       # (m, n, n)
        big_m = (aconj_flat @ t.reshape(m, n * n).T).real
        diag = np.zeros(m)
        diag[ineq] = s[ineq] / y[ineq]
        big_m = big_m + np.diag(diag)
        xrdzi = x @ rd @ zinv
        base = (aconj_flat @ xrdzi.ravel()).real - bvec
        tr_a_zinv = (aconj_flat @ zinv.ravel()).real
        inv_y = np.zeros(m)
        inv_y[ineq] = 1.0 / y[ineq]

        try:
            lu = sla.lu_factor(big_m, check_finite=False)
        except (ValueError, np.linalg.LinAlgError):
            status = "numerical-failure"
            break

        def direction(sigma_mu, corr_sdp=None, corr_lp=None):
            rhs = base + sigma_mu * (tr_a_zinv + inv_y)
            if corr_lp is not None:
                rhs = rhs - corr_lp * inv_y
            corr_term = None
            if corr_sdp is not None:
                corr_term = corr_sdp @ zinv
                rhs = rhs - (aconj_flat @ corr_term.ravel()).real
            dy = sla.lu_solve(lu, rhs, check_finite=False)
            dz = opAt(dy) - rd
            dz = 0.5 * (dz + dz.conj().T)
            dx = sigma_mu * zinv - x - x @ dz @ zinv
            if corr_term is not None:
                dx = dx - corr_term
            dx = 0.5 * (dx + dx.conj().T)
            ds = np.zeros(m)
            if k:
                ds[ineq] = rp[ineq] - (aconj_flat[ineq] @ dx.ravel()).real
            return dx, dy, dz, ds

        def vec_step(vals, dvals):
            mask = ineq & (dvals < 0)
            if not mask.any():
                return np.inf
            return float(np.min(-vals[mask] / dvals[mask]))

        def step_lengths(dx, dy, dz, ds):
            ap = min(_max_step_factored(linv_x, dx), vec_step(s, ds))
            ad = min(_max_step_factored(linv_z, dz), vec_step(y, dy))
            return min(1.0, 0.98 * ap), min(1.0, 0.98 * ad)

        # predictor
        dx_a, dy_a, dz_a, ds_a = direction(0.0)
        ap, ad = step_lengths(dx_a, dy_a, dz_a, ds_a)
        mu_aff = (float(np.tensordot((x + ap * dx_a).conj(),
                                     z + ad * dz_a).real)
                  + float((s + ap * ds_a) @ (y + ad * dy_a))) / (n + max(k, 1))
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        # corrector
        dx, dy, dz, ds = direction(sigma * mu, corr_sdp=dx_a @ dz_a,
                                   corr_lp=dy_a * ds_a)
        ap, ad = step_lengths(dx, dy, dz, ds)
        if ap <= 1e-14 and ad <= 1e-14:
            status = "numerical-failure"
            break
        x = x + ap * dx
        s = s + ap * ds
        y = y + ad * dy
        z = z + ad * dz
        s[ineq] = np.maximum(s[ineq], 1e-300)
        y[ineq] = np.maximum(y[ineq], 1e-300)

    x_out = 0.5 * (x + x.conj().T)
    objective = float(np.tensordot(problem.c.conj(), x_out).real)
    rp = bvec - opA(x) - s
    rd = cmat - opAt(y) + z
    pobj = float(np.tensordot(cmat.conj(), x).real)
    dobj = float(bvec @ y)
    return SdpSolution(
        x=x_out,
        objective=objective,
        status=status,
        iterations=iters,
        primal_residual=float(np.linalg.norm(rp)) / b_norm,
        dual_residual=float(np.linalg.norm(rd)) / c_norm,
        gap=abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj)),
    )

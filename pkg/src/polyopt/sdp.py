"""Dense primal-dual interior-point solver for block semidefinite programs.

Problem form (the moment side is the primal)::

    minimize    c'x
    subject to  S_k = h_k - G_k(x)  is PSD for every block k
                A x = b

    maximize    -<h, Z> - b'y
    subject to  G'(Z) + A'y + c = 0,  Z_k PSD

``G_k(x) = sum_i x_i G_{k,i}`` with symmetric ``G_{k,i}``.  The iteration runs
on the homogeneous self-dual embedding (extra scalars tau, kappa), so
infeasibility shows up as tau -> 0 with a certificate, and uses the HKM
search direction with Mehrotra's predictor-corrector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
PRIMAL_INFEASIBLE = "primal-infeasible"
DUAL_UNBOUNDED = "dual-unbounded"
MAX_ITERATIONS = "max-iterations"
NUMERICAL_FAILURE = "numerical-failure"

STALL_ITERATIONS = 8


@dataclass
class SolverOptions:
    gap_tol: float = 1e-9
    feas_tol: float = 1e-9
    max_iter: int = 200
    step: float = 0.98
    infeas_tol: float = 1e-8
    verbose: bool = False


@dataclass
class SDPData:
    """Blocks are stored as dense arrays: ``G[k]`` has shape (n, n_k, n_k)."""

    c: np.ndarray
    G: list[np.ndarray]
    h: list[np.ndarray]
    A: np.ndarray
    b: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        self.G = [np.asarray(g, dtype=float).reshape(n, *np.shape(hk))
                  for g, hk in zip(self.G, self.h)]
        self.h = [np.asarray(hk, dtype=float) for hk in self.h]
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if self.A.shape[0] != self.b.size:
            raise ValueError("A and b disagree on the number of equality rows")
        for g, hk in zip(self.G, self.h):
            if hk.shape[0] != hk.shape[1] or g.shape[1:] != hk.shape:
                raise ValueError("block shape mismatch")

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def block_sizes(self) -> list[int]:
        return [hk.shape[0] for hk in self.h]

    def slack(self, x: np.ndarray) -> list[np.ndarray]:
        return [hk - np.tensordot(x, g, axes=1) for g, hk in zip(self.G, self.h)]

    def adjoint(self, Z: list[np.ndarray]) -> np.ndarray:
        """G'(Z): the vector of <G_{k,i}, Z_k> summed over blocks."""
        out = np.zeros(self.n)
        for g, zk in zip(self.G, Z):
            out += g.reshape(self.n, -1) @ zk.ravel()
        return out


@dataclass
class SDPSolution:
    status: str
    x: np.ndarray
    y: np.ndarray
    Z: list[np.ndarray]
    S: list[np.ndarray]
    primal_objective: float
    dual_objective: float
    iterations: int
    gap: float
    primal_residual: float
    dual_residual: float
    certificate: dict = field(default_factory=dict)
    history: list[dict] = field(default_factory=list)
    accuracy: float = np.inf
    moments: object = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL

    def near_optimal(self, tol: float = 1e-6) -> bool:
        """Optimal, or stopped early at an iterate whose relative residuals and gap are below ``tol``."""
        if self.status == OPTIMAL:
            return True
        return self.status in (NUMERICAL_FAILURE, MAX_ITERATIONS) and self.accuracy <= tol


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.swapaxes(-1, -2))


def _inner(U: list[np.ndarray], V: list[np.ndarray]) -> float:
    return float(sum(np.vdot(u, v) for u, v in zip(U, V)))


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha with X + alpha dX PSD (X positive definite)."""
    if X.shape[0] == 0:
        return np.inf
    L = np.linalg.cholesky(X)
    W = sla.solve_triangular(L, dX, lower=True)
    W = sla.solve_triangular(L, W.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(W))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _independent_rows(A: np.ndarray, b: np.ndarray, tol: float = 1e-10):
    """Drop linearly dependent equality rows; report inconsistency."""
    if A.shape[0] == 0:
        return A, b, np.arange(0), None
    scale = np.maximum(np.linalg.norm(A, axis=1), 1e-300)
    An = A / scale[:, None]
    bn = b / scale
    _, R, piv = sla.qr(An.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > tol * max(diag[0], 1.0))) if diag.size else 0
    keep = np.sort(piv[:rank])
    # consistency: every row must be a combination of kept rows with matching b
    if rank < A.shape[0]:
        coef, *_ = np.linalg.lstsq(An[keep].T, An.T, rcond=None)
        mismatch = coef.T @ bn[keep] - bn
        bad = np.abs(mismatch) > 1e-8 * (1 + np.abs(bn))
        if np.any(bad):
            r = int(np.flatnonzero(bad)[0])
            w = np.zeros(A.shape[0])
            w[keep] = coef[:, r] / scale[keep]
            w[r] = -1.0 / scale[r]
            return A[keep], b[keep], keep, w
    return A[keep], b[keep], keep, None


class _KKTSolver:
    """Factorisation of [[M, A'], [A, 0]] with M the HKM Schur complement."""

    def __init__(self, M: np.ndarray, A: np.ndarray):
        n = M.shape[0]
        self.A = A
        reg = 0.0
        diag_scale = max(np.max(np.abs(np.diag(M))), 1.0)
        for attempt in range(6):
            try:
                self.L = sla.cho_factor(M + reg * diag_scale * np.eye(n), lower=True)
                break
            except np.linalg.LinAlgError:
                reg = 1e-14 if reg == 0 else reg * 100
        else:
            raise np.linalg.LinAlgError("Schur complement is not positive definite")
        self.reg = reg
        if A.shape[0]:
            self.MiAt = sla.cho_solve(self.L, A.T)
            S = A @ self.MiAt
            S = _sym(S)
            try:
                self.Ls = sla.cho_factor(S, lower=True)
                self.Ls_lu = None
            except np.linalg.LinAlgError:
                self.Ls = None
                self.Ls_lu = sla.lu_factor(S)

    def solve(self, r1: np.ndarray, r2: np.ndarray, Mop=None, rounds: int = 3):
        """Solve the KKT system; with ``Mop`` the result is iteratively refined.

        ``Mop`` applies the exact Schur operator; refinement against it keeps
        the dual residual consistent when the explicit matrix is inaccurate.
        """
        dx, dy = self._solve(r1, r2)
        if Mop is None:
            return dx, dy
        base = np.linalg.norm(r1) + np.linalg.norm(r2)
        for _ in range(rounds):
            e1 = r1 - Mop(dx) - self.A.T @ dy
            e2 = r2 - self.A @ dx
            err = np.linalg.norm(e1) + np.linalg.norm(e2)
            if err <= 1e-15 * max(base, 1e-300):
                break
            cx, cy = self._solve(e1, e2)
            dx = dx + cx
            dy = dy + cy
        return dx, dy

    def _solve(self, r1: np.ndarray, r2: np.ndarray):
        Mi_r1 = sla.cho_solve(self.L, r1)
        if self.A.shape[0] == 0:
            return Mi_r1, np.zeros(0)
        rhs = self.A @ Mi_r1 - r2
        dy = sla.cho_solve(self.Ls, rhs) if self.Ls is not None else sla.lu_solve(self.Ls_lu, rhs)
        dx = Mi_r1 - self.MiAt @ dy
        return dx, dy


def solve_sdp(data: SDPData, opts: SolverOptions | None = None) -> SDPSolution:
    """Solve the block SDP; see the module docstring for the problem form."""
    opts = opts or SolverOptions()
    n = data.n
    c, G, h = data.c, data.G, data.h
    A_full, b_full = data.A, data.b
    A, b, keep, lin_cert = _independent_rows(A_full, b_full)
    if lin_cert is not None:
        # rows of A x = b are inconsistent: w'A = 0, w'b != 0
        return _linear_infeasible(data, lin_cert)

    p = A.shape[0]
    sizes = data.block_sizes
    N = sum(sizes)
    Gflat = [g.reshape(n, -1) for g in G]
    nc = max(1.0, np.linalg.norm(c))
    nh = max(1.0, np.sqrt(sum(np.sum(hk * hk) for hk in h)))
    nb = max(1.0, np.linalg.norm(b))

    def Gop(x):
        return [np.tensordot(x, g, axes=1) for g in G]

    def Gadj(Z):
        out = np.zeros(n)
        for gf, zk in zip(Gflat, Z):
            out += gf @ zk.ravel()
        return out

    x = np.zeros(n)
    y = np.zeros(p)
    S = [np.eye(k) for k in sizes]
    Z = [np.eye(k) for k in sizes]
    tau, kappa = 1.0, 1.0

    history: list[dict] = []
    status = MAX_ITERATIONS
    best = None
    it = 0
    for it in range(opts.max_iter + 1):
        Gx = Gop(x)
        rx = A.T @ y + Gadj(Z) + c * tau
        ry = b * tau - A @ x
        rz = [sk + gx - hk * tau for sk, gx, hk in zip(S, Gx, h)]
        hz = _inner(h, Z)
        rt = kappa + c @ x + b @ y + hz
        sz = _inner(S, Z)
        mu = (sz + tau * kappa) / (N + 1)

        pobj = (c @ x) / tau
        dobj = -(hz + b @ y) / tau
        pres = max(np.linalg.norm(ry) / tau / nb,
                   np.sqrt(sum(np.sum(r * r) for r in rz)) / tau / nh)
        dres = np.linalg.norm(rx) / tau / nc
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj))
        history.append(dict(iter=it, pobj=pobj, dobj=dobj, pres=pres, dres=dres, gap=relgap,
                            mu=mu, tau=tau, kappa=kappa))
        if opts.verbose:
            log.info("it %3d pobj % .10e dobj % .10e pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e",
                     it, pobj, dobj, pres, dres, relgap, tau, kappa)
        score = max(pres, dres, relgap)
        if best is None or score < best[0]:
            best = (score, x.copy(), y.copy(), [s.copy() for s in S], [z.copy() for z in Z], tau, kappa, it)

        if pres <= opts.feas_tol and dres <= opts.feas_tol and relgap <= opts.gap_tol:
            status = OPTIMAL
            break
        # infeasibility certificates
        by_hz = b @ y + hz
        if by_hz < 0:
            pinf = np.linalg.norm(A.T @ y + Gadj(Z)) / nc / (-by_hz)
            if pinf <= opts.infeas_tol and tau <= 1e-3 * kappa:
                status = PRIMAL_INFEASIBLE
                break
        cx = c @ x
        if cx < 0:
            dinf = max(np.linalg.norm(A @ x) / nb,
                       np.sqrt(sum(np.sum((sk + gx) ** 2) for sk, gx in zip(S, Gx))) / nh) / (-cx)
            if dinf <= opts.infeas_tol and tau <= 1e-3 * kappa:
                status = DUAL_UNBOUNDED
                break
        if it == opts.max_iter:
            break
        # divergence / stall guard: the best iterate has not improved for a while
        if it - best[-1] >= STALL_ITERATIONS or not np.isfinite(mu) or mu > 1e6 * max(history[0]["mu"], 1.0):
            status = NUMERICAL_FAILURE
            break

        try:
            Sinv = [np.linalg.inv(sk) for sk in S]
            Sinv = [_sym(si) for si in Sinv]
            M = np.zeros((n, n))
            HGh = []
            for gk, gf, zk, si, hk in zip(G, Gflat, Z, Sinv, h):
                T = np.matmul(np.matmul(zk, gk), si)
                M += gf @ T.reshape(n, -1).T
                HGh.append(_sym(zk @ hk @ si))
            M = _sym(M)
            kkt = _KKTSolver(M, A)
        except np.linalg.LinAlgError as exc:
            log.info("factorisation failed at iteration %d: %s", it, exc)
            status = NUMERICAL_FAILURE
            break
        def Mop(v):
            return Gadj([_sym(zk @ gd @ si) for zk, gd, si in zip(Z, Gop(v), Sinv)])

        GtHh = Gadj(HGh)
        hHh = _inner(h, HGh)
        q1 = c - GtHh
        q2 = c + GtHh
        dx2, dy2 = kkt.solve(-q1, b, Mop)
        denom = q2 @ dx2 + b @ dy2 - hHh - kappa / tau

        def direction(eta, Rc, Rt):
            HRz = [_sym(zk @ r @ si) for zk, r, si in zip(Z, rz, Sinv)]
            W = [rc + eta * hr for rc, hr in zip(Rc, HRz)]
            r1 = -eta * rx - Gadj(W)
            r2 = eta * ry
            dx1, dy1 = kkt.solve(r1, r2, Mop)
            rhs = -eta * rt - _inner(h, W) - Rt / tau
            dtau = (rhs - q2 @ dx1 - b @ dy1) / denom
            dx = dx1 + dtau * dx2
            dy = dy1 + dtau * dy2
            Gdx = Gop(dx)
            dS = [-eta * r - gd + hk * dtau for r, gd, hk in zip(rz, Gdx, h)]
            dZ = [w + _sym(zk @ gd @ si) - dtau * hh
                  for w, zk, gd, si, hh in zip(W, Z, Gdx, Sinv, HGh)]
            dkappa = (Rt - kappa * dtau) / tau
            return dx, dy, dS, dZ, dtau, dkappa

        def steplen(dS, dZ, dtau, dkappa):
            a = np.inf
            for sk, ds in zip(S, dS):
                a = min(a, _max_step(sk, ds))
            for zk, dz in zip(Z, dZ):
                a = min(a, _max_step(zk, dz))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        try:
            # predictor
            Rc = [-zk for zk in Z]
            dxa, dya, dSa, dZa, dta, dka = direction(1.0, Rc, -tau * kappa)
            aa = min(1.0, steplen(dSa, dZa, dta, dka))
            sigma = (1.0 - aa) ** 3
            # corrector
            Rc = [sigma * mu * si - zk - _sym(dza @ dsa @ si)
                  for si, zk, dza, dsa in zip(Sinv, Z, dZa, dSa)]
            Rt = sigma * mu - tau * kappa - dta * dka
            dx, dy, dS, dZ, dt, dk = direction(1.0 - sigma, Rc, Rt)
            alpha = min(1.0, opts.step * steplen(dS, dZ, dt, dk))
        except np.linalg.LinAlgError as exc:
            log.info("step computation failed at iteration %d: %s", it, exc)
            status = NUMERICAL_FAILURE
            break
        if not np.isfinite(alpha) or alpha < 1e-12:
            status = NUMERICAL_FAILURE
            break
        if not all(np.all(np.isfinite(v)) for v in (dx, dy, *dS, *dZ)) or not np.isfinite(dt + dk):
            status = NUMERICAL_FAILURE
            break
        x = x + alpha * dx
        y = y + alpha * dy
        S = [_sym(sk + alpha * ds) for sk, ds in zip(S, dS)]
        Z = [_sym(zk + alpha * dz) for zk, dz in zip(Z, dZ)]
        tau = tau + alpha * dt
        kappa = kappa + alpha * dk

    if status in (PRIMAL_INFEASIBLE, DUAL_UNBOUNDED):
        return _infeasible_solution(data, status, x, y, S, Z, tau, kappa, keep, it, history)
    accuracy = history[-1] and max(history[-1]["pres"], history[-1]["dres"], history[-1]["gap"])
    if status != OPTIMAL and best is not None:
        score, x, y, S, Z, tau, kappa, _ = best
        accuracy = score
        last = history[best[-1]]
        if last["pres"] <= opts.feas_tol and last["dres"] <= opts.feas_tol and last["gap"] <= opts.gap_tol:
            status = OPTIMAL
    sol = _finish(data, status, x, y, S, Z, tau, keep, it, history)
    sol.accuracy = float(accuracy)
    return sol


def _expand_y(y: np.ndarray, keep: np.ndarray, m: int) -> np.ndarray:
    full = np.zeros(m)
    full[keep] = y
    return full


def _finish(data, status, x, y, S, Z, tau, keep, it, history) -> SDPSolution:
    xs = x / tau
    ys = _expand_y(y / tau, keep, data.A.shape[0])
    Zs = [z / tau for z in Z]
    Ss = data.slack(xs)
    pobj = float(data.c @ xs)
    dobj = float(-_inner(data.h, Zs) - data.b @ ys)
    pres = float(np.max(np.abs(data.A @ xs - data.b))) if data.b.size else 0.0
    dres = float(np.linalg.norm(data.adjoint(Zs) + data.A.T @ ys + data.c))
    return SDPSolution(status, xs, ys, Zs, Ss, pobj + data.offset, dobj + data.offset, it,
                       abs(pobj - dobj), pres, dres, history=history)


def _infeasible_solution(data, status, x, y, S, Z, tau, kappa, keep, it, history) -> SDPSolution:
    yfull = _expand_y(y, keep, data.A.shape[0])
    if status == PRIMAL_INFEASIBLE:
        scale = -(data.b @ yfull + _inner(data.h, Z))
        cert = dict(y=yfull / scale, Z=[z / scale for z in Z])
    else:
        scale = -(data.c @ x)
        cert = dict(x=x / scale)
    return SDPSolution(status, x, yfull, Z, S, np.inf if status == PRIMAL_INFEASIBLE else -np.inf,
                       np.inf if status == PRIMAL_INFEASIBLE else -np.inf, it, np.nan, np.nan,
                       np.nan, certificate=cert, history=history)


def _linear_infeasible(data: SDPData, w: np.ndarray) -> SDPSolution:
    # w'A = 0 and w'b != 0; orient so that b'w < 0 like the conic certificate
    bw = data.b @ w
    w = -w / bw
    sizes = data.block_sizes
    cert = dict(y=w, Z=[np.zeros((k, k)) for k in sizes], linear=True)
    return SDPSolution(PRIMAL_INFEASIBLE, np.zeros(data.n), w, cert["Z"],
                       [np.zeros((k, k)) for k in sizes], np.inf, np.inf, 0, np.nan, np.nan, np.nan,
                       certificate=cert)


def verify_infeasibility(data: SDPData, cert: dict, tol: float = 1e-6) -> bool:
    """Check a primal-infeasibility ray: G'Z + A'y = 0, Z PSD, <h,Z> + b'y < 0."""
    y, Z = cert["y"], cert["Z"]
    lhs = data.adjoint(Z) + data.A.T @ y
    value = _inner(data.h, Z) + data.b @ y
    min_eig = min((np.linalg.eigvalsh(z)[0] for z in Z if z.size), default=0.0)
    scale = max(1.0, np.linalg.norm(data.c))
    return bool(value < 0 and np.linalg.norm(lhs) <= tol * scale * abs(value) and min_eig >= -tol)


def solve(rel, opts: SolverOptions | None = None) -> SDPSolution:
    """Solve an assembled moment relaxation; ``moments`` holds the optimal linear form."""
    sol = solve_sdp(rel.to_sdp(), opts)
    if sol.status not in (PRIMAL_INFEASIBLE, DUAL_UNBOUNDED) and np.all(np.isfinite(sol.x)):
        sol.moments = rel.form_from_solution(sol.x)
    return sol


def detect_infeasible(rel, opts: SolverOptions | None = None) -> tuple[bool, dict | None]:
    """True with a verified dual ray when the relaxation has no feasible linear form."""
    data = rel.to_sdp()
    sol = solve_sdp(data, opts)
    if sol.status == PRIMAL_INFEASIBLE and verify_infeasibility(data, sol.certificate):
        return True, sol.certificate
    return False, None

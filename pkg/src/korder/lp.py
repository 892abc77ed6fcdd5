"""Two-phase primal simplex for small dense linear programs.

All variables are implicitly non-negative. The solver keeps an explicit
basis inverse and applies rank-one updates, refactoring periodically; the
constraint matrix itself is held sparse because the relaxations built in
this package have only a handful of non-zeros per column.

Pivoting is deterministic: Dantzig pricing with lowest-index ties, falling
back to Bland's rule after a run of degenerate pivots.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import blas

TOL_FEAS = 1e-7
TOL_OPT = 1e-7
TOL_PIVOT = 1e-9
STALL_THRESHOLD = 50
REFACTOR_EVERY = 100

RELATIONS = ("<=", "=", ">=")


class LpError(Exception):
    pass


class DimensionError(LpError, ValueError):
    pass


class IterationLimitError(LpError):
    """The pivot cap was hit; the current point is not reported as an answer."""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"simplex iteration cap reached after {iterations} pivots")


class NumericalError(LpError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: np.ndarray
    relation: str
    rhs: float

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.relation!r}")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    sense: str
    objective: np.ndarray
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        obj = np.asarray(self.objective, dtype=float)
        object.__setattr__(self, "objective", obj)
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        for i, c in enumerate(cons):
            if c.coeffs.shape != obj.shape:
                raise DimensionError(f"constraint {i} has {c.coeffs.shape[0]} coefficients, expected {obj.shape[0]}")
        object.__setattr__(self, "constraints", cons)

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)


@dataclass
class LpSolution:
    status: str
    objective: float = float("nan")
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0
    duals: np.ndarray | None = None
    ray: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def row(num_vars: int, entries: Iterable[tuple[int, float]]) -> np.ndarray:
    """Dense coefficient vector from ``(index, value)`` pairs (values add up)."""
    vec = np.zeros(num_vars)
    for j, a in entries:
        vec[j] += a
    return vec


def add_constraints(lp: LinearProgram, new: Sequence) -> LinearProgram:
    """Return a copy of ``lp`` with ``new`` constraints appended."""
    extra = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in new)
    for c in extra:
        if c.coeffs.shape != (lp.num_vars,):
            raise DimensionError(f"new constraint has {c.coeffs.shape[0]} coefficients, expected {lp.num_vars}")
    return LinearProgram(lp.sense, lp.objective, lp.constraints + extra)


class _Simplex:
    """Revised simplex over ``min c x, A x = b, x >= 0`` with ``b >= 0``."""

    def __init__(self, A: sp.csc_matrix, b: np.ndarray, basis: list[int], max_iter: int):
        self.A = A
        self.AT = A.T.tocsr()
        self.b = b
        self.m, self.N = A.shape
        self.basis = np.asarray(basis, dtype=np.int64)
        self.max_iter = max_iter
        self.iterations = 0
        self.bland_pivots = 0
        self.refactor()

    def refactor(self):
        self._since_refactor = 0
        self._generation = getattr(self, "_generation", 0) + 1
        if self.m == 0:
            self.Binv = np.zeros((0, 0))
            self.xB = np.zeros(0)
            return
        B = self.A[:, self.basis].tocsc()
        try:
            lu = spla.splu(B, permc_spec="COLAMD")
        except RuntimeError as exc:
            raise NumericalError("basis matrix became singular") from exc
        self.Binv = np.asfortranarray(lu.solve(np.eye(self.m)))
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-13] = 0.0

    def column(self, j: int) -> np.ndarray:
        lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
        return self.Binv[:, self.A.indices[lo:hi]] @ self.A.data[lo:hi]

    def duals(self, c: np.ndarray) -> np.ndarray:
        return c[self.basis] @ self.Binv if self.m else np.zeros(0)

    def reduced_costs(self, c: np.ndarray) -> np.ndarray:
        d = c - self.AT @ self.duals(c)
        d[self.basis] = 0.0
        return d

    def pivot(self, r: int, q: int, alpha: np.ndarray):
        piv = alpha[r]
        theta = self.xB[r] / piv
        self.xB -= theta * alpha
        self.xB[r] = theta
        prow = self.Binv[r] / piv
        # in-place rank-one update; Binv is kept column-major for BLAS
        self.Binv = blas.dger(-1.0, alpha, prow, a=self.Binv, overwrite_a=1)
        self.Binv[r] = prow
        self.basis[r] = q
        self.iterations += 1
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def run(self, c: np.ndarray, allowed: np.ndarray) -> str:
        """Iterate to optimality for cost ``c``; ``allowed`` masks entering columns.

        Pricing is Devex with lowest-index ties; after ``stall_limit``
        consecutive degenerate pivots it switches to Bland's rule until the
        objective moves again.
        """
        stall_limit = max(STALL_THRESHOLD, 2 * self.m)
        stall = 0
        bland = False
        verified = False
        weights = np.ones(self.N)
        generation = None
        while True:
            if self.iterations >= self.max_iter:
                raise IterationLimitError(self.iterations)
            if generation != self._generation:
                d = self.reduced_costs(c)
                generation = self._generation
            candidates = np.flatnonzero(allowed & (d < -TOL_OPT))
            if candidates.size == 0:
                if verified or self._since_refactor == 0:
                    return "optimal"
                # certify on a fresh factorization before declaring optimality
                self.refactor()
                verified = True
                continue
            verified = False
            if bland:
                q = int(candidates[0])
                self.bland_pivots += 1
            else:
                score = d[candidates] ** 2 / weights[candidates]
                q = int(candidates[np.argmax(score)])
            alpha = self.column(q)
            eligible = np.flatnonzero(alpha > TOL_PIVOT)
            if eligible.size == 0:
                self.unbounded_column = q
                self.unbounded_alpha = alpha
                return "unbounded"
            ratios = np.maximum(self.xB[eligible], 0.0) / alpha[eligible]
            best = ratios.min()
            ties = eligible[ratios <= best + 1e-12 * max(1.0, best)]
            if not bland and ties.size > 1:
                # largest pivot among ties for stability
                ties = ties[alpha[ties] >= alpha[ties].max() * (1 - 1e-12)]
            r = int(ties[np.argmin(self.basis[ties])])
            if self.xB[r] < 0:
                self.xB[r] = 0.0
            degenerate = best <= 1e-12
            # pivot row over all columns, taken before the basis changes
            row_r = (self.AT @ self.Binv[r]) / alpha[r]
            dq = d[q]
            leaving = self.basis[r]
            d = d - dq * row_r
            d[q] = 0.0
            if not bland:
                wq = weights[q]
                weights = np.maximum(weights, row_r ** 2 * wq)
                weights[leaving] = max(wq / alpha[r] ** 2, 1.0)
                if weights.max() > 1e8:
                    weights[:] = 1.0
            self.pivot(r, q, alpha)
            d[self.basis[r]] = 0.0
            if degenerate:
                stall += 1
                if stall >= stall_limit:
                    bland = True
            else:
                stall = 0
                bland = False


def _standard_form(lp: LinearProgram):
    n = lp.num_vars
    cons = lp.constraints
    m = len(cons)
    rows, cols, vals = [], [], []
    b = np.zeros(m)
    rel = []
    for i, con in enumerate(cons):
        sign = -1.0 if con.rhs < 0 else 1.0
        nz = np.flatnonzero(con.coeffs)
        rows.extend([i] * nz.size)
        cols.extend(nz.tolist())
        vals.extend((sign * con.coeffs[nz]).tolist())
        b[i] = sign * con.rhs
        r = con.relation
        if sign < 0 and r != "=":
            r = "<=" if r == ">=" else ">="
        rel.append(r)
    # slack / surplus columns, then artificials
    next_col = n
    basis = [-1] * m
    slack_cols = []
    for i, r in enumerate(rel):
        if r == "=":
            continue
        rows.append(i)
        cols.append(next_col)
        vals.append(1.0 if r == "<=" else -1.0)
        if r == "<=":
            basis[i] = next_col
        slack_cols.append(next_col)
        next_col += 1
    n_struct = next_col
    for i in range(m):
        if basis[i] < 0:
            rows.append(i)
            cols.append(next_col)
            vals.append(1.0)
            basis[i] = next_col
            next_col += 1
    A = sp.csc_matrix((vals, (rows, cols)), shape=(m, next_col))
    A.sum_duplicates()
    return A, b, basis, n_struct


def solve(lp: LinearProgram, max_iter: int | None = None) -> LpSolution:
    """Solve ``lp``; returns status ``optimal``, ``infeasible`` or ``unbounded``.

    Raises :class:`IterationLimitError` when the pivot cap
    (``50 * (rows + columns)`` by default) is exceeded.
    """
    n = lp.num_vars
    A, b, basis, n_struct = _standard_form(lp)
    m, N = A.shape
    if max_iter is None:
        max_iter = 50 * (m + N)
    c = -lp.objective if lp.sense == "max" else lp.objective.copy()
    c_full = np.zeros(N)
    c_full[:n] = c
    artificial = np.zeros(N, dtype=bool)
    artificial[n_struct:] = True

    simplex = _Simplex(A, b, basis, max_iter)

    if artificial.any():
        c1 = artificial.astype(float)
        status = simplex.run(c1, np.ones(N, dtype=bool))
        infeas = float(simplex.xB[artificial[simplex.basis]].sum()) if m else 0.0
        if status != "optimal" or infeas > TOL_FEAS:
            pi = simplex.duals(c1)
            return LpSolution("infeasible", iterations=simplex.iterations, duals=pi)
        _drive_out_artificials(simplex, artificial)

    status = simplex.run(c_full, ~artificial)
    if status == "unbounded":
        ray = np.zeros(N)
        ray[simplex.unbounded_column] = 1.0
        ray[simplex.basis] = -simplex.unbounded_alpha
        return LpSolution("unbounded", iterations=simplex.iterations, ray=ray[:n])

    full = np.zeros(N)
    full[simplex.basis] = simplex.xB
    x = full[:n]
    x[np.abs(x) < 1e-13] = 0.0
    pi = simplex.duals(c_full)
    _check_feasible(lp, x)
    obj = float(lp.objective @ x)
    # duals reported in the caller's sense and row orientation
    signs = np.array([-1.0 if con.rhs < 0 else 1.0 for con in lp.constraints])
    duals = pi * signs if m else pi
    if lp.sense == "max":
        duals = -duals
    return LpSolution("optimal", obj, x, simplex.iterations, duals=duals)


def _drive_out_artificials(simplex: _Simplex, artificial: np.ndarray):
    """Pivot zero-valued artificials out of the basis where a real column allows."""
    for r in range(simplex.m):
        if not artificial[simplex.basis[r]]:
            continue
        row_r = np.asarray(simplex.A.T @ simplex.Binv[r]).ravel()
        row_r[artificial] = 0.0
        row_r[simplex.basis] = 0.0
        nz = np.flatnonzero(np.abs(row_r) > 1e-7)
        if nz.size == 0:
            continue  # redundant row; the artificial stays basic at zero
        q = int(nz[np.argmax(np.abs(row_r[nz]))])
        alpha = simplex.column(q)
        simplex.xB[r] = 0.0
        simplex.pivot(r, q, alpha)


def _check_feasible(lp: LinearProgram, x: np.ndarray):
    if (x < -TOL_FEAS).any():
        raise NumericalError(f"variable below zero by {-x.min():.3g}")
    for i, con in enumerate(lp.constraints):
        lhs = float(con.coeffs @ x)
        viol = {"<=": lhs - con.rhs, ">=": con.rhs - lhs, "=": abs(lhs - con.rhs)}[con.relation]
        if viol > TOL_FEAS:
            raise NumericalError(f"constraint {i} violated by {viol:.3g} at termination")

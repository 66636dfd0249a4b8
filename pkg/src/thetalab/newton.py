"""Damped complex Newton iteration, vectorized over many starting points."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

MAX_ITER = 60
STEP_TOL = 1e-13
MAX_STEP = 0.5


@dataclass
class NewtonResult:
    x: np.ndarray  # (N, n) final iterates
    residual: np.ndarray  # (N,) max-norm of F at x
    converged: np.ndarray  # (N,) bool, step below tolerance
    iterations: np.ndarray  # (N,) iterations used


def newton_batch(system: Callable, x0, max_iter: int = MAX_ITER, step_tol: float = STEP_TOL,
                 max_step: float = MAX_STEP) -> NewtonResult:
    """Solve F(x) = 0 from every row of ``x0``.

    ``system(X)`` takes an (M, n) complex array and returns ``(F, J)`` with
    shapes (M, n) and (M, n, n).  Steps longer than ``max_step`` are scaled
    back.  Iteration stops per row once the step is below ``step_tol``.
    """
    x = np.array(x0, dtype=complex, copy=True)
    if x.ndim == 1:
        x = x[:, None]
    n_pts = x.shape[0]
    active = np.ones(n_pts, dtype=bool)
    converged = np.zeros(n_pts, dtype=bool)
    iters = np.zeros(n_pts, dtype=int)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        F, J = system(x[idx])
        try:
            step = -np.linalg.solve(J, F[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.stack([-np.linalg.lstsq(j, f, rcond=None)[0] for j, f in zip(J, F)])
        norm = np.linalg.norm(step, axis=1)
        bad = ~np.isfinite(norm)
        scale = np.where(norm > max_step, max_step / np.where(norm > 0, norm, 1), 1.0)
        step = np.where(bad[:, None], 0, step * scale[:, None])
        x[idx] += step
        iters[idx] += 1
        done = (norm < step_tol) & ~bad
        converged[idx[done]] = True
        active[idx[done | bad]] = False
    F, _ = system(x)
    return NewtonResult(x, np.max(np.abs(F), axis=1), converged, iters)


def newton_scalar(fun: Callable, x0: complex, max_iter: int = MAX_ITER, step_tol: float = STEP_TOL):
    """Newton for a single holomorphic function; ``fun(x)`` returns (f, f')."""
    def system(X):
        f, df = fun(X[:, 0])
        return np.asarray(f)[:, None], np.asarray(df)[:, None, None]
    res = newton_batch(system, np.array([[x0]]), max_iter, step_tol)
    return complex(res.x[0, 0]), float(res.residual[0]), bool(res.converged[0])

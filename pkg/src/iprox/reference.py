"""High-accuracy baseline solutions (x*, min F) for library problems.

Rate fits and Lyapunov values need a trustworthy min F; this module
computes it with an accelerated proximal-gradient method (momentum with
adaptive restart) at stepsize 1/L, stopping on the prox-gradient residual
||S_{1/L}(x)|| <= tol.  Solutions are cached on disk keyed by a content
hash of the instance spec and tolerance, with atomic replacement so
concurrent sweep workers can share one cache directory.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .problems import CompositeProblem, grad_f, objective, prox_full


@dataclass(frozen=True)
class ReferenceSolution:
    x_star: np.ndarray
    f_star: float
    residual: float
    iterations_used: int
    converged: bool


def solve_reference(problem: CompositeProblem, tol: float = 1e-12,
                    max_iters: int = 10 ** 6, x0=None) -> ReferenceSolution:
    """Accelerated prox-gradient with gradient-mapping restart.

    Returns the first iterate with ||S_{1/L}(x)|| <= tol, or the
    best-residual iterate flagged unconverged when the budget runs out.
    """
    if tol <= 0:
        raise ContractViolation("tol must be > 0")
    if max_iters < 1:
        raise ContractViolation("max_iters must be >= 1")
    n = problem.dim
    gam = 1.0 / problem.lipschitz_L
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    y = x.copy()
    t = 1.0
    best_x = x.copy()
    best_r = float(np.linalg.norm(residual_vec(problem, x, gam)))
    it = 0
    for it in range(1, max_iters + 1):
        x_new = prox_full(problem, y - gam * grad_f(problem, y), gam)
        # restart when the momentum direction opposes the latest progress
        if float((y - x_new) @ (x_new - x)) > 0.0:
            t = 1.0
            y = x_new.copy()
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = x_new + ((t - 1.0) / t_new) * (x_new - x)
            t = t_new
        x = x_new
        r = float(np.linalg.norm(residual_vec(problem, x, gam)))
        if r < best_r:
            best_r = r
            best_x = x.copy()
        if r <= tol:
            return ReferenceSolution(
                x_star=x.copy(), f_star=objective(problem, x),
                residual=r, iterations_used=it, converged=True)
    return ReferenceSolution(
        x_star=best_x, f_star=objective(problem, best_x),
        residual=best_r, iterations_used=it, converged=False)


def residual_vec(problem: CompositeProblem, x, gamma: float) -> np.ndarray:
    return x - prox_full(problem, x - gamma * grad_f(problem, x), gamma)


def with_reference(problem: CompositeProblem, ref: ReferenceSolution,
                   unique_minimizer: bool = True) -> CompositeProblem:
    """Attach f_star (and, for unique minimizers, a constant projection).

    Fields already present on the problem are kept; only missing ones are
    filled.  The constant-map projection is valid only when argmin F is a
    singleton, which the caller asserts via unique_minimizer.
    """
    updates = {}
    if problem.f_star is None:
        updates["f_star"] = float(ref.f_star)
    if problem.solution_projection is None and unique_minimizer:
        x_star = ref.x_star.copy()
        updates["solution_projection"] = lambda x, _xs=x_star: _xs.copy()
    if not updates:
        return problem
    return dataclasses.replace(problem, **updates)


def spec_cache_key(spec_dict: dict, tol: float) -> str:
    """Content hash identifying one (instance spec, tolerance) pair."""
    payload = json.dumps({"spec": spec_dict, "tol": tol}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_cached(cache_dir, key: str):
    """Return the cached ReferenceSolution or None (missing/corrupt)."""
    path = os.path.join(cache_dir, key + ".json")
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
        if doc.get("problem_key") != key:
            return None
        return ReferenceSolution(
            x_star=np.asarray(doc["x_star"], dtype=float),
            f_star=float(doc["f_star"]),
            residual=float(doc["residual"]),
            iterations_used=int(doc["iterations_used"]),
            converged=bool(doc["converged"]),
        )
    except (OSError, ValueError, KeyError, TypeError):
        return None


def store_cached(cache_dir, key: str, ref: ReferenceSolution) -> None:
    """Atomically write one cache entry (last writer wins, never torn)."""
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, key + ".json")
    doc = {
        "problem_key": key,
        "x_star": [float(v) for v in ref.x_star],
        "f_star": float(ref.f_star),
        "residual": float(ref.residual),
        "iterations_used": int(ref.iterations_used),
        "converged": bool(ref.converged),
    }
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

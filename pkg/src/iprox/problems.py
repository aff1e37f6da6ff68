"""Composite problem abstraction: F(x) = f(x) + g(x) with block structure.

The smooth part f is accessed through value/gradient oracles with a known
Lipschitz constant for the gradient (global L and per-block L_i).  The
nonsmooth part g is block separable, g(x) = sum_i g_i(x_i), and is accessed
through per-block prox oracles.  All oracles are pure functions; a problem
value may be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, UnsupportedOracle

Vector = np.ndarray


@dataclass(frozen=True, eq=False)
class CompositeProblem:
    """Oracle bundle for min F(x) = f(x) + sum_i g_i(x_i).

    Parameters
    ----------
    dim : int
        Ambient dimension n.
    blocks : tuple of tuples of int
        Ordered partition of {0, .., n-1} into m nonempty groups.
    smooth_value : callable x -> float
        f(x).
    smooth_grad : callable x -> ndarray
        grad f(x), same length as x.
    lipschitz_L : float
        Global Lipschitz constant of grad f (must be > 0).
    block_lipschitz : tuple of float
        Per-block constants L_i of the partial gradients; for library
        problems these are enforced <= lipschitz_L at construction.
    nonsmooth_value : callable x -> float
        g(x); may return +inf when g encodes a constraint indicator.
    prox : callable (i, v, gamma) -> ndarray
        prox_{gamma*g_i}(v) on block i; must stay finite for gamma > 0.
    f_star : float, optional
        min F when known (exact for constructed quadratics, else from the
        reference solver).
    nu : float, optional
        Optimal-strong-convexity constant: F(x) - min F >= nu*||x - xbar||^2
        with xbar the projection of x onto argmin F.
    solution_projection : callable x -> ndarray, optional
        Euclidean projection onto argmin F.
    """

    dim: int
    blocks: tuple
    smooth_value: Callable[[Vector], float]
    smooth_grad: Callable[[Vector], Vector]
    lipschitz_L: float
    block_lipschitz: tuple
    nonsmooth_value: Callable[[Vector], float]
    prox: Callable[[int, Vector, float], Vector]
    f_star: Optional[float] = None
    nu: Optional[float] = None
    solution_projection: Optional[Callable[[Vector], Vector]] = None
    block_index_arrays: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ContractViolation("dim must be >= 1")
        if self.lipschitz_L <= 0:
            raise ContractViolation("lipschitz_L must be > 0")
        blocks = tuple(tuple(int(j) for j in blk) for blk in self.blocks)
        if len(blocks) == 0:
            raise ContractViolation("need at least one block")
        flat = [j for blk in blocks for j in blk]
        if any(len(blk) == 0 for blk in blocks):
            raise ContractViolation("blocks must be nonempty")
        if sorted(flat) != list(range(self.dim)):
            raise ContractViolation(
                "blocks must partition {0..dim-1}: disjoint, covering, in range"
            )
        if len(self.block_lipschitz) != len(blocks):
            raise ContractViolation("need one block_lipschitz entry per block")
        if any(L_i <= 0 for L_i in self.block_lipschitz):
            raise ContractViolation("block Lipschitz constants must be > 0")
        if self.nu is not None and self.nu <= 0:
            raise ContractViolation("nu must be > 0 when given")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(
            self,
            "block_lipschitz",
            tuple(float(L_i) for L_i in self.block_lipschitz),
        )
        object.__setattr__(
            self,
            "block_index_arrays",
            tuple(np.asarray(blk, dtype=np.intp) for blk in blocks),
        )

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


@dataclass
class IterateState:
    """The pair (x^k, x^{k-1}) consumed by the inertial step.

    By default x^{-1} = x^0, which makes the first step a plain
    proximal-gradient step.
    """

    x_curr: Vector
    x_prev: Vector
    k: int = 0


def make_state(problem: CompositeProblem, x0: Vector, x_prev: Vector | None = None) -> IterateState:
    x0 = _check_dim(problem, x0)
    if x_prev is None:
        x_prev = x0.copy()
    else:
        x_prev = _check_dim(problem, x_prev)
    return IterateState(x_curr=x0.copy(), x_prev=x_prev.copy(), k=0)


def _check_dim(problem: CompositeProblem, x: Vector) -> Vector:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise ContractViolation(
            f"expected vector of length {problem.dim}, got shape {x.shape}"
        )
    return x


def objective(problem: CompositeProblem, x: Vector) -> float:
    """F(x) = f(x) + g(x); may be +inf under constraint indicators."""
    x = _check_dim(problem, x)
    return float(problem.smooth_value(x)) + float(problem.nonsmooth_value(x))


def grad_f(problem: CompositeProblem, x: Vector) -> Vector:
    x = _check_dim(problem, x)
    g = np.asarray(problem.smooth_grad(x), dtype=float)
    if g.shape != (problem.dim,):
        raise ContractViolation("smooth_grad returned a wrong-shaped vector")
    return g


def block_grad_f(problem: CompositeProblem, x: Vector, i: int) -> Vector:
    """Block-i sub-vector of grad f(x) (slice of the full gradient)."""
    if not (0 <= i < problem.n_blocks):
        raise ContractViolation(f"block index {i} out of range")
    return grad_f(problem, x)[problem.block_index_arrays[i]]


def prox_block(problem: CompositeProblem, i: int, v: Vector, gamma: float) -> Vector:
    """prox_{gamma*g_i}(v) on block i."""
    if not (0 <= i < problem.n_blocks):
        raise ContractViolation(f"block index {i} out of range")
    if gamma <= 0:
        raise ContractViolation("prox stepsize must be > 0")
    v = np.asarray(v, dtype=float)
    if v.shape != (len(problem.blocks[i]),):
        raise ContractViolation("prox input has wrong block dimension")
    out = np.asarray(problem.prox(i, v, gamma), dtype=float)
    if out.shape != v.shape:
        raise ContractViolation("prox oracle returned a wrong-shaped vector")
    return out


def prox_full(problem: CompositeProblem, v: Vector, gamma: float) -> Vector:
    """Blockwise prox of the separable g with one shared stepsize."""
    v = _check_dim(problem, v)
    if gamma <= 0:
        raise ContractViolation("prox stepsize must be > 0")
    out = np.empty_like(v)
    for i, ix in enumerate(problem.block_index_arrays):
        out[ix] = problem.prox(i, v[ix], gamma)
    return out


def solution_project(problem: CompositeProblem, x: Vector) -> Vector:
    """Projection of x onto argmin F; UnsupportedOracle when unavailable."""
    if problem.solution_projection is None:
        raise UnsupportedOracle("problem exposes no solution_projection oracle")
    x = _check_dim(problem, x)
    return np.asarray(problem.solution_projection(x), dtype=float)


def check_gradient_fd(problem: CompositeProblem, x: Vector, h: float) -> float:
    """Max per-coordinate relative error of grad f against central differences.

    The denominator is max(1, |analytic_j|, |fd_j|), so coordinates where
    both routes are tiny contribute ~absolute error rather than 0/0 noise.
    """
    if h <= 0:
        raise ContractViolation("h must be > 0")
    x = _check_dim(problem, x)
    g = grad_f(problem, x)
    worst = 0.0
    e = np.zeros_like(x)
    for j in range(problem.dim):
        e[j] = h
        fd = (problem.smooth_value(x + e) - problem.smooth_value(x - e)) / (2.0 * h)
        e[j] = 0.0
        scale = max(1.0, abs(g[j]), abs(fd))
        worst = max(worst, abs(g[j] - fd) / scale)
    return worst

"""Linearized preconditioned ADMM for the split reconstruction problem.

The problem is ``min_v F(B(v))`` with a nonlinear splitting operator ``B``
and a separable convex ``F``; introducing ``p = B(v)`` and a multiplier
``lam`` gives the iteration

    v^{k+1}   = v^k - tau_v * J_B(v^k)^* lam_bar^k
    p^{k+1}   = prox_{tau_q F}( p^k + tau_q (lam^k + delta (B(v^{k+1}) - p^k)) )
    lam^{k+1} = lam^k + delta (B(v^{k+1}) - p^{k+1})
    lam_bar   = 2 lam^{k+1} - lam^k

with ``lam_bar^0 = lam^0``.  The linearization of ``B`` lives entirely in
the ``v`` update; the ``p`` update sees ``B`` only through its value.  Step
sizes must satisfy ``tau_v * delta < 1 / ||J_B||^2`` and
``tau_q * delta < 1`` for the convergence theory to apply; the adaptive
step rule enforces them from a power-iteration estimate of ``||J_B||``.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .operators import BlockVector, operator_norm_estimate


class NumericalDivergence(RuntimeError):
    """Raised when an iterate stops being finite."""


@dataclass
class SolverConfig:
    """Iteration budget, step sizes and logging cadence.

    ``step_rule="fixed"`` uses ``tau_v``/``tau_q`` as given (violating the
    step bounds only earns a warning).  ``step_rule="adaptive"`` re-derives
    both from the current Jacobian norm estimate each iteration:
    ``tau_q = 1 / (delta * safety^2)`` and
    ``tau_v = 1 / (delta * (safety * ||J_B||)^2)``.
    """

    max_iters: int
    tau_v: float = 0.125
    tau_q: float = 23.0
    delta: float = 1.0 / 24.0
    step_rule: str = "fixed"
    log_every: int = 1
    stop_tol: float | None = None
    norm_safety: float = 1.1
    norm_iters: int = 30
    norm_seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.log_every < 1:
            raise ValueError("log_every must be at least 1")
        if self.step_rule not in ("fixed", "adaptive"):
            raise ValueError("step_rule must be 'fixed' or 'adaptive'")
        if min(self.tau_v, self.tau_q) <= 0:
            raise ValueError("step sizes must be positive")
        # delta = 0 freezes the multiplier; legal for diagnostics under the
        # fixed rule, meaningless for the adaptive one (which divides by it).
        if self.delta < 0 or (self.delta == 0 and self.step_rule == "adaptive"):
            raise ValueError("delta must be positive (nonnegative for fixed steps)")
        if self.norm_safety <= 1.0:
            raise ValueError("norm_safety must exceed 1")


@dataclass
class SolverState:
    """Complete iteration state; advancing it is a pure function."""

    v: BlockVector
    p: BlockVector
    lam: BlockVector
    lam_bar: BlockVector
    k: int = 0


@dataclass
class HistoryRow:
    k: int
    objective: float
    primal_residual: float
    dual_residual: float
    elapsed_seconds: float


@dataclass
class SolveResult:
    v: BlockVector
    p: BlockVector
    lam: BlockVector
    history: list[HistoryRow] = field(default_factory=list)
    iterations: int = 0

    @property
    def image(self) -> np.ndarray:
        return self.v[0]


def default_init(model) -> SolverState:
    """Start from the model's default primal point with zero split state."""
    v = model.default_init()
    q = BlockVector.zeros_like(model.apply(v))
    return SolverState(v=v, p=q.copy(), lam=q.copy(), lam_bar=q.copy(), k=0)


def _check_finite(state: SolverState):
    for name, vec in (("primal", state.v), ("split", state.p), ("multiplier", state.lam)):
        for idx, block in enumerate(vec.blocks):
            if not np.isfinite(block).all():
                raise NumericalDivergence(
                    f"non-finite values in the {name} state (block {idx}) "
                    f"at iteration {state.k}"
                )


def _advance(
    state: SolverState,
    model,
    config: SolverConfig,
    tau_v: float | None = None,
    tau_q: float | None = None,
) -> tuple[SolverState, BlockVector]:
    """One iteration.  Returns the new state and ``B(v^{k+1})``.

    Step sizes default to the fixed values in ``config``; the adaptive
    driver in :func:`solve` passes its own.
    """
    tv = config.tau_v if tau_v is None else tau_v
    tq = config.tau_q if tau_q is None else tau_q
    delta = config.delta

    v_new = state.v - tv * model.jacobian_adjoint(state.v, state.lam_bar)
    bv = model.apply(v_new)
    p_new = model.prox(state.p + tq * (state.lam + delta * (bv - state.p)), tq)
    lam_new = state.lam + delta * (bv - p_new)
    lam_bar_new = 2.0 * lam_new - state.lam

    new_state = SolverState(
        v=v_new, p=p_new, lam=lam_new, lam_bar=lam_bar_new, k=state.k + 1
    )
    _check_finite(new_state)
    return new_state, bv


def step(
    state: SolverState,
    model,
    config: SolverConfig,
    tau_v: float | None = None,
    tau_q: float | None = None,
) -> SolverState:
    """Advance the iteration by one step."""
    new_state, _ = _advance(state, model, config, tau_v=tau_v, tau_q=tau_q)
    return new_state


def solve(config: SolverConfig, model, init: SolverState | None = None) -> SolveResult:
    """Run the iteration to the configured budget (or residual tolerance).

    History rows are appended at iterations ``k = 1, 1 + log_every, ...``;
    with the default cadence every iteration is logged.  The dual residual
    reported is ``delta * ||J_B(v^{k+1})^* (p^k - p^{k+1})||``.
    """
    state = default_init(model) if init is None else init
    t0 = time.perf_counter()

    norm_vec: BlockVector | None = None
    tau_v = config.tau_v
    tau_q = config.tau_q
    if config.step_rule == "adaptive":
        norm, norm_vec = operator_norm_estimate(
            model, state.v, iters=config.norm_iters, seed=config.norm_seed
        )
    else:
        norm, _ = operator_norm_estimate(
            model, state.v, iters=config.norm_iters, seed=config.norm_seed
        )
        if config.tau_q * config.delta >= 1.0:
            warnings.warn(
                "tau_q * delta >= 1 violates the step bound; "
                "convergence is not guaranteed",
                RuntimeWarning,
                stacklevel=2,
            )
        if norm > 0 and config.tau_v * config.delta >= 1.0 / norm**2:
            warnings.warn(
                f"tau_v * delta >= 1 / ||J_B||^2 (norm estimate {norm:.3g}) "
                "violates the step bound; convergence is not guaranteed",
                RuntimeWarning,
                stacklevel=2,
            )

    history: list[HistoryRow] = []
    p_prev = state.p
    while state.k < config.max_iters:
        if config.step_rule == "adaptive":
            if state.k > 0:
                norm, norm_vec = operator_norm_estimate(
                    model, state.v, iters=1, start=norm_vec
                )
            scaled = max(config.norm_safety * norm, 1e-12)
            tau_v = 1.0 / (config.delta * scaled**2)
            tau_q = 1.0 / (config.delta * config.norm_safety**2)

        state, bv = _advance(state, model, config, tau_v=tau_v, tau_q=tau_q)
        primal_res = (bv - state.p).norm()

        tick = (state.k - 1) % config.log_every == 0
        if tick:
            dual_res = config.delta * model.jacobian_adjoint(
                state.v, p_prev - state.p
            ).norm()
            history.append(
                HistoryRow(
                    k=state.k,
                    objective=float(model.objective_split(bv)),
                    primal_residual=float(primal_res),
                    dual_residual=float(dual_res),
                    elapsed_seconds=time.perf_counter() - t0,
                )
            )
        p_prev = state.p

        if config.stop_tol is not None and primal_res < config.stop_tol:
            break

    return SolveResult(
        v=state.v, p=state.p, lam=state.lam, history=history, iterations=state.k
    )


def history_csv(history: list[HistoryRow]) -> str:
    """Render the history as CSV text (header + one row per tick)."""
    lines = ["k,objective,primal_residual,dual_residual,elapsed_seconds"]
    for row in history:
        lines.append(
            f"{row.k},{row.objective!r},{row.primal_residual!r},"
            f"{row.dual_residual!r},{row.elapsed_seconds!r}"
        )
    return "\n".join(lines) + "\n"

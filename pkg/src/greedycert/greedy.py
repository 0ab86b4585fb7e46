"""Greedy selection runs and constructive inputs.

Both algorithms pick the atom whose projected version correlates most
with the current residual; OMP uses the raw projected atoms, OLS their
normalized versions (equivalently, OLS minimizes the next residual
norm).  A selection is "tied" when the runner-up score is within a
relative ``TAU_TIE`` of the leader; against a known support, a tie that
mixes true and wrong atoms counts as a failure (the adversarial tie
convention), while ties among true atoms are broken by lowest index and
only flagged.

The constructive half builds inputs that provably steer a run: a vector
reaching a prescribed selection sequence (always possible for OLS, by
small-perturbation stacking), and a vector that reaches a partial
selection and then forces a wrong atom (possible exactly when the
corresponding exactness certificate fails).  Both are verified by
re-running the algorithm before being returned.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ConstructionFailedError,
    DegenerateAtomError,
    RankDeficientError,
    ZeroResidualError,
)
from .linalg import (
    _as_matrix,
    extend_state,
    init_state,
    least_squares,
    residual,
    state_for,
)
from .tolerances import TAU_SUCCESS_REL, TAU_TIE, TAU_ZERO

__all__ = [
    "Selection",
    "IterationRecord",
    "GreedyTrace",
    "select_omp",
    "select_ols",
    "run_greedy",
    "construct_reaching_input",
    "build_failure_input",
]

MIN_STEP = 1e-14  # smallest perturbation size tried by the constructions


@dataclass(frozen=True)
class Selection:
    """One selection decision: chosen index, full score vector (NaN at
    active positions), tie flag and the tied index set."""

    index: int
    scores: np.ndarray
    tie: bool
    tied: tuple


def _pick(state, scores):
    scores = np.array(scores, dtype=np.float64)
    for i in state.active:
        scores[i] = np.nan
    top = np.nanmax(scores)
    with np.errstate(invalid="ignore"):
        tied = np.flatnonzero(scores >= top * (1.0 - TAU_TIE))
    tie = len(tied) > 1
    scores.setflags(write=False)
    return Selection(
        index=int(tied[0]), scores=scores, tie=tie, tied=tuple(int(t) for t in tied)
    )


def select_omp(state, r):
    """Pick the inactive atom maximizing |<r, projected atom>|."""
    if np.linalg.norm(r) <= TAU_ZERO:
        raise ZeroResidualError("residual is already zero")
    return _pick(state, np.abs(state.projected.T @ r))


def select_ols(state, r):
    """Pick the inactive atom maximizing |<r, normalized projected atom>|.

    Equivalent to minimizing the residual norm after the candidate
    extension; atoms inside the active span score zero.
    """
    if np.linalg.norm(r) <= TAU_ZERO:
        raise ZeroResidualError("residual is already zero")
    alive = state.norms > TAU_ZERO
    scores = np.zeros(state.n)
    scores[alive] = np.abs(state.projected[:, alive].T @ r) / state.norms[alive]
    return _pick(state, scores)


_SELECT = {"omp": select_omp, "ols": select_ols}


@dataclass(frozen=True)
class IterationRecord:
    selected: int
    scores: np.ndarray
    tie: bool
    tied: tuple
    residual_norm: float


@dataclass(frozen=True)
class GreedyTrace:
    """Record of one greedy run.

    ``status`` is one of ``success`` (residual exhausted, and only true
    atoms selected when a support oracle was given), ``wrong_atom``,
    ``tie_failure`` (true/wrong tie), ``rank_abort`` (selected atom
    degenerate), or ``exhausted`` (iteration budget hit with residual
    left; only possible without early failure).
    """

    algorithm: str
    records: tuple
    status: str
    failure_iteration: int | None
    wrong_index: int | None
    final_residual: float

    def selections(self):
        return [rec.selected for rec in self.records]

    def to_json(self):
        return {
            "algorithm": self.algorithm,
            "status": self.status,
            "failure_iteration": self.failure_iteration,
            "wrong_index": self.wrong_index,
            "final_residual": float(self.final_residual),
            "iterations": [
                {
                    "selected": rec.selected,
                    "tie": rec.tie,
                    "tied": list(rec.tied),
                    "residual_norm": float(rec.residual_norm),
                    "scores": [
                        None if np.isnan(s) else float(s) for s in rec.scores
                    ],
                }
                for rec in self.records
            ],
        }


def run_greedy(algorithm, atoms, y, max_iters, oracle=None):
    """Run OMP or OLS for up to ``max_iters`` selections.

    With ``oracle`` (the true support) the run stops at the first wrong
    or adversarially tied selection.  Stops early once the residual norm
    drops below ``TAU_SUCCESS_REL * |y|``.
    """
    select = _SELECT[algorithm]
    a = _as_matrix(atoms)
    y = np.asarray(y, dtype=np.float64)
    truth = frozenset(int(i) for i in oracle) if oracle is not None else None
    state = init_state(a)
    ynorm = np.linalg.norm(y)
    records = []
    status, fail_it, wrong = None, None, None

    for it in range(max_iters):
        r = residual(state, y)
        rnorm = np.linalg.norm(r)
        if rnorm <= TAU_SUCCESS_REL * ynorm:
            status = "success"
            break
        sel = select(state, r)
        records.append(
            IterationRecord(sel.index, sel.scores, sel.tie, sel.tied, float(rnorm))
        )
        if truth is not None:
            tied_wrong = [t for t in sel.tied if t not in truth]
            if sel.tie and tied_wrong and len(tied_wrong) < len(sel.tied):
                status, fail_it, wrong = "tie_failure", it, min(tied_wrong)
                break
            if sel.index not in truth:
                status, fail_it, wrong = "wrong_atom", it, sel.index
                break
        try:
            state = extend_state(state, sel.index)
        except DegenerateAtomError:
            status, fail_it = "rank_abort", it
            break

    final = float(np.linalg.norm(residual(state, y)))
    if status is None:
        status = "success" if final <= TAU_SUCCESS_REL * ynorm else "exhausted"
    return GreedyTrace(
        algorithm=algorithm,
        records=tuple(records),
        status=status,
        failure_iteration=fail_it,
        wrong_index=wrong,
        final_residual=final,
    )


def _reaches_prefix(algorithm, a, y, prefix):
    """True when the run selects exactly ``prefix``, strictly (no tie)."""
    trace = run_greedy(algorithm, a, y, len(prefix))
    if len(trace.records) < len(prefix):
        return False
    return all(
        rec.selected == want and not rec.tie
        for rec, want in zip(trace.records, prefix)
    )


def construct_reaching_input(atoms, order, algorithm="ols"):
    """A vector making the algorithm select ``order``, in order.

    Stacks ``y_p = y_{p-1} + eps_p a_{q_p}`` with each step size halved
    from 1 until the partial run re-verifies with strict unique maxima.
    For OLS a feasible step always exists (the residual after p correct
    selections is parallel to the projected next atom); for OMP the
    construction is attempted on the same schedule and fails honestly.
    Raises :class:`ConstructionFailedError` when no step size down to
    1e-14 verifies.
    """
    a = _as_matrix(atoms)
    order = [int(i) for i in order]
    if len(set(order)) != len(order) or not order:
        raise ValueError("order must be a non-empty sequence of distinct indices")
    y = a[:, order[0]].copy()
    if not _reaches_prefix(algorithm, a, y, order[:1]):
        raise ConstructionFailedError(
            f"atom {order[0]} is not a strict first selection of its own direction"
        )
    for p in range(1, len(order)):
        eps = 1.0
        while True:
            cand = y + eps * a[:, order[p]]
            if _reaches_prefix(algorithm, a, cand, order[: p + 1]):
                y = cand
                break
            eps /= 2.0
            if eps < MIN_STEP:
                raise ConstructionFailedError(
                    f"no step size reaches {order[: p + 1]} with {algorithm}"
                )
    return y


def build_failure_input(atoms, qstar, q, algorithm, reaching=None):
    """A vector on support ``qstar`` that reaches ``q`` and then fails.

    Returns None when the exactness certificate at ``q`` holds (no such
    input exists for this construction).  Otherwise the returned vector
    steers the run through ``q`` (in order) and makes the next selection
    wrong or adversarially tied; this is verified by re-running before
    returning.  ``reaching`` overrides the generated on-support vector
    that steers the run through ``q`` (useful for OMP, where reaching a
    prescribed selection is not always constructible).
    """
    a = _as_matrix(atoms)
    if algorithm not in _SELECT:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    qstar = [int(i) for i in qstar]
    q = [int(i) for i in q]
    if not set(q) <= set(qstar) or len(q) >= len(qstar):
        raise ValueError("q must be a strict subset of the support")

    state = state_for(a, q)
    remaining = [i for i in qstar if i not in q]
    wrongs = [j for j in range(a.shape[1]) if j not in set(qstar)]
    pt = state.projected[:, remaining]
    if algorithm == "omp":
        lhs = pt
        rhs = state.projected[:, wrongs]
        alive = np.ones(len(wrongs), dtype=bool)
    else:
        tn = state.norms[remaining]
        if np.any(tn <= TAU_ZERO):
            raise RankDeficientError("a support atom lies in the selected span")
        lhs = pt / tn
        jn = state.norms[wrongs]
        alive = jn > TAU_ZERO
        rhs = np.where(alive, state.projected[:, wrongs] / np.where(alive, jn, 1.0), 0.0)
    coef = least_squares(lhs, rhs)
    factors = np.abs(coef).sum(axis=0)
    factors[~alive] = 0.0
    best = int(np.argmax(factors))
    if factors[best] < 1.0:
        return None

    v = np.sign(coef[:, best])
    v[v == 0.0] = 1.0
    try:
        w = np.linalg.solve(lhs.T @ pt, v)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(str(exc)) from None
    yhat = a[:, remaining] @ w

    def verified(y):
        trace = run_greedy(algorithm, a, y, len(q) + 1, oracle=qstar)
        return (
            trace.selections()[: len(q)] == q
            and trace.status in ("wrong_atom", "tie_failure")
            and trace.failure_iteration == len(q)
        )

    if not q:
        if not verified(yhat):
            raise ConstructionFailedError("failure input did not verify")
        return yhat

    z = np.asarray(reaching, dtype=np.float64) if reaching is not None else None
    if z is None:
        z = construct_reaching_input(a, q, algorithm)
    eps = 1.0
    while eps >= MIN_STEP:
        y = z + eps * yhat
        if verified(y):
            return y
        eps /= 2.0
    raise ConstructionFailedError(
        f"no step size yields a verified failure after {q} with {algorithm}"
    )

"""Null-space recovery conditions and a brute-force l1 oracle.

The l1 recovery question for a support Q* is decided by signs of
piecewise-linear functionals over the null space of the dictionary:

* the null-space property: every nonzero null vector carries strictly
  less l1 mass on Q* than off it (then every vector supported on Q* is
  the unique l1 minimizer of its own measurements);
* its failure counterpart: for every sign pattern on Q* some null
  vector beats the off-support mass (then no vector supported on Q* is
  recovered, whatever the amplitudes).

Null spaces of dimension up to 3 are handled exactly: the functionals
are linear on the sign cones of the row arrangement, so the supremum
over the unit sphere is attained either at a cone's own gradient
direction or on a face of the arrangement, all of which are enumerated.
Computed suprema within ``TAU_STRICT`` of zero are flagged as boundary
cases (strictness cannot be decided at working precision).

``l1_min`` settles small instances independently by enumerating basic
solutions; it is the round-trip oracle for both conditions.
"""

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np
from scipy.linalg import null_space

from .exceptions import DimensionTooLargeError, InfeasibleError, TooLargeError
from .linalg import _as_matrix
from .tolerances import TAU_RANK, TAU_STRICT, TAU_ZERO

__all__ = [
    "NullSpaceBasis",
    "NspReport",
    "BrcBpReport",
    "null_space_basis",
    "nsp_check",
    "brc_bp_check",
    "l1_min",
    "l1_recovers",
]

MAX_NULL_DIM = 3
MAX_L1_COLUMNS = 12


@dataclass(frozen=True)
class NullSpaceBasis:
    basis: np.ndarray  # n x dim, orthonormal columns
    dim: int


def null_space_basis(a):
    v = null_space(_as_matrix(a))
    return NullSpaceBasis(basis=v, dim=v.shape[1])


def _sphere_max(linear, rows, coeffs):
    """Exact max of ``<linear, w> + sum coeffs_l |<rows_l, w>|`` on the
    unit sphere of R^d, d <= 3.

    Returns (value, argmax).  The objective is linear on each sign cone
    of the row arrangement, so a maximizer is either interior to a cone
    (then proportional to that cone's gradient, enumerated over all sign
    patterns) or sits on a boundary hyperplane (then it solves the
    restriction to that hyperplane, handled recursively: a one-lower-
    dimensional instance of the same problem).
    """
    linear = np.asarray(linear, dtype=np.float64)
    d = linear.shape[0]
    rows = np.asarray(rows, dtype=np.float64).reshape(-1, d)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    live = np.linalg.norm(rows, axis=1) > 1e-14
    rows, coeffs = rows[live], coeffs[live]
    p = len(rows)
    if 2**p > 2 * 10**6:
        raise TooLargeError(f"{p} arrangement rows exceed the sign-pattern budget")

    def value(w):
        return float(linear @ w + coeffs @ np.abs(rows @ w))

    if d == 1:
        one = np.array([1.0])
        return max((value(one), one), (value(-one), -one), key=lambda t: t[0])

    candidates = []
    weighted = rows * coeffs[:, None]
    for signs in product((-1.0, 1.0), repeat=p):
        candidates.append(linear + np.asarray(signs) @ weighted)
    for v in rows:
        if d == 2:
            candidates.append(np.array([-v[1], v[0]]))
            candidates.append(np.array([v[1], -v[0]]))
        else:
            # restrict to the boundary plane of this row and recurse
            u = v / np.linalg.norm(v)
            basis = null_space(u[None, :])  # 3 x 2 orthonormal
            _, w2 = _sphere_max(basis.T @ linear, rows @ basis, coeffs)
            candidates.append(basis @ w2)

    best, best_w = -np.inf, None
    for c in candidates:
        nrm = np.linalg.norm(c)
        if nrm <= 1e-14:
            continue
        w = c / nrm
        got = value(w)
        if got > best:
            best, best_w = got, w
    if best_w is None:
        # every candidate degenerated: the objective is constant zero
        best_w = np.zeros(d)
        best_w[0] = 1.0
        best = value(best_w)
    return best, best_w


@dataclass(frozen=True)
class NspReport:
    """``verdict`` is True only with a strict margin; a supremum within
    ``TAU_STRICT`` of zero keeps the verdict False and sets
    ``indeterminate`` (the guarantee is not claimed at the boundary)."""

    verdict: bool
    supremum: float | None
    witness: np.ndarray | None
    indeterminate: bool

    def to_json(self):
        return {
            "verdict": bool(self.verdict),
            "supremum": None if self.supremum is None else float(self.supremum),
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "indeterminate": bool(self.indeterminate),
        }


def nsp_check(a, qstar, max_dim=MAX_NULL_DIM):
    """Does every nonzero null vector carry less l1 mass on the support?

    The supremum of (on-support mass - off-support mass) over the unit
    sphere of the null space must be strictly negative.
    """
    a = _as_matrix(a)
    qstar = {int(i) for i in qstar}
    ns = null_space_basis(a)
    if ns.dim == 0:
        return NspReport(verdict=True, supremum=None, witness=None, indeterminate=False)
    if ns.dim > max_dim:
        raise DimensionTooLargeError(
            f"null space has dimension {ns.dim}, supported up to {max_dim}"
        )
    signs = np.array([1.0 if i in qstar else -1.0 for i in range(a.shape[1])])
    sup, w = _sphere_max(np.zeros(ns.dim), ns.basis, signs)
    return NspReport(
        verdict=sup < -TAU_STRICT,
        supremum=sup,
        witness=ns.basis @ w,
        indeterminate=abs(sup) <= TAU_STRICT,
    )


@dataclass(frozen=True)
class BrcBpReport:
    """``verdict`` True: every sign pattern on the support admits a null
    vector beating the off-support mass (no input on the support is
    recovered).  False: some pattern admits none.  None: a boundary
    pattern prevented a call either way.

    ``patterns`` maps each sign pattern (over the support, in index
    order) to its supremum, feasibility and witness null vector."""

    verdict: bool | None
    support: tuple
    patterns: tuple

    def to_json(self):
        return {
            "verdict": self.verdict,
            "support": [int(i) for i in self.support],
            "patterns": [
                {
                    "epsilon": [int(e) for e in eps],
                    "supremum": float(sup),
                    "feasible": feas,
                    "witness": None if wit is None else [float(v) for v in wit],
                }
                for eps, sup, feas, wit in self.patterns
            ],
        }


def brc_bp_check(a, qstar):
    """Is l1 recovery wrong for every input carried by the support?

    For each sign pattern eps on the support, looks for a null vector x
    with ``sum_i eps_i x_i > sum_offsupport |x_j|`` (strictly).  The
    search space halves by symmetry: negating the pattern negates the
    witness.
    """
    a = _as_matrix(a)
    support = tuple(int(i) for i in qstar)
    k = len(support)
    if k > 20:
        raise TooLargeError(f"{2**k} sign patterns exceed the budget")
    off = [j for j in range(a.shape[1]) if j not in set(support)]
    ns = null_space_basis(a)
    if ns.dim > MAX_NULL_DIM:
        raise DimensionTooLargeError(
            f"null space has dimension {ns.dim}, supported up to {MAX_NULL_DIM}"
        )

    patterns = []
    verdicts = []
    for tail in product((-1.0, 1.0), repeat=max(k - 1, 0)):
        eps = np.array((1.0,) + tail) if k else np.array([])
        if ns.dim == 0:
            sup, x = -np.inf, None
        else:
            linear = eps @ ns.basis[list(support)]
            rows = ns.basis[off]
            sup, w = _sphere_max(linear, rows, -np.ones(len(off)))
            x = ns.basis @ w
        if sup > TAU_STRICT:
            feas = True
        elif sup == -np.inf or sup < -TAU_STRICT:
            feas = False
        else:
            feas = None
        verdicts.append(feas)
        patterns.append((tuple(int(e) for e in eps), sup, feas, x))
        if k:
            mirrored = tuple(-int(e) for e in eps)
            patterns.append((mirrored, sup, feas, None if x is None else -x))

    if any(f is False for f in verdicts):
        verdict = False
    elif all(f is True for f in verdicts):
        verdict = True
    else:
        verdict = None
    return BrcBpReport(verdict=verdict, support=support, patterns=tuple(patterns))


def l1_min(a, y):
    """All basic minimizers of ``|x|_1`` subject to ``a @ x = y``.

    Enumerates full-rank column subsets of size rank(a); the optimum of
    the underlying linear program is attained on such basic solutions,
    and distinct optimal solutions always include distinct basic ones,
    so a single returned vector certifies uniqueness.  Limited to
    ``n <= 12`` columns.  Raises :class:`InfeasibleError` when no subset
    reproduces ``y``.
    """
    a = _as_matrix(a)
    y = np.asarray(y, dtype=np.float64)
    m, n = a.shape
    if n > MAX_L1_COLUMNS:
        raise TooLargeError(f"{n} columns exceed the basic-solution budget")
    if np.linalg.norm(y) <= TAU_ZERO:
        return [np.zeros(n)]
    r = int(np.linalg.matrix_rank(a))
    if r == 0:
        raise InfeasibleError("zero matrix cannot reproduce a nonzero input")

    tol = 1e-9 * max(1.0, float(np.linalg.norm(y)))
    candidates = []
    for subset in combinations(range(n), r):
        sub = a[:, subset]
        sv = np.linalg.svd(sub, compute_uv=False)
        if sv[-1] <= TAU_RANK:
            continue
        x_s, *_ = np.linalg.lstsq(sub, y, rcond=None)
        if np.linalg.norm(sub @ x_s - y) > tol:
            continue
        x = np.zeros(n)
        x[list(subset)] = x_s
        candidates.append((float(np.abs(x).sum()), x))
    if not candidates:
        raise InfeasibleError("no basic solution reproduces the input")
    best = min(l1 for l1, _ in candidates)
    solutions = []
    for l1, x in candidates:
        if l1 - best <= 1e-9 * max(1.0, best):
            if not any(np.allclose(x, s, atol=1e-9) for s in solutions):
                solutions.append(x)
    return solutions


def l1_recovers(a, xstar):
    """True when ``xstar`` is the unique l1 minimizer of its own
    measurements."""
    xstar = np.asarray(xstar, dtype=np.float64)
    sols = l1_min(a, _as_matrix(a) @ xstar)
    if len(sols) != 1:
        return False
    scale = max(1.0, float(np.abs(xstar).max()))
    return bool(np.abs(sols[0] - xstar).max() <= 1e-8 * scale)

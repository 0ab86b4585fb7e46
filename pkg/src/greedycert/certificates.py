"""Exact-recovery and bad-recovery certificates for OMP and OLS.

The central quantity is the interference factor of a wrong atom ``a_j``
against the not-yet-selected part of a true support Q* given a partial
selection Q inside Q*:

* OMP factor: the l1 mass of the rows of ``pinv(A_Qstar) a_j`` indexed
  by Q* \\ Q;
* OLS factor: the same rows weighted by the projected-atom norm ratios
  ``|Pa_i| / |Pa_j|`` (zero when ``Pa_j`` vanishes).

Both factors admit an equivalent "projected" evaluation through the
pseudo-inverse of the projected (OMP) or normalized-projected (OLS)
remaining true atoms.  The default mode evaluates both routes and raises
:class:`FormMismatchError` if they disagree beyond ``TAU_FORM``; fast
mode evaluates only the projected route.

Exactness certificates say that every wrong factor stays below 1
(selection-wise exact recovery for every reachable Q of the stated
cardinality); the OMP badness certificate says that from every possible
last step the worst wrong factor is at least 1, so the full support is
unreachable for any input supported on it.
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .exceptions import FormMismatchError, RankDeficientError, TooLargeError
from .linalg import _as_matrix, least_squares, state_for
from .tolerances import TAU_FORM, TAU_NUM, TAU_ZERO

__all__ = [
    "CertificateReport",
    "erc_factor",
    "f_omp",
    "f_ols",
    "erc_oxx_subset",
    "erc_oxx_cardinality",
    "brc_omp",
    "f_omp_update",
    "f_ols_recursive",
    "recursion_chain",
    "PhiParams",
    "phi_eval",
    "phi_min",
]


def _check_support(n, qstar, q=(), j=None):
    qstar = tuple(int(i) for i in qstar)
    q = tuple(int(i) for i in q)
    if len(set(qstar)) != len(qstar):
        raise ValueError("duplicate indices in the support")
    if not all(0 <= i < n for i in qstar):
        raise ValueError("support index out of range")
    if not set(q) <= set(qstar):
        raise ValueError("partial selection must lie inside the support")
    if qstar and len(q) >= len(qstar):
        raise ValueError("partial selection must be a strict subset")
    if j is not None and int(j) in set(qstar):
        raise ValueError("the probe atom must lie outside the support")
    return qstar, q


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of a certificate evaluation.

    ``per_atom`` pairs an atom index with its factor: the probed wrong
    atoms for exactness certificates, the dropped true atom (paired with
    its worst wrong factor) for the badness certificate.  ``verdict`` is
    True when the certificate holds; ``margin`` is the distance of the
    aggregate from the decision line at 1.
    """

    kind: str
    algorithm: str
    per_atom: tuple
    aggregate: float
    verdict: bool
    margin: float
    details: dict = field(default_factory=dict)

    def to_json(self):
        out = {
            "kind": self.kind,
            "algorithm": self.algorithm,
            "per_atom": [[int(j), float(f)] for j, f in self.per_atom],
            "aggregate": float(self.aggregate),
            "verdict": bool(self.verdict),
            "margin": float(self.margin),
        }
        if self.details:
            out["details"] = {
                k: (v.tolist() if isinstance(v, np.ndarray) else v)
                for k, v in self.details.items()
            }
        return out


def erc_factor(a, qstar, j):
    """l1 norm of the support coefficients of a wrong atom.

    Below 1 for every wrong atom, k-step exact recovery of any input on
    the support is guaranteed (either algorithm, any coefficients).
    """
    a = _as_matrix(a)
    qstar, _ = _check_support(a.shape[1], qstar, (), j)
    c = least_squares(a[:, qstar], a[:, int(j)])
    return float(np.abs(c).sum())


def _factors(a, qstar, q, js, algorithm, fast):
    """Factors of the atoms ``js`` given partial selection ``q``.

    Returns the projected-route values; in checked mode the definitional
    route is evaluated as well and compared within ``TAU_FORM``.
    """
    if algorithm not in ("omp", "ols"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    state = state_for(a, q)
    remaining = [i for i in qstar if i not in q]
    pt = state.projected[:, remaining]
    pj = state.projected[:, js]
    jn = state.norms[js]
    alive = jn > TAU_ZERO

    if algorithm == "omp":
        lhs, rhs = pt, pj
    else:
        tn = state.norms[remaining]
        if np.any(tn <= TAU_ZERO):
            raise RankDeficientError("a support atom lies in the selected span")
        lhs = pt / tn
        rhs = np.where(alive, pj / np.where(alive, jn, 1.0), 0.0)
    coef = least_squares(lhs, rhs)
    proj = np.abs(coef).sum(axis=0)
    proj[~alive] = 0.0

    if not fast:
        c = least_squares(a[:, qstar], a[:, js])
        rows = [qstar.index(i) for i in remaining]
        if algorithm == "omp":
            direct = np.abs(c[rows]).sum(axis=0)
        else:
            tn = state.norms[remaining]
            direct = (tn[:, None] * np.abs(c[rows])).sum(axis=0)
            direct = np.where(alive, direct / np.where(alive, jn, 1.0), 0.0)
        direct[~alive] = 0.0
        gap = np.abs(proj - direct).max() if len(js) else 0.0
        if gap > TAU_FORM:
            raise FormMismatchError(
                f"factor routes disagree by {gap:.3e} (> {TAU_FORM})"
            )
    return proj


def f_omp(a, qstar, q, j, fast=False):
    """OMP interference factor of atom ``j`` for partial selection ``q``."""
    a = _as_matrix(a)
    qstar, q = _check_support(a.shape[1], qstar, q, j)
    return float(_factors(a, qstar, q, [int(j)], "omp", fast)[0])


def f_ols(a, qstar, q, j, fast=False):
    """OLS interference factor of atom ``j`` for partial selection ``q``."""
    a = _as_matrix(a)
    qstar, q = _check_support(a.shape[1], qstar, q, j)
    return float(_factors(a, qstar, q, [int(j)], "ols", fast)[0])


def erc_oxx_subset(a, qstar, q, algorithm, fast=False):
    """Exactness certificate at one explicit partial selection."""
    a = _as_matrix(a)
    qstar, q = _check_support(a.shape[1], qstar, q)
    js = [j for j in range(a.shape[1]) if j not in set(qstar)]
    vals = _factors(a, qstar, q, js, algorithm, fast)
    aggregate = float(vals.max()) if js else 0.0
    return CertificateReport(
        kind="erc-oxx-subset",
        algorithm=algorithm,
        per_atom=tuple(zip(js, (float(v) for v in vals))),
        aggregate=aggregate,
        verdict=aggregate < 1.0,
        margin=abs(aggregate - 1.0),
        details={"q": list(q)},
    )


def erc_oxx_cardinality(a, qstar, card, algorithm, fast=True):
    """Exactness certificate over every partial selection of one size.

    True means: whatever ``card`` true atoms were selected first, the
    next selection is again a true atom.  ``card = 0`` coincides with
    the plain l1 certificate.  Subset enumeration is budgeted at 10**6.
    """
    a = _as_matrix(a)
    qstar, _ = _check_support(a.shape[1], qstar)
    card = int(card)
    if not 0 <= card < len(qstar):
        raise ValueError("cardinality must satisfy 0 <= card < |support|")
    if comb(len(qstar), card) > 10**6:
        raise TooLargeError(
            f"{comb(len(qstar), card)} subsets exceed the 1e6 budget"
        )
    js = [j for j in range(a.shape[1]) if j not in set(qstar)]
    worst = np.full(len(js), -np.inf)
    worst_subset = ()
    aggregate = -np.inf
    for q in combinations(qstar, card):
        vals = _factors(a, qstar, q, js, algorithm, fast)
        np.maximum(worst, vals, out=worst)
        top = float(vals.max()) if js else 0.0
        if top > aggregate:
            aggregate = top
            worst_subset = q
    if not js:
        aggregate = 0.0
    return CertificateReport(
        kind="erc-oxx-cardinality",
        algorithm=algorithm,
        per_atom=tuple(zip(js, (float(v) for v in worst))),
        aggregate=float(aggregate),
        verdict=float(aggregate) < 1.0,
        margin=abs(float(aggregate) - 1.0),
        details={"cardinality": card, "worst_subset": list(worst_subset)},
    )


def brc_omp(a, qstar, fast=False):
    """OMP badness certificate for a full support.

    Aggregate is the minimum over all leave-one-out selections of the
    worst wrong factor; at least 1 means OMP cannot select all support
    atoms in k steps for any input carried by the support, whatever the
    coefficients.  In checked mode every leave-one-out factor row is
    cross-validated against the projected route.
    """
    a = _as_matrix(a)
    qstar, _ = _check_support(a.shape[1], qstar)
    if len(qstar) < 1:
        raise ValueError("support must not be empty")
    js = [j for j in range(a.shape[1]) if j not in set(qstar)]
    if not js:
        raise ValueError("no wrong atom to probe")
    c = least_squares(a[:, qstar], a[:, js])
    rowmax = np.abs(c).max(axis=1)

    if not fast:
        for pos, i in enumerate(qstar):
            q = tuple(x for x in qstar if x != i)
            proj = _factors(a, qstar, q, js, "omp", True)
            gap = np.abs(proj - np.abs(c[pos])).max()
            if gap > TAU_FORM:
                raise FormMismatchError(
                    f"leave-one-out routes disagree by {gap:.3e} (> {TAU_FORM})"
                )

    pos = int(np.argmin(rowmax))
    aggregate = float(rowmax[pos])
    return CertificateReport(
        kind="brc-omp",
        algorithm="omp",
        per_atom=tuple(zip(qstar, (float(v) for v in rowmax))),
        aggregate=aggregate,
        verdict=aggregate >= 1.0,
        margin=abs(aggregate - 1.0),
        details={"easiest_last_atom": int(qstar[pos])},
    )


def f_omp_update(factor, coef_ell):
    """OMP factor after activating one more true atom.

    ``coef_ell`` is the entry of ``pinv(A_Qstar) a_j`` at the atom being
    activated; the factor simply loses that l1 contribution.
    """
    return float(factor) - abs(float(coef_ell))


def f_ols_recursive(beta, eta_j, chi_j, etas, chis):
    """OLS factor one level up the chain, from deeper-level data.

    ``beta`` holds the coefficients of the wrong atom against the
    normalized projected remaining true atoms *after* the extension;
    ``eta``/``chi`` are the extension coefficients of the wrong atom
    (scalars) and of the remaining true atoms (vectors).
    """
    beta = np.asarray(beta, dtype=np.float64)
    etas = np.asarray(etas, dtype=np.float64)
    chis = np.asarray(chis, dtype=np.float64)
    cross = float(np.sum(beta * chis / etas))
    mass = float(np.sum(np.abs(beta) / etas))
    return abs(float(chi_j) - float(eta_j) * cross) + float(eta_j) * mass


def recursion_chain(a, qstar, j, order, algorithm):
    """Factors of atom ``j`` along a nested selection chain.

    ``order`` lists the true atoms in activation order; the returned
    list holds the factor at depth 0..len(order), each value produced by
    the one-step recursion and checked against direct evaluation within
    1e-8 (:class:`FormMismatchError` otherwise).
    """
    a = _as_matrix(a)
    qstar, order = _check_support(a.shape[1], qstar, order, j)
    j = int(j)
    direct = [
        (f_omp if algorithm == "omp" else f_ols)(a, qstar, order[:p], j, fast=True)
        for p in range(len(order) + 1)
    ]

    if algorithm == "omp":
        c = least_squares(a[:, qstar], a[:, j])
        values = [direct[0]]
        for p, ell in enumerate(order):
            values.append(f_omp_update(values[-1], c[qstar.index(ell)]))
    elif algorithm == "ols":
        values = [0.0] * (len(order) + 1)
        values[-1] = direct[-1]
        state = state_for(a, order)
        for p in range(len(order) - 1, -1, -1):
            # extension record of the step that took depth p to p+1
            rec = state.extensions[p]
            deeper = state_for(a, order[: p + 1])
            remaining = [i for i in qstar if i not in order[: p + 1]]
            if deeper.norms[j] <= TAU_ZERO:
                # wrong atom swallowed by the deeper span: factor at
                # this depth must come from the direct route
                values[p] = direct[p]
                continue
            lhs = deeper.projected[:, remaining] / deeper.norms[remaining]
            beta = least_squares(lhs, deeper.projected[:, j] / deeper.norms[j])
            values[p] = f_ols_recursive(
                beta, rec.eta[j], rec.chi[j], rec.eta[remaining], rec.chi[remaining]
            )
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")

    gap = max(abs(v - d) for v, d in zip(values, direct))
    if gap > 1e-8:
        raise FormMismatchError(f"recursion and direct factors differ by {gap:.3e}")
    return values


@dataclass(frozen=True)
class PhiParams:
    """Parameters of the one-step OLS factor profile.

    ``phi(eta) = |sqrt(1 - eta^2) - c * eta| + d * eta`` describes how
    the factor one level up depends on the wrong atom's norm-reduction
    coefficient, with ``c``/``d`` built from the deeper-level data.
    """

    beta: np.ndarray
    etas: np.ndarray
    chis: np.ndarray
    c: float
    d: float

    @classmethod
    def from_components(cls, beta, etas, chis):
        beta = np.asarray(beta, dtype=np.float64)
        etas = np.asarray(etas, dtype=np.float64)
        chis = np.asarray(chis, dtype=np.float64)
        if beta.shape != etas.shape or beta.shape != chis.shape:
            raise ValueError("beta, etas, chis must have matching shapes")
        if np.any(etas <= 0.0) or np.any(etas > 1.0 + TAU_NUM):
            raise ValueError("eta coefficients must lie in (0, 1]")
        if np.abs(etas**2 + chis**2 - 1.0).max() > 1e-6:
            raise ValueError("eta/chi pairs must lie on the unit circle")
        c = float(np.sum(beta * chis / etas))
        d = float(np.sum(np.abs(beta) / etas))
        return cls(beta=beta, etas=etas, chis=chis, c=c, d=d)

    @classmethod
    def from_extension(cls, beta, chi_j, etas, chis):
        """Build params from raw extension data; a negative alignment of
        the wrong atom flips the sign of ``beta`` (the profile only sees
        ``|chi_j|``)."""
        beta = np.asarray(beta, dtype=np.float64)
        if chi_j < 0:
            beta = -beta
        return cls.from_components(beta, etas, chis)

    @property
    def beta_l1(self):
        return float(np.abs(self.beta).sum())


def phi_eval(params, eta):
    """Evaluate the factor profile at ``eta`` (scalar or array)."""
    eta = np.asarray(eta, dtype=np.float64)
    root = np.sqrt(np.clip(1.0 - eta**2, 0.0, None))
    out = np.abs(root - params.c * eta) + params.d * eta
    return float(out) if out.ndim == 0 else out


def phi_min(params):
    """Minimum of the profile over [0, 1].

    Closed form ``min(1, d / sqrt(1 + c^2))`` for positive ``c``; for
    ``c <= 0`` the returned value is the linear lower bound
    ``min(1, |beta|_1)`` (the profile never dips below it).
    """
    if params.c > 0:
        return min(1.0, params.d / np.sqrt(1.0 + params.c**2))
    return min(1.0, params.beta_l1)

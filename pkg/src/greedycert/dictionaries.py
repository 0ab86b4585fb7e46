"""Dictionary generators used by the certificates and experiments.

All generators return a :class:`Dictionary` whose matrix has unit-norm
columns.  Randomized generators take an explicit integer seed and are
bit-reproducible (PCG64 generator).
"""

from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .exceptions import EmptyAtomError

__all__ = [
    "Dictionary",
    "gaussian",
    "hybrid",
    "convolutive",
    "example1",
    "from_matrix",
    "write_matrix_text",
    "read_matrix_text",
]


@dataclass(frozen=True)
class Dictionary:
    matrix: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def n(self):
        return self.matrix.shape[1]


def _normalized(a):
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0):
        raise EmptyAtomError(f"column {int(np.argmin(norms))} is identically zero")
    return a / norms


def gaussian(m, n, seed):
    """Columns drawn i.i.d. N(0, I) and normalized."""
    rng = np.random.default_rng(seed)
    a = _normalized(rng.standard_normal((m, n)))
    a.setflags(write=False)
    return Dictionary(a, "gaussian", {"m": m, "n": n}, seed)


def hybrid(m, n, t_max, seed):
    """Gaussian columns with a random constant offset, then normalized.

    Atom i is ``g_i + t_i * ones`` with ``t_i ~ U[0, t_max]``.  Large
    ``t_max`` makes the atoms nearly collinear with the all-ones vector,
    which is the regime where the two greedy selection rules separate.
    ``t_max = 0`` reproduces :func:`gaussian` exactly (same draw order).
    """
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((m, n))
    t = rng.uniform(0.0, t_max, n)
    a = _normalized(g + t)
    a.setflags(write=False)
    return Dictionary(a, "hybrid", {"m": m, "n": n, "t_max": t_max}, seed)


def convolutive(n, sigma, downsample=1):
    """Shifted, sampled Gaussian pulses, optionally keeping every
    ``downsample``-th output row.

    The pulse ``exp(-t**2 / (2 sigma**2))`` is sampled on an integer
    grid of length ``L = ceil(6 sigma)`` centered on zero.  The full
    convolution matrix has ``n + L - 1`` rows; row decimation keeps rows
    ``0, downsample, 2*downsample, ...`` and makes the dictionary
    overcomplete for ``downsample > 1``.  Columns are normalized;
    decimation that leaves an atom with no nonzero sample raises
    :class:`EmptyAtomError`.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    d = int(downsample)
    if d < 1:
        raise ValueError("downsample must be >= 1")
    length = ceil(6 * sigma)
    grid = np.arange(length) - length // 2
    pulse = np.exp(-(grid**2) / (2.0 * sigma**2))

    m_full = n + length - 1
    kept = range(0, m_full, d)
    a = np.zeros((len(kept), n))
    for j in range(n):
        # kept rows hitting the pulse occupying full-matrix rows j .. j+L-1
        first = -(-j // d) * d
        rows = np.arange(first, min(j + length, m_full), d)
        a[rows // d, j] = pulse[rows - j]
    a = _normalized(a)
    a.setflags(write=False)
    return Dictionary(
        a, "convolutive", {"n": n, "sigma": sigma, "downsample": d}, None
    )


def example1(theta1, theta2):
    """Four unit atoms in R^3 split in two symmetric pairs.

    The pair (a1, a2) opens by theta1 around e1 in the (e1, e2) plane,
    the pair (a3, a4) by theta2 around e2 in the (e2, e3) plane.  Small
    theta1 makes the first pair nearly collinear, which is the classic
    setting where a correct partial selection can still be abandoned.
    """
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(theta2), np.sin(theta2)
    a = np.array(
        [
            [c1, c1, 0.0, 0.0],
            [-s1, s1, c2, c2],
            [0.0, 0.0, s2, -s2],
        ]
    )
    a.setflags(write=False)
    return Dictionary(a, "example1", {"theta1": theta1, "theta2": theta2}, None)


def from_matrix(matrix, kind="custom", params=None, normalize=False):
    """Wrap an explicit matrix, optionally normalizing its columns."""
    a = np.array(matrix, dtype=np.float64)
    if normalize:
        a = _normalized(a)
    a.setflags(write=False)
    return Dictionary(a, kind, dict(params or {}), None)


def write_matrix_text(matrix, path):
    """One row per line, space-separated decimals (17 significant digits)."""
    matrix = np.asarray(getattr(matrix, "matrix", matrix), dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in matrix:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix_text(path):
    a = np.loadtxt(path, dtype=np.float64, ndmin=2)
    return a

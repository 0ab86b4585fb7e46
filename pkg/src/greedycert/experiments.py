"""Seeded Monte Carlo studies over the recovery certificates.

Every experiment is a pure function of its configuration: trial ``t``
derives its generator from ``base_seed + t`` and nothing else, so runs
are reproducible bit for bit regardless of how many worker processes
execute them.  Results serialize to CSV (17 significant digits, config
echoed as a ``#`` comment on the first line) and to JSON (config first).
"""

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .certificates import brc_omp
from .dictionaries import convolutive, gaussian, hybrid
from .linalg import _as_matrix, extend_state, init_state, least_squares
from .tolerances import TAU_ZERO

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "scatter_experiment",
    "phase_curve",
    "phase_diagram",
    "f_vs_q_curve",
    "brc_map",
    "brc_sigma_sweep",
    "run_experiment",
    "load_config",
    "default_filename",
    "sigma_threshold",
    "delta_frontier",
    "phase_trial_state",
]

KINDS = ("scatter", "phase-curve", "phase-diagram", "f-vs-q", "brc-map", "brc-sigma")
_ALGORITHMS = ("omp", "ols")
_INT_TUPLES = ("q_values", "n_grid", "k_grid", "m_grid", "deltas")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one experiment run.

    Only the fields an experiment kind consumes are validated by its
    runner; the rest keep their defaults and ride along in the echo so
    a config file always round-trips.
    """

    kind: str
    dictionary: str = "gaussian"
    m: int = 0
    n: int = 0
    k: int = 0
    trials: int = 1
    base_seed: int = 0
    algorithms: tuple = ("omp", "ols")
    placement: str = "random"
    q_values: tuple = ()
    n_grid: tuple = ()
    k_grid: tuple = ()
    m_grid: tuple = ()
    sigmas: tuple = ()
    deltas: tuple = ()
    t_max: float = 10.0
    sigma: float = 1.0
    downsample: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind: {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trial count must be at least 1")
        algs = tuple(str(a) for a in self.algorithms)
        if not algs or any(a not in _ALGORITHMS for a in algs) or len(set(algs)) != len(algs):
            raise ValueError(f"algorithms must be a subset of {_ALGORITHMS}: {algs}")
        object.__setattr__(self, "algorithms", algs)
        for name in _INT_TUPLES:
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        object.__setattr__(self, "sigmas", tuple(float(v) for v in self.sigmas))

    def as_dict(self):
        out = {}
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            out[field.name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValueError(f"bad experiment config: {exc}") from None


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


@dataclass(frozen=True)
class ExperimentResult:
    """Tabular outcome plus the config that produced it.

    ``wall_clock`` is measured for reporting but deliberately left out
    of both serializations: the files must be identical across reruns
    and worker counts.
    """

    config: ExperimentConfig
    columns: tuple
    rows: tuple
    wall_clock: float

    def to_csv(self):
        lines = ["# " + json.dumps(self.config.as_dict())]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self):
        obj = {
            "config": self.config.as_dict(),
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
        }
        return json.dumps(obj, indent=2) + "\n"

    def save(self, path):
        path = str(path)
        if path.endswith(".csv"):
            text = self.to_csv()
        elif path.endswith(".json"):
            text = self.to_json()
        else:
            raise ValueError(f"unsupported output suffix: {path!r}")
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def default_filename(config, fmt):
    """Canonical output name embedding the kind and base seed."""
    return f"{config.kind}-seed{config.base_seed}.{fmt}"


def load_config(path):
    """Recover a config from a result file (JSON object or CSV echo)."""
    with open(path, encoding="utf-8") as handle:
        first = handle.readline()
        if first.startswith("# "):
            data = json.loads(first[2:])
        else:
            handle.seek(0)
            obj = json.load(handle)
            data = obj["config"] if "config" in obj else obj
    return ExperimentConfig.from_dict(data)


def _build(kind, m, n, t_max, sigma, downsample, seed):
    if kind == "gaussian":
        return gaussian(m, n, seed)
    if kind == "hybrid":
        return hybrid(m, n, t_max, seed)
    if kind == "convolutive":
        return convolutive(n, sigma, downsample)
    raise ValueError(f"unknown dictionary kind: {kind!r}")


def _trial_dictionary(config, m, n, seed):
    return _build(config.dictionary, m, n, config.t_max, config.sigma,
                  config.downsample, seed)


def _support(placement, n, k, delta, rng):
    if not 1 <= k < n:
        raise ValueError(f"support size {k} must satisfy 1 <= k < n = {n}")
    if placement == "random":
        picked = rng.choice(n, size=k, replace=False)
        return tuple(sorted(int(i) for i in picked))
    if placement in ("contiguous", "first"):
        return tuple(range(k))
    if placement == "spaced":
        last = (k - 1) * delta
        if delta < 1 or last >= n:
            raise ValueError(f"spacing {delta} puts atom {last} outside n = {n}")
        return tuple(range(0, last + 1, delta))
    raise ValueError(f"unknown placement policy: {placement!r}")


def _factor_curves(atoms, qstar, order, q_values, algorithms):
    """Aggregate certificate values along a growth order, one pass.

    The coefficient table lstsq(A_Q*, a_j) is computed once; dropping
    the rows already grown gives the partial-selection value directly,
    and the variant with normalized projected atoms reweights each row
    by the current projected norms, maintained incrementally.  Returns
    ``{algorithm: [aggregate at q for q in q_values]}``.
    """
    a = _as_matrix(atoms)
    qstar = tuple(qstar)
    order = tuple(order)
    if sorted(order) != sorted(qstar):
        raise ValueError("growth order must be a permutation of the support")
    q_values = tuple(q_values)
    if not q_values or any(not 0 <= q < len(qstar) for q in q_values):
        raise ValueError("partial supports must be proper subsets of the support")
    member = set(qstar)
    probes = np.array([j for j in range(a.shape[1]) if j not in member], dtype=int)
    c_abs = np.abs(least_squares(a[:, list(qstar)], a[:, probes]))
    row_of = {atom: i for i, atom in enumerate(qstar)}

    remaining = c_abs.sum(axis=0)
    state = init_state(a) if "ols" in algorithms else None
    values = {alg: {} for alg in algorithms}
    for q in range(max(q_values) + 1):
        if q in q_values:
            if "omp" in algorithms:
                values["omp"][q] = float(remaining.max()) if probes.size else 0.0
            if "ols" in algorithms:
                rows = [row_of[atom] for atom in order[q:]]
                weights = state.norms[list(order[q:])]
                num = (weights[:, None] * c_abs[rows]).sum(axis=0) if rows else 0.0
                den = state.norms[probes]
                alive = den > TAU_ZERO
                vals = np.where(alive, num / np.where(alive, den, 1.0), 0.0)
                values["ols"][q] = float(vals.max()) if probes.size else 0.0
        if q < max(q_values):
            remaining = remaining - c_abs[row_of[order[q]]]
            if state is not None:
                state = extend_state(state, order[q])
    return {alg: [values[alg][q] for q in q_values] for alg in algorithms}


def _map_ordered(fn, tasks, workers):
    # results merge in task order, so the worker count cannot change them
    if workers > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=chunk))
    return [fn(task) for task in tasks]


def _require(condition, message):
    if not condition:
        raise ValueError(message)


# -- single wrong atom scatter ------------------------------------------

def _scatter_trial(task):
    config, t = task
    d = _trial_dictionary(config, config.m, config.n, config.base_seed + t)
    qstar = tuple(range(config.k))
    curves = _factor_curves(d, qstar, qstar, (0, 1), ("omp", "ols"))
    return (t, curves["omp"][0], curves["omp"][1], curves["ols"][1])


def scatter_experiment(config, workers=1):
    """Per-trial certificate triple with a single wrong atom.

    Each trial draws a fresh dictionary with n = k + 1 columns, takes
    the first k atoms as the support and reports the full-support value
    together with both partial values after the first atom is selected.
    """
    _require(config.n == config.k + 1, "scatter requires n = k + 1")
    _require(config.k >= 2, "scatter requires k >= 2")
    _require(config.m > config.k, "scatter requires m > k")
    start = perf_counter()
    tasks = [(config, t) for t in range(config.trials)]
    rows = tuple(_map_ordered(_scatter_trial, tasks, workers))
    return ExperimentResult(config, ("trial", "f_erc", "f_omp", "f_ols"),
                            rows, perf_counter() - start)


# -- phase transition over q --------------------------------------------

def phase_trial_state(config, t):
    """Dictionary, support and growth order for trial ``t``, replayable."""
    seed = config.base_seed + t
    d = _trial_dictionary(config, config.m, config.n, seed)
    # salted stream: keeps support draws independent of the matrix draws
    rng = np.random.default_rng((seed, 1))
    delta = config.deltas[0] if config.deltas else 1
    qstar = _support(config.placement, config.n, config.k, delta, rng)
    order = tuple(int(i) for i in rng.permutation(list(qstar)))
    return d, qstar, order


def _phase_trial(task):
    config, t = task
    d, qstar, order = phase_trial_state(config, t)
    q_values = config.q_values or tuple(range(config.k))
    curves = _factor_curves(d, qstar, order, q_values, config.algorithms)
    return tuple(tuple(v < 1.0 for v in curves[alg]) for alg in config.algorithms)


def phase_curve(config, workers=1):
    """Rate of true certificate verdicts per partial-support size."""
    _require(1 <= config.k < config.n, "support size must satisfy 1 <= k < n")
    if config.dictionary != "convolutive":  # convolutive row count is derived
        _require(config.k < config.m, "support size must be below the row count")
    q_values = config.q_values or tuple(range(config.k))
    start = perf_counter()
    tasks = [(config, t) for t in range(config.trials)]
    verdicts = _map_ordered(_phase_trial, tasks, workers)
    rows = []
    for qi, q in enumerate(q_values):
        row = [q]
        for ai in range(len(config.algorithms)):
            row.append(sum(v[ai][qi] for v in verdicts) / config.trials)
        rows.append(tuple(row))
    columns = ("q",) + tuple(f"rate_{alg}" for alg in config.algorithms)
    return ExperimentResult(config, columns, tuple(rows), perf_counter() - start)


# -- phase diagram over (n, k) ------------------------------------------

def _diagram_trial(task):
    config, n, k, seed = task
    d = _trial_dictionary(config, config.m, n, seed)
    rng = np.random.default_rng((seed, 1))
    qstar = _support(config.placement, n, k, 1, rng)
    order = tuple(int(i) for i in rng.permutation(list(qstar)))
    curves = _factor_curves(d, qstar, order, tuple(range(k)), config.algorithms)
    first = []
    for alg in config.algorithms:
        hit = [q for q, v in enumerate(curves[alg]) if v < 1.0]
        # never satisfied below k counts as k: the guarantee needs all atoms
        first.append(hit[0] if hit else k)
    return tuple(first)


def phase_diagram(config, workers=1):
    """Mean earliest-certified iteration over an (n, k) grid, as q/k."""
    _require(config.n_grid and config.k_grid, "phase-diagram needs n and k grids")
    cells = [(n, k) for n in config.n_grid for k in config.k_grid]
    for n, k in cells:
        _require(1 <= k < n, f"cell (n={n}, k={k}) needs 1 <= k < n")
        if config.dictionary != "convolutive":
            _require(k < config.m, f"cell (n={n}, k={k}) needs k < m")
    start = perf_counter()
    tasks = []
    for ci, (n, k) in enumerate(cells):
        for t in range(config.trials):
            tasks.append((config, n, k, config.base_seed + ci * config.trials + t))
    outcomes = _map_ordered(_diagram_trial, tasks, workers)
    rows = []
    for ci, (n, k) in enumerate(cells):
        chunk = outcomes[ci * config.trials:(ci + 1) * config.trials]
        row = [n, k]
        for ai in range(len(config.algorithms)):
            row.append(sum(first[ai] for first in chunk) / (config.trials * k))
        rows.append(tuple(row))
    columns = ("n", "k") + tuple(f"ratio_{alg}" for alg in config.algorithms)
    return ExperimentResult(config, columns, tuple(rows), perf_counter() - start)


# -- deterministic convolutive curves -----------------------------------

def f_vs_q_curve(config, workers=1):
    """Aggregate certificate value against q for a convolutive dictionary.

    The support is the first k atoms and the partial support grows
    through them in index order, so there is nothing random here.
    """
    _require(config.dictionary == "convolutive", "f-vs-q expects a convolutive dictionary")
    _require(config.placement in ("contiguous", "first"), "f-vs-q supports are contiguous")
    d = _trial_dictionary(config, config.m, config.n, config.base_seed)
    _require(config.k < min(d.matrix.shape), "support size must be below both dimensions")
    q_values = config.q_values or tuple(range(config.k))
    start = perf_counter()
    qstar = tuple(range(config.k))
    curves = _factor_curves(d, qstar, qstar, q_values, config.algorithms)
    rows = tuple((q,) + tuple(curves[alg][qi] for alg in config.algorithms)
                 for qi, q in enumerate(q_values))
    columns = ("q",) + tuple(f"f_{alg}" for alg in config.algorithms)
    return ExperimentResult(config, columns, rows, perf_counter() - start)


# -- unreachable-support maps and sweeps --------------------------------

def _brc_map_trial(task):
    config, m, n, seed = task
    d = _trial_dictionary(config, m, n, seed)
    return bool(brc_omp(d, (0, 1), fast=True).verdict)


def brc_map(config, workers=1):
    """Rate of certified unreachable two-atom supports over (m, n)."""
    _require(config.k == 2, "the map is defined for two-atom supports")
    _require(config.m_grid and config.n_grid, "brc-map needs m and n grids")
    cells = [(m, n) for m in config.m_grid for n in config.n_grid]
    for m, n in cells:
        _require(2 < min(m, n), f"cell (m={m}, n={n}) is too small")
    start = perf_counter()
    tasks = []
    for ci, (m, n) in enumerate(cells):
        for t in range(config.trials):
            tasks.append((config, m, n, config.base_seed + ci * config.trials + t))
    verdicts = _map_ordered(_brc_map_trial, tasks, workers)
    rows = []
    for ci, (m, n) in enumerate(cells):
        chunk = verdicts[ci * config.trials:(ci + 1) * config.trials]
        rows.append((m, n, sum(chunk) / config.trials))
    return ExperimentResult(config, ("m", "n", "rate"), tuple(rows),
                            perf_counter() - start)


def _sigma_task(task):
    config, sigma, delta = task
    d = convolutive(config.n, sigma, config.downsample)
    support = _support("spaced", d.matrix.shape[1], 2, delta, None)
    report = brc_omp(d, support, fast=True)
    return (sigma, delta, float(report.aggregate), report.verdict)


def brc_sigma_sweep(config, workers=1):
    """Unreachability certificate across pulse widths and spacings.

    One row per (spacing, width) pair on a two-atom support; spacing 1
    is the contiguous case.  No randomness is involved.
    """
    _require(config.sigmas, "brc-sigma needs a sigma grid")
    _require(config.k == 2, "the sweep is defined for two-atom supports")
    deltas = config.deltas or (1,)
    start = perf_counter()
    tasks = [(config, sigma, delta) for delta in deltas for sigma in config.sigmas]
    rows = tuple(_map_ordered(_sigma_task, tasks, workers))
    return ExperimentResult(config, ("sigma", "delta", "aggregate", "verdict"),
                            rows, perf_counter() - start)


def sigma_threshold(result, delta=1):
    """Smallest pulse width certified unreachable at the given spacing."""
    widths = [s for s, dl, _, v in result.rows if dl == delta and v]
    return min(widths) if widths else None


def delta_frontier(result):
    """Largest certified spacing per pulse width, ``None`` when none is."""
    out = []
    for sigma in sorted({row[0] for row in result.rows}):
        hit = [dl for s, dl, _, v in result.rows if s == sigma and v]
        out.append((sigma, max(hit) if hit else None))
    return out


_RUNNERS = {
    "scatter": scatter_experiment,
    "phase-curve": phase_curve,
    "phase-diagram": phase_diagram,
    "f-vs-q": f_vs_q_curve,
    "brc-map": brc_map,
    "brc-sigma": brc_sigma_sweep,
}


def run_experiment(config, workers=1):
    return _RUNNERS[config.kind](config, workers=workers)

"""Multi-start block-coordinate ascent over periodic angle parameters.

Each restart sweeps the blocks in order; within a block every angle is
improved by a golden-section search on a half-period bracket around its
current value. A move is kept only if it strictly raises the objective, so
each restart is monotone. Starting points come from a scrambled Halton
sequence over the angle box.

Coordinate moves crawl along curved ridges, so the best few restarts are
finished with Powell's conjugate-direction method (kept only if it improves).

Restarts are independent. With ``workers > 1`` they run on a thread pool,
each thread holding its own copy of the objective when the objective offers
``copy()``. Results are collected in restart order, so the outcome does not
depend on the number of workers.
"""

from __future__ import annotations

import dataclasses
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from genbell import kernels
from genbell._pykernels import golden_line

TWO_PI = 2.0 * math.pi


@dataclass
class BlockObjective:
    block_sizes: Sequence[int]
    evaluate: Callable[[np.ndarray], float]
    lower: float = 0.0
    upper: float = TWO_PI

    @property
    def dim(self) -> int:
        return int(sum(self.block_sizes))


@dataclass
class OptimizeOptions:
    restarts: int = 32
    seed: int = 0
    tol: float = 1e-9
    max_sweeps: int = 40
    line_iters: int = 40
    grid_step: float | None = math.pi / 8
    polish: int = 4
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class RestartResult:
    value: float
    angles: np.ndarray
    start: np.ndarray
    sweeps: int
    converged: bool
    aborted: bool = False
    history: list = field(default_factory=list)
    polished: bool = False


@dataclass
class OptimizeResult:
    value: float
    angles: np.ndarray
    restarts: list

    @property
    def best(self) -> RestartResult:
        return max(self.restarts, key=lambda r: r.value if not r.aborted else -math.inf)


class _NonFinite(Exception):
    pass


def _call(fn, x):
    v = float(fn(x))
    if not math.isfinite(v):
        raise _NonFinite(v)
    return v


def _line_search(fn, x, i, center, half_width, iters):
    line = getattr(fn, "golden_line", None)
    if line is not None:
        t, f = line(x, i, center, half_width, iters)
    else:
        t, f = golden_line(fn, x, i, center, half_width, iters)
    if not math.isfinite(f):
        raise _NonFinite(f)
    return t, f


def coordinate_ascent(obj: BlockObjective, start, opts: OptimizeOptions) -> RestartResult:
    fn = obj.evaluate
    x = np.array(start, dtype=float)
    period = obj.upper - obj.lower
    try:
        fx = _call(fn, x)
        history = [fx]
        if opts.grid_step:
            grid = np.arange(0.0, period, opts.grid_step)
            for i in range(x.shape[0]):
                keep = x[i]
                best_t, best_f = keep, fx
                for off in grid[1:]:
                    x[i] = keep + off
                    f = _call(fn, x)
                    if f > best_f:
                        best_t, best_f = x[i], f
                x[i] = best_t
                fx = best_f
            history.append(fx)
        sweeps, converged = 0, False
        while sweeps < opts.max_sweeps:
            sweeps += 1
            before = fx
            pos = 0
            for size in obj.block_sizes:
                for i in range(pos, pos + size):
                    keep = x[i]
                    t, f = _line_search(fn, x, i, keep, period / 4.0, opts.line_iters)
                    if f > fx:
                        x[i], fx = t, f
                    else:
                        x[i] = keep
                pos += size
            history.append(fx)
            if fx - before < opts.tol:
                converged = True
                break
    except _NonFinite:
        return RestartResult(-math.inf, x, np.array(start, dtype=float), 0, False, True, [])
    x = obj.lower + np.mod(x - obj.lower, period)
    return RestartResult(fx, x, np.array(start, dtype=float), sweeps, converged, False, history)


def _polish(obj: BlockObjective, r: RestartResult, opts: OptimizeOptions) -> None:
    fn = obj.evaluate

    def neg(x):
        v = float(fn(np.ascontiguousarray(x)))
        return -v if math.isfinite(v) else math.inf

    res = minimize(neg, r.angles, method="Powell",
                   options={"xtol": 1e-10, "ftol": 1e-15, "maxfev": 200_000})
    if -res.fun > r.value:
        period = obj.upper - obj.lower
        r.angles = obj.lower + np.mod(res.x - obj.lower, period)
        r.value = float(fn(np.ascontiguousarray(r.angles)))
        r.history.append(r.value)
        r.converged = r.converged or bool(res.success)
    r.polished = True


def _private(obj: BlockObjective) -> BlockObjective:
    make = getattr(obj.evaluate, "copy", None)
    return dataclasses.replace(obj, evaluate=make()) if make is not None else obj


def _map_restarts(task, obj: BlockObjective, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [task(obj, item) for item in items]
    local = threading.local()

    def run(item):
        mine = getattr(local, "obj", None)
        if mine is None:
            mine = local.obj = _private(obj)
        return task(mine, item)

    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(run, items))


def starting_points(dim: int, count: int, seed: int, lower: float = 0.0,
                    upper: float = TWO_PI) -> np.ndarray:
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    return lower + (upper - lower) * sampler.random(count)


def multistart_maximize(obj: BlockObjective, restarts: int = 32, seed: int = 0,
                        tol: float = 1e-9, initial=None,
                        opts: OptimizeOptions | None = None) -> OptimizeResult:
    """Best of ``restarts`` block-coordinate ascents. Reproducible for a fixed seed.

    ``initial`` (optional) replaces the first low-discrepancy starting point.
    """
    if opts is None:
        opts = OptimizeOptions(restarts=restarts, seed=seed, tol=tol)
    starts = starting_points(obj.dim, opts.restarts, opts.seed, obj.lower, obj.upper)
    if initial is not None:
        starts[0] = np.asarray(initial, dtype=float)
    results = _map_restarts(lambda o, s: coordinate_ascent(o, s, opts), obj, starts, opts.workers)
    ranked = sorted((r for r in results if not r.aborted), key=lambda r: -r.value)
    _map_restarts(lambda o, r: _polish(o, r, opts), obj, ranked[: opts.polish], opts.workers)
    live = [r for r in results if not r.aborted]
    if not live:
        return OptimizeResult(-math.inf, starts[0].copy(), results)
    best = max(live, key=lambda r: r.value)
    return OptimizeResult(best.value, best.angles.copy(), results)


def settings_from_angles(angles, n: int) -> np.ndarray:
    """(n, 2, 3) unit vectors from polar/azimuthal pairs."""
    ang = np.asarray(angles, dtype=float).reshape(n, 4)
    return np.array([[kernels.unit_vector(r[0], r[1]), kernels.unit_vector(r[2], r[3])]
                     for r in ang])


def maximize_quantum_value(tensor, opts: OptimizeOptions | None = None):
    """Largest left side of the general inequality over all two-setting choices.

    Returns ``(value, MeasurementSettings, OptimizeResult)``.
    """
    from genbell.corrtensor import MeasurementSettings

    opts = opts or OptimizeOptions()
    n = tensor.n_qubits
    if not np.any(tensor.entries):
        dirs = np.tile(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]), (n, 1, 1))
        return 0.0, MeasurementSettings(dirs), None
    obj = BlockObjective([4] * n, kernels.AngleObjective(tensor.entries, n, "zb"))
    res = multistart_maximize(obj, opts=opts)
    return res.value, MeasurementSettings(settings_from_angles(res.angles, n)), res

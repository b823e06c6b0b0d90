"""Compare the compiled kernels against the numpy fallback.

Two measurements per qubit count:

* objective evaluations per second for the T^mod angle objective, called
  directly on each backend;
* wall time of a complete ``max_tmod`` run on a GHZ-Werner state, measured
  in a child process so that backend selection happens at import.

Usage: python3 benchmarks/bench_kernels.py [--n 2 3 4 5] [--restarts 8]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from genbell import _pykernels, qstate
from genbell.corrtensor import compute_tensor

try:
    from genbell import _kernels
except ImportError:
    _kernels = None

CHILD = """
import time, sys
from genbell import qstate, BACKEND
from genbell.corrtensor import compute_tensor
from genbell.criterion import max_tmod
from genbell.optimizer import OptimizeOptions
n, restarts = int(sys.argv[1]), int(sys.argv[2])
t = compute_tensor(qstate.mix_with_noise(qstate.make_ghz(n).density_matrix(), 0.9))
t0 = time.perf_counter()
value = max_tmod(t, OptimizeOptions(restarts=restarts)).value
print(BACKEND, time.perf_counter() - t0, value)
"""


def evals_per_second(module, tensor, n, min_time=0.5):
    obj = module.AngleObjective(tensor.array, n, "tmod")
    x = np.random.default_rng(0).uniform(0, 2 * np.pi, 4 * n)
    calls, t0 = 0, time.perf_counter()
    while time.perf_counter() - t0 < min_time:
        for _ in range(50):
            obj(x)
        calls += 50
    return calls / (time.perf_counter() - t0)


def optimizer_wall_time(n, restarts, pure):
    env = dict(os.environ)
    env.pop("GENBELL_PURE_PYTHON", None)
    if pure:
        env["GENBELL_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", CHILD, str(n), str(restarts)],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    return out[0], float(out[1]), float(out[2])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--restarts", type=int, default=8)
    args = ap.parse_args(argv)

    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
    header = f"{'N':>2}  {'compiled ev/s':>14}  {'numpy ev/s':>11}  {'ratio':>6}  " \
             f"{'max_tmod compiled':>17}  {'max_tmod numpy':>14}"
    print(header)
    print("-" * len(header))
    for n in args.n:
        tensor = compute_tensor(qstate.make_ghz(n).density_matrix())
        slow = evals_per_second(_pykernels, tensor, n)
        fast = evals_per_second(_kernels, tensor, n) if _kernels else float("nan")
        _, t_slow, v_slow = optimizer_wall_time(n, args.restarts, pure=True)
        if _kernels:
            _, t_fast, v_fast = optimizer_wall_time(n, args.restarts, pure=False)
            assert abs(v_fast - v_slow) < 1e-6, (v_fast, v_slow)
        else:
            t_fast = float("nan")
        print(f"{n:>2}  {fast:>14.0f}  {slow:>11.0f}  {fast / slow:>6.1f}  "
              f"{t_fast:>16.2f}s  {t_slow:>13.2f}s")


if __name__ == "__main__":
    main()

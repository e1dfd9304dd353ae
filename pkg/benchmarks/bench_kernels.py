"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--dims 3 7 31] [--batch 1000] [--repeat 5]

Single-point calls are dominated by per-call overhead, which is where the
compiled loops help most; batched calls are closer because numpy already
vectorizes them.
"""

import argparse
import timeit

import numpy as np

from simplexgeom import _pykernels as py
from simplexgeom import kernels


def _data(rng, m, k):
    W = rng.dirichlet(np.ones(m), size=k)
    W = 0.9 * W + 0.1 / m
    X = rng.standard_normal((k, m))
    X -= X.mean(axis=1, keepdims=True)
    Y = rng.standard_normal((k, m))
    Y -= Y.mean(axis=1, keepdims=True)
    M = rng.uniform(size=(m + 1, m))
    M /= M.sum(axis=0)
    return W, X, Y, M


def cases(W, X, Y, M):
    w, x, y = W[0].copy(), X[0].copy(), Y[0].copy()
    return {
        "fisher_eval": lambda b: b.fisher_eval(w, x, y),
        "lm_eval": lambda b: b.lm_eval(w, x, y, 2.0, -1.0),
        "stoch_apply": lambda b: b.stoch_apply(M, w),
        "cone_terms": lambda b: b.cone_terms(w, x, y),
        "lm_eval_batch": lambda b: b.lm_eval_batch(W, X, Y, 2.0, -1.0),
        "stoch_apply_batch": lambda b: b.stoch_apply_batch(M, W),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 7, 31])
    ap.add_argument("--batch", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if kernels.compiled_backend is None:
        print("compiled extension not available; only the numpy fallback can be timed")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'m':>5}{'numpy (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for m in args.dims:
        data = _data(rng, m, args.batch)
        for name, call in cases(*data).items():
            out = []
            for backend in (py, kernels.compiled_backend):
                t = timeit.Timer(lambda: call(backend))
                number, _ = t.autorange()
                best = min(t.repeat(args.repeat, number)) / number
                out.append(best * 1e6)
            print(f"{name:<20}{m:>5}{out[0]:>14.2f}{out[1]:>14.2f}{out[0] / out[1]:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Benchmark the compiled kernels against the numpy fallback.

Runs the two hot paths (CRF forward-backward + Viterbi, and the Pegasos
inner loop) on a ladder of sizes and prints best-of-5 timings for each
backend. Usage:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cfx._kernels import _pykernels

try:
    from cfx._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_crf(impl, T, n_sentences=200, K=3, seed=0):
    rng = np.random.default_rng(seed)
    unary = rng.normal(size=(T, K))
    trans = rng.normal(size=(K, K))
    start = rng.normal(size=K)
    stop = rng.normal(size=K)

    def run():
        for _ in range(n_sentences):
            impl.crf_forward_backward(unary, trans, start, stop)
            impl.crf_viterbi(unary, trans, start, stop)

    return best_of(run)


def bench_pegasos(impl, n, d, nnz, epochs=5, seed=0):
    rng = np.random.default_rng(seed)
    indptr = np.arange(0, n * nnz + 1, nnz, dtype=np.int64)
    indices = np.concatenate([np.sort(rng.choice(d, size=nnz, replace=False)) for _ in range(n)]).astype(np.int64)
    data = rng.normal(size=n * nnz)
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    sw = np.ones(n)
    order = np.concatenate([rng.permutation(n) for _ in range(epochs)]).astype(np.int64)
    lam = 1.0 / n

    def run():
        v = np.zeros(d)
        impl.pegasos_epochs(indptr, indices, data, y, sw, order, lam, 0, v, 0.0, 2)

    return best_of(run)


def main():
    impls = [("numpy", _pykernels)]
    if _ckernels is not None:
        impls.append(("cython", _ckernels))
    else:
        print("compiled kernels unavailable; benchmarking the fallback only\n")

    print(f"{'workload':<40}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}")
    rows = [
        ("crf fwd-bwd+viterbi, T=10 x200", lambda impl: bench_crf(impl, T=10)),
        ("crf fwd-bwd+viterbi, T=40 x200", lambda impl: bench_crf(impl, T=40)),
        ("crf fwd-bwd+viterbi, T=120 x200", lambda impl: bench_crf(impl, T=120)),
        ("pegasos 2k x 5 epochs, d=10k, nnz=40", lambda impl: bench_pegasos(impl, n=2000, d=10_000, nnz=40)),
        ("pegasos 10k x 5 epochs, d=50k, nnz=80", lambda impl: bench_pegasos(impl, n=10_000, d=50_000, nnz=80)),
    ]
    for label, runner in rows:
        times = [runner(impl) for _, impl in impls]
        cells = "".join(f"{t * 1000:>10.1f}ms" for t in times)
        speedup = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else f"{'-':>10}"
        print(f"{label:<40}{cells}{speedup}")


if __name__ == "__main__":
    main()

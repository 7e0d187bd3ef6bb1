"""Compare the compiled and pure-Python boolean splitting kernels.

Run with ``python3 benchmarks/bench_boolsearch.py``. Each case is an
idempotent boolean matrix that does not split within the bound, so both
kernels have to exhaust the whole search space.
"""
import argparse
import time


from splitcat.decompose.boolsearch import KERNELS, search_splitting_bool
from splitcat.matcat import counterexample_idempotent, frel, perfectly_distinguishable_pair


def counterexample(n):
    t = frel()
    a0, a1, _, e1 = perfectly_distinguishable_pair(t, n)
    return counterexample_idempotent(t, a0, a1, e1)


CASES = [(2, 4), (3, 3), (3, 4), (4, 3), (4, 4), (5, 3)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(KERNELS)
    if "cython" not in backends:
        print("compiled kernel not available; reporting the pure-Python kernel only")
    print(f"{'n':>3} {'b_max':>5} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")
    for n, b_max in CASES:
        p = counterexample(n)
        assert all(search_splitting_bool(p, b_max, backend=b) is None for b in backends)
        times = {b: best_of(lambda b=b: search_splitting_bool(p, b_max, backend=b), args.repeat)
                 for b in backends}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n:>3} {b_max:>5} " + " ".join(f"{times[b]:>11.4f}s" for b in backends) + f"   {speed:7.1f}x")


if __name__ == "__main__":
    main()

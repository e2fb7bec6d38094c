"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends receive identical inputs; results are checked for equality
before timings are reported.  Exact runs spend most of their time in
Fraction arithmetic, which neither backend can avoid, so the float row shows
the loop overhead the extension removes.
"""

import argparse
import random
import timeit
from fractions import Fraction

from grstar import _kernels_py, kernels, tangle
from grstar.ncpoly import random_element


def star_case(rng, letters=2, degree=8, terms=40):
    a = random_element(rng, letters, degree, terms)
    b = random_element(rng, letters, degree, terms)
    return (a._kernel_items(True), b._kernel_items(True))


def wedge_case(rng, k=2, letters=2, terms=40):
    def items():
        out = {}
        for _ in range(terms):
            w = tuple(rng.randint(1, letters) for _ in range(2 * k + rng.randint(0, 5)))
            out[w] = Fraction(rng.randint(1, 5), rng.randint(1, 3))
        return list(out.items())

    return items(), items()


def contract_case(rng, letters=2):
    t = tangle.random_tangle(rng, 10, [6, 6, 6])
    pairs, outer_src, nfree = tangle._plan(t)
    flat = [rng.randint(1, letters) for _ in range(18)]
    for i, j in pairs:  # consistent letters on inner-inner strands, so nothing is pruned
        flat[j] = flat[i]
    flat = tuple(flat)
    return flat, pairs, outer_src, nfree, letters


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    compiled = kernels.compiled_module()
    if compiled is None:
        print("compiled extension not built; only the pure-Python backend is available")
    rng = random.Random(args.seed)
    a, b = star_case(rng)
    wa, wb = wedge_case(rng)
    cargs = contract_case(rng)
    fa = [(w, float(c)) for w, c in a]
    fb = [(w, float(c)) for w, c in b]
    cases = {
        "star_accumulate": lambda m: m.star_accumulate(a, b, {}),
        "star_accumulate(float)": lambda m: m.star_accumulate(fa, fb, {}),
        "bullet_accumulate": lambda m: m.bullet_accumulate(a, b, {}),
        "wedge_accumulate(k=2)": lambda m: m.wedge_accumulate(wa, wb, 2, {}),
        "contract_words": lambda m: m.contract_words(*cargs),
    }
    backends = [("python", _kernels_py)] + ([("cython", compiled)] if compiled else [])
    print(f"{'kernel':24s} " + " ".join(f"{name:>12s}" for name, _ in backends) + ("     speedup" if compiled else ""))
    for label, fn in cases.items():
        if compiled:
            assert fn(_kernels_py) == fn(compiled), label
        times = []
        for _, mod in backends:
            number = 3
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:24s} " + " ".join(f"{t * 1e6:10.1f}us" for t in times)
        if compiled:
            row += f"  {times[0] / times[1]:9.2f}x"
        print(row)


if __name__ == "__main__":
    main()

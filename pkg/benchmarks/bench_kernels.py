"""Benchmark the integer-transform kernels: numba @njit vs pure numpy.

The same shift-add evaluation backs both paths (bit-identical outputs);
this script times forward+inverse batches at both window sizes.

Run:
    python benchmarks/bench_kernels.py [--windows 20000] [--repeat 5]

Setting WFCODEC_NO_NUMBA=1 makes the package itself use the numpy path;
this benchmark always imports both implementations directly.
"""

import argparse
import timeit

import numpy as np

from wfcodec import _accel
from wfcodec.transform import FORWARD_SHIFT, INT_MATRICES, INVERSE_SHIFT, _TERM_TABLES, _TERM_TABLES_T


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--windows", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not _accel.HAVE_NUMBA:
        print("numba unavailable; only the numpy path will run")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<28}{'windows':>9}{'best (ms)':>12}{'per window (us)':>17}")
    for ws in (8, 16):
        x = rng.integers(-256, 257, size=(args.windows, ws)).astype(np.int64)
        mat = INT_MATRICES[ws]
        fsh, ish = FORWARD_SHIFT[ws], INVERSE_SHIFT[ws]

        runs = {
            f"numpy fwd ws={ws}": lambda: _accel.int_matvec_numpy(x, mat, fsh),
            f"numpy inv ws={ws}": lambda: _accel.int_matvec_numpy(x, mat.T, ish),
        }
        if _accel.HAVE_NUMBA:
            tables, tables_t = _TERM_TABLES[ws], _TERM_TABLES_T[ws]
            _accel.int_matvec_numba(x[:8], tables, fsh)  # compile outside timing
            _accel.int_matvec_numba(x[:8], tables_t, ish)
            runs[f"numba fwd ws={ws}"] = lambda: _accel.int_matvec_numba(x, tables, fsh)
            runs[f"numba inv ws={ws}"] = lambda: _accel.int_matvec_numba(x, tables_t, ish)

            same_f = np.array_equal(
                _accel.int_matvec_numba(x, tables, fsh), _accel.int_matvec_numpy(x, mat, fsh)
            )
            same_i = np.array_equal(
                _accel.int_matvec_numba(x, tables_t, ish),
                _accel.int_matvec_numpy(x, mat.T, ish),
            )
            assert same_f and same_i, "kernel outputs diverged"

        for name, fn in runs.items():
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            print(f"{name:<28}{args.windows:>9}{best * 1e3:>12.2f}{best / args.windows * 1e6:>17.3f}")


if __name__ == "__main__":
    main()

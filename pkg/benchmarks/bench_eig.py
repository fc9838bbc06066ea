#!/usr/bin/env python3
"""Benchmark the compiled Jacobi eigensolver core against the NumPy fallback.

Runs both backends on the same batch of random Hermitian matrices per size,
reports wall-clock time per diagonalization and the speedup of the compiled
core, and cross-checks that the two backends agree: identical sweep schedule
means the eigenvalues match to roundoff and both reconstruct the input to
machine precision.

Usage:
    python3 benchmarks/bench_eig.py [--sizes 4,8,16,32,64] [--repeats 20]
                                    [--seed 0]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from specjm import _jacobi_py

try:
    from specjm import _jacobi_cy
except ImportError:
    _jacobi_cy = None


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2.0


def time_backend(solver, mats: list[np.ndarray]) -> tuple[float, float, float]:
    """Return (seconds per call, max eigenvalue defect, max reconstruction err).

    The eigenvalue defect compares against numpy.linalg.eigvalsh; the
    reconstruction error is ||V diag(w) V* - A||_max / ||A||_max.
    """
    # warm-up outside the timed region (first call may pay setup costs)
    solver(mats[0])
    start = time.perf_counter()
    results = [solver(m) for m in mats]
    elapsed = (time.perf_counter() - start) / len(mats)
    eig_defect = 0.0
    recon_err = 0.0
    for m, (w, v) in zip(mats, results):
        ref = np.linalg.eigvalsh(m)
        scale = max(1.0, float(np.max(np.abs(ref))))
        eig_defect = max(eig_defect, float(np.max(np.abs(w - ref))) / scale)
        rec = (v * w) @ v.conj().T
        recon_err = max(
            recon_err,
            float(np.max(np.abs(rec - m))) / max(1.0, float(np.max(np.abs(m)))),
        )
    return elapsed, eig_defect, recon_err


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="4,8,16,32,64",
                        help="comma-separated matrix sizes")
    parser.add_argument("--repeats", type=int, default=20,
                        help="matrices per size")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rng = np.random.default_rng(args.seed)

    if _jacobi_cy is None:
        print("compiled core not built; timing the NumPy backend only",
              file=sys.stderr)

    header = f"{'n':>5} {'python (ms)':>12}"
    if _jacobi_cy is not None:
        header += f" {'compiled (ms)':>14} {'speedup':>8}"
    header += f" {'eig defect':>11} {'recon err':>10}"
    print(header)
    print("-" * len(header))

    for n in sizes:
        mats = [random_hermitian(n, rng) for _ in range(args.repeats)]
        t_py, defect_py, recon_py = time_backend(_jacobi_py.jacobi_eigh, mats)
        defect = defect_py
        recon = recon_py
        row = f"{n:>5} {t_py * 1e3:>12.3f}"
        if _jacobi_cy is not None:
            t_cy, defect_cy, recon_cy = time_backend(
                _jacobi_cy.jacobi_eigh, mats)
            defect = max(defect, defect_cy)
            recon = max(recon, recon_cy)
            agree = max(
                float(np.max(np.abs(
                    _jacobi_cy.jacobi_eigh(m)[0] - _jacobi_py.jacobi_eigh(m)[0]
                ))) for m in mats
            )
            if agree > 1e-12:
                print(f"backend mismatch at n={n}: max eigenvalue "
                      f"difference {agree:.3e}", file=sys.stderr)
                return 1
            row += f" {t_cy * 1e3:>14.3f} {t_py / t_cy:>7.1f}x"
        row += f" {defect:>11.2e} {recon:>10.2e}"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

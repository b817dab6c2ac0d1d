"""Compiled vs pure-Python kernels on the same flow and FPTAS workload.

    python benchmarks/bench_kernels.py [--quick]

Each side runs in its own interpreter; the Python side sets
BRIBERON_DISABLE_NUMBA=1 before import.  Compilation happens in an untimed
warm-up call.
"""

import sys

from briberon.bench import kernels

if __name__ == "__main__":
    print(kernels(quick="--quick" in sys.argv))

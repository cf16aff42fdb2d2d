"""Exhaustive heralding check: decode every reachable outcome grid for n*m <= N.

Usage: python scripts/soundness_sweep.py [N]   (default 12, maximum 16)
"""

import sys
import time

from qpc_repeater.bm_model import exhaustive_soundness
from qpc_repeater.qpc_core import BELL_STATES, CodeParams

top = int(sys.argv[1]) if len(sys.argv) > 1 else 12
print("code,grids,misidentified,seconds")
for size in range(1, top + 1):
    for n in (d for d in range(1, size + 1) if size % d == 0):
        code = CodeParams(n, size // n)
        t = time.perf_counter()
        reports = [exhaustive_soundness(code, idx) for idx in BELL_STATES]
        grids = sum(r.grids for r in reports)
        wrong = sum(r.misidentified for r in reports)
        print(f"\"{code}\",{grids},{wrong},{time.perf_counter() - t:.1f}", flush=True)

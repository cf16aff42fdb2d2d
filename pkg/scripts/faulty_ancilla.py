"""Rt0 of (37,6) near its cost-optimal spacing with eta_m = 0.97.

Shows how sharply the reported percentage depends on the exact L0: the
optimum sits at ~2.092 km, while 73.46% is reached only at 2.090 km.
"""

from qpc_repeater import channel_chain as cc
from qpc_repeater.qpc_core import CodeParams

code = CodeParams(37, 6)
best = cc.optimize(1000, eta_missing=0.97).best
print(f"optimum {best.code} L0={best.spacing_km:.4f} km Rt0={100 * best.success_per_timestep:.4f}%")
print("L0_km,rt0_percent,cost")
for i in range(-10, 11):
    spacing = 2.09 + 0.001 * i
    cfg = cc.ChainConfig(1000, spacing, eta_missing=0.97)
    print(f"{spacing:.3f},{100 * cc.chain_success(code, cfg):.4f},{cc.cost(code, cfg):.4f}")

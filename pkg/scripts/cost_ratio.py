"""Optimal-cost ratio between linear-optics and perfect physical BMs over distance."""

from qpc_repeater.channel_chain import perfect_bm_cost_ratio

print("L_km,ratio,code,L0_km,perfect_code,perfect_L0_km")
for L in (250, 500, 1000, 2000, 4000):
    r = perfect_bm_cost_ratio(L)
    print(
        f"{L},{r.ratio:.4f},\"{r.standard.code}\",{r.standard.spacing_km:.4f},"
        f"\"{r.perfect.code}\",{r.perfect.spacing_km:.4f}"
    )

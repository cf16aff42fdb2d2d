"""Repeater chain built from logical Bell measurements: rates, cost, optimization.

A chain of length ``L`` has stations every ``L0``; each hop succeeds with
probability ``eta_s * p`` where ``p`` is the logical BM success probability
at the per-photon survival ``eta_m**2 * exp(-L0 / L_att)``.  Rates are
reported per elementary time step, i.e. as ``R * t0``, and ``L / L0`` is
treated as a real exponent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .analytics import bm_success_probability, perfect_bm_success_probability
from .qpc_core import CodeParams

DEFAULT_ATTENUATION_KM = 22.0
DEFAULT_N_RANGE = (1, 40)
DEFAULT_M_RANGE = (1, 8)
DEFAULT_SPACING_BOUNDS_KM = (0.5, 10.0)
GRID_POINTS = 200
SPACING_TOL_KM = 1e-4

INV_PHI = (math.sqrt(5) - 1) / 2


class DegenerateChain(ValueError):
    """No end-to-end success is possible for the requested configuration."""


def _check_probability(name: str, value: float) -> None:
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ChainConfig:
    total_distance_km: float
    station_spacing_km: float
    attenuation_length_km: float = DEFAULT_ATTENUATION_KM
    eta_missing: float = 1.0
    eta_source: float = 1.0

    def __post_init__(self) -> None:
        if self.total_distance_km <= 0:
            raise ValueError("total distance must be positive")
        if not 0 <= self.station_spacing_km <= self.total_distance_km:
            raise ValueError("station spacing must lie in [0, total distance]")
        if self.attenuation_length_km <= 0:
            raise ValueError("attenuation length must be positive")
        _check_probability("eta_missing", self.eta_missing)
        _check_probability("eta_source", self.eta_source)

    @property
    def hops(self) -> float:
        return self.total_distance_km / self.station_spacing_km

    def with_spacing(self, spacing_km: float) -> "ChainConfig":
        return replace(self, station_spacing_km=spacing_km)


@dataclass(frozen=True)
class ChainResult:
    code: CodeParams
    spacing_km: float
    success_per_timestep: float
    cost: float
    stations: float
    at_boundary: bool = False


def effective_eta(cfg: ChainConfig) -> float:
    """Per-pair survival: fibre transmission times both ancilla photons present."""
    return cfg.eta_missing**2 * math.exp(-cfg.station_spacing_km / cfg.attenuation_length_km)


def _bm(perfect: bool) -> Callable[[CodeParams, float], float]:
    return perfect_bm_success_probability if perfect else bm_success_probability


def hop_success(code: CodeParams, cfg: ChainConfig, perfect: bool = False) -> float:
    return cfg.eta_source * _bm(perfect)(code, effective_eta(cfg))


def _require_spacing(cfg: ChainConfig) -> None:
    if cfg.station_spacing_km <= 0:
        raise ValueError("station spacing must be positive for a chain")


def chain_success(code: CodeParams, cfg: ChainConfig, perfect: bool = False) -> float:
    """End-to-end success per time step, ``(eta_s * p) ** (L / L0)``."""
    _require_spacing(cfg)
    hop = hop_success(code, cfg, perfect)
    return hop**cfg.hops if hop > 0 else 0.0


def log_cost(code: CodeParams, cfg: ChainConfig, perfect: bool = False) -> float:
    """``log(n m / (R t0 L0))``; ``inf`` where the chain never succeeds."""
    _require_spacing(cfg)
    hop = hop_success(code, cfg, perfect)
    if hop <= 0:
        return math.inf
    return math.log(code.size) - cfg.hops * math.log(hop) - math.log(cfg.station_spacing_km)


def cost(code: CodeParams, cfg: ChainConfig, perfect: bool = False) -> float:
    """Photons per unit rate per km of spacing, ``n m / (R t0 L0)``."""
    value = log_cost(code, cfg, perfect)
    if math.isinf(value):
        raise DegenerateChain(f"chain with code {code} never succeeds")
    return math.exp(value) if value < 709 else math.inf


def golden_section_minimize(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]`` until the bracket is below ``tol``.

    Returns the best evaluated point and its value.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _check_range(name: str, bounds: Sequence[int]) -> range:
    lo, hi = bounds
    if lo < 1 or hi < lo:
        raise ValueError(f"{name} range {bounds} is empty or non-positive")
    return range(lo, hi + 1)


def optimize_spacing(
    code: CodeParams,
    base: ChainConfig,
    spacing_bounds_km: tuple[float, float] = DEFAULT_SPACING_BOUNDS_KM,
    perfect: bool = False,
    grid_points: int = GRID_POINTS,
    tol_km: float = SPACING_TOL_KM,
) -> ChainResult | None:
    """Cost-minimizing spacing for one code, or ``None`` if it never succeeds.

    A uniform grid brackets the minimum, then golden-section search refines
    it inside the neighbouring grid cells.
    """
    lo, hi = spacing_bounds_km

    def f(x: float) -> float:
        return log_cost(code, base.with_spacing(x), perfect)

    if hi == lo:
        x, fx = lo, f(lo)
    else:
        step = (hi - lo) / (grid_points - 1)
        grid = [lo + i * step for i in range(grid_points)]
        values = [f(x) for x in grid]
        best = min(range(grid_points), key=values.__getitem__)
        x, fx = grid[best], values[best]
        if math.isinf(fx):
            return None
        a, b = grid[max(best - 1, 0)], grid[min(best + 1, grid_points - 1)]
        x_ref, f_ref = golden_section_minimize(f, a, b, tol_km)
        if f_ref <= fx:
            x, fx = x_ref, f_ref
    if math.isinf(fx):
        return None
    cfg = base.with_spacing(x)
    return ChainResult(
        code=code,
        spacing_km=x,
        success_per_timestep=chain_success(code, cfg, perfect),
        cost=math.exp(fx) if fx < 709 else math.inf,
        stations=cfg.hops,
        at_boundary=hi > lo and min(x - lo, hi - x) <= tol_km,
    )


@dataclass(frozen=True)
class Optimization:
    best: ChainResult
    ranked: list[ChainResult] = field(repr=False)


def optimize(
    L_km: float,
    n_range: tuple[int, int] = DEFAULT_N_RANGE,
    m_range: tuple[int, int] = DEFAULT_M_RANGE,
    spacing_bounds_km: tuple[float, float] = DEFAULT_SPACING_BOUNDS_KM,
    *,
    attenuation_length_km: float = DEFAULT_ATTENUATION_KM,
    eta_missing: float = 1.0,
    eta_source: float = 1.0,
    perfect: bool = False,
    grid_points: int = GRID_POINTS,
    tol_km: float = SPACING_TOL_KM,
    workers: int = 1,
) -> Optimization:
    """Search codes and spacings for the lowest cost at total distance ``L_km``.

    Every code in the ranges gets its own optimal spacing; results are
    ranked by ``(cost, n, m, spacing)`` so the output is independent of
    evaluation order.
    """
    lo, hi = spacing_bounds_km
    if not 0 < lo <= hi <= L_km:
        raise ValueError(f"spacing bounds {spacing_bounds_km} must lie in (0, {L_km}]")
    codes = [CodeParams(n, m) for n in _check_range("n", n_range) for m in _check_range("m", m_range)]
    base = ChainConfig(L_km, hi, attenuation_length_km, eta_missing, eta_source)

    def run(code: CodeParams) -> ChainResult | None:
        return optimize_spacing(code, base, spacing_bounds_km, perfect, grid_points, tol_km)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, codes))
    else:
        results = [run(code) for code in codes]
    ranked = sorted(
        (r for r in results if r is not None),
        key=lambda r: (r.cost, r.code.n, r.code.m, r.spacing_km),
    )
    if not ranked:
        raise DegenerateChain("no code in the search space ever succeeds")
    return Optimization(ranked[0], ranked)


@dataclass(frozen=True)
class CurvePoint:
    code: CodeParams
    spacing_km: float
    success_per_timestep: float


def rate_curve(
    codes: Sequence[CodeParams],
    L_km: float,
    spacings_km: Sequence[float],
    *,
    attenuation_length_km: float = DEFAULT_ATTENUATION_KM,
    eta_missing: float = 1.0,
    eta_source: float = 1.0,
) -> list[CurvePoint]:
    points = []
    for code in codes:
        for spacing in spacings_km:
            cfg = ChainConfig(L_km, spacing, attenuation_length_km, eta_missing, eta_source)
            points.append(CurvePoint(code, spacing, chain_success(code, cfg)))
    return points


def source_vacuum_threshold(
    L_km: float,
    L0_km: float,
    code: CodeParams,
    target_rate: float,
    *,
    attenuation_length_km: float = DEFAULT_ATTENUATION_KM,
    eta_missing: float = 1.0,
) -> float:
    """Largest source vacuum probability ``1 - eta_s`` that still reaches ``target_rate``.

    Solves ``(eta_s p) ** (L / L0) = target_rate`` for ``eta_s``.
    """
    _check_probability("target_rate", target_rate)
    cfg = ChainConfig(L_km, L0_km, attenuation_length_km, eta_missing, 1.0)
    best = chain_success(code, cfg)
    if target_rate > best * (1 + 1e-12):
        raise DegenerateChain(
            f"target {target_rate} unreachable: perfect sources give only {best}"
        )
    p = hop_success(code, cfg)
    eta_s = target_rate ** (1 / cfg.hops) / p
    return max(0.0, 1.0 - eta_s)


@dataclass(frozen=True)
class ResourceCount:
    dopplers: int
    multiplexed_source_success: float


def resource_count(
    code: CodeParams, sources_per_multiplex: int = 10, eta_source_single: float = 0.5
) -> ResourceCount:
    """Photon-doubler modules for one encoded Bell state, and multiplexed source success."""
    if sources_per_multiplex < 1:
        raise ValueError("need at least one source per multiplex")
    _check_probability("eta_source_single", eta_source_single)
    return ResourceCount(
        dopplers=2 * code.size - 1,
        multiplexed_source_success=1 - (1 - eta_source_single) ** sources_per_multiplex,
    )


@dataclass(frozen=True)
class CostRatio:
    ratio: float
    standard: ChainResult
    perfect: ChainResult


def perfect_bm_cost_ratio(
    L_km: float,
    n_range: tuple[int, int] = DEFAULT_N_RANGE,
    m_range: tuple[int, int] = DEFAULT_M_RANGE,
    spacing_bounds_km: tuple[float, float] = DEFAULT_SPACING_BOUNDS_KM,
    **overrides,
) -> CostRatio:
    """Optimal cost with linear-optics physical BMs over that with perfect ones."""
    standard = optimize(L_km, n_range, m_range, spacing_bounds_km, perfect=False, **overrides).best
    perfect = optimize(L_km, n_range, m_range, spacing_bounds_km, perfect=True, **overrides).best
    return CostRatio(standard.cost / perfect.cost, standard, perfect)

"""Closed-form and exact combinatorial Bell measurement success probabilities.

Floats are accepted wherever a probability is; passing a
:class:`fractions.Fraction` (or int) instead switches the closed forms to
exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from math import comb

from .qpc_core import CapacityError, CodeParams

DIRECT_SUM_CAPACITY = 60


def _check_eta(eta) -> None:
    if not 0 <= eta <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def _block_alive(eta, m: int):
    """Probability that a block keeps at least one of its ``m`` photons."""
    if isinstance(eta, (Fraction, int)):
        return 1 - (1 - Fraction(eta)) ** m
    if eta == 1:
        return 1.0
    return -math.expm1(m * math.log1p(-eta))


def _power_gap(a, gap, n: int):
    """``a**n - (a - gap)**n`` as ``gap * sum(a**j * b**(n-1-j))``.

    Both ``a`` and ``a - gap`` are non-negative here, so the sum has no
    cancellation even when the two powers nearly coincide.
    """
    b = a - gap
    total = 0
    a_pow = 1
    for j in range(n):
        total += a_pow * b ** (n - 1 - j)
        a_pow *= a
    return gap * total


def bm_success_probability(code: CodeParams, eta):
    """Logical BM success probability under uniform per-photon survival ``eta``.

    ``[1 - (1-eta)^m]^n - [1 - (1-eta)^m - eta^m / 2]^n``, the average over
    a uniformly random Bell state.
    """
    _check_eta(eta)
    return _power_gap(_block_alive(eta, code.m), eta**code.m / 2, code.n)


def perfect_bm_success_probability(code: CodeParams, eta):
    """As :func:`bm_success_probability` with unit-efficiency physical BMs.

    Any block without losses then reveals ``l``, so the ``eta^m / 2`` term
    becomes ``eta^m``.
    """
    _check_eta(eta)
    return _power_gap(_block_alive(eta, code.m), eta**code.m, code.n)


def conditional_success_probability(code: CodeParams, eta, k: int):
    """Success probability for a Bell state with first index ``k``.

    States with ``k = 1`` always have a block with index 1 and do slightly
    better than the average; the two differ from it by ``(eta^m / 2)^n``.
    """
    if k not in (0, 1):
        raise ValueError(f"k must be 0 or 1, got {k!r}")
    shift = (eta**code.m / 2) ** code.n
    return bm_success_probability(code, eta) + (shift if k else -shift)


def max_loss(code: CodeParams) -> int:
    """Most photons one logical qubit can lose with the BM still succeeding."""
    return (code.n - 1) * (code.m - 1)


def n_combinatorial(i: int, mu: int, m: int) -> int:
    """Ways to spread ``mu`` losses over exactly ``i`` blocks of ``m`` photons.

    Every chosen block loses between 1 and ``m - 1`` photons.
    """
    if i < 0 or mu < 0 or m < 1:
        raise ValueError("i and mu must be non-negative and m positive")
    if i == 0 or mu == 0:
        return int(i == 0 and mu == 0)
    ways = [1] + [0] * mu
    for _ in range(i):
        nxt = [0] * (mu + 1)
        for used, w in enumerate(ways):
            if w:
                for j in range(1, min(m - 1, mu - used) + 1):
                    nxt[used + j] += w * comb(m, j)
        ways = nxt
    return ways[mu]


def _poly_mul(a: list[int], b: list[int], cap: int) -> list[int]:
    out = [0] * min(len(a) + len(b) - 1, cap + 1)
    for i, x in enumerate(a):
        if x and i <= cap:
            for j, y in enumerate(b[: cap + 1 - i]):
                out[i + j] += x * y
    return out


def _poly_pow(p: list[int], e: int, cap: int) -> list[int]:
    result = [1]
    base = p[: cap + 1]
    while e:
        if e & 1:
            result = _poly_mul(result, base, cap)
        e >>= 1
        if e:
            base = _poly_mul(base, base, cap)
    return result


def _loss_polynomial(code: CodeParams, cap: int) -> list[int]:
    """Integer coefficients of ``2^n * {[(1+x)^m - x^m]^n - [(1+x)^m - x^m - 1/2]^n}``."""
    n, m = code.n, code.m
    doubled = [2 * comb(m, j) for j in range(m)]  # 2[(1+x)^m - x^m]
    shifted = [doubled[0] - 1] + doubled[1:]
    a = _poly_pow(doubled, n, cap)
    b = _poly_pow(shifted, n, cap)
    a += [0] * (cap + 1 - len(a))
    b += [0] * (cap + 1 - len(b))
    return [x - y for x, y in zip(a, b)]


def _check_mu(code: CodeParams, mu: int) -> None:
    if not 0 <= mu <= code.size:
        raise ValueError(f"mu must lie in [0, {code.size}], got {mu}")


def p_mu(code: CodeParams, mu: int) -> Fraction:
    """Exact success probability given that exactly ``mu`` signal photons were lost."""
    _check_mu(code, mu)
    if mu > max_loss(code):
        return Fraction(0)
    coeff = _loss_polynomial(code, mu)[mu]
    return Fraction(coeff, 2**code.n * comb(code.size, mu))


def p_mu_direct(code: CodeParams, mu: int) -> Fraction:
    """:func:`p_mu` from the explicit sum over the number of damaged blocks.

    Slow; kept as an independent check on the polynomial route.
    """
    _check_mu(code, mu)
    if code.size > DIRECT_SUM_CAPACITY:
        raise CapacityError(f"direct p_mu sum supports n*m <= {DIRECT_SUM_CAPACITY}")
    n, m = code.n, code.m
    total = Fraction(0)
    for i in range(min(mu, n) + 1):
        weight = 1 - Fraction(1, 2 ** (n - i))
        total += weight * comb(n, i) * n_combinatorial(i, mu, m)
    return total / comb(code.size, mu)


@dataclass(frozen=True)
class PMuTable:
    code: CodeParams
    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, mu: int) -> Fraction:
        return self.values[mu]


def p_mu_table(code: CodeParams) -> PMuTable:
    """All ``p_mu`` for ``mu = 0 .. max_loss(code)``, sharing one polynomial expansion."""
    top = max_loss(code)
    coeffs = _loss_polynomial(code, top)
    scale = 2**code.n
    return PMuTable(
        code,
        tuple(Fraction(coeffs[mu], scale * comb(code.size, mu)) for mu in range(top + 1)),
    )


def reconstruct_p_from_pmu(code: CodeParams, eta) -> Fraction:
    """Total success probability rebuilt from ``p_mu`` and the binomial loss law."""
    eta = Fraction(eta)
    _check_eta(eta)
    size = code.size
    table = p_mu_table(code)
    return sum(
        (
            value * comb(size, mu) * eta ** (size - mu) * (1 - eta) ** mu
            for mu, value in enumerate(table.values)
        ),
        Fraction(0),
    )


def round_percent(value, decimals: int = 2) -> Decimal:
    """``100 * value`` rounded half away from zero, exactly (no float rounding)."""
    scaled = Fraction(value) * 100 * 10**decimals
    magnitude = math.floor(abs(scaled) + Fraction(1, 2))
    return Decimal(-magnitude if scaled < 0 else magnitude).scaleb(-decimals)

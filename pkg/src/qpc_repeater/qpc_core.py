"""Quantum parity code parameters and Bell-state decompositions.

A QPC(n, m) logical qubit is made of ``n`` blocks of ``m`` dual-rail photons.
Bell states at every encoding level are labelled by two bits ``(k, l)``.  A
block Bell state is a uniform superposition of products of physical Bell
states, and a logical Bell state is a uniform superposition of products of
block Bell states; the functions here enumerate those terms.

Relative phases between terms are not tracked: the measurement statistics
only need the (uniform) distribution over terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator

MAX_INDEX_SET_LENGTH = 24

ParityVector = tuple[int, ...]


class CapacityError(ValueError):
    """Raised when an exhaustive enumeration would exceed its size bound."""


def _check_bit(name: str, value: int) -> None:
    if value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")


@dataclass(frozen=True, order=True)
class CodeParams:
    n: int
    m: int

    def __post_init__(self) -> None:
        for name in ("n", "m"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    @property
    def size(self) -> int:
        """Physical photons per logical qubit."""
        return self.n * self.m

    @classmethod
    def parse(cls, text: str) -> "CodeParams":
        """Parse ``"n,m"`` (also accepts ``"(n,m)"``)."""
        parts = text.strip().strip("()").split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'n,m', got {text!r}")
        try:
            n, m = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"expected integers in 'n,m', got {text!r}") from None
        return cls(n, m)

    def __str__(self) -> str:
        return f"({self.n},{self.m})"


@dataclass(frozen=True, order=True)
class BellIndex:
    k: int
    l: int

    def __post_init__(self) -> None:
        _check_bit("k", self.k)
        _check_bit("l", self.l)

    def __iter__(self) -> Iterator[int]:
        yield self.k
        yield self.l

    def __str__(self) -> str:
        return f"phi_{self.k}{self.l}"


BELL_STATES = tuple(BellIndex(k, l) for k in (0, 1) for l in (0, 1))


def index_set(parity: int, length: int) -> list[ParityVector]:
    """All bit vectors of ``length`` whose sum mod 2 equals ``parity``.

    Vectors come out in lexicographic order; there are ``2**(length - 1)``.
    """
    _check_bit("parity", parity)
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    if length > MAX_INDEX_SET_LENGTH:
        raise CapacityError(
            f"index_set length {length} exceeds capacity {MAX_INDEX_SET_LENGTH}"
        )
    return [bits for bits in product((0, 1), repeat=length) if sum(bits) % 2 == parity]


def expand_block_bell(idx: BellIndex, m: int) -> list[tuple[BellIndex, ...]]:
    """Terms of the block Bell state ``idx`` as ``m``-tuples of physical Bell states.

    Every physical pair shares the first index ``k``; the second indices run
    over the vectors with parity ``l``.
    """
    return [tuple(BellIndex(idx.k, r) for r in rs) for rs in index_set(idx.l, m)]


def expand_logical_bell(idx: BellIndex, n: int) -> list[tuple[BellIndex, ...]]:
    """Terms of the logical Bell state ``idx`` as ``n``-tuples of block Bell states.

    Same structure as :func:`expand_block_bell` with the roles of ``k`` and
    ``l`` exchanged: every block carries ``l`` and the block first indices
    have parity ``k``.
    """
    return [tuple(BellIndex(s, idx.l) for s in ss) for ss in index_set(idx.k, n)]

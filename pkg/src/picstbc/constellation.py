"""Square-QAM alphabets with unit average energy and Gray bit labels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SUPPORTED_ORDERS = (4, 16, 64, 256)


@dataclass(frozen=True)
class Constellation:
    """A finite complex alphabet.  points[s] is the symbol whose bit label
    is the bits_per_symbol-bit binary expansion of s (MSB first)."""

    name: str
    points: np.ndarray
    bits_per_symbol: int
    # popcount of label XOR, used for cheap bit-error counting
    _bit_diff: np.ndarray = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return self.points.size

    def __post_init__(self):
        if self._bit_diff is None:
            n = self.points.size
            xor = np.arange(n)[:, None] ^ np.arange(n)[None, :]
            table = np.array([bin(x).count("1") for x in range(n)], dtype=np.int64)
            object.__setattr__(self, "_bit_diff", table[xor])

    def bit_errors(self, sent: np.ndarray, decided: np.ndarray) -> int:
        """Total number of differing label bits between two index arrays."""
        return int(self._bit_diff[np.asarray(sent), np.asarray(decided)].sum())


def _gray_decode(u: int) -> int:
    # inverse of g(i) = i ^ (i >> 1)
    i = 0
    while u:
        i ^= u
        u >>= 1
    return i


def make_qam(order: int) -> Constellation:
    """Square QAM on the odd-integer grid, scaled to unit average energy,
    with per-axis Gray labels (adjacent grid neighbours differ in one bit).
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported QAM order {order}; choose from {SUPPORTED_ORDERS}")
    side = math.isqrt(order)
    bits_per_symbol = int(math.log2(order))
    half = bits_per_symbol // 2
    levels = np.arange(side) * 2 - (side - 1)
    scale = 1.0 / math.sqrt(np.mean(levels**2) * 2)

    points = np.empty(order, dtype=np.complex128)
    for s in range(order):
        u, v = s >> half, s & (side - 1)
        points[s] = scale * (levels[_gray_decode(u)] + 1j * levels[_gray_decode(v)])
    return Constellation(name=f"{order}QAM", points=points, bits_per_symbol=bits_per_symbol)


def bits_to_symbols(bits, c: Constellation) -> np.ndarray:
    """Pack a 0/1 sequence into symbol indices, MSB first per symbol."""
    b = np.asarray(bits, dtype=np.int64).reshape(-1)
    if b.size % c.bits_per_symbol != 0:
        raise ValueError(f"bit count {b.size} not divisible by {c.bits_per_symbol}")
    if b.size == 0:
        return np.zeros(0, dtype=np.int64)
    groups = b.reshape(-1, c.bits_per_symbol)
    weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1)
    return groups @ weights


def symbols_to_bits(indices, c: Constellation) -> np.ndarray:
    """Inverse of bits_to_symbols."""
    idx = np.asarray(indices, dtype=np.int64).reshape(-1)
    if idx.size == 0:
        return np.zeros(0, dtype=np.int64)
    shifts = np.arange(c.bits_per_symbol - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).reshape(-1)


def nearest_indices(values, c: Constellation) -> np.ndarray:
    """Index of the closest constellation point for each complex value.

    Ties resolve to the smallest index, matching the decoders' rule.
    """
    v = np.asarray(values, dtype=np.complex128)
    d = np.abs(v[..., None] - c.points)
    return np.argmin(d, axis=-1)

"""Constellation rotation matrices.

Two constructions: the cyclotomic lattice matrix whose (i, j) entry is
zeta_K^(j * (1 + n_i * m)) with zeta_K = exp(2j*pi/K), K = m*n, and the 2x2
planar rotation [[cos t, sin t], [-sin t, cos t]] used for two antennas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PLANAR_DEFAULT_ANGLE = 1.02


@dataclass(frozen=True)
class CyclotomicParams:
    m: int
    n: int
    offsets: tuple[int, ...]  # n_1 = 0, n_2 ... n_M

    @property
    def K(self) -> int:
        return self.m * self.n

    @property
    def M(self) -> int:
        return len(self.offsets)

    def validate(self) -> None:
        if self.m < 2 or self.n < 1:
            raise ValueError("need m >= 2 and n >= 1")
        if len(self.offsets) < 1 or self.offsets[0] != 0:
            raise ValueError("offsets must start with n_1 = 0")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError(f"duplicate offsets in {self.offsets}")
        mults = [1 + ni * self.m for ni in self.offsets]
        for ni, c in zip(self.offsets[1:], mults[1:]):
            if math.gcd(c, self.K) != 1:
                raise ValueError(f"1 + {ni}*{self.m} = {c} is not co-prime with K = {self.K}")
        # distinct multipliers mod K, otherwise two rows coincide and the
        # matrix is singular
        if len({c % self.K for c in mults}) != len(mults):
            raise ValueError(f"offsets {self.offsets} give colliding exponents mod {self.K}")


@dataclass(frozen=True)
class RotationMatrix:
    theta: np.ndarray
    kind: str  # "cyclotomic" | "planar"
    params: object

    @property
    def M(self) -> int:
        return self.theta.shape[0]


def cyclotomic_rotation(p: CyclotomicParams) -> RotationMatrix:
    """Build the M x M cyclotomic rotation for the given lattice parameters.

    Every entry has unit modulus (it is a power of zeta_K) and the matrix is
    nonsingular: rows are geometric progressions in distinct primitive
    powers of zeta_K, a Vandermonde structure.
    """
    p.validate()
    K, M = p.K, p.M
    mults = np.array([1 + ni * p.m for ni in p.offsets], dtype=np.int64)
    j = np.arange(1, M + 1, dtype=np.int64)
    exps = np.mod(np.outer(mults, j), K)
    theta = np.exp(2j * np.pi * exps / K)
    return RotationMatrix(theta=theta, kind="cyclotomic", params=p)


def planar_rotation_2x2(theta_rad: float = PLANAR_DEFAULT_ANGLE) -> RotationMatrix:
    """2x2 rotation by theta_rad; axis-aligned angles are rejected because
    they would zero out matrix entries."""
    g, d = math.cos(theta_rad), math.sin(theta_rad)
    if abs(g) < 1e-12 or abs(d) < 1e-12:
        raise ValueError(f"theta = {theta_rad} rad has a zero cos or sin")
    theta = np.array([[g, d], [-d, g]], dtype=np.complex128)
    return RotationMatrix(theta=theta, kind="planar", params=theta_rad)


def _square_offsets(n: int, count: int) -> list[int] | None:
    """Smallest offsets 0 <= n_i < n with 1 + 4*n_i co-prime to 4n.

    Restricting to n_i < n keeps the exponent multipliers distinct mod 4n.
    Returns None when fewer than `count` such offsets exist.
    """
    K = 4 * n
    found = [r for r in range(n) if math.gcd(1 + 4 * r, K) == 1]
    return found[:count] if len(found) >= count else None


def default_params(M: int, lattice: str = "square") -> CyclotomicParams:
    """Lattice parameters for M antennas.

    M = 4 and M = 5 use fixed presets (square or triangular grid for
    M = 4).  Other M fall back to the square-lattice family m = 4 with the
    smallest n whose cyclotomic order admits M valid offsets.
    """
    if lattice not in ("square", "triangular"):
        raise ValueError(f"unknown lattice {lattice!r}")
    if M < 2:
        raise ValueError("need M >= 2")
    if M == 4:
        if lattice == "triangular":
            return CyclotomicParams(m=3, n=5, offsets=(0, 1, 2, 4))
        return CyclotomicParams(m=4, n=4, offsets=(0, 1, 2, 3))
    if M == 5:
        return CyclotomicParams(m=5, n=5, offsets=(0, 1, 2, 3, 4))
    n = 2
    while True:
        offsets = _square_offsets(n, M)
        if offsets is not None:
            return CyclotomicParams(m=4, n=n, offsets=tuple(offsets))
        n += 1


def rotation_for(M: int, lattice: str = "square") -> RotationMatrix:
    """Default rotation for M antennas: the planar 2x2 matrix at 1.02 rad
    for M = 2, the cyclotomic construction otherwise."""
    if M == 2:
        return planar_rotation_2x2()
    return cyclotomic_rotation(default_params(M, lattice))

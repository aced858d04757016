"""Equivalent channel construction.

Vectorizing Y = scale * C(s) H + W turns the matrix channel into
y = scale * Heq s + w where column l of Heq is vec(A_l H).  The closed
forms below rebuild Heq for one receive antenna directly from the channel
vector and rotation rows, and act as independent cross-checks of the
generic dispersion construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSpec, GroupingScheme, contiguous_grouping, dispersion_set
from .rotation import RotationMatrix


@dataclass(frozen=True)
class EquivalentChannel:
    matrix: np.ndarray  # TN x L
    grouping: GroupingScheme

    @property
    def L(self) -> int:
        return self.matrix.shape[1]

    def group_block(self, p: int) -> np.ndarray:
        """Columns of group p."""
        return self.matrix[:, list(self.grouping.groups[p])]

    def other_blocks(self, p: int) -> np.ndarray:
        """Columns of every group except p, in group order."""
        cols = [i for q, g in enumerate(self.grouping.groups) if q != p for i in g]
        return self.matrix[:, cols]

    def columns(self, indices) -> np.ndarray:
        return self.matrix[:, list(indices)]


def build(disp: np.ndarray, H, grouping: GroupingScheme) -> EquivalentChannel:
    """Generic construction: column l is vec(A_l H), columns grouped per the
    given scheme."""
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim == 1:
        H = H[:, None]
    L, T, M = disp.shape
    if H.shape[0] != M:
        raise ValueError(f"H has {H.shape[0]} rows, dispersion expects {M}")
    if grouping.L != L:
        raise ValueError("grouping does not match symbol count")
    prod = np.einsum("ltm,mn->ltn", disp, H)  # L x T x N
    heq = prod.transpose(0, 2, 1).reshape(L, -1).T  # column-major vec per l
    return EquivalentChannel(matrix=np.ascontiguousarray(heq), grouping=grouping)


def build_for(spec: CodeSpec, H, grouping: GroupingScheme | None = None) -> EquivalentChannel:
    g = grouping if grouping is not None else contiguous_grouping(spec.L, spec.P)
    return build(dispersion_set(spec), H, g)


def design1_closed_form(spec: CodeSpec, h) -> EquivalentChannel:
    """Single-receive-antenna block form for design 1: group p is diag(h)
    times the rotation, padded with zero rows to sit at the layer's offset."""
    if spec.family != "design1":
        raise ValueError("closed form applies to design-1 specs")
    h = np.asarray(h, dtype=np.complex128).reshape(-1)
    if h.size != spec.M:
        raise ValueError(f"expected {spec.M} channel gains, got {h.size}")
    b = np.diag(h) @ spec.rotation.theta
    heq = np.zeros((spec.T, spec.L), dtype=np.complex128)
    for p, off in enumerate(spec.layer_offsets):
        heq[off : off + spec.M, p * spec.M : (p + 1) * spec.M] = b
    return EquivalentChannel(matrix=heq, grouping=contiguous_grouping(spec.L, spec.P))


def design2_closed_form(M: int, rot: RotationMatrix, h) -> EquivalentChannel:
    """Single-receive-antenna form for the three-layer code with M = 3p,
    assembled row-block-wise from g_i = h_i * (row i of the rotation)."""
    if M % 3 != 0 or M < 3:
        raise ValueError("closed form is stated for M = 3p only")
    if rot.M != M:
        raise ValueError("rotation size does not match M")
    h = np.asarray(h, dtype=np.complex128).reshape(-1)
    if h.size != M:
        raise ValueError(f"expected {M} channel gains, got {h.size}")
    p = M // 3
    T = 4 * p + 2
    g = h[:, None] * rot.theta  # row i is g_{i+1}
    heq = np.zeros((T, 3 * M), dtype=np.complex128)

    def put(row: int, group: int, gi: int) -> None:
        # gi is the 1-based index of the g row
        heq[row, group * M : (group + 1) * M] = g[gi - 1]

    for q in range(1, p + 1):
        r = 3 * (q - 1)
        put(r, 0, 3 * q - 2)
        put(r + 1, 1, 3 * q - 1)
        put(r + 2, 2, 3 * q)
        if q >= 2:
            put(r, 1, 3 * q - 5)
            put(r + 1, 2, 3 * q - 4)
            put(r + 2, 0, 3 * q - 3)
    put(3 * p, 0, 2)
    put(3 * p, 1, 3 * p - 2)
    put(3 * p + 1, 1, 3)
    put(3 * p + 1, 2, 3 * p - 1)
    put(3 * p + 2, 2, 1)
    put(3 * p + 2, 0, 3 * p)
    for q in range(2, p + 1):
        t = 3 * p + q + 1
        put(t, 0, 3 * q - 1)
        put(t, 1, 3 * q)
        put(t, 2, 3 * q - 2)
    return EquivalentChannel(matrix=heq, grouping=contiguous_grouping(3 * M, 3))

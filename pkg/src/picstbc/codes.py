"""Encoders for the two code families.

Design 1 places P rotated layers of M symbols on descending diagonals of a
T x M codeword (layer p occupies rows offset_p + j, column j).  Design 2
always carries three rotated layers in an interleaved pattern whose block
length depends on M mod 3.  Component j of every rotated layer vector is
transmitted from antenna column j; a code is therefore fully described by
the map (layer, component) -> time slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rotation import RotationMatrix, rotation_for


@dataclass(frozen=True)
class GroupingScheme:
    """Partition of symbol indices 0..L-1 into decoding groups."""

    groups: tuple[tuple[int, ...], ...]

    @property
    def L(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def P(self) -> int:
        return len(self.groups)

    def __post_init__(self):
        flat = [i for g in self.groups for i in g]
        if sorted(flat) != list(range(len(flat))):
            raise ValueError("groups must partition 0..L-1")


def contiguous_grouping(L: int, P: int) -> GroupingScheme:
    if L % P != 0:
        raise ValueError(f"L = {L} not divisible by P = {P}")
    size = L // P
    return GroupingScheme(tuple(tuple(range(p * size, (p + 1) * size)) for p in range(P)))


def single_group(L: int) -> GroupingScheme:
    return GroupingScheme((tuple(range(L)),))


def singleton_grouping(L: int) -> GroupingScheme:
    return GroupingScheme(tuple((i,) for i in range(L)))


@dataclass(frozen=True)
class CodeSpec:
    family: str  # "design1" | "design2"
    name: str
    M: int
    T: int
    P: int
    rotation: RotationMatrix
    # row_index[i, j] = time slot carrying component j of layer i
    row_index: np.ndarray
    layer_offsets: tuple[int, ...] | None = None  # design1 only

    @property
    def L(self) -> int:
        return self.M * self.P

    def __post_init__(self):
        if self.rotation.M != self.M:
            raise ValueError("rotation size does not match antenna count")
        r = self.row_index
        if r.shape != (self.P, self.M):
            raise ValueError("row_index must be P x M")
        if r.min() < 0 or r.max() >= self.T:
            raise ValueError("placement row out of range")
        cells = {(int(r[i, j]), j) for i in range(self.P) for j in range(self.M)}
        if len(cells) != self.P * self.M:
            raise ValueError("placement collides: one cell would carry two symbols")


def design1_spec(
    M: int,
    T: int,
    rot: RotationMatrix | None = None,
    layer_offsets: tuple[int, ...] | None = None,
    name: str | None = None,
) -> CodeSpec:
    """Multi-diagonal-layer code.

    By default every admissible diagonal is used: P = T - M + 1 layers at
    offsets 0..P-1.  Explicit layer_offsets select a subset of diagonals
    (e.g. offsets (0, 2) for the two-layer length-6 four-antenna code).
    """
    if T < M:
        raise ValueError(f"need T >= M, got T = {T}, M = {M}")
    if layer_offsets is None:
        layer_offsets = tuple(range(T - M + 1))
    offs = tuple(int(o) for o in layer_offsets)
    if len(offs) != len(set(offs)) or any(o < 0 for o in offs) or sorted(offs) != list(offs):
        raise ValueError("layer offsets must be sorted, distinct and nonneg")
    if offs[-1] != T - M:
        raise ValueError("last layer offset must equal T - M")
    rot = rot if rot is not None else rotation_for(M)
    P = len(offs)
    row_index = np.array([[o + j for j in range(M)] for o in offs], dtype=np.int64)
    return CodeSpec(
        family="design1",
        name=name or f"d1:{M},{T}" + ("" if P == T - M + 1 else f",p{P}"),
        M=M,
        T=T,
        P=P,
        rotation=rot,
        row_index=row_index,
        layer_offsets=offs,
    )


def _design2_placement(M: int) -> tuple[int, dict[tuple[int, int], int]]:
    """Return (T, placement) for the three-layer family; 0-based layers,
    components and rows.  Raises for M < 3 and for M = 3p - 1 with p < 2."""
    put: dict[tuple[int, int], int] = {}

    def place(layer: int, comp: int, row: int) -> None:
        key = (layer, comp)
        if key in put:
            raise AssertionError(f"component {key} placed twice")
        put[key] = row

    if M % 3 == 0:
        p = M // 3
        T = 4 * p + 2
        for q in range(1, p + 1):
            r = 3 * (q - 1)
            place(0, 3 * q - 3, r)
            place(1, 3 * q - 2, r + 1)
            place(2, 3 * q - 1, r + 2)
            if q >= 2:
                place(1, 3 * q - 6, r)
                place(2, 3 * q - 5, r + 1)
                place(0, 3 * q - 4, r + 2)
        place(0, 1, 3 * p)
        place(1, 3 * p - 3, 3 * p)
        place(1, 2, 3 * p + 1)
        place(2, 3 * p - 2, 3 * p + 1)
        place(2, 0, 3 * p + 2)
        place(0, 3 * p - 1, 3 * p + 2)
        for q in range(2, p + 1):
            t = 3 * p + q + 1
            place(0, 3 * q - 2, t)
            place(1, 3 * q - 1, t)
            place(2, 3 * q - 3, t)
    elif M % 3 == 1:
        p = (M - 1) // 3
        if p < 1:
            raise ValueError("three-layer family needs M >= 3")
        T = 4 * p + 3
        for q in range(1, p + 1):
            r = 3 * (q - 1)
            place(0, 3 * q - 3, r)
            place(1, 3 * q - 2, r + 1)
            place(2, 3 * q - 1, r + 2)
            if q >= 2:
                place(1, 3 * q - 6, r)
                place(2, 3 * q - 5, r + 1)
                place(0, 3 * q - 4, r + 2)
        place(1, 3 * p - 3, 3 * p)
        place(0, 3 * p, 3 * p)
        place(2, 3 * p - 2, 3 * p + 1)
        place(1, 3 * p, 3 * p + 1)
        place(0, 3 * p - 1, 3 * p + 2)
        place(2, 3 * p, 3 * p + 2)
        for q in range(1, p + 1):
            t = 3 * p + 2 + q
            place(0, 3 * q - 2, t)
            place(1, 3 * q - 1, t)
            place(2, 3 * q - 3, t)
    else:
        p = (M + 1) // 3
        if p < 2:
            raise ValueError("three-layer family for M = 3p - 1 needs M >= 5")
        # The three-layer pattern for M = 3p - 1 needs 4p + 1 time slots,
        # one more than the closed-form rate 9M/(4M + 4) anticipates; any
        # single-row merge closing the gap breaks group independence, so
        # the pattern keeps its extra slot and rate(spec) reports L/T.
        T = 4 * p + 1
        place(0, 0, 0)
        place(1, 1, 1)
        place(2, 2, 2)
        for q in range(2, p):
            r = 3 * q - 3
            place(0, 3 * q - 3, r)
            place(1, 3 * q - 6, r)
            place(1, 3 * q - 2, r + 1)
            place(2, 3 * q - 5, r + 1)
            place(2, 3 * q - 1, r + 2)
            place(0, 3 * q - 4, r + 2)
        place(0, 3 * p - 3, 3 * p - 3)
        place(1, 3 * p - 6, 3 * p - 3)
        place(1, 3 * p - 2, 3 * p - 2)
        place(2, 3 * p - 5, 3 * p - 2)
        place(0, 3 * p - 4, 3 * p - 1)
        place(2, 3 * p - 3, 3 * p - 1)
        place(0, 1, 3 * p)
        place(1, 3 * p - 3, 3 * p)
        place(1, 2, 3 * p + 1)
        place(2, 3 * p - 2, 3 * p + 1)
        place(2, 0, 3 * p + 2)
        place(0, 3 * p - 2, 3 * p + 2)
        for q in range(2, p):
            t = 3 * p + q + 1
            place(0, 3 * q - 2, t)
            place(1, 3 * q - 1, t)
            place(2, 3 * q - 3, t)
    if len(put) != 3 * M:
        raise AssertionError(f"placed {len(put)} of {3 * M} components for M = {M}")
    return T, put


def design2_spec(M: int, rot: RotationMatrix | None = None, name: str | None = None) -> CodeSpec:
    """Three-layer code for M antennas (M >= 3; M = 2 has a rate entry but
    no placement here)."""
    T, put = _design2_placement(M)
    rot = rot if rot is not None else rotation_for(M)
    row_index = np.empty((3, M), dtype=np.int64)
    for (i, j), t in put.items():
        row_index[i, j] = t
    return CodeSpec(
        family="design2",
        name=name or f"d2:{M}",
        M=M,
        T=T,
        P=3,
        rotation=rot,
        row_index=row_index,
    )


def encode(spec: CodeSpec, s) -> np.ndarray:
    """Map L symbols to the T x M codeword: layer vectors are rotated by
    the spec's matrix and written through the placement."""
    s = np.asarray(s, dtype=np.complex128).reshape(-1)
    if s.size != spec.L:
        raise ValueError(f"expected {spec.L} symbols, got {s.size}")
    theta = spec.rotation.theta
    c = np.zeros((spec.T, spec.M), dtype=np.complex128)
    cols = np.arange(spec.M)
    for i in range(spec.P):
        x = theta @ s[i * spec.M : (i + 1) * spec.M]
        c[spec.row_index[i], cols] = x
    return c


def dispersion_set(spec: CodeSpec) -> np.ndarray:
    """Stack of L dispersion matrices A_l (shape L x T x M) such that
    encode(s) equals sum_l A_l s_l exactly (encode is linear)."""
    a = np.zeros((spec.L, spec.T, spec.M), dtype=np.complex128)
    theta = spec.rotation.theta
    cols = np.arange(spec.M)
    for i in range(spec.P):
        rows = spec.row_index[i]
        for k in range(spec.M):
            a[i * spec.M + k, rows, cols] = theta[:, k]
    return a


def grouping(spec: CodeSpec) -> GroupingScheme:
    """The decoding partition: P contiguous blocks of M symbols."""
    return contiguous_grouping(spec.L, spec.P)


def rate(spec: CodeSpec) -> Fraction:
    """Code rate L/T in lowest terms."""
    return Fraction(spec.L, spec.T)


def design1_rate(M: int, T: int) -> Fraction:
    """Rate of the default design-1 code: M (T - M + 1) / T."""
    if T < M:
        raise ValueError("need T >= M")
    return Fraction(M * (T - M + 1), T)


def design2_rate(M: int) -> Fraction:
    """Closed-form three-layer rate; defined for every M >= 2 even where no
    placement is constructed."""
    if M < 2:
        raise ValueError("need M >= 2")
    m = M % 3
    if m == 0:
        return Fraction(9 * M, 4 * M + 6)
    if m == 2:
        return Fraction(9 * M, 4 * M + 4)
    return Fraction(9 * M, 4 * M + 5)


# named example codes; c4-6-2 keeps two layers but stretches them to
# block length 6 (diagonal offsets 0 and 2)
_ALIASES = {
    "c2-3-2": lambda: design1_spec(2, 3, name="c2-3-2"),
    "c4-5-2": lambda: design1_spec(4, 5, name="c4-5-2"),
    "c4-6-2": lambda: design1_spec(4, 6, layer_offsets=(0, 2), name="c4-6-2"),
    "c4-6-3": lambda: design1_spec(4, 6, name="c4-6-3"),
    "c5-6-2": lambda: design1_spec(5, 6, name="c5-6-2"),
    "d2-4": lambda: design2_spec(4, name="d2-4"),
    "d2-6": lambda: design2_spec(6, name="d2-6"),
    "d2-9": lambda: design2_spec(9, name="d2-9"),
}

SHIPPED_CODES = tuple(_ALIASES)


def get_code(name: str, rot: RotationMatrix | None = None) -> CodeSpec:
    """Resolve a code id: a named alias, 'd1:M,T' or 'd2:M'."""
    key = name.strip().lower()
    if key in _ALIASES:
        spec = _ALIASES[key]()
        if rot is not None:
            spec = CodeSpec(
                family=spec.family,
                name=spec.name,
                M=spec.M,
                T=spec.T,
                P=spec.P,
                rotation=rot,
                row_index=spec.row_index,
                layer_offsets=spec.layer_offsets,
            )
        return spec
    if key.startswith("d1:"):
        parts = key[3:].split(",")
        if len(parts) != 2:
            raise ValueError(f"bad design-1 code id {name!r}; expected d1:M,T")
        M, T = int(parts[0]), int(parts[1])
        return design1_spec(M, T, rot=rot)
    if key.startswith("d2:"):
        return design2_spec(int(key[3:]), rot=rot)
    raise ValueError(f"unknown code {name!r}; aliases: {', '.join(SHIPPED_CODES)}")

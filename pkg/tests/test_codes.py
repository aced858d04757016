from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from picstbc.codes import (
    SHIPPED_CODES,
    contiguous_grouping,
    design1_rate,
    design1_spec,
    design2_rate,
    design2_spec,
    dispersion_set,
    encode,
    get_code,
    grouping,
    rate,
)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def placed_cells(spec):
    """{(row, col): (layer, component)} for the nonzero support."""
    return {
        (int(spec.row_index[i, j]), j): (i, j)
        for i in range(spec.P)
        for j in range(spec.M)
    }


def test_c232_pattern():
    spec = get_code("c2-3-2")
    assert placed_cells(spec) == {(0, 0): (0, 0), (1, 0): (1, 0), (1, 1): (0, 1), (2, 1): (1, 1)}


def test_c452_pattern():
    spec = get_code("c4-5-2")
    cells = placed_cells(spec)
    # two descending diagonals offset by one row
    for j in range(4):
        assert cells[(j, j)] == (0, j)
        assert cells[(j + 1, j)] == (1, j)


def test_single_layer_degenerate():
    spec = design1_spec(3, 3)
    assert spec.P == 1
    assert placed_cells(spec) == {(j, j): (0, j) for j in range(3)}


def test_c462_stretched_layers():
    spec = get_code("c4-6-2")
    cells = placed_cells(spec)
    for j in range(4):
        assert cells[(j, j)] == (0, j)
        assert cells[(j + 2, j)] == (1, j)
    assert spec.P == 2 and spec.T == 6


def test_design1_rejects_bad_offsets():
    with pytest.raises(ValueError):
        design1_spec(4, 6, layer_offsets=(0, 1))  # last offset must reach T - M
    with pytest.raises(ValueError):
        design1_spec(4, 3)


def test_d2_m4_pattern():
    spec = get_code("d2-4")
    cells = placed_cells(spec)
    assert spec.T == 7
    # last row carries X_{3,1}, X_{1,2}, X_{2,3} and nothing in column 4
    assert cells[(6, 0)] == (2, 0)
    assert cells[(6, 1)] == (0, 1)
    assert cells[(6, 2)] == (1, 2)
    assert (6, 3) not in cells
    # first three rows are the plain diagonal X_{1,1}, X_{2,2}, X_{3,3}
    for j, layer in ((0, 0), (1, 1), (2, 2)):
        assert cells[(j, j)] == (layer, j)


def test_d2_m6_pattern():
    spec = get_code("d2-6")
    cells = placed_cells(spec)
    assert spec.T == 10
    # bottom row (0,0,0, X_{3,4}, X_{1,5}, X_{2,6})
    assert cells[(9, 3)] == (2, 3)
    assert cells[(9, 4)] == (0, 4)
    assert cells[(9, 5)] == (1, 5)
    assert all((9, j) not in cells for j in (0, 1, 2))
    # row 9 carries X_{3,1} and X_{1,6}
    assert cells[(8, 0)] == (2, 0)
    assert cells[(8, 5)] == (0, 5)


def test_d2_m9_pattern():
    spec = get_code("d2-9")
    cells = placed_cells(spec)
    assert spec.T == 14
    # spot rows of the expected 14 x 9 pattern
    assert cells[(6, 3)] == (1, 3) and cells[(6, 6)] == (0, 6)
    assert cells[(12, 3)] == (2, 3) and cells[(12, 4)] == (0, 4) and cells[(12, 5)] == (1, 5)
    assert cells[(13, 6)] == (2, 6) and cells[(13, 7)] == (0, 7) and cells[(13, 8)] == (1, 8)


# complete expected placements for the named three-layer codes, one entry per
# placed symbol as (row, column, layer), all 1-based in the source and
# shifted here to 0-based
_D2_FULL = {
    "d2-4": [
        (0, 0, 0), (1, 1, 1), (2, 2, 2),
        (3, 0, 1), (3, 3, 0),
        (4, 1, 2), (4, 3, 1),
        (5, 2, 0), (5, 3, 2),
        (6, 0, 2), (6, 1, 0), (6, 2, 1),
    ],
    "d2-6": [
        (0, 0, 0), (1, 1, 1), (2, 2, 2),
        (3, 0, 1), (3, 3, 0),
        (4, 1, 2), (4, 4, 1),
        (5, 2, 0), (5, 5, 2),
        (6, 1, 0), (6, 3, 1),
        (7, 2, 1), (7, 4, 2),
        (8, 0, 2), (8, 5, 0),
        (9, 3, 2), (9, 4, 0), (9, 5, 1),
    ],
    "d2-9": [
        (0, 0, 0), (1, 1, 1), (2, 2, 2),
        (3, 0, 1), (3, 3, 0),
        (4, 1, 2), (4, 4, 1),
        (5, 2, 0), (5, 5, 2),
        (6, 3, 1), (6, 6, 0),
        (7, 4, 2), (7, 7, 1),
        (8, 5, 0), (8, 8, 2),
        (9, 1, 0), (9, 6, 1),
        (10, 2, 1), (10, 7, 2),
        (11, 0, 2), (11, 8, 0),
        (12, 3, 2), (12, 4, 0), (12, 5, 1),
        (13, 6, 2), (13, 7, 0), (13, 8, 1),
    ],
}


@pytest.mark.parametrize("name", sorted(_D2_FULL))
def test_design2_full_transcriptions(name):
    spec = get_code(name)
    cells = placed_cells(spec)
    expected = {(r, c): (layer, c) for r, c, layer in _D2_FULL[name]}
    assert cells == expected


def test_design2_small_m_rejected():
    with pytest.raises(ValueError):
        design2_spec(2)


def test_every_component_placed_once():
    for name in SHIPPED_CODES:
        spec = get_code(name)
        cells = placed_cells(spec)
        assert len(cells) == spec.L
        # column j holds exactly the layer components of column j
        for j in range(spec.M):
            layers = sorted(layer for (_, col), (layer, comp) in cells.items() if col == j)
            assert layers == list(range(spec.P))


def test_encode_zero_is_zero():
    spec = get_code("c4-5-2")
    assert np.all(encode(spec, np.zeros(spec.L)) == 0)


def test_encode_matches_hand_assembly():
    rng = np.random.default_rng(0)
    spec = get_code("c4-5-2")
    s = crandn(rng, spec.L)
    cw = encode(spec, s)
    th = spec.rotation.theta
    x1, x2 = th @ s[:4], th @ s[4:]
    expected = np.zeros((5, 4), dtype=complex)
    for j in range(4):
        expected[j, j] = x1[j]
        expected[j + 1, j] = x2[j]
    assert_allclose(cw, expected, atol=1e-14)


def test_encode_equals_dispersion_sum():
    rng = np.random.default_rng(1)
    for name in SHIPPED_CODES:
        spec = get_code(name)
        disp = dispersion_set(spec)
        for _ in range(20):
            s = crandn(rng, spec.L)
            direct = encode(spec, s)
            summed = np.einsum("ltm,l->tm", disp, s)
            assert np.max(np.abs(direct - summed)) < 1e-13


def test_dispersion_support_per_layer():
    spec = get_code("c2-3-2")
    disp = dispersion_set(spec)
    th = spec.rotation.theta
    # A_1 carries column 1 of the rotation along layer 1's diagonal
    assert_allclose(disp[0][0, 0], th[0, 0])
    assert_allclose(disp[0][1, 1], th[1, 0])
    assert disp[0][2, 1] == 0
    for l in range(spec.L):
        layer = l // spec.M
        rows, cols = np.nonzero(disp[l])
        assert set(zip(rows, cols)) <= {
            (int(spec.row_index[layer, j]), j) for j in range(spec.M)
        }


def test_rate_table():
    d1 = [design1_rate(M, M + 1) for M in range(2, 9)]
    d2 = [design2_rate(M) for M in range(2, 9)]
    assert d1 == [Fraction(4, 3), Fraction(3, 2), Fraction(8, 5), Fraction(5, 3),
                  Fraction(12, 7), Fraction(7, 4), Fraction(16, 9)]
    assert d2 == [Fraction(3, 2), Fraction(3, 2), Fraction(12, 7), Fraction(15, 8),
                  Fraction(9, 5), Fraction(21, 11), Fraction(2, 1)]
    assert rate(get_code("c4-5-2")) == Fraction(8, 5)
    assert rate(get_code("c4-6-3")) == Fraction(2, 1)


def test_design2_rate_approaches_nine_fourths():
    for residue in (0, 1, 2):
        ms = [m for m in range(3, 60) if m % 3 == residue and m >= 3]
        rates = [design2_rate(m) for m in ms]
        assert all(b > a for a, b in zip(rates, rates[1:]))
        assert all(r < Fraction(9, 4) for r in rates)
        assert float(rates[-1]) > 2.1


def test_grouping_blocks():
    assert grouping(get_code("c4-5-2")).groups == (tuple(range(4)), tuple(range(4, 8)))
    assert grouping(get_code("d2-4")).groups == (tuple(range(4)), tuple(range(4, 8)), tuple(range(8, 12)))
    assert grouping(design1_spec(4, 4)).groups == (tuple(range(4)),)


def test_grouping_validation():
    with pytest.raises(ValueError):
        contiguous_grouping(10, 4)


def test_get_code_parsing():
    assert get_code("d1:4,5").name == "d1:4,5"
    assert get_code("d2:6").M == 6
    with pytest.raises(ValueError):
        get_code("nope")
    with pytest.raises(ValueError):
        get_code("d1:4")

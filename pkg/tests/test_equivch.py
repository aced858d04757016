import numpy as np
import pytest
from numpy.testing import assert_allclose

from picstbc.codes import SHIPPED_CODES, dispersion_set, encode, get_code, grouping
from picstbc.equivch import build, build_for, design1_closed_form, design2_closed_form
from picstbc.linalg import vectorize
from picstbc.rotation import planar_rotation_2x2, rotation_for


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def test_zero_channel_gives_zero_matrix():
    spec = get_code("c4-5-2")
    chan = build_for(spec, np.zeros((4, 2)))
    assert np.all(chan.matrix == 0)


def test_c232_displayed_equivalent_channel():
    spec = get_code("c2-3-2")
    rng = np.random.default_rng(0)
    h = crandn(rng, 2)
    chan = build_for(spec, h.reshape(-1, 1))
    g, d = np.cos(1.02), np.sin(1.02)
    h1, h2 = h
    expected = np.array(
        [
            [g * h1, d * h1, 0, 0],
            [-d * h2, g * h2, g * h1, d * h1],
            [0, 0, -d * h2, g * h2],
        ]
    )
    assert_allclose(chan.matrix, expected, atol=1e-14)


def test_received_signal_identity():
    rng = np.random.default_rng(1)
    for name in SHIPPED_CODES:
        spec = get_code(name)
        for n_rx in (1, 2, 4):
            H = crandn(rng, spec.M, n_rx)
            chan = build_for(spec, H)
            for _ in range(5):
                s = crandn(rng, spec.L)
                lhs = vectorize(encode(spec, s) @ H)
                rhs = chan.matrix @ s
                assert np.linalg.norm(lhs - rhs) < 1e-12 * np.linalg.norm(rhs)


def test_dimension_mismatch():
    spec = get_code("c4-5-2")
    with pytest.raises(ValueError):
        build(dispersion_set(spec), np.zeros((3, 1)), grouping(spec))


def test_design1_closed_form_matches_generic():
    rng = np.random.default_rng(2)
    for name in ("c2-3-2", "c4-5-2", "c4-6-2", "c4-6-3", "c5-6-2"):
        spec = get_code(name)
        for _ in range(20):
            h = crandn(rng, spec.M)
            cf = design1_closed_form(spec, h)
            gen = build_for(spec, h.reshape(-1, 1))
            assert np.max(np.abs(cf.matrix - gen.matrix)) < 1e-14


def test_design1_closed_form_block_structure():
    # C_{4,5,2}: stacked blocks [B; 0] and [0; B] with B = diag(h) Theta
    rng = np.random.default_rng(3)
    spec = get_code("c4-5-2")
    h = crandn(rng, 4)
    b = np.diag(h) @ spec.rotation.theta
    m = design1_closed_form(spec, h).matrix
    assert_allclose(m[:4, :4], b, atol=1e-14)
    assert np.all(m[4, :4] == 0)
    assert np.all(m[0, 4:] == 0)
    assert_allclose(m[1:, 4:], b, atol=1e-14)


def test_design1_closed_form_single_nonzero_gain():
    spec = get_code("c4-5-2")
    h = np.zeros(4, dtype=complex)
    h[2] = 1.0 + 0.5j
    m = design1_closed_form(spec, h).matrix
    for p, off in enumerate(spec.layer_offsets):
        block = m[:, p * 4 : (p + 1) * 4]
        nz_rows = np.nonzero(np.any(block != 0, axis=1))[0]
        assert list(nz_rows) == [off + 2]


def test_design2_closed_form_m6_rows():
    rng = np.random.default_rng(4)
    spec = get_code("d2-6")
    h = crandn(rng, 6)
    m = design2_closed_form(6, spec.rotation, h).matrix
    g = h[:, None] * spec.rotation.theta
    # expected row pattern of the 10 x 18 matrix
    rows = [
        (g[0], None, None),
        (None, g[1], None),
        (None, None, g[2]),
        (g[3], g[0], None),
        (None, g[4], g[1]),
        (g[2], None, g[5]),
        (g[1], g[3], None),
        (None, g[2], g[4]),
        (g[5], None, g[0]),
        (g[4], g[5], g[3]),
    ]
    for t, blocks in enumerate(rows):
        for i, blk in enumerate(blocks):
            seg = m[t, i * 6 : (i + 1) * 6]
            if blk is None:
                assert np.all(seg == 0)
            else:
                assert_allclose(seg, blk, atol=1e-14)


def test_design2_closed_form_matches_generic():
    rng = np.random.default_rng(5)
    for M in (3, 6, 9):
        spec = get_code(f"d2:{M}")
        for _ in range(20):
            h = crandn(rng, M)
            cf = design2_closed_form(M, spec.rotation, h)
            gen = build_for(spec, h.reshape(-1, 1))
            assert np.max(np.abs(cf.matrix - gen.matrix)) < 1e-14


def test_design2_closed_form_zero_channel():
    spec = get_code("d2-6")
    m = design2_closed_form(6, spec.rotation, np.zeros(6)).matrix
    assert np.all(m == 0)


def test_design2_closed_form_wrong_m():
    with pytest.raises(ValueError):
        design2_closed_form(4, rotation_for(4), np.zeros(4))


def test_group_block_views():
    spec = get_code("c4-6-3")
    rng = np.random.default_rng(6)
    chan = build_for(spec, crandn(rng, 4, 2))
    assert chan.group_block(1).shape == (12, 4)
    assert chan.other_blocks(1).shape == (12, 8)
    assert_allclose(chan.other_blocks(1), np.hstack([chan.group_block(0), chan.group_block(2)]))


def test_planar_rotation_in_closed_form():
    # sanity: the c2-3-2 closed form really uses the planar rotation
    spec = get_code("c2-3-2")
    assert_allclose(spec.rotation.theta, planar_rotation_2x2(1.02).theta)

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from genbell import qstate
from genbell.bellcore import zb_lhs
from genbell.corrtensor import CorrelationTensor, LocalFrame, compute_tensor, correlation_table, rotate_frame
from genbell.criterion import (
    CVector,
    certificate_consistency,
    horodecki_2qubit,
    max_tmod,
    settings_from_certificate,
    sum_squares_max,
    tmod_value,
    werner_threshold,
)
from genbell.optimizer import OptimizeOptions
from oracles import grid_max_tmod

S = 1 / math.sqrt(2)
FAST = OptimizeOptions(restarts=8)


@pytest.fixture(scope="module")
def ghz2():
    return compute_tensor(qstate.make_ghz(2).density_matrix())


@pytest.fixture(scope="module")
def ghz3():
    return compute_tensor(qstate.make_ghz(3).density_matrix())


def test_tmod_value_examples(ghz2):
    zero = CorrelationTensor(2, np.zeros(9))
    ident = LocalFrame.identity(2)
    assert tmod_value(zero, ident, CVector([[1, 0], [1, 0]])) == 0
    assert tmod_value(ghz2, ident, CVector([[1, 0], [1, 0]])) == pytest.approx(1)
    assert tmod_value(ghz2, ident, CVector([[S, S], [S, S]])) == pytest.approx(1)


def test_tmod_can_be_negative(ghz2):
    assert tmod_value(ghz2, LocalFrame.identity(2), CVector([[1, 0], [-1, 0]])) == pytest.approx(-1)


def test_cvector_validation_and_alpha():
    with pytest.raises(ValueError):
        CVector([[1, 1]])
    c = CVector([[S, S], [0.6, 0.8]])
    for (c1, c2), a in zip(c.c, c.alphas):
        assert math.cos(a + math.pi / 2) == pytest.approx(c1)
        assert math.cos(a + math.pi) == pytest.approx(c2)


def test_settings_from_certificate_sum_and_difference(rng):
    frame = LocalFrame(Rotation.random(3, random_state=4).as_matrix().transpose(0, 2, 1))
    c = CVector.from_angles(rng.uniform(0, math.pi / 2, 3))
    s = settings_from_certificate(frame, c).directions
    for j in range(3):
        a1, a2 = frame.axes[j, 0], frame.axes[j, 1]
        np.testing.assert_allclose(s[j, 0] + s[j, 1], 2 * a1 * math.cos(c.alphas[j] + math.pi / 2), atol=1e-12)
        np.testing.assert_allclose(s[j, 1] - s[j, 0], 2 * a2 * math.cos(c.alphas[j] + math.pi), atol=1e-12)


def test_max_tmod_ghz(ghz2, ghz3):
    c2 = max_tmod(ghz2)
    assert c2.value == pytest.approx(math.sqrt(2), abs=1e-9)
    assert c2.violated()
    assert max_tmod(ghz3).value == pytest.approx(2, abs=1e-9)


def test_max_tmod_zero_tensor():
    cert = max_tmod(CorrelationTensor(3, np.zeros(27)))
    assert cert.value == 0 and cert.converged


def test_max_tmod_product_state(rng):
    t = compute_tensor(qstate.random_product(3, rng).density_matrix())
    cert = max_tmod(t, FAST)
    assert cert.value == pytest.approx(1, abs=1e-9)
    assert grid_max_tmod(t.array, starts=1) == pytest.approx(1, abs=1e-6)


def test_certificate_reproduces_value(rng):
    t = compute_tensor(qstate.random_mixed(3, rng))
    cert = max_tmod(t, FAST)
    assert cert.value >= 0
    assert abs(certificate_consistency(t, cert)) < 1e-6
    table = correlation_table(t, cert.settings)
    assert zb_lhs(table) == pytest.approx(8 * cert.value, abs=1e-6)
    assert cert.restarts_used == 8


def test_max_tmod_deterministic(rng):
    t = compute_tensor(qstate.random_mixed(2, rng))
    a = max_tmod(t, OptimizeOptions(restarts=4, seed=3))
    b = max_tmod(t, OptimizeOptions(restarts=4, seed=3))
    assert a.value == b.value
    np.testing.assert_array_equal(a.frames.axes, b.frames.axes)


def test_rotation_invariance(rng):
    t = compute_tensor(qstate.random_mixed(2, rng))
    frame = LocalFrame(Rotation.random(2, random_state=7).as_matrix())
    r = rotate_frame(t, frame)
    assert max_tmod(r, FAST).value == pytest.approx(max_tmod(t, FAST).value, abs=1e-6)
    assert sum_squares_max(r).value == pytest.approx(sum_squares_max(t).value, abs=1e-6)


def test_linearity_in_noise(ghz3):
    full = max_tmod(ghz3, FAST).value
    for v in (0.2, 0.55, 0.9):
        t = compute_tensor(qstate.werner(3, v))
        assert max_tmod(t, FAST).value == pytest.approx(v * full, abs=1e-6)


def test_sum_squares_examples(ghz2, ghz3):
    assert sum_squares_max(CorrelationTensor(2, np.zeros(9))).value == 0
    assert sum_squares_max(ghz2).value == pytest.approx(2, abs=1e-10)
    res = sum_squares_max(ghz3)
    assert res.value == pytest.approx(4, abs=1e-10)
    planes = res.frame.axes[:, :2]
    from genbell.criterion import sum_squares_in_plane
    assert sum_squares_in_plane(ghz3, planes) == pytest.approx(4, abs=1e-10)


def test_cauchy_chain(rng):
    for n in (2, 3):
        for _ in range(3):
            t = compute_tensor(qstate.random_mixed(n, rng))
            assert max_tmod(t, FAST).value ** 2 <= sum_squares_max(t).value + 1e-6


def test_horodecki_examples(ghz2, rng):
    assert horodecki_2qubit(ghz2) == pytest.approx(2)
    for v in (0.3, 1 / math.sqrt(2), 0.9):
        assert horodecki_2qubit(compute_tensor(qstate.werner(2, v))) == pytest.approx(2 * v * v)
    assert horodecki_2qubit(compute_tensor(qstate.random_product(2, rng).density_matrix())) == pytest.approx(1)
    with pytest.raises(ValueError):
        horodecki_2qubit(CorrelationTensor(3, np.zeros(27)))


def test_two_qubit_agreement(rng):
    for _ in range(5):
        t = compute_tensor(qstate.random_mixed(2, rng))
        h = horodecki_2qubit(t)
        assert sum_squares_max(t).value == pytest.approx(h, abs=1e-8)
        assert max_tmod(t).value ** 2 == pytest.approx(h, abs=1e-8)


def test_werner_threshold():
    assert werner_threshold(2) == pytest.approx(0.7071067811865476)
    assert werner_threshold(3) == 0.5
    assert werner_threshold(5) == 0.25
    with pytest.raises(ValueError):
        werner_threshold(1)

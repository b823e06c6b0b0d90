import numpy as np
import pytest
from scipy.linalg import hadamard

from genbell import _pykernels, kernels

try:
    from genbell import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_fwht_matches_hadamard_matrix(n, rng):
    a = rng.normal(size=2 ** n)
    expected = hadamard(2 ** n) @ a
    np.testing.assert_allclose(kernels.fwht(a.copy()), expected, atol=1e-12)
    np.testing.assert_allclose(_pykernels.fwht(a.copy()), expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_mode_contract_matches_einsum(n, rng):
    t = rng.normal(size=(3,) * n)
    mats = rng.normal(size=(n, 2, 3))
    expected = t
    for j in range(n):
        expected = np.moveaxis(np.tensordot(mats[j], expected, axes=([1], [j])), 0, j)
    np.testing.assert_allclose(kernels.mode_contract(t.ravel(), n, mats), expected.ravel(), atol=1e-12)


@needs_ext
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_backends_agree(n, rng):
    t = rng.normal(size=3 ** n)
    m2 = rng.normal(size=(n, 2, 3))
    m3 = rng.normal(size=(n, 3, 3))
    c = rng.normal(size=(n, 2))
    ang = rng.uniform(0, 2 * np.pi, size=4 * n)
    for fn in ("mode_contract",):
        for m in (m2, m3):
            np.testing.assert_allclose(getattr(_kernels, fn)(t, n, m), getattr(_pykernels, fn)(t, n, m), atol=1e-12)
    assert _kernels.tmod(t, n, m2, c) == pytest.approx(_pykernels.tmod(t, n, m2, c), abs=1e-12)
    assert _kernels.tmod_angles(t, n, ang) == pytest.approx(_pykernels.tmod_angles(t, n, ang), abs=1e-12)
    assert _kernels.zb_settings_angles(t, n, ang) == pytest.approx(
        _pykernels.zb_settings_angles(t, n, ang), abs=1e-11)
    for kind in ("tmod", "zb"):
        fc = _kernels.AngleObjective(t, n, kind)
        fp = _pykernels.AngleObjective(t, n, kind)
        assert fc(ang) == pytest.approx(fp(ang), abs=1e-11)
        xc, xp = ang.copy(), ang.copy()
        tc, vc = fc.golden_line(xc, 1, ang[1], np.pi / 2, 40)
        tp, vp = fp.golden_line(xp, 1, ang[1], np.pi / 2, 40)
        # argmax may differ at roundoff level on a flat peak; the maximum may not
        assert vc == pytest.approx(vp, abs=1e-11)
        assert fc(np.where(np.arange(4 * n) == 1, tc, ang)) == pytest.approx(vc, abs=1e-15)


def test_euler_axes_orthonormal(rng):
    for phi, theta, psi in rng.uniform(0, 2 * np.pi, size=(20, 3)):
        a = _pykernels.euler_axes(phi, theta, psi)
        np.testing.assert_allclose(a @ a.T, np.eye(2), atol=1e-14)


def test_angle_objective_rejects_bad_input():
    with pytest.raises(ValueError):
        kernels.AngleObjective(np.zeros(9), 2, "nope")
    with pytest.raises(ValueError):
        kernels.AngleObjective(np.zeros(8), 2, "tmod")
    f = kernels.AngleObjective(np.zeros(9), 2, "tmod")
    with pytest.raises(ValueError):
        f(np.zeros(7))

"""Pure numpy implementations of the numerical kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the compiled versions are tested against.
"""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def euler_axes(phi, theta, psi):
    """First two columns of Rz(phi) Ry(theta) Rz(psi) as a (2, 3) array."""
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    return np.array([
        [cf * ct * cp - sf * sp, sf * ct * cp + cf * sp, -st * cp],
        [-cf * ct * sp - sf * cp, -sf * ct * sp + cf * cp, st * sp],
    ])


def unit_vector(theta, phi):
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def mode_contract(tensor, n, mats):
    """Contract each observer's index of a flat 3^n tensor with a (m, 3) matrix.

    ``mats`` has shape (n, m, 3). Returns the flat m^n result, observer 1
    most significant.
    """
    mats = np.asarray(mats, dtype=float)
    m = mats.shape[1]
    cur = np.asarray(tensor, dtype=float).reshape(1, 3, -1)
    done = 1
    for j in range(n):
        rest = cur.shape[2]
        cur = np.einsum("rx,axb->arb", mats[j], cur.reshape(done, 3, rest))
        done *= m
        if j + 1 < n:
            cur = cur.reshape(done, 3, rest // 3)
    return cur.reshape(-1)


def fwht(a):
    """In-place unnormalized Walsh-Hadamard transform (Sylvester ordering)."""
    a = np.asarray(a, dtype=float)
    size = a.shape[0]
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        x = v[:, 0, :].copy()
        y = v[:, 1, :]
        v[:, 0, :] = x + y
        v[:, 1, :] = x - y
        h *= 2
    return a


def walsh_l1(table):
    return float(np.abs(fwht(np.array(table, dtype=float))).sum())


def _c_weights(n, c):
    w = np.ones(1)
    for j in range(n):
        w = np.outer(w, c[j]).reshape(-1)
    return w


def tmod(tensor, n, mats, c):
    proj = mode_contract(tensor, n, mats)
    return float(np.dot(_c_weights(n, np.asarray(c, dtype=float)), np.abs(proj)))


def tmod_angles(tensor, n, angles):
    ang = np.asarray(angles, dtype=float).reshape(n, 4)
    mats = np.stack([euler_axes(*row[:3]) for row in ang])
    c = np.stack([np.cos(ang[:, 3]), np.sin(ang[:, 3])], axis=1)
    return tmod(tensor, n, mats, c)


def zb_settings_angles(tensor, n, angles):
    ang = np.asarray(angles, dtype=float).reshape(n, 4)
    mats = np.stack([
        np.stack([unit_vector(r[0], r[1]), unit_vector(r[2], r[3])]) for r in ang
    ])
    return walsh_l1(mode_contract(tensor, n, mats))


class AngleObjective:
    """Callable over a flat angle vector; see the compiled twin in ``_kernels``."""

    def __init__(self, tensor, n, kind):
        self.tensor = np.ascontiguousarray(tensor, dtype=float).reshape(-1)
        if self.tensor.shape[0] != 3 ** n:
            raise ValueError("tensor size does not match n")
        if kind not in ("tmod", "zb"):
            raise ValueError(f"unknown objective kind {kind!r}")
        self.n = n
        self._fn = zb_settings_angles if kind == "zb" else tmod_angles

    def __call__(self, angles):
        if len(angles) != 4 * self.n:
            raise ValueError("angle vector has wrong length")
        return self._fn(self.tensor, self.n, angles)

    def golden_line(self, x, i, center, half_width, iters):
        return golden_line(self, x, i, center, half_width, iters)

    def copy(self):
        return AngleObjective(self.tensor, self.n, "zb" if self._fn is zb_settings_angles else "tmod")


def golden_line(fn, x, i, center, half_width, iters):
    """Golden-section maximization of ``fn`` along coordinate ``i`` of ``x``.

    Searches ``[center - half_width, center + half_width]``; ``x[i]`` is left
    at the last probe. Returns ``(t, f(t))``, with ``f`` NaN if the objective
    went non-finite.
    """
    a, b = center - half_width, center + half_width
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    x[i] = c
    fc = float(fn(x))
    x[i] = d
    fd = float(fn(x))
    for _ in range(iters):
        if not (math.isfinite(fc) and math.isfinite(fd)):
            return c, math.nan
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            x[i] = c
            fc = float(fn(x))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            x[i] = d
            fd = float(fn(x))
    if not (math.isfinite(fc) and math.isfinite(fd)):
        return c, math.nan
    return (c, fc) if fc >= fd else (d, fd)

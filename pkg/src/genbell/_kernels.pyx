# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, fabs, sqrt, isfinite, NAN
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef void _euler_axes(double phi, double theta, double psi, double* out) noexcept nogil:
    cdef double cf = cos(phi), sf = sin(phi)
    cdef double ct = cos(theta), st = sin(theta)
    cdef double cp = cos(psi), sp = sin(psi)
    out[0] = cf * ct * cp - sf * sp
    out[1] = sf * ct * cp + cf * sp
    out[2] = -st * cp
    out[3] = -cf * ct * sp - sf * cp
    out[4] = -sf * ct * sp + cf * cp
    out[5] = st * sp


cdef void _unit_vector(double theta, double phi, double* out) noexcept nogil:
    cdef double st = sin(theta)
    out[0] = st * cos(phi)
    out[1] = st * sin(phi)
    out[2] = cos(theta)


cdef Py_ssize_t _ipow(Py_ssize_t b, int e) noexcept nogil:
    cdef Py_ssize_t r = 1
    cdef int i
    for i in range(e):
        r *= b
    return r


cdef void _contract(const double* tensor, int n, const double* mats, int m,
                    double* buf_a, double* buf_b, double* out) noexcept nogil:
    # mats is (n, m, 3) row-major; buffers hold max(3^n, m^n) doubles
    cdef Py_ssize_t done = 1, rest = _ipow(3, n), a, b, nxt
    cdef int j, r
    cdef const double* src = tensor
    cdef double* dst
    cdef const double* mrow
    cdef double acc
    for j in range(n):
        rest //= 3
        dst = out if j == n - 1 else (buf_a if j % 2 == 0 else buf_b)
        for a in range(done):
            for r in range(m):
                mrow = mats + (j * m + r) * 3
                for b in range(rest):
                    acc = mrow[0] * src[(a * 3) * rest + b]
                    acc += mrow[1] * src[(a * 3 + 1) * rest + b]
                    acc += mrow[2] * src[(a * 3 + 2) * rest + b]
                    dst[(a * m + r) * rest + b] = acc
        done *= m
        src = dst


cdef void _fwht(double* a, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t h = 1, i, k
    cdef double x, y
    while h < size:
        i = 0
        while i < size:
            for k in range(i, i + h):
                x = a[k]
                y = a[k + h]
                a[k] = x + y
                a[k + h] = x - y
            i += 2 * h
        h *= 2


def mode_contract(tensor, int n, mats):
    cdef const double[::1] t = np.ascontiguousarray(tensor, dtype=np.float64).reshape(-1)
    cdef const double[:, :, ::1] mm = np.ascontiguousarray(mats, dtype=np.float64)
    cdef int m = mm.shape[1]
    if mm.shape[0] != n or mm.shape[2] != 3 or t.shape[0] != _ipow(3, n):
        raise ValueError("shape mismatch in mode_contract")
    cdef Py_ssize_t big = max(_ipow(3, n), _ipow(m, n))
    cdef cnp.ndarray[double, ndim=1, mode="c"] out = np.empty(_ipow(m, n))
    cdef cnp.ndarray[double, ndim=1, mode="c"] ba = np.empty(big)
    cdef cnp.ndarray[double, ndim=1, mode="c"] bb = np.empty(big)
    _contract(&t[0], n, &mm[0, 0, 0], m, &ba[0], &bb[0], &out[0])
    return out


def fwht(a):
    """In-place unnormalized Walsh-Hadamard transform of a float64 array."""
    cdef cnp.ndarray[double, ndim=1, mode="c"] arr = a
    _fwht(&arr[0], arr.shape[0])
    return arr


def walsh_l1(table):
    cdef cnp.ndarray[double, ndim=1, mode="c"] arr = np.array(table, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t i, size = arr.shape[0]
    cdef double s = 0.0
    _fwht(&arr[0], size)
    for i in range(size):
        s += fabs(arr[i])
    return s


cdef double _weighted_abs(const double* proj, int n, const double* c) noexcept nogil:
    # c is (n, 2) row-major; proj has 2^n entries, observer 1 most significant
    cdef Py_ssize_t idx, size = _ipow(2, n)
    cdef int j
    cdef double w, s = 0.0
    for idx in range(size):
        w = 1.0
        for j in range(n):
            w *= c[2 * j + ((idx >> (n - 1 - j)) & 1)]
        s += w * fabs(proj[idx])
    return s


cdef class _Workspace:
    cdef double* ba
    cdef double* bb
    cdef double* out
    cdef double* mats
    cdef double* cvec

    def __cinit__(self, int n):
        cdef Py_ssize_t big = _ipow(3, n)
        self.ba = <double*> malloc(big * sizeof(double))
        self.bb = <double*> malloc(big * sizeof(double))
        self.out = <double*> malloc(big * sizeof(double))
        self.mats = <double*> malloc(n * 9 * sizeof(double))
        self.cvec = <double*> malloc(n * 2 * sizeof(double))
        if not (self.ba and self.bb and self.out and self.mats and self.cvec):
            raise MemoryError()

    def __dealloc__(self):
        free(self.ba)
        free(self.bb)
        free(self.out)
        free(self.mats)
        free(self.cvec)


def tmod(tensor, int n, mats, c):
    cdef cnp.ndarray[double, ndim=1, mode="c"] proj = mode_contract(tensor, n, mats)
    cdef const double[:, ::1] cc = np.ascontiguousarray(c, dtype=np.float64)
    return _weighted_abs(&proj[0], n, &cc[0, 0])


def tmod_angles(tensor, int n, angles):
    cdef const double[::1] t = np.ascontiguousarray(tensor, dtype=np.float64).reshape(-1)
    cdef const double[::1] ang = np.ascontiguousarray(angles, dtype=np.float64).reshape(-1)
    if ang.shape[0] != 4 * n or t.shape[0] != _ipow(3, n):
        raise ValueError("shape mismatch in tmod_angles")
    cdef _Workspace ws = _Workspace(n)
    return _tmod_angles(&t[0], n, &ang[0], ws)


cdef double _tmod_angles(const double* t, int n, const double* ang, _Workspace ws) noexcept nogil:
    cdef int j
    for j in range(n):
        _euler_axes(ang[4 * j], ang[4 * j + 1], ang[4 * j + 2], ws.mats + 6 * j)
        ws.cvec[2 * j] = cos(ang[4 * j + 3])
        ws.cvec[2 * j + 1] = sin(ang[4 * j + 3])
    _contract(t, n, ws.mats, 2, ws.ba, ws.bb, ws.out)
    return _weighted_abs(ws.out, n, ws.cvec)


cdef double _zb_angles(const double* t, int n, const double* ang, _Workspace ws) noexcept nogil:
    cdef int j
    cdef Py_ssize_t i, size = _ipow(2, n)
    cdef double s = 0.0
    for j in range(n):
        _unit_vector(ang[4 * j], ang[4 * j + 1], ws.mats + 6 * j)
        _unit_vector(ang[4 * j + 2], ang[4 * j + 3], ws.mats + 6 * j + 3)
    _contract(t, n, ws.mats, 2, ws.ba, ws.bb, ws.out)
    _fwht(ws.out, size)
    for i in range(size):
        s += fabs(ws.out[i])
    return s


def zb_settings_angles(tensor, int n, angles):
    cdef const double[::1] t = np.ascontiguousarray(tensor, dtype=np.float64).reshape(-1)
    cdef const double[::1] ang = np.ascontiguousarray(angles, dtype=np.float64).reshape(-1)
    if ang.shape[0] != 4 * n or t.shape[0] != _ipow(3, n):
        raise ValueError("shape mismatch in zb_settings_angles")
    cdef _Workspace ws = _Workspace(n)
    return _zb_angles(&t[0], n, &ang[0], ws)


cdef class AngleObjective:
    """Reusable callable over a flat angle vector, no per-call allocation.

    ``kind`` is ``"tmod"`` (3 Euler angles + c angle per observer) or
    ``"zb"`` (polar/azimuthal pairs for two settings per observer).
    """
    cdef const double[::1] tensor
    cdef int n
    cdef int zb
    cdef _Workspace ws

    def __init__(self, tensor, int n, str kind):
        self.tensor = np.array(tensor, dtype=np.float64).reshape(-1)
        if self.tensor.shape[0] != _ipow(3, n):
            raise ValueError("tensor size does not match n")
        if kind not in ("tmod", "zb"):
            raise ValueError(f"unknown objective kind {kind!r}")
        self.n = n
        self.zb = kind == "zb"
        self.ws = _Workspace(n)

    cdef double _eval(self, const double* ang) noexcept nogil:
        if self.zb:
            return _zb_angles(&self.tensor[0], self.n, ang, self.ws)
        return _tmod_angles(&self.tensor[0], self.n, ang, self.ws)

    def __call__(self, angles):
        cdef const double[::1] ang = angles
        if ang.shape[0] != 4 * self.n:
            raise ValueError("angle vector has wrong length")
        return self._eval(&ang[0])

    def copy(self):
        """Independent objective over the same tensor, with its own scratch buffers."""
        return AngleObjective(np.asarray(self.tensor), self.n, "zb" if self.zb else "tmod")

    cdef double _golden(self, double* x, int i, double center, double half_width,
                        int iters, double* t_out) noexcept nogil:
        cdef double invphi = (sqrt(5.0) - 1.0) / 2.0
        cdef double a = center - half_width, b = center + half_width
        cdef double c = b - invphi * (b - a), d = a + invphi * (b - a)
        cdef double fc, fd
        cdef int it
        t_out[0] = c
        x[i] = c
        fc = self._eval(x)
        x[i] = d
        fd = self._eval(x)
        for it in range(iters):
            if not (isfinite(fc) and isfinite(fd)):
                return NAN
            if fc >= fd:
                b = d
                d = c
                fd = fc
                c = b - invphi * (b - a)
                x[i] = c
                fc = self._eval(x)
            else:
                a = c
                c = d
                fc = fd
                d = a + invphi * (b - a)
                x[i] = d
                fd = self._eval(x)
            t_out[0] = c
        if not (isfinite(fc) and isfinite(fd)):
            return NAN
        if fc >= fd:
            t_out[0] = c
            return fc
        t_out[0] = d
        return fd

    def golden_line(self, double[::1] x, int i, double center, double half_width, int iters):
        """Golden-section maximization along coordinate ``i``; see ``_pykernels.golden_line``.

        Runs without the GIL, so restarts on separate threads overlap.
        """
        if x.shape[0] != 4 * self.n or not 0 <= i < x.shape[0]:
            raise ValueError("bad angle vector or coordinate")
        cdef double t = center, f
        with nogil:
            f = self._golden(&x[0], i, center, half_width, iters, &t)
        return t, f

# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: quaternion arithmetic, word evaluation, path stepping.

Mirrors the API of `_pure`; selected at import by heatgeo._kernels.
"""
import numpy as np

from libc.math cimport atan2, cos, sin, sqrt

BACKEND = "cython"


cdef inline void _mul(double* a, double* b, double* out) nogil:
    out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
    out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1]
    out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]


cdef inline void _renorm(double* q) nogil:
    cdef double n = sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    q[0] /= n; q[1] /= n; q[2] /= n; q[3] /= n


cdef inline void _exp(double v0, double v1, double v2, double* out) nogil:
    cdef double n = sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    cdef double half = 0.5 * n
    cdef double factor
    if n < 1e-150:
        out[0] = 1.0; out[1] = 0.5 * v0; out[2] = 0.5 * v1; out[3] = 0.5 * v2
        return
    factor = sin(half) / n
    out[0] = cos(half)
    out[1] = factor * v0
    out[2] = factor * v1
    out[3] = factor * v2


def quat_mul(a, b, renormalize=True):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=np.float64),
                               np.asarray(b, dtype=np.float64))
    shape = a.shape
    cdef double[:, ::1] av = np.ascontiguousarray(a).reshape(-1, 4)
    cdef double[:, ::1] bv = np.ascontiguousarray(b).reshape(-1, 4)
    out = np.empty((av.shape[0], 4), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i
    cdef bint renorm = bool(renormalize)
    with nogil:
        for i in range(av.shape[0]):
            _mul(&av[i, 0], &bv[i, 0], &ov[i, 0])
            if renorm:
                _renorm(&ov[i, 0])
    return out.reshape(shape)


def quat_exp(v):
    v = np.asarray(v, dtype=np.float64)
    shape = v.shape[:-1] + (4,)
    cdef double[:, ::1] vv = np.ascontiguousarray(v).reshape(-1, 3)
    out = np.empty((vv.shape[0], 4), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(vv.shape[0]):
            _exp(vv[i, 0], vv[i, 1], vv[i, 2], &ov[i, 0])
    return out.reshape(shape)


def quat_log(q):
    q = np.asarray(q, dtype=np.float64)
    shape = q.shape[:-1] + (3,)
    cdef double[:, ::1] qv = np.ascontiguousarray(q).reshape(-1, 4)
    out = np.empty((qv.shape[0], 3), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i
    cdef double s, theta, factor
    with nogil:
        for i in range(qv.shape[0]):
            s = sqrt(qv[i, 1] * qv[i, 1] + qv[i, 2] * qv[i, 2] + qv[i, 3] * qv[i, 3])
            theta = atan2(s, qv[i, 0])
            if s < 1e-12:
                if qv[i, 0] < 0.0:
                    ov[i, 0] = 2.0 * 3.141592653589793
                    ov[i, 1] = 0.0; ov[i, 2] = 0.0
                    continue
                factor = 2.0
            else:
                factor = 2.0 * theta / s
            ov[i, 0] = factor * qv[i, 1]
            ov[i, 1] = factor * qv[i, 2]
            ov[i, 2] = factor * qv[i, 3]
    return out.reshape(shape)


def quat_dist(q):
    q = np.asarray(q, dtype=np.float64)
    w = np.clip(q[..., 0], -1.0, 1.0)
    return 2.0 * np.arccos(w)


def apply_word(quats, offsets, factors, vecs):
    q = np.array(quats, dtype=np.float64, copy=True)
    cdef double[:, ::1] qv = q
    cdef long long[::1] fv = np.ascontiguousarray(factors, dtype=np.int64)
    cdef double[:, ::1] vv = np.ascontiguousarray(
        np.asarray(vecs, dtype=np.float64).reshape(-1, 3))
    cdef Py_ssize_t e, f
    cdef double step[4]
    cdef double acc[4]
    with nogil:
        for e in range(vv.shape[0]):
            f = fv[e]
            _exp(vv[e, 0], vv[e, 1], vv[e, 2], step)
            _mul(&qv[f, 0], step, acc)
            _renorm(acc)
            qv[f, 0] = acc[0]; qv[f, 1] = acc[1]
            qv[f, 2] = acc[2]; qv[f, 3] = acc[3]
    return q


def simulate_paths(q0, normals, tangents):
    q = np.array(q0, dtype=np.float64, copy=True)
    cdef double[:, :, ::1] qv = q
    cdef double[:, :, ::1] nv = np.ascontiguousarray(normals, dtype=np.float64)
    cdef double[:, :, ::1] tv = np.ascontiguousarray(tangents, dtype=np.float64)
    cdef Py_ssize_t P = qv.shape[0], F = qv.shape[1]
    cdef Py_ssize_t S = nv.shape[1], K = nv.shape[2]
    cdef Py_ssize_t p, s, k, f
    cdef double v0, v1, v2, xi
    cdef double step[4]
    cdef double acc[4]
    with nogil:
        for p in range(P):
            for s in range(S):
                for f in range(F):
                    v0 = 0.0; v1 = 0.0; v2 = 0.0
                    for k in range(K):
                        xi = nv[p, s, k]
                        v0 += xi * tv[k, f, 0]
                        v1 += xi * tv[k, f, 1]
                        v2 += xi * tv[k, f, 2]
                    _exp(v0, v1, v2, step)
                    _mul(&qv[p, f, 0], step, acc)
                    _renorm(acc)
                    qv[p, f, 0] = acc[0]; qv[p, f, 1] = acc[1]
                    qv[p, f, 2] = acc[2]; qv[p, f, 3] = acc[3]
    return q

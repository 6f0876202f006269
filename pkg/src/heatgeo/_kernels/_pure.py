"""Pure numpy implementations of the hot kernels.

Same call signatures as the compiled module `_speedups`; the package picks
one of the two at import time.  Quaternions are float64 arrays (..., 4) in
wxyz order; tangent vectors are (..., 3) coefficients in the half-angle
convention exp(v) = (cos(|v|/2), sin(|v|/2) v/|v|).
"""
import numpy as np

BACKEND = "python"


def quat_mul(a, b, renormalize=True):
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w1, x1, y1, z1 = np.moveaxis(a, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(b, -1, 0)
    out = np.empty(np.broadcast(a, b).shape, dtype=np.float64)
    out[..., 0] = w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2
    out[..., 1] = w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2
    out[..., 2] = w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2
    out[..., 3] = w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2
    if renormalize:
        out /= np.linalg.norm(out, axis=-1, keepdims=True)
    return out


def quat_exp(v):
    """Group exponential of tangent coefficients (..., 3) -> (..., 4)."""
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v, axis=-1)
    half = 0.5 * n
    out = np.empty(v.shape[:-1] + (4,), dtype=np.float64)
    out[..., 0] = np.cos(half)
    # sin(n/2)/n, smooth at n = 0
    factor = 0.5 * np.sinc(half / np.pi)
    out[..., 1:] = v * factor[..., None]
    return out


def quat_log(q):
    """Principal logarithm (..., 4) -> (..., 3) with |result| in [0, 2pi).

    At the exact antipode (w = -1, zero vector part) the direction is not
    defined; this low-level routine returns the E1 direction there and the
    object layer raises instead.
    """
    q = np.asarray(q, dtype=np.float64)
    w = q[..., 0]
    vec = q[..., 1:]
    s = np.linalg.norm(vec, axis=-1)
    theta = np.arctan2(s, w)
    small = s < 1e-12
    safe_s = np.where(small, 1.0, s)
    factor = np.where(small, 2.0, 2.0 * theta / safe_s)
    out = vec * factor[..., None]
    if np.any(small & (w < 0.0)):
        out = np.array(out, copy=True)
        out[small & (w < 0.0)] = np.array([2.0 * np.pi, 0.0, 0.0])
    return out


def quat_dist(q):
    """Geodesic distance to the identity, 2*arccos(clamp(w))."""
    q = np.asarray(q, dtype=np.float64)
    return 2.0 * np.arccos(np.clip(q[..., 0], -1.0, 1.0))


def apply_word(quats, offsets, factors, vecs):
    """Apply a sequence of flow steps to a tuple of factor quaternions.

    quats   : (N, 4) starting configuration (not modified)
    offsets : (S + 1,) int64, entries of step s are offsets[s]:offsets[s+1]
    factors : (E,) int64 factor index per entry
    vecs    : (E, 3) tangent coefficients per entry

    Entries of one step touch distinct factors, so sequential application
    within a step equals the simultaneous flow.  Returns the final (N, 4).
    """
    q = np.array(quats, dtype=np.float64, copy=True)
    exps = quat_exp(np.asarray(vecs, dtype=np.float64).reshape(-1, 3))
    for e in range(exps.shape[0]):
        f = factors[e]
        q[f] = quat_mul(q[f], exps[e])
    return q


def simulate_paths(q0, normals, tangents):
    """Geometric Euler stepping of independent paths.

    q0       : (P, F, 4) initial quaternions per path and factor
    normals  : (P, S, K) standard normal draws
    tangents : (K, F, 3) pre-scaled tangent table (already includes the
               per-step scale sqrt(2 h w_k))

    Step s updates every factor f:  q <- q * exp(sum_k normals[p,s,k] *
    tangents[k,f,:]).  Returns the final (P, F, 4).
    """
    q = np.array(q0, dtype=np.float64, copy=True)
    normals = np.asarray(normals, dtype=np.float64)
    tangents = np.asarray(tangents, dtype=np.float64)
    steps = normals.shape[1]
    for s in range(steps):
        v = np.einsum("pk,kfi->pfi", normals[:, s, :], tangents)
        q = quat_mul(q, quat_exp(v))
    return q

"""Irreducible representations of SU(2) and represented frame generators.

The dimension-n irrep acts on spin j = (n-1)/2.  The frame vectors map to
dPi(E_k) = -i J_k with the standard angular momentum matrices J_k, which
reproduces the cyclic bracket table and gives the quadratic Casimir
-(sum_k dPi(E_k)^2) = (n^2 - 1)/4 * Id.
"""
import math
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import _kernels


@lru_cache(maxsize=None)
def angular_momentum(n):
    """(J1, J2, J3) Hermitian matrices for the dimension-n irrep."""
    if n < 1:
        raise ValueError("irrep dimension must be >= 1")
    j = (n - 1) / 2.0
    m = j - np.arange(n)  # basis ordered m = j, j-1, ..., -j
    jp = np.zeros((n, n), dtype=np.complex128)
    for k in range(1, n):
        mm = m[k]
        jp[k - 1, k] = math.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.conj().T
    j1 = 0.5 * (jp + jm)
    j2 = -0.5j * (jp - jm)
    j3 = np.diag(m.astype(np.complex128))
    return j1, j2, j3


@lru_cache(maxsize=None)
def milnor_generators(n):
    """Represented frame (A1, A2, A3) with A_k = -i J_k."""
    return tuple(-1j * jk for jk in angular_momentum(n))


@lru_cache(maxsize=None)
def casimir_defect(n):
    """Max deviation of -(sum A_k^2) from (n^2-1)/4 * Id; should be ~1e-16."""
    a1, a2, a3 = milnor_generators(n)
    cas = -(a1 @ a1 + a2 @ a2 + a3 @ a3)
    target = (n * n - 1) / 4.0 * np.eye(n)
    return float(np.max(np.abs(cas - target)))


def casimir_eigenvalue(n):
    return (n * n - 1) / 4.0


def rep_matrix(g, n):
    """Matrix of the dimension-n irrep at the group element g."""
    arr = g.to_array() if hasattr(g, "to_array") else np.asarray(g, dtype=np.float64)
    if arr[0] <= -1.0 + 1e-12:
        v = np.array([2.0 * math.pi, 0.0, 0.0])
    else:
        v = _kernels.quat_log(arr)
    a1, a2, a3 = milnor_generators(n)
    return scipy.linalg.expm(v[0] * a1 + v[1] * a2 + v[2] * a3)


def character(q_w, n):
    """Character of the dimension-n irrep as a function of the quaternion
    real part w: sin(n*theta)/sin(theta) with theta = arccos(w).

    Vectorized over w; the removable singularities at w = +-1 use the
    series limit n * cos((n-1)*theta) -> +-n.
    """
    w = np.clip(np.asarray(q_w, dtype=np.float64), -1.0, 1.0)
    theta = np.arccos(w)
    s = np.sin(theta)
    small = s < 1e-8
    safe = np.where(small, 1.0, s)
    vals = np.sin(n * theta) / safe
    limit = n * np.cos((n - 1) * theta)
    return np.where(small, limit, vals)


def character_of(g, n):
    arr = g.to_array() if hasattr(g, "to_array") else np.asarray(g, dtype=np.float64)
    return float(character(arr[..., 0], n))


@lru_cache(maxsize=None)
def conjugation_intertwiner(n):
    """Real orthogonal C with conj(Pi(g)) = C Pi(g) C^{-1} for all g.

    C is the representation of exp(pi E2); Ad of that element flips the
    sign of A1 and A3, which is exactly entrywise conjugation of the
    generators.  Validated numerically in the test suite.
    """
    a1, a2, a3 = milnor_generators(n)
    c = scipy.linalg.expm(math.pi * a2)
    assert np.max(np.abs(c.imag)) < 1e-12
    return c.real


def weyl_quadrature(n_nodes=200):
    """Nodes/weights integrating class functions F(d) over SU(2):
    integral F dHaar = (1/pi) * int_0^{2pi} F(d) sin(d/2)^2 dd.

    Returns (d_nodes, weights) from Gauss-Legendre on [0, 2*pi] with the
    sin^2 density folded into the weights.
    """
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    d = math.pi * (x + 1.0)
    weights = w * math.pi * np.sin(d / 2.0) ** 2 / math.pi
    return d, weights


@lru_cache(maxsize=None)
def character_orthonormality_defect(n_max=8, n_nodes=200):
    """Max |<chi_m, chi_n> - delta_mn| under the Weyl quadrature."""
    d, w = weyl_quadrature(n_nodes)
    cosw = np.cos(d / 2.0)
    chars = np.array([character(cosw, n) for n in range(1, n_max + 1)])
    gram = chars @ (chars * w).T
    return float(np.max(np.abs(gram - np.eye(n_max))))


def euler_quadrature(n_max, n_beta=None):
    """Product quadrature exact for band-limited functions on SU(2).

    Parametrization g = exp(alpha E3) exp(beta E2) exp(gamma E3).  Both
    angle grids run over the full quaternion period [0, 4pi) (the doubled
    torus covers SU(2) twice, uniformly, so averaging is still Haar); this
    keeps uniform grids exact for the half-integer frequencies of odd-spin
    blocks.  Gauss-Legendre in beta/2 handles the sin(beta) density.

    Returns (quaternions (M, 4), weights (M,)).
    """
    k_alpha = 4 * n_max + 2
    k_gamma = 4 * n_max + 2
    n_beta = n_beta or (4 * n_max + 8)
    alphas = np.arange(k_alpha) * (4.0 * math.pi / k_alpha)
    gammas = np.arange(k_gamma) * (4.0 * math.pi / k_gamma)
    # substitute phi = beta/2: int_0^pi F sin(beta) dbeta
    #   = int_0^{pi/2} F(2 phi) 2 sin(2 phi) dphi
    x, wx = np.polynomial.legendre.leggauss(n_beta)
    phi = (x + 1.0) * (math.pi / 4.0)
    wphi = wx * (math.pi / 4.0) * 2.0 * np.sin(2.0 * phi)
    qa = _kernels.quat_exp(np.stack(
        [np.zeros_like(alphas), np.zeros_like(alphas), alphas], axis=-1))
    qb = _kernels.quat_exp(np.stack(
        [np.zeros_like(phi), 2.0 * phi, np.zeros_like(phi)], axis=-1))
    qg = _kernels.quat_exp(np.stack(
        [np.zeros_like(gammas), np.zeros_like(gammas), gammas], axis=-1))
    quats = _kernels.quat_mul(
        _kernels.quat_mul(qa[:, None, None, :], qb[None, :, None, :]),
        qg[None, None, :, :])
    weights = (np.ones(k_alpha)[:, None, None] / k_alpha
               * wphi[None, :, None] / 2.0
               * np.ones(k_gamma)[None, None, :] / k_gamma)
    return quats.reshape(-1, 4), weights.reshape(-1)

"""Horizontal-word certificates on truncated SU(2) products.

The horizontal generators are X_i^1 = E_i^1 (first frame direction of
factor i) and X_i^2 = E_i^2 + E_{i+1}^2 (second frame direction of factors
i and i+1 simultaneously; the E_{i+1}^2 half is dropped when i is the last
retained factor).  A word is an ordered list of flow steps; its length is
the sum of step costs

    cost = (sum coeff_{i,1}^2 / b_i + sum coeff_{i,2}^2 / c_i)^{1/2},

which is a path length for the horizontal metric, so the length of any
word evaluating to g is an upper bound for the intrinsic distance of g.

Everything is built from one commutator gadget: the 5-factor middle word

    M(s, t) = e^{(s/2)E1} e^{tE2} e^{-sE1} e^{-tE2} e^{(s/2)E1}

is a rotation about an axis in the (E1, E3) plane; conjugating by e^{tau E2}
lands it exactly on the E3 axis with angle f(s, t).  Factor indices are
1-based throughout, matching the weight sequences b_i = scheme.b(i).
"""
import hashlib
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import (BoundViolation, GadgetDegenerate, RootBracketFailure,
                     TruncationMismatch)
from .group import (DEFAULT_MAX_LEN, ProductElement, dist_product,
                    geodesic_split, second_kind_coords)

_SIGN_FLIP = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class HorizontalStep:
    """Time-1 flow of sum coeffs[(i, axis)] * X_i^axis, axis in {1, 2}."""

    coeffs: tuple  # sorted tuple of ((i, axis), coeff)

    @classmethod
    def single(cls, i, axis, coeff):
        return cls((((i, axis), float(coeff)),))

    @classmethod
    def from_dict(cls, d):
        items = tuple(sorted((tuple(k), float(v)) for k, v in d.items() if v != 0.0))
        return cls(items)

    def cost(self, scheme):
        total = 0.0
        for (i, axis), coeff in self.coeffs:
            weight = scheme.b(i) if axis == 1 else scheme.c(i)
            total += coeff * coeff / weight
        return math.sqrt(total)

    def negated(self):
        return HorizontalStep(tuple((k, -v) for k, v in self.coeffs))


@dataclass(frozen=True)
class HorizontalWord:
    """An ordered list of steps, optionally pinned to a target element."""

    steps: tuple
    target: ProductElement = None
    length: float = 0.0

    @classmethod
    def from_steps(cls, steps, scheme, target=None):
        steps = tuple(s for s in steps if s.coeffs)
        length = sum(s.cost(scheme) for s in steps)
        return cls(steps, target, length)

    def inverse(self, scheme):
        inv_target = self.target.inverse() if self.target is not None else None
        return HorizontalWord.from_steps(
            tuple(s.negated() for s in reversed(self.steps)), scheme, inv_target)

    def to_json(self):
        data = {
            "steps": [
                [{"generator": [i, axis], "coeff": coeff}
                 for (i, axis), coeff in step.coeffs]
                for step in self.steps
            ],
            "length": self.length,
        }
        if self.target is not None:
            data["n_factors"] = self.target.truncation
            data["target_hash"] = target_hash(self.target)
        return data

    @classmethod
    def from_json(cls, data, scheme, target=None):
        steps = tuple(
            HorizontalStep(tuple(sorted(
                ((tuple(term["generator"]), float(term["coeff"])) for term in step))))
            for step in data["steps"])
        word = cls.from_steps(steps, scheme, target)
        return word


def target_hash(target):
    arr = np.round(target.to_array(), 12)
    return hashlib.sha256(arr.tobytes()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# commutator gadget
# ---------------------------------------------------------------------------

def _axis_exp(axis, coeff):
    v = np.zeros(3)
    v[axis] = coeff
    return _kernels.quat_exp(v)


def _scalar_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0])


def middle_word(s, t):
    """Quaternion of M(s, t) = e^{(s/2)E1} e^{tE2} e^{-sE1} e^{-tE2} e^{(s/2)E1}."""
    ch, sh = math.cos(s / 4.0), math.sin(s / 4.0)
    q = (ch, sh, 0.0, 0.0)
    for axis, coeff in ((1, t), (0, -s), (1, -t), (0, s / 2.0)):
        c, sn = math.cos(coeff / 2.0), math.sin(coeff / 2.0)
        step = (c, sn, 0.0, 0.0) if axis == 0 else (c, 0.0, sn, 0.0)
        q = _scalar_mul(q, step)
    return np.array(q)


_selfcheck_done = False


def gadget_f(s, t):
    """Rotation angle produced by the gadget, with the sign of s*t.

    f(s, t) = 2 arccos(cos^2(s/2) + sin^2(s/2) cos t), a strictly
    increasing bijection [0, pi] -> [0, 2 pi] along the diagonal s = t.
    """
    if abs(s) > math.pi + 1e-12 or abs(t) > math.pi + 1e-12:
        raise ValueError("gadget arguments restricted to |s|, |t| <= pi")
    if not _selfcheck_done:
        _gadget_selfcheck()
    arg = math.cos(s / 2.0) ** 2 + math.sin(s / 2.0) ** 2 * math.cos(t)
    val = 2.0 * math.acos(min(1.0, max(-1.0, arg)))
    if s * t < 0:
        return -val
    return val if s * t > 0 else 0.0


def gadget_tau(s, t, strict=False):
    """Conjugation angle landing the middle word on the E3 axis.

    Computed from the numeric logarithm of M(s, t); asserts that log M has
    no E2 component and that |tau| <= |t|/2.  Degenerate middle words
    (norm of log below 1e-12) return tau = 0, or raise with strict=True.
    """
    m = middle_word(s, t)
    v = _kernels.quat_log(m)
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        if strict:
            raise GadgetDegenerate(f"middle word at ({s}, {t}) is the identity")
        return 0.0
    if abs(v[1]) >= 1e-10:
        raise BoundViolation(
            "middle word log has an E2 component",
            witness={"s": s, "t": t, "e2_component": float(v[1])})
    sign = -1.0 if s * t < 0 else 1.0
    tau = math.atan2(sign * v[0], sign * v[2])
    if abs(tau) > abs(t) / 2.0 + 1e-10:
        raise BoundViolation(
            "conjugation angle exceeded |t|/2",
            witness={"s": s, "t": t, "tau": tau})
    return tau


@lru_cache(maxsize=1)
def _gadget_selfcheck():
    """One-time check of the closed form for f against direct multiplication."""
    global _selfcheck_done
    _selfcheck_done = True
    for s in (-2.9, -1.3, -0.4, 0.4, 1.3, 2.9):
        for t in (-2.8, -1.1, -0.5, 0.5, 1.1, 2.8):
            m = middle_word(s, t)
            tau = gadget_tau(s, t)
            conj = _kernels.quat_mul(
                _kernels.quat_mul(_axis_exp(1, -tau), m), _axis_exp(1, tau))
            arg = math.cos(s / 2.0) ** 2 + math.sin(s / 2.0) ** 2 * math.cos(t)
            val = 2.0 * math.acos(min(1.0, max(-1.0, arg)))
            f = math.copysign(val, s * t)
            err = np.linalg.norm(conj - _kernels.quat_exp(np.array([0.0, 0.0, f])))
            if err > 1e-9:
                raise BoundViolation(
                    "closed form for the gadget angle disagrees with "
                    "direct multiplication",
                    witness={"s": s, "t": t, "error": float(err)})
    return True


def _bisect(fn, lo, hi, value, tol=1e-12, max_iter=200):
    flo, fhi = fn(lo) - value, fn(hi) - value
    if flo > 0 or fhi < 0:
        raise RootBracketFailure(
            f"cannot bracket value {value} on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid) - value
        if fmid <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def _check_monotone(fn, lo, hi, n=50):
    xs = np.linspace(lo, hi, n)
    vals = [fn(x) for x in xs]
    diffs = np.diff(vals)
    if np.any(diffs < -1e-12):
        raise RootBracketFailure(
            f"gadget angle not monotone on [{lo}, {hi}]")


@lru_cache(maxsize=64)
def _monotone_verified(kind, hi):
    """Memoized monotonicity verification of the two gadget profiles.

    The profiles are fixed functions of xi, so one verification per
    interval covers every solve on that interval.
    """
    if kind == "diag":
        _check_monotone(lambda x: gadget_f(x, x), 0.0, hi)
    else:
        _check_monotone(lambda x: gadget_f(x ** (4.0 / 3.0), x ** (2.0 / 3.0)),
                        0.0, hi)
    return True


# ---------------------------------------------------------------------------
# single-direction words
# ---------------------------------------------------------------------------

_SPLIT_MAGNITUDE = 2.0


def _split_build(builder, i, z, scheme):
    """Common zero / sign / large-|z| handling for the word builders."""
    if abs(z) > 2.0 * math.pi + 1e-12:
        raise ValueError("|z| must not exceed 2*pi")
    if z == 0.0:
        return HorizontalWord.from_steps((), scheme)
    if z < 0:
        return _split_build(builder, i, -z, scheme).inverse(scheme)
    if z > _SPLIT_MAGNITUDE:
        n_sub = math.ceil(z / _SPLIT_MAGNITUDE)
        sub = builder(i, z / n_sub, scheme)
        return HorizontalWord.from_steps(sub.steps * n_sub, scheme)
    return builder(i, z, scheme)


def _e3_positive(i, z, scheme):
    f_diag = lambda xi: gadget_f(xi, xi)
    _monotone_verified("diag", math.pi)
    xi = _bisect(f_diag, 0.0, math.pi, z)
    tau = gadget_tau(xi, xi)
    steps = (
        HorizontalStep.single(i, 2, -tau),
        HorizontalStep.single(i, 1, xi / 2.0),
        HorizontalStep.single(i, 2, xi),
        HorizontalStep.single(i, 1, -xi),
        HorizontalStep.single(i, 2, -xi),
        HorizontalStep.single(i, 1, xi / 2.0),
        HorizontalStep.single(i, 2, tau),
    )
    return HorizontalWord.from_steps(steps, scheme)


def e3_word(i, z, scheme):
    """Word over {X_i^1, X_i^2} whose product is exp(z E_i^3).

    The X_i^2 exponents on factor i+1 telescope to zero, so the word acts
    only on factor i.  Lengths scale like (1/sqrt(b_i) + 1/sqrt(c_i)) *
    sqrt(|z|); magnitudes above 2 are split into equal sub-words first.
    """
    return _split_build(_e3_positive, i, z, scheme)


def _e2_positive(i, z, scheme):
    f_mixed = lambda xi: gadget_f(xi ** (4.0 / 3.0), xi ** (2.0 / 3.0))
    hi = 1.0
    while f_mixed(hi) < z:
        hi *= 1.25
        if hi > 2.5:
            raise RootBracketFailure(f"cannot bracket e2 value {z}")
    _monotone_verified("mixed", hi)
    xi = _bisect(f_mixed, 0.0, hi, z)
    p = xi ** (4.0 / 3.0)
    q = xi ** (2.0 / 3.0)
    tau = gadget_tau(p, q)
    half = e3_word(i, p / 2.0, scheme)
    full_neg = e3_word(i, p, scheme).inverse(scheme)
    steps = []
    steps.append(HorizontalStep.single(i, 1, -tau))
    steps.extend(half.steps)
    steps.append(HorizontalStep.single(i, 1, q))
    steps.extend(full_neg.steps)
    steps.append(HorizontalStep.single(i, 1, -q))
    steps.extend(half.steps)
    steps.append(HorizontalStep.single(i, 1, tau))
    return HorizontalWord.from_steps(steps, scheme)


def e2_word(i, z, scheme):
    """Word over {X_i^1, X_i^2} whose product is exp(z E_i^2).

    Uses the gadget with the cyclically shifted frame (E3, E1, E2) at the
    skewed arguments p = xi^{4/3}, q = xi^{2/3}; every e^{. E_i^3} factor
    is expanded recursively through e3_word.  Length scales like
    (1/sqrt(b_i) + 1/sqrt(c_i)) * |z|^{1/3}.
    """
    return _split_build(_e2_positive, i, z, scheme)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def word_to_arrays(word, n_factors):
    """Flatten a word to (offsets, factors, vecs) for the kernel evaluator.

    Each step becomes one tangent vector per touched factor (coefficients
    merged when a step drives several generators of the same factor);
    factor indices are converted to 0-based.
    """
    offsets = [0]
    factors = []
    vecs = []
    for step in word.steps:
        per_factor = {}
        for (i, axis), coeff in step.coeffs:
            if not 1 <= i <= n_factors:
                raise TruncationMismatch(f"factor {i} outside 1..{n_factors}")
            v = per_factor.setdefault(i - 1, [0.0, 0.0, 0.0])
            v[axis - 1] += coeff
            if axis == 2 and i < n_factors:
                v2 = per_factor.setdefault(i, [0.0, 0.0, 0.0])
                v2[1] += coeff
        for f in sorted(per_factor):
            factors.append(f)
            vecs.append(per_factor[f])
        offsets.append(len(factors))
    return (np.asarray(offsets, dtype=np.int64),
            np.asarray(factors, dtype=np.int64),
            np.asarray(vecs, dtype=np.float64).reshape(-1, 3))


def word_eval(word, scheme):
    """Multiply out a word on G_N and recompute its length independently.

    Returns (ProductElement, length).  This is the verifier every test
    uses: it never trusts the length stored on the word.
    """
    n = scheme.N
    offsets, factors, vecs = word_to_arrays(word, n)
    start = np.zeros((n, 4))
    start[:, 0] = 1.0
    final = _kernels.apply_word(start, offsets, factors, vecs)
    length = sum(step.cost(scheme) for step in word.steps)
    return ProductElement.from_array(final), length


def word_error(word, scheme):
    """Max per-factor quaternion distance between product and target."""
    if word.target is None:
        raise ValueError("word has no target")
    produced, _ = word_eval(word, scheme)
    return float(np.max(np.linalg.norm(
        produced.to_array() - word.target.to_array(), axis=1)))


# ---------------------------------------------------------------------------
# full decomposition
# ---------------------------------------------------------------------------

def decompose(g, scheme, max_len=DEFAULT_MAX_LEN):
    """Constructive word for an arbitrary element of G_N.

    Per factor, the element is split along its geodesic into pieces inside
    the coordinate chart; each piece factors through canonical coordinates
    of the second kind.  At each stage the E1 components of all factors are
    emitted as one simultaneous step (they commute across factors and the
    joint cost is the metric norm), followed by e2/e3 gadget words per
    factor.  The word length is the certified distance upper bound.
    """
    if g.truncation != scheme.N:
        raise TruncationMismatch(
            f"element has {g.truncation} factors, scheme N={scheme.N}")
    n = scheme.N
    per_factor = []
    for gi in g.factors:
        pieces = geodesic_split(gi, max_len)
        coords = []
        for piece in pieces:
            arr = piece.to_array()
            if arr[0] > 1.0 - 1e-15:
                coords.append(None)
            else:
                coords.append(second_kind_coords(piece).to_array())
        per_factor.append(coords)
    stages = max(len(c) for c in per_factor)
    steps = []
    for k in range(stages):
        stage = [c[k] if k < len(c) else None for c in per_factor]
        e1 = {}
        for i, y in enumerate(stage, start=1):
            if y is not None and y[0] != 0.0:
                e1[(i, 1)] = y[0]
        if e1:
            steps.append(HorizontalStep.from_dict(e1))
        for i, y in enumerate(stage, start=1):
            if y is None:
                continue
            if y[1] != 0.0:
                steps.extend(e2_word(i, y[1], scheme).steps)
            if y[2] != 0.0:
                steps.extend(e3_word(i, y[2], scheme).steps)
    return HorizontalWord.from_steps(steps, scheme, target=g)


def certified_diameter(scheme, grid=33):
    """Upper bound for the horizontal diameter of G_N.

    Every SU(2) element factors as exp(y1 E1) exp(y2 E2) exp(y3 E3) up to a
    central antipode exp(2 pi E1), with |y1| <= pi, |y2| <= pi/2,
    |y3| <= pi; summing certified single-direction costs over factors gives
    the bound.  The e2/e3 contributions take the max over a magnitude grid.
    """
    total = 0.0
    for i in range(1, scheme.N + 1):
        e1_cost = 3.0 * math.pi / math.sqrt(scheme.b(i))
        e2_cost = max(e2_word(i, z, scheme).length
                      for z in np.linspace(0.0, math.pi / 2.0, grid)[1:])
        e3_cost = max(e3_word(i, z, scheme).length
                      for z in np.linspace(0.0, math.pi, grid)[1:])
        total += e1_cost + e2_cost + e3_cost
    return total


def distance_certificates(scheme, n_samples, seed=0, exponent=1.0 / 3.0,
                          check_tol=None):
    """Sample Haar-random elements and certify their distances.

    Returns a list of rows (sample id, d_product, certified length, ratio)
    with ratio = length / d_product**exponent.  When check_tol is given,
    every word product is verified against its target to that tolerance.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for idx in range(n_samples):
        arr = rng.standard_normal((scheme.N, 4))
        arr /= np.linalg.norm(arr, axis=1, keepdims=True)
        g = ProductElement.from_array(arr)
        d = dist_product(g, scheme)
        word = decompose(g, scheme)
        if check_tol is not None:
            err = word_error(word, scheme)
            if err > check_tol:
                raise BoundViolation(
                    "word product missed its target",
                    witness={"sample": idx, "error": err})
        ratio = word.length / d ** exponent if d > 0 else math.inf
        rows.append((idx, d, word.length, ratio))
    return rows

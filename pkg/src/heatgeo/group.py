"""SU(2) and product-group arithmetic in the cyclic (Milnor) frame.

Conventions, fixed once for the whole package:

* An SU(2) element is a unit quaternion (w, x, y, z).
* The frame vectors are E_k = (k-th imaginary unit) / 2, which realizes the
  cyclic bracket table [E1, E2] = E3, [E2, E3] = E1, [E3, E1] = E2.
* Consequently exp(u E1) = (cos(u/2), sin(u/2), 0, 0), one-parameter
  subgroups have period 4*pi, and the diameter of SU(2) is 2*pi.
* The bi-invariant distance scaled by a weight a > 0 is
  dist(g, a) = 2 * arccos(w) / sqrt(a).
"""
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import AntipodalElement, OutsideChart, SchemeFormatError, TruncationMismatch

TWO_PI = 2.0 * math.pi

# Chart for canonical coordinates of the second kind: elements with
# dist(g, 1) below this radius are solvable by the closed-form extraction.
CHART_RADIUS = 1.0

# Default piece length for geodesic splitting; keeps every piece well inside
# the chart while bounding the piece count by ceil(2*pi / 0.5) = 13.
DEFAULT_MAX_LEN = 0.5


@dataclass(frozen=True)
class TangentVector:
    """Coefficients (v1, v2, v3) in the frame {E1, E2, E3}."""

    v1: float
    v2: float
    v3: float

    def to_array(self):
        return np.array([self.v1, self.v2, self.v3], dtype=np.float64)

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    @property
    def norm(self):
        return math.sqrt(self.v1 ** 2 + self.v2 ** 2 + self.v3 ** 2)


@dataclass(frozen=True)
class SU2Element:
    """A point of SU(2) stored as a unit quaternion."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"quaternion norm {n} too far from 1")
        if n != 1.0:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    def to_array(self):
        return np.array([self.w, self.x, self.y, self.z], dtype=np.float64)

    def __mul__(self, other):
        out = _kernels.quat_mul(self.to_array(), other.to_array())
        return SU2Element.from_array(out)

    def inverse(self):
        return SU2Element(self.w, -self.x, -self.y, -self.z)

    def conjugate_by(self, h):
        return h * self * h.inverse()

    def isclose(self, other, tol=1e-9):
        return float(np.linalg.norm(self.to_array() - other.to_array())) <= tol


@dataclass(frozen=True)
class ProductElement:
    """A point of the truncated product G_N, one SU(2) factor per slot."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def truncation(self):
        return len(self.factors)

    @classmethod
    def identity(cls, n):
        return cls(tuple(SU2Element.identity() for _ in range(n)))

    @classmethod
    def from_array(cls, arr):
        return cls(tuple(SU2Element.from_array(row) for row in arr))

    def to_array(self):
        return np.array([f.to_array() for f in self.factors], dtype=np.float64)

    def __mul__(self, other):
        if self.truncation != other.truncation:
            raise TruncationMismatch(
                f"{self.truncation} factors vs {other.truncation}")
        return ProductElement.from_array(
            _kernels.quat_mul(self.to_array(), other.to_array()))

    def inverse(self):
        return ProductElement(tuple(f.inverse() for f in self.factors))


def random_su2(rng):
    """Haar-uniform SU(2) element (normalized 4-dimensional Gaussian)."""
    v = rng.standard_normal(4)
    return SU2Element.from_array(v / np.linalg.norm(v))


def random_product(rng, n):
    return ProductElement(tuple(random_su2(rng) for _ in range(n)))


def exp_su2(v):
    """Group exponential of a tangent vector."""
    if isinstance(v, TangentVector):
        v = v.to_array()
    return SU2Element.from_array(_kernels.quat_exp(np.asarray(v, dtype=np.float64)))


def log_su2(g):
    """Principal logarithm with |result| in [0, 2*pi).

    Raises AntipodalElement at w = -1 (within 1e-12): the antipode lies on
    every great circle and has no principal direction.  Split the geodesic
    first (see geodesic_split) when that matters.
    """
    arr = g.to_array() if isinstance(g, SU2Element) else np.asarray(g, dtype=np.float64)
    if arr[0] <= -1.0 + 1e-12:
        raise AntipodalElement("principal logarithm undefined at w = -1")
    return TangentVector.from_array(_kernels.quat_log(arr))


def dist_su2(g, a=1.0):
    """Bi-invariant distance to the identity for the weight-a Laplacian.

    The weight scales the metric by 1/sqrt(a); values lie in [0, 2*pi/sqrt(a)].
    """
    if a <= 0:
        raise ValueError("weight must be positive")
    arr = g.to_array() if isinstance(g, SU2Element) else np.asarray(g, dtype=np.float64)
    return float(_kernels.quat_dist(arr)) / math.sqrt(a)


def _rotation_matrix(arr):
    w, x, y, z = arr
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def _second_kind_forward(y):
    q = _kernels.quat_exp(np.array([y[0], 0.0, 0.0]))
    q = _kernels.quat_mul(q, _kernels.quat_exp(np.array([0.0, y[1], 0.0])))
    q = _kernels.quat_mul(q, _kernels.quat_exp(np.array([0.0, 0.0, y[2]])))
    return q


def second_kind_coords(g, chart_radius=CHART_RADIUS, tol=1e-12, max_iter=50):
    """Solve exp(y1 E1) exp(y2 E2) exp(y3 E3) = g inside the chart.

    The closed form reads the three angles off the rotation matrix of g
    (the chart radius keeps |y2| < pi/2, away from the gimbal locus); a
    Newton iteration polishes the rare case where the closed form alone
    misses the tolerance.  Raises OutsideChart for elements beyond the
    chart radius or on solver failure.
    """
    arr = g.to_array() if isinstance(g, SU2Element) else np.asarray(g, dtype=np.float64)
    d = float(_kernels.quat_dist(arr))
    if d >= chart_radius:
        raise OutsideChart(f"dist {d:.6f} >= chart radius {chart_radius}")
    R = _rotation_matrix(arr)
    y = np.array([
        math.atan2(-R[1, 2], R[2, 2]),
        math.asin(min(1.0, max(-1.0, R[0, 2]))),
        math.atan2(-R[0, 1], R[0, 0]),
    ])
    residual = np.linalg.norm(_second_kind_forward(y) - arr)
    if residual > tol:
        for _ in range(max_iter):
            # Newton on the vector part of Psi(y)^{-1} g
            def vec_part(yy):
                fwd = _second_kind_forward(yy)
                inv = fwd * np.array([1.0, -1.0, -1.0, -1.0])
                return _kernels.quat_mul(inv, arr)[1:]
            F = vec_part(y)
            J = np.empty((3, 3))
            h = 1e-7
            for j in range(3):
                e = np.zeros(3)
                e[j] = h
                J[:, j] = (vec_part(y + e) - vec_part(y - e)) / (2 * h)
            try:
                y = y - np.linalg.solve(J, F)
            except np.linalg.LinAlgError as exc:
                raise OutsideChart("singular Jacobian in coordinate solve") from exc
            residual = np.linalg.norm(_second_kind_forward(y) - arr)
            if residual <= tol:
                break
        else:
            raise OutsideChart(
                f"coordinate solve stalled at residual {residual:.3e}")
    if np.max(np.abs(y)) > math.pi:
        raise OutsideChart("coordinates left the chart cube")
    return TangentVector.from_array(y)


def geodesic_split(g, max_len=DEFAULT_MAX_LEN):
    """Split g into equal pieces along its one-parameter geodesic.

    Returns pieces h_1, ..., h_m with product g, each of distance at most
    max_len, and m <= ceil(2*pi / max_len).  The antipode is handled by
    subdividing the E1 great circle.
    """
    if max_len <= 0:
        raise ValueError("max_len must be positive")
    arr = g.to_array() if isinstance(g, SU2Element) else np.asarray(g, dtype=np.float64)
    if arr[0] <= -1.0 + 1e-12:
        v = np.array([TWO_PI, 0.0, 0.0])
    else:
        v = _kernels.quat_log(arr)
    d = float(np.linalg.norm(v))
    if d == 0.0:
        return [SU2Element.identity()]
    m = max(1, math.ceil(d / max_len - 1e-12))
    piece = exp_su2(v / m)
    return [piece] * m


class _SeqSpec:
    """One positive sequence, either a power law i**p or an explicit list."""

    __slots__ = ("exponent", "values")

    def __init__(self, exponent=None, values=None):
        if (exponent is None) == (values is None):
            raise SchemeFormatError("sequence needs exactly one of p / values")
        self.exponent = None if exponent is None else float(exponent)
        self.values = None if values is None else tuple(float(v) for v in values)
        if self.exponent is not None and self.exponent < 0:
            raise SchemeFormatError("power-law exponent must be nonnegative")
        if self.values is not None and any(v <= 0 for v in self.values):
            raise SchemeFormatError("sequence entries must be strictly positive")

    @property
    def is_power(self):
        return self.exponent is not None

    def at(self, i):
        if self.is_power:
            return float(i) ** self.exponent
        if i > len(self.values):
            raise SchemeFormatError(f"index {i} beyond explicit list")
        return self.values[i - 1]

    def to_dict(self):
        if self.is_power:
            return {"p": self.exponent}
        return {"values": list(self.values)}


class CoefficientScheme:
    """The weight sequences (a_i), (b_i), (c_i) with truncation N.

    Power-law schemes extend analytically past the truncation (tail
    "power"); explicit lists carry no analytic tail and default to
    "undetermined".
    """

    def __init__(self, kind, n, a, b, c, tail=None):
        if kind not in ("power", "list"):
            raise SchemeFormatError(f"unknown scheme kind {kind!r}", field="kind")
        if not isinstance(n, int) or n < 1:
            raise SchemeFormatError("truncation N must be a positive integer", field="N")
        self.kind = kind
        self.N = n
        self._a, self._b, self._c = a, b, c
        for name, seq in (("a", a), ("b", b), ("c", c)):
            if kind == "power" and not seq.is_power:
                raise SchemeFormatError(f"power scheme needs exponent for {name}", field=name)
            if kind == "list" and seq.is_power:
                raise SchemeFormatError(f"list scheme needs values for {name}", field=name)
            if kind == "list" and len(seq.values) != n:
                raise SchemeFormatError(
                    f"sequence {name} has {len(seq.values)} entries, expected N={n}",
                    field=name)
        if tail is None:
            tail = "power" if kind == "power" else "undetermined"
        if tail not in ("power", "none", "undetermined"):
            raise SchemeFormatError(f"unknown tail descriptor {tail!r}", field="tail")
        if tail == "power" and kind != "power":
            raise SchemeFormatError("analytic tail requires a power scheme", field="tail")
        self.tail = tail

    # -- constructors ---------------------------------------------------

    @classmethod
    def power(cls, p, n, p_b=None, p_c=None, tail="power"):
        """Power-law scheme a_i = i**p; b, c default to the same exponent."""
        return cls(
            "power", n,
            _SeqSpec(exponent=p),
            _SeqSpec(exponent=p if p_b is None else p_b),
            _SeqSpec(exponent=p if p_c is None else p_c),
            tail=tail)

    @classmethod
    def from_lists(cls, a, b, c, tail="undetermined"):
        return cls("list", len(tuple(a)),
                   _SeqSpec(values=a), _SeqSpec(values=b), _SeqSpec(values=c),
                   tail=tail)

    # -- sequence access ------------------------------------------------

    def a(self, i):
        return self._a.at(i)

    def b(self, i):
        return self._b.at(i)

    def c(self, i):
        return self._c.at(i)

    def kappa(self, i):
        return self.b(i) / self.a(i)

    def a_array(self, n=None):
        n = self.N if n is None else n
        return np.array([self.a(i) for i in range(1, n + 1)])

    def b_array(self, n=None):
        n = self.N if n is None else n
        return np.array([self.b(i) for i in range(1, n + 1)])

    def c_array(self, n=None):
        n = self.N if n is None else n
        return np.array([self.c(i) for i in range(1, n + 1)])

    def exponent(self, name):
        """Power-law exponent of sequence 'a'/'b'/'c', or None for lists."""
        return {"a": self._a, "b": self._b, "c": self._c}[name].exponent

    def with_truncation(self, n):
        if self.kind == "list" and n > self.N:
            raise SchemeFormatError("cannot extend an explicit list")
        if self.kind == "list":
            return CoefficientScheme.from_lists(
                self._a.values[:n], self._b.values[:n], self._c.values[:n],
                tail=self.tail)
        return CoefficientScheme("power", n, self._a, self._b, self._c, tail=self.tail)

    # -- analytic tails -------------------------------------------------

    def sum_inv_a_tail(self):
        """Bracket for sum_{i > N} 1/a_i.  (0, 0) when the tail is 'none',
        (0, inf) when undetermined, integral bracket for power tails."""
        if self.tail == "none":
            return (0.0, 0.0)
        if self.tail == "undetermined":
            return (0.0, math.inf)
        p = self._a.exponent
        if p <= 1.0:
            return (math.inf, math.inf)
        lo = (self.N + 1) ** (1.0 - p) / (p - 1.0)
        hi = self.N ** (1.0 - p) / (p - 1.0)
        return (lo, hi)

    # -- serialization --------------------------------------------------

    def to_dict(self):
        return {
            "kind": self.kind,
            "N": self.N,
            "a": self._a.to_dict(),
            "b": self._b.to_dict(),
            "c": self._c.to_dict(),
            "tail": self.tail,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            kind = data["kind"]
            n = data["N"]
        except (KeyError, TypeError) as exc:
            raise SchemeFormatError(f"missing scheme field: {exc}", field=str(exc))

        def seq(name):
            entry = data.get(name)
            if entry is None:
                raise SchemeFormatError(f"missing sequence {name!r}", field=name)
            if isinstance(entry, dict):
                return _SeqSpec(exponent=entry.get("p"), values=entry.get("values"))
            if isinstance(entry, (int, float)):
                return _SeqSpec(exponent=entry)
            if isinstance(entry, (list, tuple)):
                return _SeqSpec(values=entry)
            raise SchemeFormatError(f"cannot parse sequence {name!r}", field=name)

        return cls(kind, int(n), seq("a"), seq("b"), seq("c"), tail=data.get("tail"))

    @classmethod
    def from_file(cls, path):
        path = str(path)
        with open(path, "rb") as fh:
            raw = fh.read()
        if path.endswith(".json"):
            data = json.loads(raw.decode())
        else:
            try:
                import tomllib
            except ImportError:
                import tomli as tomllib
            try:
                data = tomllib.loads(raw.decode())
            except Exception as exc:
                raise SchemeFormatError(f"cannot parse {path}: {exc}")
        return cls.from_dict(data)

    def scheme_id(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def __repr__(self):
        return f"CoefficientScheme({self.to_dict()})"


def dist_product(g, scheme):
    """Product distance (sum of squared factor distances)**1/2."""
    if g.truncation != scheme.N:
        raise TruncationMismatch(
            f"element has {g.truncation} factors, scheme N={scheme.N}")
    total = 0.0
    for i, gi in enumerate(g.factors, start=1):
        total += dist_su2(gi, scheme.a(i)) ** 2
    return math.sqrt(total)


def diam_product(scheme):
    """Bracket (lo, hi) for the product diameter 2*pi*(sum 1/a_i)**1/2."""
    partial = float(np.sum(1.0 / scheme.a_array()))
    tail_lo, tail_hi = scheme.sum_inv_a_tail()
    return (TWO_PI * math.sqrt(partial + tail_lo),
            TWO_PI * math.sqrt(partial + tail_hi))


def fit_second_kind_constants(n_samples=10000, seed=7, chart_radius=CHART_RADIUS):
    """Empirical sandwich constants c, C with
    c * dist <= max_j |y_j| <= C * dist over the chart.  Scheme artifacts,
    reported rather than asserted."""
    rng = np.random.default_rng(seed)
    lo, hi = math.inf, 0.0
    for _ in range(n_samples):
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        d = rng.uniform(1e-6, chart_radius * (1 - 1e-9))
        g = exp_su2(direction * d)
        y = second_kind_coords(g, chart_radius=chart_radius).to_array()
        ratio = float(np.max(np.abs(y))) / d
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return lo, hi

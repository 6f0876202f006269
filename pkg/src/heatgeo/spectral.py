"""Heat-kernel spectral sums on SU(2) and truncated products.

The dimension-n irrep contributes the Casimir eigenvalue (n^2 - 1)/4, so
the single-factor heat trace is sum_n n^2 exp(-t (n^2-1)/4) and the
spectral gap is lambda_0 = 3/4 (validated against represented generators).
Product traces are sums of factor log-traces with certified analytic tail
brackets, never bare truncations.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import erfcx

from .errors import BoundViolation, QuadratureUnconverged
from .representations import casimir_defect, casimir_eigenvalue, character

LAMBDA_0 = 0.75


@dataclass(frozen=True)
class SpectralTruncation:
    """Retention policy for spectral sums.

    n_max bounds the largest retained irrep dimension; in adaptive mode the
    cutoff grows (up to n_cap) until the certified tail bound drops below
    tol.
    """

    n_max: int = 64
    tol: float = 1e-10
    adaptive: bool = True
    n_cap: int = 200000

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


DEFAULT_TRUNC = SpectralTruncation()


@lru_cache(maxsize=1)
def _ensure_casimir():
    """Spectral-gap convention check: represented Casimir is (n^2-1)/4."""
    worst = max(casimir_defect(n) for n in range(1, 9))
    if worst > 1e-10:
        raise BoundViolation("Casimir validation failed",
                             witness={"defect": worst})
    if abs(casimir_eigenvalue(2) - LAMBDA_0) > 1e-15:
        raise BoundViolation("spectral gap is not 3/4")
    return True


def trace_tail_bound(t, m):
    """Closed-form bound for sum_{n > m} n^2 exp(-t (n^2-1)/4).

    Uses the integral majorant int_m^inf (x+1)^2 exp(-t (x^2-1)/4) dx,
    written with the scaled complementary error function so the common
    factor exp(t (1 - m^2)/4) never overflows.
    """
    beta = t / 4.0
    root = math.sqrt(beta)
    scaled = erfcx(root * m)  # erfc(x) * exp(x^2)
    common = math.exp(beta * (1.0 - m * m))
    integral = (m / (2.0 * beta)
                + math.sqrt(math.pi) * scaled / (4.0 * beta ** 1.5)
                + 1.0 / beta
                + 0.5 * math.sqrt(math.pi / beta) * scaled)
    return common * integral


def _cutoff(t, trunc):
    if not trunc.adaptive:
        return trunc.n_max, trace_tail_bound(t, trunc.n_max)
    m = max(trunc.n_max, int(math.sqrt(8.0 / t)) + 2)
    tail = trace_tail_bound(t, m)
    while tail > trunc.tol and m < trunc.n_cap:
        m *= 2
        tail = trace_tail_bound(t, m)
    return m, tail


def heat_trace_su2(t, trunc=DEFAULT_TRUNC):
    """mu_t(e) on SU(2): sum_n n^2 exp(-t (n^2-1)/4), certified tail < tol."""
    if t <= 0:
        raise ValueError("t must be positive")
    _ensure_casimir()
    m, tail = _cutoff(t, trunc)
    n = np.arange(1, m + 1, dtype=np.float64)
    val = float(np.sum(n * n * np.exp(-t * (n * n - 1.0) / 4.0)))
    return val


def heat_trace_derivative_su2(t, trunc=DEFAULT_TRUNC):
    """d/dt of the single-factor trace: -sum n^2 lambda_n exp(-t lambda_n)."""
    if t <= 0:
        raise ValueError("t must be positive")
    m, _ = _cutoff(t, trunc)
    n = np.arange(1, m + 1, dtype=np.float64)
    lam = (n * n - 1.0) / 4.0
    return float(-np.sum(n * n * lam * np.exp(-t * lam)))


def _character_matrix(d, m):
    """chi_n(d) = sin(n d/2)/sin(d/2) for n = 1..m, shape (m, len(d))."""
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    half = d / 2.0
    s = np.sin(half)
    n = np.arange(1, m + 1, dtype=np.float64)
    numer = np.sin(np.outer(n, half))
    small = np.abs(s) < 1e-8
    safe = np.where(small, 1.0, s)
    chars = numer / safe
    if np.any(small):
        limit = n[:, None] * np.cos(np.outer(n - 1.0, half))
        chars = np.where(small[None, :], limit, chars)
    return chars


def heat_kernel_radial_su2(t, d, trunc=DEFAULT_TRUNC):
    """Radial heat kernel mu_t at distance d: sum_n n e^{-t lambda_n} chi_n(d)."""
    if t <= 0:
        raise ValueError("t must be positive")
    _ensure_casimir()
    m, _ = _cutoff(t, trunc)
    n = np.arange(1, m + 1, dtype=np.float64)
    coeffs = n * np.exp(-t * (n * n - 1.0) / 4.0)
    out = coeffs @ _character_matrix(d, m)
    return float(out[0]) if np.isscalar(d) or np.ndim(d) == 0 else out


def heat_kernel_radial_derivative_su2(t, d, trunc=DEFAULT_TRUNC):
    """d/dt of the radial kernel (term-differentiated sum)."""
    m, _ = _cutoff(t, trunc)
    n = np.arange(1, m + 1, dtype=np.float64)
    lam = (n * n - 1.0) / 4.0
    coeffs = -n * lam * np.exp(-t * lam)
    out = coeffs @ _character_matrix(d, m)
    return float(out[0]) if np.isscalar(d) or np.ndim(d) == 0 else out


@lru_cache(maxsize=1)
def _log_trace_decay_constant():
    """Certified K with log mu_s(e) <= K exp(-3 s / 4) for s >= 1.

    log(1+x) <= x and (n^2-1)/4 - 3/4 >= (n^2-4)/4 >= 0 for n >= 2 give
    K = sum_{n>=2} n^2 exp(-(n^2-4)/4), evaluated with its own tail bound.
    """
    n = np.arange(2, 60, dtype=np.float64)
    val = float(np.sum(n * n * np.exp(-(n * n - 4.0) / 4.0)))
    # remaining tail at s = 1, shifted by e^{3/4}
    val += trace_tail_bound(1.0, 60) * math.exp(0.75)
    return val


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self):
        return self.hi - self.lo


def log_heat_trace_product(t, scheme, trunc=DEFAULT_TRUNC):
    """Bracket for log mu_t(e) on the product: sum_i log trace(a_i t).

    Retained factors are summed explicitly (each with certified spectral
    tail); the remaining factor tail is bounded through
    log trace(s) <= K e^{-3s/4} plus a convexity integral bound for
    power-law weights.  Explicit-list schemes contribute exactly their
    declared factors ('none') or an unbounded upper end ('undetermined').
    """
    if t <= 0:
        raise ValueError("t must be positive")
    explicit = 0.0
    i = 1
    while True:
        s = scheme.a(i) * t
        contrib = math.log(heat_trace_su2(s, trunc))
        explicit += contrib
        if scheme.kind == "list" and i >= scheme.N:
            break
        if i >= scheme.N and contrib < 1e-14:
            break
        i += 1
        if i > 100000:
            raise QuadratureUnconverged("factor sum did not converge")
    if scheme.tail == "none":
        return Bracket(explicit, explicit)
    if scheme.tail == "undetermined":
        return Bracket(explicit, math.inf)
    # analytic tail of a power-law factor sequence beyond the explicit part
    p = scheme.exponent("a")
    k = _log_trace_decay_constant()
    c = 0.75 * t
    m = i
    if scheme.a(m + 1) * t < 1.0:
        # cannot happen: the explicit loop runs until contributions die out
        raise QuadratureUnconverged("factor tail entered the non-certified range")
    if p < 1.0:
        raise QuadratureUnconverged("analytic factor tail needs exponent >= 1")
    # sum_{i>m} e^{-c i^p} <= int_m^inf e^{-c x^p} dx <= e^{-c m^p}/(c p m^{p-1})
    tail_hi = k * math.exp(-c * m ** p) / (c * p * m ** (p - 1.0))
    return Bracket(explicit, explicit + tail_hi)


@dataclass
class HeatTraceProfile:
    """Log-trace diagnostics along a time grid."""

    t_grid: np.ndarray
    log_trace_lo: np.ndarray
    log_trace_hi: np.ndarray
    counting: np.ndarray = field(default=None)

    @property
    def log_trace_mid(self):
        return 0.5 * (self.log_trace_lo + self.log_trace_hi)


def heat_trace_profile(scheme, t_grid, trunc=DEFAULT_TRUNC):
    t_grid = np.asarray(sorted(t_grid), dtype=np.float64)
    brackets = [log_heat_trace_product(t, scheme, trunc) for t in t_grid]
    counting = np.array([counting_N(1.0 / t, scheme) for t in t_grid])
    return HeatTraceProfile(
        t_grid,
        np.array([b.lo for b in brackets]),
        np.array([b.hi for b in brackets]),
        counting)


def counting_N(r, scheme):
    """N(r) = 3 #{k : a_k * lambda_0 <= r} with lambda_0 = 3/4."""
    if r <= 0:
        raise ValueError("r must be positive")
    _ensure_casimir()
    bound = r / LAMBDA_0
    if scheme.kind == "power":
        p = scheme.exponent("a")
        if p == 0.0:
            return 0 if bound < 1.0 else math.inf
        k = int(bound ** (1.0 / p) + 1e-9)
        while (k + 1.0) ** p <= bound:
            k += 1
        while k > 0 and float(k) ** p > bound:
            k -= 1
        return 3 * k
    return 3 * sum(1 for i in range(1, scheme.N + 1) if scheme.a(i) <= bound)


def counting_growth_exponent(scheme, r_lo, r_hi, n_points=40):
    """Regression slope of log N(r) against log r on a log grid."""
    rs = np.logspace(math.log10(r_lo), math.log10(r_hi), n_points)
    vals = np.array([counting_N(r, scheme) for r in rs], dtype=np.float64)
    mask = vals > 0
    return float(np.polyfit(np.log(rs[mask]), np.log(vals[mask]), 1)[0])


def ck_diagnostic(scheme, lam, t_grid, trunc=DEFAULT_TRUNC):
    """Ultracontractivity diagnostics for the product trace.

    Reports sup_t t^lam * log mu_t(e) (upper bracket ends), the regression
    exponent of log log mu_t(e) against log(1/t), and the min/max of the
    ratio log mu_t(e) / N(1/t) over the grid.
    """
    t_grid = np.asarray(sorted(t_grid), dtype=np.float64)
    if np.any(t_grid <= 0) or np.any(t_grid > 1):
        raise ValueError("t grid must lie in (0, 1]")
    profile = heat_trace_profile(scheme, t_grid, trunc)
    sup_stat = float(np.max(t_grid ** lam * profile.log_trace_hi))
    mids = profile.log_trace_mid
    mask = mids > 0
    slope = float(np.polyfit(np.log(1.0 / t_grid[mask]), np.log(mids[mask]), 1)[0])
    with np.errstate(divide="ignore"):
        ratios = np.where(profile.counting > 0, mids / profile.counting, np.inf)
    finite = ratios[np.isfinite(ratios)]
    return {
        "lambda": lam,
        "t_grid": t_grid.tolist(),
        "log_trace": mids.tolist(),
        "counting": profile.counting.tolist(),
        "sup_t_lambda_log_mu": sup_stat,
        "regression_exponent": slope,
        "ratio_min": float(np.min(finite)) if finite.size else math.inf,
        "ratio_max": float(np.max(finite)) if finite.size else math.inf,
        "ratio_undefined_points": int(np.sum(~np.isfinite(ratios))),
    }


def log_heat_trace_time_derivative_product(t, scheme, trunc=DEFAULT_TRUNC):
    """log |d/dt mu_t(e)| for the product semigroup, computed stably as
    log mu_t(e) + log sum_i a_i * (-trace'/trace)(a_i t)."""
    bracket = log_heat_trace_product(t, scheme, trunc)
    total_ratio = 0.0
    i = 1
    while True:
        s = scheme.a(i) * t
        tr = heat_trace_su2(s, trunc)
        dtr = heat_trace_derivative_su2(s, trunc)
        total_ratio += scheme.a(i) * (-dtr / tr)
        if i >= scheme.N and (scheme.kind == "list" or -dtr < 1e-14):
            break
        i += 1
        if i > 100000:
            break
    return bracket.mid + math.log(total_ratio)


def _sign_change_points(fn, lo, hi, scan=1024):
    """Roots of fn on [lo, hi], located by scan + bisection refinement."""
    xs = np.linspace(lo, hi, scan + 1)
    vals = fn(xs)
    roots = []
    for i in range(scan):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0 or fa * fb >= 0.0:
            continue
        for _ in range(60):
            mid = 0.5 * (a + b)
            fm = float(fn(np.array([mid]))[0])
            if fa * fm <= 0.0:
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    return roots


def _segmented_weyl_integral(fn, segments, n_gl):
    x, w = np.polynomial.legendre.leggauss(n_gl)
    total = 0.0
    for a, b in zip(segments[:-1], segments[1:]):
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        d = mid + rad * x
        vals = np.abs(fn(d)) * np.sin(d / 2.0) ** 2 / math.pi
        total += rad * float(np.dot(w, vals))
    return total


def tv_derivative_su2(t, trunc=DEFAULT_TRUNC, tol=1e-8, check_bound=True):
    """Total variation of the time derivative, int |d/dt mu_t| dHaar.

    The term-differentiated radial sum is smooth, so the integrand's only
    non-smooth points are its sign changes; those are located first and
    the Weyl integral is evaluated per smooth segment with Gauss-Legendre,
    refined until two successive orders agree to tol.  Asserts the bound
    t * value <= 2e * max(M0(t/2), 2) with M0(t) = log mu_t(e).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    fn = lambda d: heat_kernel_radial_derivative_su2(t, d, trunc)
    roots = _sign_change_points(fn, 0.0, 2.0 * math.pi)
    segments = [0.0] + roots + [2.0 * math.pi]
    prev = _segmented_weyl_integral(fn, segments, 48)
    value = None
    for n_gl in (96, 192, 384):
        cur = _segmented_weyl_integral(fn, segments, n_gl)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            value = cur
            break
        prev = cur
    if value is None:
        raise QuadratureUnconverged(f"TV quadrature did not settle at t={t}")
    if check_bound:
        m0 = math.log(heat_trace_su2(t / 2.0, trunc))
        rhs = 2.0 * math.e * max(m0, 2.0)
        if t * value > rhs + 1e-9:
            raise BoundViolation(
                "derivative total-variation bound failed",
                witness={"t": t, "lhs": t * value, "rhs": rhs})
    return value


def on_diagonal_derivative_su2(t, trunc=DEFAULT_TRUNC):
    """|d/dt mu_t(e)| = sum n^2 lambda_n exp(-t lambda_n)."""
    return -heat_trace_derivative_su2(t, trunc)

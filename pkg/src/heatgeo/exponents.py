"""Exponent pipeline: (lambda, c) -> admissible fractional powers -> decay
exponents, plus the summability certifier for coefficient schemes.

Rational inputs are handled in exact fraction arithmetic (floats convert
exactly, being dyadic rationals), so interval endpoints and emptiness
decisions carry no rounding; the square-root thresholds go through sympy
for the symbolic identities and through floats (1e-12 tolerances) for
numerics.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .errors import InadmissibleEpsilon


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# admissible fractional powers and decay exponents
# ---------------------------------------------------------------------------

def epsilon_interval_exact(lam, c):
    """Exact endpoints (lam/(1+lam), (1-lam)c - 2lam) as fractions."""
    lam, c = _frac(lam), _frac(c)
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    return lam / (1 + lam), (1 - lam) * c - 2 * lam


def interval_nonempty_exact(lam, c):
    """Open interval nonempty iff (2+c) lam^2 + 3 lam - c < 0 (exact)."""
    lam, c = _frac(lam), _frac(c)
    return (2 + c) * lam * lam + 3 * lam - c < 0


def epsilon_interval(lam, c):
    """Admissible open interval for the fractional power, or None if empty."""
    lo, hi = epsilon_interval_exact(lam, c)
    if lo >= hi:
        return None
    return (float(lo), float(hi))


def nash_exponent(lam, eps):
    """The functional-inequality exponent eps (1 + 1/lambda)."""
    return float(_frac(eps) * (1 + 1 / _frac(lam)))


def gamma_range(lam, eps):
    """Decay exponent gamma = lambda / (eps + eps lambda - lambda).

    Requires eps > lambda/(1+lambda), exactly the condition making the
    companion exponent eps (1 + 1/lambda) exceed 1.
    """
    lam_f, eps_f = _frac(lam), _frac(eps)
    if not 0 < lam_f < 1:
        raise ValueError("lambda must lie in (0, 1)")
    denom = eps_f + eps_f * lam_f - lam_f
    nash = nash_exponent(lam, eps)
    if eps_f <= lam_f / (1 + lam_f):
        raise InadmissibleEpsilon(
            f"eps={float(eps_f)} <= lambda/(1+lambda)={float(lam_f/(1+lam_f))}")
    assert denom > 0
    assert (nash > 1.0) == (eps_f > lam_f / (1 + lam_f))
    return {"gamma": float(lam_f / denom), "nash_exponent": nash}


def gamma_threshold(lam, c):
    """gamma_{lambda,c} = lambda / (-(2+c) lam^2 - 3 lam + c)."""
    lam, c = _frac(lam), _frac(c)
    denom = -(2 + c) * lam * lam - 3 * lam + c
    if denom <= 0:
        return math.inf
    return float(lam / denom)


def lambda_thresholds(c):
    """The two admissibility thresholds in lambda for a given c.

    Returns (lam_ck, lam_gauss): below the first the epsilon interval is
    nonempty; below the second the threshold exponent drops under 1 and
    the off-diagonal Gaussian bound regime applies.
    """
    c = float(c)
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    lam_ck = (-3.0 + math.sqrt(9.0 + 4.0 * (2.0 + c) * c)) / (2.0 * (2.0 + c))
    lam_gauss = (-2.0 + math.sqrt(4.0 + c * (2.0 + c))) / (2.0 + c)
    return lam_ck, lam_gauss


def gamma_threshold_c_third(lam):
    """Specialization gamma_{lambda, 1/3} = 3 lam / (-7 lam^2 - 9 lam + 1)."""
    lam = _frac(lam)
    denom = -7 * lam * lam - 9 * lam + 1
    if denom <= 0:
        return math.inf
    return float(3 * lam / denom)


@dataclass(frozen=True)
class ExponentReport:
    lam: float
    c: float
    epsilon_interval: tuple  # (lo, hi) or None
    gamma_threshold: float
    flags: dict = field(default_factory=dict)


def exponent_report(lam, c):
    interval = epsilon_interval(lam, c)
    nonempty = interval_nonempty_exact(lam, c)
    assert (interval is not None) == nonempty
    thr = gamma_threshold(lam, c)
    _, lam_gauss = lambda_thresholds(c)
    return ExponentReport(
        lam=float(lam), c=float(c),
        epsilon_interval=interval,
        gamma_threshold=thr,
        flags={
            "interval_nonempty": bool(nonempty),
            "gamma_below_one": bool(nonempty and thr < 1.0),
            "ck0plus_mode": False,
        })


def ck0plus_mode(eps=None, c=None, n_grid=20):
    """Exponent decay along a geometric lambda grid.

    With a fixed fractional power eps: gamma(lam) for lam = 2^-k.  With a
    fixed distance exponent c: eps is picked mid-interval per lam below
    the admissibility threshold.  Certifies that the gamma grid decreases
    monotonically to 0.
    """
    if (eps is None) == (c is None):
        raise ValueError("pass exactly one of eps / c")
    lams, gammas = [], []
    if eps is not None:
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        for k in range(1, n_grid + 1):
            lam = 2.0 ** -k
            if eps <= lam / (1 + lam):
                continue
            lams.append(lam)
            gammas.append(gamma_range(lam, eps)["gamma"])
    else:
        lam_ck, _ = lambda_thresholds(c)
        for k in range(1, n_grid + 1):
            lam = lam_ck * 2.0 ** -k
            lo, hi = epsilon_interval(lam, c)
            lams.append(lam)
            gammas.append(gamma_range(lam, 0.5 * (lo + hi))["gamma"])
    diffs = [g2 - g1 for g1, g2 in zip(gammas, gammas[1:])]
    monotone = all(d < 0 for d in diffs)
    return {
        "mode": "epsilon" if eps is not None else "c",
        "value": float(eps if eps is not None else c),
        "lambda_grid": lams,
        "gamma_grid": gammas,
        "monotone_decreasing": monotone,
        "gamma_tail": gammas[-1] if gammas else math.inf,
        "tends_to_zero": monotone and gammas[-1] < 1e-3,
    }


# ---------------------------------------------------------------------------
# symbolic verifications (cached; raise on failure)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def symbolic_checks():
    """One-time sympy verification of the pipeline's algebraic identities.

    Returns a dict of booleans; every entry must be True:
      * interval emptiness is equivalent to the quadratic sign,
      * gamma at the upper interval endpoint equals gamma_{lambda,c},
      * the c = 1/3 closed form matches the general threshold,
      * the c = 1/3 thresholds equal (-9+sqrt(109))/14 and (-6+sqrt(43))/7,
      * the kappa-exponent difference identity
        2r/(3r-1) - 3r/(5r-2) = r(r-1)/((3r-1)(5r-2)),
        nonpositive on r in (2/5, 1] where both exponents are in play
        (on (1/3, 2/5] the second denominator is nonpositive and only the
        first exponent is used).
    """
    lam, c, r = sympy.symbols("lam c r", positive=True)
    out = {}
    gap = (1 - lam) * c - 2 * lam - lam / (1 + lam)
    quad = (2 + c) * lam ** 2 + 3 * lam - c
    out["emptiness_equivalence"] = sympy.simplify(
        gap + quad / (1 + lam)) == 0
    eps_hi = (1 - lam) * c - 2 * lam
    gamma_at_hi = lam / (eps_hi + eps_hi * lam - lam)
    gamma_thr = lam / (-(2 + c) * lam ** 2 - 3 * lam + c)
    out["gamma_endpoint_identity"] = sympy.simplify(
        gamma_at_hi - gamma_thr) == 0
    special = 3 * lam / (-7 * lam ** 2 - 9 * lam + 1)
    out["c_third_specialization"] = sympy.simplify(
        gamma_thr.subs(c, sympy.Rational(1, 3)) - special) == 0
    ck_thr = (-3 + sympy.sqrt(9 + 4 * (2 + c) * c)) / (2 * (2 + c))
    gauss_thr = (-2 + sympy.sqrt(4 + c * (2 + c))) / (2 + c)
    out["c_third_ck_value"] = sympy.simplify(
        ck_thr.subs(c, sympy.Rational(1, 3))
        - (-9 + sympy.sqrt(109)) / 14) == 0
    out["c_third_gauss_value"] = sympy.simplify(
        gauss_thr.subs(c, sympy.Rational(1, 3))
        - (-6 + sympy.sqrt(43)) / 7) == 0
    diff = 2 * r / (3 * r - 1) - 3 * r / (5 * r - 2)
    target = r * (r - 1) / ((3 * r - 1) * (5 * r - 2))
    out["kappa_difference_identity"] = sympy.simplify(diff - target) == 0
    # sign analysis on (2/5, 1]: numerator r(r-1) <= 0, both linear factors
    # of the denominator positive
    two_fifths, one = sympy.Rational(2, 5), sympy.Integer(1)
    out["kappa_nonpositive_case3"] = all([
        sympy.solveset(3 * r - 1 <= 0, r, sympy.Interval.Lopen(two_fifths, one))
        is sympy.S.EmptySet,
        sympy.solveset(5 * r - 2 <= 0, r, sympy.Interval.Lopen(two_fifths, one))
        is sympy.S.EmptySet,
        sympy.solveset(r * (r - 1) > 0, r, sympy.Interval.Lopen(two_fifths, one))
        is sympy.S.EmptySet,
    ])
    return out


# ---------------------------------------------------------------------------
# scheme summability certifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Three-valued outcome of an infinite-sum or sup condition.

    status is 'converges' (with a rigorous bracket for the value),
    'diverges' (with witness partial sums), or 'undetermined' (explicit
    list with unknown tail).  A finite truncation alone never yields a
    bare boolean.
    """

    status: str
    bracket: tuple = None
    witness: dict = None

    @property
    def ok(self):
        return self.status == "converges"


def _power_sum_verdict(alpha, n_partial=50):
    """Verdict for sum_i i^alpha via the p-series criterion."""
    partial = sum(float(i) ** alpha for i in range(1, n_partial + 1))
    if alpha < -1.0:
        lo = partial + (n_partial + 1.0) ** (alpha + 1.0) / (-alpha - 1.0)
        hi = partial + float(n_partial) ** (alpha + 1.0) / (-alpha - 1.0)
        return Verdict("converges", bracket=(lo, hi))
    table = {n: sum(float(i) ** alpha for i in range(1, n + 1))
             for n in (10, 100, 1000)}
    return Verdict("diverges", witness={
        "exponent": alpha,
        "criterion": "p-series with exponent >= -1",
        "partial_sums": table,
    })


def _finite_sum_verdict(values):
    total = float(sum(values))
    return Verdict("converges", bracket=(total, total))


def _sum_condition(scheme, num_exp, den_exp, den_name):
    """Verdict for sum_i a_i^num_exp / d_i^den_exp, d in {b, c}."""
    if scheme.kind == "power":
        alpha = num_exp * scheme.exponent("a") - den_exp * scheme.exponent(den_name)
        return _power_sum_verdict(alpha)
    den = scheme.b_array() if den_name == "b" else scheme.c_array()
    vals = scheme.a_array() ** num_exp / den ** den_exp
    if scheme.tail == "none":
        return _finite_sum_verdict(vals)
    return Verdict("undetermined", witness={
        "partial_sum": float(vals.sum()),
        "note": "explicit list with undetermined tail",
    })


def _sup_condition(scheme, den_name):
    if scheme.kind == "power":
        delta = scheme.exponent("a") - scheme.exponent(den_name)
        if delta <= 0:
            return Verdict("converges", bracket=(1.0, 1.0))
        return Verdict("diverges", witness={
            "criterion": f"a_i/{den_name}_i = i^{delta} unbounded"})
    den = scheme.b_array() if den_name == "b" else scheme.c_array()
    sup = float(np.max(scheme.a_array() / den))
    if scheme.tail == "none":
        return Verdict("converges", bracket=(sup, sup))
    return Verdict("undetermined", witness={"partial_sup": sup})


@dataclass(frozen=True)
class SchemeCertificate:
    scheme_id: str
    conditions: dict          # the five sup/sum verdicts
    all_converge: bool
    case: str                 # "1", "2", "3", "finite", "undetermined", "none"
    r: float                  # working summability order (nan if not applicable)
    kappa_exponents: dict     # {"primary": 2r/(3r-1), "secondary": 3r/(5r-2) or None}
    kappa_verdicts: dict
    dominance: dict


def scheme_conditions(scheme):
    """Certificate for the distance-comparison coefficient conditions.

    The five conditions are sup a/b plus the four sums
    a^{1/3}/b^{2/3}, a^{1/5}/b^{3/5}, a^{1/3}/c^{2/3}, a^{1/5}/c^{3/5}.
    Power-law schemes are decided exactly by the p-series criterion with
    integral-tail brackets; explicit lists yield range verdicts with
    undetermined tails.  The case classification follows the summability
    order of (1/a_i): order below 1/3 needs only bounded ratios (case 1),
    orders in (1/3, 2/5] and (2/5, 1] need kappa-sum conditions with
    exponents 2r/(3r-1) and 3r/(5r-2) (cases 2, 3).
    """
    checks = symbolic_checks()
    if not all(checks.values()):
        raise AssertionError(f"symbolic verification failed: {checks}")
    conditions = {
        "sup_a_over_b": _sup_condition(scheme, "b"),
        "sum_a13_b23": _sum_condition(scheme, 1.0 / 3.0, 2.0 / 3.0, "b"),
        "sum_a15_b35": _sum_condition(scheme, 1.0 / 5.0, 3.0 / 5.0, "b"),
        "sum_a13_c23": _sum_condition(scheme, 1.0 / 3.0, 2.0 / 3.0, "c"),
        "sum_a15_c35": _sum_condition(scheme, 1.0 / 5.0, 3.0 / 5.0, "c"),
    }
    all_ok = all(v.ok for v in conditions.values())

    if scheme.kind == "list":
        case = "finite" if scheme.tail == "none" else "undetermined"
        r = math.nan
        kappa_exps = {"primary": None, "secondary": None}
        kappa_verdicts = {}
    else:
        p = scheme.exponent("a")
        r_star = 1.0 / p if p > 0 else math.inf  # infimum of summability orders
        if p > 3.0:
            case, r = "1", 1.0 / 3.0
        elif p > 2.5:
            case, r = "2", 2.0 / 5.0
        elif p > 1.0:
            case, r = "3", 1.0
        else:
            case, r = "none", math.nan
        if case in ("2", "3"):
            # any r with sum a^{-r} < inf works and smaller r weakens the
            # kappa condition (the exponent 2r/(3r-1) decreases in r), so
            # scan from just above r_star up to 1 for a feasible choice
            delta_b = scheme.exponent("b") - p
            delta_c = scheme.exponent("c") - p
            candidates = [r_star + k * (1.0 - r_star) / 32.0 for k in range(1, 33)]
            for cand in candidates:
                if cand <= 1.0 / 3.0:
                    continue
                e = 2.0 * cand / (3.0 * cand - 1.0)
                if min(e * delta_b, e * delta_c) > 1.0:
                    r = cand
                    break
            primary = 2.0 * r / (3.0 * r - 1.0)
            secondary = 3.0 * r / (5.0 * r - 2.0) if r > 2.0 / 5.0 else None
            kappa_exps = {"primary": primary, "secondary": secondary}
            kappa_verdicts = {}
            for name, delta in (("b", delta_b), ("c", delta_c)):
                kappa_verdicts[f"kappa_{name}_primary"] = _power_sum_verdict(
                    -primary * delta)
                if secondary is not None:
                    kappa_verdicts[f"kappa_{name}_secondary"] = _power_sum_verdict(
                        -secondary * delta)
        else:
            kappa_exps = {"primary": None, "secondary": None}
            kappa_verdicts = {}

    return SchemeCertificate(
        scheme_id=scheme.scheme_id(),
        conditions=conditions,
        all_converge=all_ok,
        case=case,
        r=r,
        kappa_exponents=kappa_exps,
        kappa_verdicts=kappa_verdicts,
        dominance={
            "identity_verified": checks["kappa_difference_identity"],
            "primary_stronger_on_case3": checks["kappa_nonpositive_case3"],
        })

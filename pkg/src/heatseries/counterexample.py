"""The sharpness construction on the integer line.

The seed is the flat bump g(t) = exp(-t^-beta) for t > 0 (zero otherwise),
whose derivatives all vanish at 0.  Each derivative is g^(k)(t) =
R_k(1/t) e^{-t^-beta} for an integer-coefficient polynomial R_k obtained
from the recurrence R_0 = 1, R_{k+1}(s) = beta s^{beta+1} R_k(s)
- s^2 R_k'(s).  The lattice solution v(x, t) combines finitely many
derivatives with consecutive-integer products, so every value is an exact
rational times the common flat factor; numerics go through rational
polynomial evaluation and an arbitrary-precision exponential, which
sidesteps the catastrophic cancellation a plain float path would hit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp

from .errors import AuditWindowEmptyError

_WORK_DPS = 40


def default_theta(beta):
    """Midpoint-ish admissible theta: half of min(1, (2/beta)^(1/beta))."""
    return 0.5 * min(1.0, (2.0 / beta) ** (1.0 / beta))


@dataclass(frozen=True)
class FlatBumpParams:
    """Parameters of the flat bump and the derived lattice solution.

    beta: integer >= 2 steepness of the bump (integer so the derivative
    polynomials stay over the integers).  theta: auxiliary constant in
    (0, min(1, (2/beta)^(1/beta))), defaulting to half of the upper end so
    the induced ratio constant stays comfortably above 1.  epsilon: growth
    slack used by the growth audit (which needs beta > max(1, 2/epsilon)).
    time_shift: how far the solution is translated back in time; audits are
    shift-invariant.
    """

    beta: int
    theta: float = None
    epsilon: float = 1.0
    time_shift: float = 1.0

    def __post_init__(self):
        if int(self.beta) != self.beta or self.beta < 2:
            raise ValueError("beta must be an integer >= 2")
        object.__setattr__(self, "beta", int(self.beta))
        if self.theta is None:
            object.__setattr__(self, "theta", default_theta(self.beta))
        upper = min(1.0, (2.0 / self.beta) ** (1.0 / self.beta))
        if not 0 < self.theta < upper:
            raise ValueError(f"theta must lie in (0, {upper})")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.time_shift > 0:
            raise ValueError("time_shift must be positive")

    @property
    def bump_ratio(self):
        """(2/beta)^(1/beta) / theta; > 1 for admissible theta."""
        return (2.0 / self.beta) ** (1.0 / self.beta) / self.theta


class DerivativePolynomialTable:
    """Append-only table of the derivative polynomials R_k for one beta.

    Entries are dicts {exponent: integer coefficient}; deg R_k = k(beta+1).
    Shared read-only across audit workers once built.
    """

    def __init__(self, beta):
        if int(beta) != beta or beta < 2:
            raise ValueError("beta must be an integer >= 2")
        self.beta = int(beta)
        self._polys = [{0: 1}]

    def poly(self, k):
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        while k >= len(self._polys):
            beta = self.beta
            cur = self._polys[-1]
            nxt = {}
            for e, c in cur.items():
                top = e + beta + 1
                nxt[top] = nxt.get(top, 0) + beta * c
                if e:
                    nxt[e + 1] = nxt.get(e + 1, 0) - e * c
            self._polys.append({e: c for e, c in nxt.items() if c})
        return self._polys[k]


@lru_cache(maxsize=None)
def _table(beta):
    return DerivativePolynomialTable(beta)


def _poly_eval(poly, s):
    """Exact value of a sparse integer polynomial at rational s."""
    s = Fraction(s)
    acc = Fraction(0)
    power = Fraction(1)
    last = 0
    for e in sorted(poly):
        power *= s ** (e - last)
        last = e
        acc += poly[e] * power
    return acc


def _poly_add(target, poly, factor):
    for e, c in poly.items():
        target[e] = target.get(e, 0) + factor * c
    return target


def _mirror(x):
    return x if x >= 0 else -x - 1


def _term_coefficient(x, k):
    """Consecutive-integer product (x+k)...(x-k+1) over (2k)!.

    Equals C(x+k, 2k); in particular it vanishes for k > x >= 0, which is
    what truncates the lattice sum.
    """
    return math.comb(x + k, 2 * k)


@lru_cache(maxsize=None)
def _combined_poly(beta, x, order):
    """Polynomial P with d^order/dt^order v(x,t) = P(1/t) e^{-t^-beta}."""
    table = _table(beta)
    out = {}
    for k in range(x + 1):
        _poly_add(out, table.poly(k + order), _term_coefficient(x, k))
    return {e: c for e, c in out.items() if c}


def _exact_to_mpf(v):
    v = Fraction(v)
    return mp.mpf(v.numerator) / mp.mpf(v.denominator)


def _flat_factor(s, beta):
    """e^{-s^beta} for rational s, as an mpf (never under/overflows)."""
    return mp.exp(-_exact_to_mpf(s) ** beta)


def _v_mpf(params, x, t, order=0):
    """Arbitrary-precision d^order/dt^order v(x, t); 0 for t <= 0."""
    if t <= 0:
        return mp.mpf(0)
    x = _mirror(x)
    s = 1 / Fraction(t)
    poly = _combined_poly(params.beta, x, order)
    return _exact_to_mpf(_poly_eval(poly, s)) * _flat_factor(s, params.beta)


def g_eval(params, t):
    """The flat bump: exp(-t^-beta) for t > 0, exactly 0 for t <= 0."""
    if t <= 0:
        return 0.0
    s = 1 / Fraction(t)
    with mp.workdps(_WORK_DPS):
        return float(_flat_factor(s, params.beta))


def g_derivative(params, k, t):
    """k-th derivative of the bump via the exact polynomial recurrence.

    Returns 0.0 for t <= 0 (all one-sided derivatives vanish there); for
    t > 0 the polynomial part is evaluated exactly and only the flat
    exponential factor is approximate.
    """
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if t <= 0:
        return 0.0
    if k == 0:
        return g_eval(params, t)
    s = 1 / Fraction(t)
    with mp.workdps(_WORK_DPS):
        value = _exact_to_mpf(_poly_eval(_table(params.beta).poly(k), s))
        return float(value * _flat_factor(s, params.beta))


def v_eval(params, x, t):
    """The lattice solution: g at x = 0, the finite derivative sum for
    x >= 1, and the mirror value v(-x-1, t) for x <= -1; 0 for t <= 0."""
    with mp.workdps(_WORK_DPS):
        return float(_v_mpf(params, x, t))


def v_time_derivative(params, x, t, order=1):
    """Term-wise time derivative of the finite lattice sum."""
    with mp.workdps(_WORK_DPS):
        return float(_v_mpf(params, x, t, order=order))


def heat_residual_1d(params, x, t):
    """d/dt v + 2 v(x) - v(x-1) - v(x+1) from separately evaluated pieces.

    Vanishes up to arithmetic rounding; the exact-polynomial statement is
    heat_residual_poly.
    """
    if not t > 0:
        raise ValueError("residual is defined for t > 0")
    return (
        v_time_derivative(params, x, t)
        + 2.0 * v_eval(params, x, t)
        - v_eval(params, x - 1, t)
        - v_eval(params, x + 1, t)
    )


def heat_residual_poly(params, x):
    """The residual as an exact polynomial in s = 1/t (flat factor removed).

    The construction solves the lattice heat equation identically, so this
    is the zero polynomial (empty dict) at every x.
    """
    beta = params.beta
    out = {}
    _poly_add(out, _combined_poly(beta, _mirror(x), 1), 1)
    _poly_add(out, _combined_poly(beta, _mirror(x), 0), 2)
    _poly_add(out, _combined_poly(beta, _mirror(x - 1), 0), -1)
    _poly_add(out, _combined_poly(beta, _mirror(x + 1), 0), -1)
    return {e: c for e, c in out.items() if c}


@dataclass
class HuangAuditReport:
    k: int
    bound: float
    findings: list

    @property
    def passed(self):
        return not self.findings


def huang_bound_audit(params, k, t_grid):
    """Check |g^(k)| <= k! (2k / (e beta theta^beta))^(k/beta) on a grid.

    Violations are reported as findings about the parameter range, not
    raised: the bound's admissible range is part of what is being probed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    beta = params.beta
    bound = math.factorial(k) * (
        2.0 * k / (math.e * beta * params.theta ** beta)
    ) ** (k / beta)
    findings = []
    for t in t_grid:
        value = abs(g_derivative(params, k, t))
        if value > bound:
            findings.append((float(t), value, bound))
    return HuangAuditReport(k=k, bound=bound, findings=findings)


@dataclass
class GrowthAuditReport:
    passed: bool
    r0: float
    window: tuple
    worst_margin: float
    violations: list


def growth_audit(params, xmax=60, t_grid=None):
    """Check |v(x,t)| <= 4 sqrt(2 pi) e^{(1+eps) x ln x} on [ceil(R0), xmax].

    R0 = max{e, k0, e^{(2/eps)(3/2 - (1+1/beta) + ln C0)}} with the audited
    factorial threshold k0 = 1.  Raises AuditWindowEmptyError when the
    window closes before it opens.
    """
    beta, eps = params.beta, params.epsilon
    if not beta > max(1.0, 2.0 / eps):
        raise ValueError("growth audit needs beta > max(1, 2/epsilon)")
    c0 = params.bump_ratio
    r0 = max(
        math.e,
        1.0,
        math.exp((2.0 / eps) * (1.5 - (1.0 + 1.0 / beta) + math.log(c0))),
    )
    start = math.ceil(r0)
    if xmax < start:
        raise AuditWindowEmptyError(r0, xmax)
    if t_grid is None:
        t_grid = tuple(Fraction(i, 8) for i in range(1, 9))
    worst = 0.0
    violations = []
    with mp.workdps(_WORK_DPS):
        prefactor = 4 * mp.sqrt(2 * mp.pi)
        for x in range(start, xmax + 1):
            envelope = prefactor * mp.e ** ((1.0 + eps) * x * mp.log(x))
            for t in t_grid:
                value = abs(_v_mpf(params, x, t))
                margin = float(value / envelope)
                worst = max(worst, margin)
                if value > envelope:
                    violations.append((x, float(t), float(value), float(envelope)))
    return GrowthAuditReport(
        passed=not violations,
        r0=r0,
        window=(start, xmax),
        worst_margin=worst,
        violations=violations,
    )


@dataclass
class NonAnalyticityReport:
    """Numeric witness that the shifted solution is not time analytic.

    flat_values[j] is |d_t^j v(x, s)| at the smallest dyadic s probed: all
    of them under the tolerance means every Taylor coefficient of
    u(x, t) = v(x, t + shift) vanishes at t = -shift, while a positive
    sample shows u is not the zero function.
    """

    x: int
    flat: bool
    flat_values: dict
    flat_trace: dict
    smallest_s: float
    positive_samples: list
    nonzero: bool
    time_shift: float

    @property
    def not_analytic(self):
        return self.flat and self.nonzero


def non_analyticity_witness(
    params, x, kmax, tol=1e-8, max_dyadic=30, sample_times=(0.25, 0.5, 1.0)
):
    """Probe flatness at 0+ of all derivatives up to kmax, plus positivity.

    Derivative magnitudes are sampled along the geometric grid t = 2^-m
    (the recorded trace covers the last stretch of the descent); flat means
    every probed magnitude sits under the tolerance.  Sample times are
    relative to the unshifted solution, i.e. at shift + t for the shifted
    one.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    probes = sorted({max(1, max_dyadic - step) for step in (20, 15, 10, 5, 0)})
    flat_values = {}
    flat_trace = {}
    with mp.workdps(_WORK_DPS):
        for j in range(kmax + 1):
            trace = [
                (m, float(abs(_v_mpf(params, x, Fraction(1, 2 ** m), order=j))))
                for m in probes
            ]
            flat_trace[j] = trace
            flat_values[j] = trace[-1][1]
    samples = [(float(t), v_eval(params, x, t)) for t in sample_times]
    flat = all(v <= tol for trace in flat_trace.values() for _, v in trace)
    nonzero = any(v > 0 for _, v in samples)
    return NonAnalyticityReport(
        x=x,
        flat=flat,
        flat_values=flat_values,
        flat_trace=flat_trace,
        smallest_s=float(2.0 ** -max_dyadic),
        positive_samples=samples,
        nonzero=nonzero,
        time_shift=params.time_shift,
    )

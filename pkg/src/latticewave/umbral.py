"""Delta-operator calculus: truncated power series, basic polynomial
sequences, and the scalar propagator multipliers they generate.

A delta operator is a formal series L(s) = sum_k b_k s^k / k! with b_0 = 0
and b_1 != 0, read as a series in the time derivative.  Its compositional
inverse M = L^{-1} generates the basic polynomial sequence through

    m_k(t) = k! [s^k] exp(t M(s)),

so m_0 = 1, m_k(0) = 0 for k >= 1, and L_t m_k = k m_{k-1} (equivalently,
the normalized sequence m_k/k! is lowered with coefficient one).  All
series/polynomial arithmetic is exact over rationals; floats appear only
when a series or polynomial is evaluated at a point.

The generating function G(s, t) = sum_k m_k(t) s^k / k! equals
exp(t M(s)); for an argument c*omega with omega a Clifford element
squaring to +1 it splits into cosh(t M(c)) + omega sinh(t M(c)) whenever
M is odd (true for both built-in operators).

The wave multipliers c = cosh(t M(i lambda)) and s = sinh(t M(i lambda)) /
(i lambda) are the spectral coefficients of the second-order evolution
solvers.  For the central-difference operator they are real only under the
stability bound tau*lambda/2 <= 1; beyond it evaluation continues
analytically (exponentially growing, complex on half-integer steps) and
must be requested explicitly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .clifford import Multivector

__all__ = [
    "DEFAULT_ORDER",
    "CflViolationError",
    "PowerSeries",
    "DeltaOperator",
    "compositional_inverse",
    "basic_sequence",
    "poly_eval",
    "poly_derivative",
    "poly_shift",
    "difference_quotient",
    "egf_eval",
    "egf_series_eval",
    "wave_multipliers",
    "wave_multiplier_arrays",
]

DEFAULT_ORDER = 16

_F0 = Fraction(0)
_F1 = Fraction(1)


class CflViolationError(RuntimeError):
    """Raised when tau*lambda/2 > 1 and unstable evaluation was not allowed."""

    def __init__(self, lam_max: float, bound: float):
        self.lam_max = lam_max
        self.bound = bound
        super().__init__(
            f"stability bound violated: max frequency {lam_max:.6g} exceeds 2/tau = {bound:.6g}; "
            "pass allow_unstable to evaluate the growing branch anyway"
        )


def _fraction(x) -> Fraction:
    # floats lift exactly (every float is a dyadic rational)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


# -- formal power series (exponential coefficients) ---------------------------


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series sum_k coeffs[k] s^k / k! with exact rational coeffs."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(_fraction(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_exponential(cls, coeffs: Iterable, order: int | None = None) -> "PowerSeries":
        cs = [_fraction(c) for c in coeffs]
        if order is not None:
            cs = (cs + [_F0] * order)[:order]
        return cls(tuple(cs))

    @classmethod
    def from_ordinary(cls, coeffs: Iterable) -> "PowerSeries":
        return cls(tuple(_fraction(c) * math.factorial(k) for k, c in enumerate(coeffs)))

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "PowerSeries":
        # the series "s"
        cs = [_F0] * order
        if order > 1:
            cs[1] = _F1
        return cls(tuple(cs))

    def ordinary(self) -> tuple[Fraction, ...]:
        return tuple(c / math.factorial(k) for k, c in enumerate(self.coeffs))

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        K = min(self.order, other.order)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs[:K], other.coeffs[:K])))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        K = min(self.order, other.order)
        return PowerSeries(tuple(a - b for a, b in zip(self.coeffs[:K], other.coeffs[:K])))

    def scale(self, factor) -> "PowerSeries":
        f = _fraction(factor)
        return PowerSeries(tuple(f * c for c in self.coeffs))

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        K = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [_F0] * K
        for n in range(K):
            out[n] = sum((math.comb(n, k) * a[k] * b[n - k] for k in range(n + 1)), _F0)
        return PowerSeries(tuple(out))

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(s)); inner must have zero constant term."""
        if inner.coeffs[0] != 0:
            raise ValueError("composition requires a series with zero constant term")
        K = min(self.order, inner.order)
        out = _const_series(self.coeffs[0], K)
        power = _const_series(_F1, K)
        for k in range(1, K):
            power = power * inner
            ck = self.coeffs[k]
            if ck:
                out = out + power.scale(Fraction(ck, math.factorial(k)))
        return out

    def derivative(self) -> "PowerSeries":
        return PowerSeries(self.coeffs[1:])

    def evaluate(self, x):
        """Horner evaluation of the truncated polynomial; exact for Fraction x."""
        acc = 0 * x if not isinstance(x, Fraction) else _F0
        for c in reversed(self.ordinary()):
            acc = acc * x + c
        return acc


def _const_series(c: Fraction, order: int) -> PowerSeries:
    return PowerSeries((c,) + (_F0,) * (order - 1))


def _ord_mul(a: list[Fraction], b: list[Fraction], K: int) -> list[Fraction]:
    out = [_F0] * K
    for i, ai in enumerate(a[:K]):
        if not ai:
            continue
        for j, bj in enumerate(b[: K - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def _ord_compose(f: list[Fraction], g: list[Fraction], K: int) -> list[Fraction]:
    out = [_F0] * K
    out[0] = f[0]
    power = [_F1] + [_F0] * (K - 1)
    for k in range(1, min(len(f), K)):
        power = _ord_mul(power, g, K)
        if f[k]:
            out = [o + f[k] * p for o, p in zip(out, power)]
    return out


def compositional_inverse(L: PowerSeries) -> PowerSeries:
    """Series M with L(M(s)) = M(L(s)) = s up to the truncation order.

    Requires the delta-operator condition: zero constant term, nonzero
    linear term.  Solved triangularly in ordinary coefficients; both
    round-trip identities are verified exactly before returning.
    """
    K = L.order
    l = list(L.ordinary())
    if l[0] != 0 or l[1] == 0:
        raise ValueError("compositional inverse needs c_0 = 0 and c_1 != 0")
    m = [_F0] * K
    m[1] = 1 / l[1]
    for k in range(2, K):
        comp = _ord_compose(l, m, k + 1)
        m[k] = -comp[k] / l[1]
    ident = [_F0] * K
    if K > 1:
        ident[1] = _F1
    if _ord_compose(l, m, K) != ident or _ord_compose(m, l, K) != ident:
        raise AssertionError("inversion round trip failed; series is not a delta series")
    return PowerSeries.from_ordinary(m)


# -- polynomials in t (tuples of Fraction, index = power) ----------------------


def _poly(p: Sequence) -> tuple[Fraction, ...]:
    out = tuple(_fraction(c) for c in p)
    while len(out) > 1 and out[-1] == 0:
        out = out[:-1]
    return out if out else (_F0,)


def poly_eval(p: Sequence, x):
    acc = 0 * x if not isinstance(x, Fraction) else _F0
    for c in reversed([_fraction(c) for c in p]):
        acc = acc * x + c
    return acc


def poly_derivative(p: Sequence) -> tuple[Fraction, ...]:
    q = [_fraction(c) * k for k, c in enumerate(p)][1:]
    return _poly(q) if q else (_F0,)


def poly_shift(p: Sequence, a) -> tuple[Fraction, ...]:
    """Coefficients of p(t + a), exact for rational a."""
    a = _fraction(a)
    out = [_F0] * len(p)
    for k, c in enumerate(_fraction(c) for c in p):
        if not c:
            continue
        # c (t + a)^k expanded binomially
        for j in range(k + 1):
            out[j] += c * math.comb(k, j) * a ** (k - j)
    return _poly(out)


def difference_quotient(p: Sequence, tau) -> tuple[Fraction, ...]:
    """[p(t + tau/2) - p(t - tau/2)] / tau, exactly."""
    tau = _fraction(tau)
    plus = poly_shift(p, tau / 2)
    minus = poly_shift(p, -tau / 2)
    n = max(len(plus), len(minus))
    plus += (_F0,) * (n - len(plus))
    minus += (_F0,) * (n - len(minus))
    return _poly([(a - b) / tau for a, b in zip(plus, minus)])


# -- delta operators -----------------------------------------------------------


@dataclass(frozen=True)
class DeltaOperator:
    """A delta series together with its compositional inverse.

    kind is one of "continuous" (plain derivative), "central_difference"
    (symmetric quotient of step tau), or "custom".  The built-in kinds carry
    closed-form inverse symbols; custom operators fall back to truncated
    series evaluation with a round-trip convergence guard.
    """

    series: PowerSeries
    inverse: PowerSeries
    kind: str
    tau: float | None = None

    @classmethod
    def derivative(cls, order: int = DEFAULT_ORDER) -> "DeltaOperator":
        s = PowerSeries.identity(order)
        return cls(series=s, inverse=s, kind="continuous")

    @classmethod
    def central_difference(cls, tau: float, order: int = DEFAULT_ORDER) -> "DeltaOperator":
        """L(s) = (2/tau) sinh(tau s / 2)."""
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau}")
        ft = _fraction(tau)
        coeffs = [_F0] * order
        for k in range(1, order, 2):
            # exponential coefficient of (2/tau) * (tau/2)^k s^k / k!
            coeffs[k] = (ft / 2) ** (k - 1)
        series = PowerSeries(tuple(coeffs))
        return cls(series=series, inverse=compositional_inverse(series), kind="central_difference", tau=float(tau))

    @classmethod
    def from_series(cls, series: PowerSeries) -> "DeltaOperator":
        return cls(series=series, inverse=compositional_inverse(series), kind="custom")

    def __post_init__(self) -> None:
        cs = self.series.coeffs
        if cs[0] != 0 or len(cs) < 2 or cs[1] == 0:
            raise ValueError("delta operator requires b_0 = 0 and b_1 != 0")

    @property
    def order(self) -> int:
        return self.series.order

    def apply(self, p: Sequence) -> tuple[Fraction, ...]:
        """Apply L(d/dt) to a polynomial in t; exact, truncation-free.

        The series terminates on polynomials (each derivative drops the
        degree), so the truncation order only needs to exceed deg p.
        """
        p = _poly(p)
        out = [_F0] * len(p)
        cur = p
        for k in range(1, self.order):
            cur = poly_derivative(cur)
            bk = self.series.coeffs[k]
            if bk:
                w = Fraction(bk, math.factorial(k))
                for j, c in enumerate(cur):
                    out[j] += w * c
            if cur == (_F0,):
                break
        return _poly(out)

    def inverse_symbol(self, w: complex) -> complex:
        """L^{-1} evaluated at a point, principal branches for built-ins."""
        if self.kind == "continuous":
            return complex(w)
        if self.kind == "central_difference":
            return 2.0 / self.tau * cmath.asinh(self.tau * w / 2.0)
        val = complex(self.inverse.evaluate(complex(w)))
        back = complex(self.series.evaluate(val))
        if abs(back - w) > 1e-9 * max(1.0, abs(w)):
            raise ValueError(
                f"series evaluation of the inverse symbol at {w} is outside the convergence guard"
            )
        return val


def basic_sequence(op: DeltaOperator, count: int | None = None) -> list[tuple[Fraction, ...]]:
    """Polynomials m_0..m_{count-1} with m_k(t) = k! [s^k] exp(t M(s)).

    m_0 = 1, m_k(0) = 0, and L_t m_k = k m_{k-1}, all exact in rational
    arithmetic (so the normalized m_k/k! are lowered with unit coefficient).
    """
    K = op.order if count is None else int(count)
    if K > op.order:
        raise ValueError(f"requested {K} polynomials but series order is {op.order}")
    Mo = list(op.inverse.ordinary())[:K] + [_F0] * max(0, K - op.inverse.order)
    # accumulate exp(t M(s)) = sum_j t^j M(s)^j / j!  by powers of M
    polys = [[_F0] * K for _ in range(K)]  # polys[k][j] = coeff of t^j in m_k / k!
    power = [_F1] + [_F0] * (K - 1)  # M^0
    for k in range(K):
        polys[k][0] = power[k]
    for j in range(1, K):
        power = _ord_mul(power, Mo, K)
        w = Fraction(1, math.factorial(j))
        for k in range(j, K):
            polys[k][j] = w * power[k]
    out = []
    for k in range(K):
        fact = math.factorial(k)
        out.append(_poly([fact * c for c in polys[k]]))
    return out


# -- generating-function evaluation -------------------------------------------


def _split_square_root(s: Multivector) -> tuple[complex, Multivector]:
    """Factor s = c * omega with omega**2 = +1, c the principal root of s**2."""
    sq = s * s
    scalar = complex(sq.coeffs[0])
    rest = sq - Multivector.scalar(s.sig, scalar)
    scale = max(1.0, abs(scalar))
    if rest.norm() > 1e-10 * scale:
        raise ValueError("argument does not square to a scalar; cannot factor omega with omega**2 = 1")
    if s.norm() <= 1e-14:
        return 0.0, Multivector.scalar(s.sig, 1.0)
    c = cmath.sqrt(scalar)
    if abs(c) <= 1e-14 * s.norm():
        raise ValueError("argument squares to zero (nilpotent); omega**2 = +1 is unattainable")
    omega = s * (1.0 / c)
    check = omega * omega - Multivector.scalar(s.sig, 1.0)
    if check.norm() > 1e-10:
        raise ValueError(f"omega**2 deviates from +1 by {check.norm():.3e}")
    return c, omega


def egf_eval(op: DeltaOperator, s: Multivector, t: float) -> Multivector:
    """Closed-form generating function sum_k m_k(t) s^k / k!.

    The argument is factored as c*omega with omega**2 = +1; the value is
    cosh(t M(c)) + omega sinh(t M(c)).  s = 0 gives the scalar 1.
    """
    c, omega = _split_square_root(s)
    if c == 0.0:
        return Multivector.scalar(s.sig, 1.0)
    u = op.inverse_symbol(c)
    ch = cmath.cosh(t * u)
    sh = cmath.sinh(t * u)
    return Multivector.scalar(s.sig, ch) + sh * omega


def egf_series_eval(op: DeltaOperator, s: Multivector, t: float, count: int | None = None) -> Multivector:
    """Truncated-series reference for egf_eval: explicit sum of m_k(t) s^k / k!."""
    polys = basic_sequence(op, count)
    acc = Multivector.scalar(s.sig, 0.0)
    power = Multivector.scalar(s.sig, 1.0)
    for k, p in enumerate(polys):
        if k:
            power = power * s
        acc = acc + complex(poly_eval(p, float(t))) / math.factorial(k) * power
    return acc


# -- wave multipliers ----------------------------------------------------------


def _central_s_series(t: float, k: float, u: np.ndarray) -> np.ndarray:
    # sin(k asin u)/lambda expanded around u = 0 (valid while k*u is small)
    u2 = u * u
    return t * (1.0 + u2 * (1.0 - k * k) / 6.0 + u2 * u2 * (3.0 / 40.0 - k * k / 12.0 + k**4 / 120.0))


def wave_multipliers(op: DeltaOperator, lam: float, t: float, allow_unstable: bool = False):
    """Scalar propagator pair (c, s) = (cosh(t M(i lam)), sinh(t M(i lam))/(i lam)).

    Real for the built-in kinds under the central-difference stability bound
    tau*lam/2 <= 1; beyond the bound a CflViolationError is raised unless
    allow_unstable is set, in which case the analytic continuation through
    complex asin is returned (growing, complex off integer steps).
    """
    c, s = wave_multiplier_arrays(op, np.asarray([float(lam)]), t, allow_unstable=allow_unstable)
    cv, sv = c[0], s[0]
    if not np.iscomplexobj(c):
        return float(cv), float(sv)
    return complex(cv), complex(sv)


def wave_multiplier_arrays(op: DeltaOperator, lam: np.ndarray, t: float, allow_unstable: bool = False):
    """Vectorized wave_multipliers over an array of nonnegative frequencies."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("frequencies must be nonnegative")
    t = float(t)
    if op.kind == "continuous":
        c = np.cos(t * lam)
        safe = np.where(lam == 0.0, 1.0, lam)
        s = np.where(lam == 0.0, t, np.sin(t * lam) / safe)
        return c, s
    if op.kind == "central_difference":
        tau = op.tau
        u = tau * lam / 2.0
        k = 2.0 * t / tau
        if np.any(u > 1.0):
            if not allow_unstable:
                raise CflViolationError(float(lam.max()), 2.0 / tau)
            theta = np.arcsin(u.astype(complex))
            safe = np.where(lam == 0.0, 1.0, lam).astype(complex)
            c = np.cos(k * theta)
            s = np.where(lam == 0.0, complex(t), np.sin(k * theta) / safe)
            return c, s
        theta = np.arcsin(u)
        c = np.cos(k * theta)
        safe = np.where(lam == 0.0, 1.0, lam)
        direct = np.sin(k * theta) / safe
        series = _central_s_series(t, k, u)
        small = (u < 1e-4) & (np.abs(k) * u < 1e-2)
        s = np.where(lam == 0.0, t, np.where(small, series, direct))
        return c, s
    # custom kind: pointwise through the guarded series symbol
    c = np.empty(lam.shape, dtype=complex)
    s = np.empty(lam.shape, dtype=complex)
    mu1 = complex(op.inverse.coeffs[1]) if op.inverse.order > 1 else 0.0
    for idx in np.ndindex(*lam.shape):
        lv = lam[idx]
        if lv == 0.0:
            c[idx] = 1.0
            s[idx] = t * mu1
            continue
        u = op.inverse_symbol(1j * lv)
        c[idx] = cmath.cosh(t * u)
        s[idx] = cmath.sinh(t * u) / (1j * lv)
    return c, s

"""Exact recurrence lab for the rational-function family Q_n(z).

    Q_0(z) = -1/(2z),
    Q_n(z) = (1/2) sum_{j=0}^{n-1} (1/j!) * Q_{n-j-1}^{(j)}(-1) * (z^j - z^-(j+2)),

all over exact rationals, so the derived number sequence Q_n'(-1) and the
entire-function partial sums Lambda_N(t) = sum Q_n'(-1)/n! t^n carry no
floating-point noise.  The closing second-moment comparison is a report:
the underlying identity is conjectural, so nothing here asserts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf

from .balls import PrecReal
from .errors import DomainError, ResourceLimitError

__all__ = [
    "LaurentPoly",
    "q_sequence",
    "q_prime_at_minus_one",
    "lambda_partial",
    "conjecture_m2_report",
    "Q_SEQUENCE_MAX_N",
]

Q_SEQUENCE_MAX_N = 60


@dataclass(frozen=True)
class LaurentPoly:
    """Exact-rational polynomial in z and 1/z, sparse by exponent."""

    coeffs: tuple[tuple[int, Fraction], ...]  # sorted, no zero coefficients

    @classmethod
    def from_dict(cls, d: dict[int, Fraction]) -> "LaurentPoly":
        return cls(tuple(sorted((e, c) for e, c in d.items() if c != 0)))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.coeffs)

    def scaled(self, factor: Fraction) -> "LaurentPoly":
        return LaurentPoly.from_dict({e: c * factor for e, c in self.coeffs})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        d = self.as_dict()
        for e, c in other.coeffs:
            d[e] = d.get(e, Fraction(0)) + c
        return LaurentPoly.from_dict(d)

    def deriv_at(self, point: Fraction, j: int) -> Fraction:
        """Exact j-th derivative at a rational point (falling factorials)."""
        total = Fraction(0)
        for e, c in self.coeffs:
            ff = 1
            for i in range(j):
                ff *= e - i
            if ff:
                total += c * ff * point ** (e - j)
        return total

    def eval_at(self, point: Fraction) -> Fraction:
        return self.deriv_at(point, 0)


def _check_cap(N: int):
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if N > Q_SEQUENCE_MAX_N:
        raise ResourceLimitError(f"exact recurrence capped at N = {Q_SEQUENCE_MAX_N}, got {N}")


def q_sequence(N: int) -> list[LaurentPoly]:
    """Q_0 .. Q_N as exact Laurent polynomials."""
    _check_cap(N)
    minus_one = Fraction(-1)
    polys = [LaurentPoly.from_dict({-1: Fraction(-1, 2)})]
    # derivs[m][j] = Q_m^(j)(-1), grown lazily
    derivs: list[dict[int, Fraction]] = [{}]

    def deriv(m: int, j: int) -> Fraction:
        cache = derivs[m]
        if j not in cache:
            cache[j] = polys[m].deriv_at(minus_one, j)
        return cache[j]

    for n in range(1, N + 1):
        acc: dict[int, Fraction] = {}
        for j in range(n):
            coef = Fraction(deriv(n - j - 1, j), 2 * math.factorial(j))
            if coef == 0:
                continue
            acc[j] = acc.get(j, Fraction(0)) + coef
            acc[-(j + 2)] = acc.get(-(j + 2), Fraction(0)) - coef
        polys.append(LaurentPoly.from_dict(acc))
        derivs.append({})
    return polys


def q_prime_at_minus_one(N: int) -> list[Fraction]:
    """The sequence Q_n'(-1), n = 0..N, exactly."""
    return [p.deriv_at(Fraction(-1), 1) for p in q_sequence(N)]


def lambda_partial(t, N: int) -> tuple[PrecReal, mpf]:
    """Partial sum of the entire-series candidate at t, plus the magnitude
    of its last term as a heuristic remainder (no rigorous tail exists:
    entirety is conjectural)."""
    _check_cap(N)
    coeffs = q_prime_at_minus_one(N)
    with mp.workprec(96):
        tb = t if isinstance(t, PrecReal) else PrecReal.exact(t)
        total = PrecReal.zero()
        power = PrecReal.exact(1)
        last = mpf(0)
        for n, qp in enumerate(coeffs):
            term = power * Fraction(qp, math.factorial(n))
            total = total + term
            last = abs(term.value)
            if n < N:
                power = power * tb
        return total, last


def conjecture_m2_report(T: float = 6.0, N: int = 60, cfg=None, m2_eps: float = 1e-8) -> dict:
    """Numerical side-by-side of the second moment and the candidate integral
    int_0^T Lambda_N(t) e^-t dt.  Emits both values and their difference;
    deliberately asserts nothing (the identity is a conjecture, and the
    truncation remainders are heuristic flags, not bounds).

    The defaults balance the two truncations under the exact-recurrence cap:
    past N = 60 terms the polynomial tail at T = 6 sits near 3e-5, while the
    unintegrated domain mass beyond T = 6 is a few 1e-3 and shows up in the
    reported difference together with the integrand-at-T indicator.
    """
    from .moments import moment
    from .quadrature import QuadConfig, _integral_convergent

    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    _check_cap(N)
    cfg = cfg or QuadConfig(X=T, nodes_per_axis=64)
    coeffs = q_prime_at_minus_one(N)
    weights = [float(Fraction(q, math.factorial(n))) for n, q in enumerate(coeffs)]

    def integrand(x):
        # Horner for Lambda_N(t), times e^-t
        acc = 0.0
        for wgt in reversed(weights):
            acc = acc * x + wgt
        return acc * math.exp(-x)

    integral, gap = _integral_convergent(integrand, cfg)
    with mp.workprec(96):
        m2 = moment(2, m2_eps)
        integral_ball = PrecReal(mpf(integral), mpf(gap) + mpf(abs(integral)) * mpf(1e-12))
        diff = integral_ball - m2.value
        lam_T, last_term_at_T = lambda_partial(mpf(T), N)
        integrand_at_T = lam_T.value * mp.exp(-mpf(T))
    return {
        "m2_series": {
            "value": mp.nstr(m2.value.value, 15),
            "radius": mp.nstr(m2.value.radius, 3),
        },
        "lambda_integral": {
            "value": mp.nstr(integral_ball.value, 15),
            "radius": mp.nstr(integral_ball.radius, 3),
        },
        "difference": mp.nstr(diff.value, 6),
        "heuristic": {
            "lambda_last_term_at_T": mp.nstr(last_term_at_T, 6),
            "integrand_at_T": mp.nstr(integrand_at_T, 6),
            "note": "truncation remainders are indicators only; the compared identity is conjectural",
        },
        "params": {"T": T, "N": N, "nodes": cfg.nodes_per_axis, "rule": cfg.rule, "m2_eps": m2_eps},
    }

"""Moment engine: truncated transfer-matrix series and digit-sum oracles.

The series route evaluates

    V_0 = c_L,
    V_l = u . M^(l-1) . w            (l >= 1),

with M[q,q'] = c_(q+q') * C(q+q'-1, q'), u[q] = c_(L+q) * C(L+q-1, q),
w[q] = c_q, truncated to 1 <= q, q' <= Q.  Every quantity is positive, so
the Q-truncated value increases monotonically to the full sum and a plain
forward rounding analysis gives a rigorous relative error bound for the
float64 matrix chain: any summation order of n positive floats is off by
at most gamma_n = n*u/(1 - n*u) relatively (u = 2^-53), and the per-entry
conversion error from the mpf enclosures composes multiplicatively.  The
remaining Q-truncation is estimated by doubling Q and flagged heuristic.

m_L is the sum of the V_l; the tail past lmax is below 2^-lmax because
V_l < 2^-l (a strict bound inherited from the step-weight integrals; the
test suite also verifies it empirically across L and l).

The independent oracle is the truncated digit sum

    A_l(B) = sum over b in [2,B]^l of 2^(l - sum b) * [[b1..bl]]^L,

whose tail is at most 2*l*2^-B: a tuple escaping the cap has some b_j > B,
[[.]]^L <= 1, and sum over b_j > B of 2^(1-b_j) = 2^(1-B) while each other
coordinate sums to 1; there are l choices of j.  V_l = A_(l+1) - A_l is an
identity the acceptance suite checks, never an ingredient of the series.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .balls import PrecReal, as_eps, working_bits
from .errors import DomainError, PrecisionUnreachableError, ResourceLimitError
from .special import c_coeff, c_coeff_cached

__all__ = [
    "MomentEstimate",
    "TransferMatrix",
    "build_transfer_matrix",
    "v_term",
    "v_term_partial",
    "a_partial_direct",
    "moment",
    "symmetry_residual",
    "h_integral_identity_check",
]

_U64 = 2.0**-53
_CHAIN_BITS = 96  # relative accuracy of the cached c_s enclosures feeding float64
_Q_CAP = 1600
_TUPLE_CAP = 25_000_000
# covers subnormal flushing of far-tail vector entries (c_s underflows float64
# for s > 1074; such entries contribute < 1e-130 through any chain used here)
_ABS_SLACK = 1e-120


def _gamma(n: int) -> float:
    g = n * _U64
    return g / (1.0 - g)


def _compose_rel(*rels: float) -> float:
    out = 1.0
    for r in rels:
        out *= 1.0 + r
    return (out - 1.0) * (1.0 + 1e-12) + 1e-30


def _radius_from_rel(value: float, rel: float) -> float:
    # |computed - exact| <= rel * exact and exact <= computed / (1 - rel)
    return value * rel / (1.0 - rel) * (1.0 + 1e-12) + _ABS_SLACK


def _c_float(s: int) -> tuple[float, float]:
    """(float64 midpoint, relative enclosure bound) of c_s."""
    ball = c_coeff_cached(s, _CHAIN_BITS)
    v = float(ball.value)
    rel = float(ball.radius / ball.value) + _U64
    return v, rel


class _ChunkedSum:
    """Exactly-rounded positive summation in bounded memory.

    Buffers feed math.fsum in fixed 1 << 16 blocks, block results are
    fsum-ed once more; relative error stays within a few ulps for positive
    terms regardless of the term count.
    """

    _BLOCK = 1 << 16

    def __init__(self):
        self._buf: list[float] = []
        self._partials: list[float] = []

    def add(self, x: float):
        self._buf.append(x)
        if len(self._buf) >= self._BLOCK:
            self._partials.append(math.fsum(self._buf))
            self._buf.clear()

    def total(self) -> float:
        return math.fsum(self._partials + [math.fsum(self._buf)])


@dataclass
class TransferMatrix:
    """Q x Q truncation of the positive transfer operator.

    `mid` holds float64 midpoints for the fast chain; `rel` bounds every
    entry's relative enclosure error.  `entry` rebuilds a single entry as a
    full ball at the matrix's eps for contract-level use.
    """

    Q: int
    eps: float
    mid: np.ndarray
    rel: float

    def entry(self, q: int, qp: int) -> PrecReal:
        if not (1 <= q <= self.Q and 1 <= qp <= self.Q):
            raise DomainError(f"indices must lie in [1, {self.Q}]")
        binom = math.comb(q + qp - 1, qp)
        with mp.workprec(working_bits(self.eps) + binom.bit_length()):
            c = c_coeff(q + qp, mpf(self.eps) / (2 * binom))
            return c * PrecReal.exact(binom)


def _matrix_mid(Q: int, threads: int = 1) -> tuple[np.ndarray, float]:
    rel = 0.0
    out = np.empty((Q, Q), dtype=np.float64)

    cs_mp: dict[int, mpf] = {}
    for s in range(2, 2 * Q + 1):
        ball = c_coeff_cached(s, _CHAIN_BITS)
        cs_mp[s] = ball.value
        rel = max(rel, float(ball.radius / ball.value) + _U64)

    def fill_row(q):
        # C(q + qp - 1, qp) advances by *(q + qp - 1) // qp along the row;
        # c_s or the binomial can escape float64 range even though the
        # product never does, so big cases multiply in mpf first
        binom = 1
        row = out[q - 1]
        for qp in range(1, Q + 1):
            binom = binom * (q + qp - 1) // qp
            s = q + qp
            if s > 900 or binom.bit_length() > 900:
                row[qp - 1] = float(cs_mp[s] * binom)
            else:
                row[qp - 1] = float(cs_mp[s]) * float(binom)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_row, range(1, Q + 1)))
    else:
        for q in range(1, Q + 1):
            fill_row(q)
    # one float multiply per entry on top of the c_s enclosure error
    return out, _compose_rel(rel, _U64, _U64)


def build_transfer_matrix(Q: int, eps=1e-9, threads: int = 1) -> TransferMatrix:
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    e = float(as_eps(eps))
    mid, rel = _matrix_mid(Q, threads=threads)
    return TransferMatrix(Q=Q, eps=e, mid=mid, rel=rel)


class _Chain:
    """Cached vectors M^j w for one truncation size Q."""

    def __init__(self, Q: int):
        self.Q = Q
        self.mid, self.rel_m = _matrix_mid(Q)
        w = np.empty(Q, dtype=np.float64)
        rel_w = 0.0
        for q in range(1, Q + 1):
            w[q - 1], r = _c_float(q)
            rel_w = max(rel_w, r)
        self.vecs = [w]
        self.rels = [rel_w]

    def vec(self, j: int) -> tuple[np.ndarray, float]:
        while len(self.vecs) <= j:
            nxt = self.mid @ self.vecs[-1]
            rel = _compose_rel(self.rel_m, self.rels[-1], _gamma(self.Q + 1))
            self.vecs.append(nxt)
            self.rels.append(rel)
        return self.vecs[j], self.rels[j]


_chains: dict[int, _Chain] = {}
_u_vecs: dict[tuple[int, int], tuple[np.ndarray, float]] = {}


def _chain(Q: int) -> _Chain:
    ch = _chains.get(Q)
    if ch is None:
        ch = _Chain(Q)
        _chains[Q] = ch
    return ch


def _u_vec(L: int, Q: int) -> tuple[np.ndarray, float]:
    key = (L, Q)
    got = _u_vecs.get(key)
    if got is None:
        u = np.empty(Q, dtype=np.float64)
        rel = 0.0
        binom = 1
        for q in range(1, Q + 1):
            binom = binom * (L + q - 1) // q
            ball = c_coeff_cached(L + q, _CHAIN_BITS)
            rel = max(rel, float(ball.radius / ball.value) + _U64)
            if L + q > 900 or binom.bit_length() > 900:
                u[q - 1] = float(ball.value * binom)
            else:
                u[q - 1] = float(ball.value) * float(binom)
        got = (u, _compose_rel(rel, _U64, _U64))
        _u_vecs[key] = got
    return got


def v_term_partial(L: int, ell: int, Q: int) -> tuple[float, float]:
    """Q-truncated V_l as (float64 value, relative error bound).

    Monotone nondecreasing in Q exactly (up to the reported rounding bound)
    because every summand is positive.
    """
    if L < 1 or ell < 0 or Q < 1:
        raise DomainError(f"need L >= 1, ell >= 0, Q >= 1: ({L}, {ell}, {Q})")
    if Q > _Q_CAP:
        raise ResourceLimitError(f"Q = {Q} exceeds the cap {_Q_CAP}")
    if ell == 0:
        return _c_float(L)
    ch = _chain(Q)
    vec, rel_v = ch.vec(ell - 1)
    u, rel_u = _u_vec(L, Q)
    value = float(u @ vec)
    rel = _compose_rel(rel_u, rel_v, _gamma(Q + 1))
    return value, rel


def v_term(L: int, ell: int, Q: int = 200, eps=1e-9) -> PrecReal:
    """Enclosure of V_l with the Q-truncation gap estimated by doubling.

    The returned midpoint is the 2Q evaluation; the radius adds the
    (heuristic) |value(2Q) - value(Q)| doubling gap on top of the rigorous
    rounding bound.
    """
    as_eps(eps)  # validated; the chain accuracy floor is fixed at _CHAIN_BITS
    v1, _ = v_term_partial(L, ell, Q)
    v2, rel = v_term_partial(L, ell, 2 * Q)
    gap = abs(v2 - v1)
    return PrecReal(mpf(v2), mpf(_radius_from_rel(v2, rel)) + mpf(gap))


@dataclass
class MomentEstimate:
    L: int
    value: PrecReal
    method: str
    params: dict
    tail_bound: float

    def __post_init__(self):
        if self.tail_bound > float(self.value.radius) * (1 + 1e-9) + 1e-300:
            raise DomainError("tail_bound must be included in the value's radius")


def moment(L: int, eps=1e-8, lmax_min: int = 25, q_start: int = 100) -> MomentEstimate:
    """m_L by the series route: sum V_l for l <= lmax, Q chosen by doubling.

    lmax satisfies 2^-lmax <= eps/2 (never below `lmax_min`), so the l-tail
    bound sum_{l > lmax} V_l < 2^-lmax sits inside the radius.  Doubling
    stops once successive Q-levels agree to eps/4; exceeding the Q cap
    raises PrecisionUnreachableError, as does an eps below the float64
    chain floor.
    """
    if L < 1:
        raise DomainError(f"moment order must be >= 1, got {L}")
    e = float(as_eps(eps))
    if e < 1e-11:
        raise PrecisionUnreachableError(
            f"series chain floor is ~1e-11 absolute; eps = {e} is below it"
        )
    lmax = max(lmax_min, math.ceil(math.log2(2.0 / e)))

    def total_at(Q: int) -> tuple[float, float]:
        val = 0.0
        rad = 0.0
        for ell in range(lmax + 1):
            v, rel = v_term_partial(L, ell, Q)
            val += v
            rad += _radius_from_rel(v, rel)
        return val, rad

    Q = q_start
    prev, _ = total_at(Q)
    while True:
        if 2 * Q > _Q_CAP:
            raise PrecisionUnreachableError(
                f"Q doubling exceeded the cap {_Q_CAP} before stabilizing at eps = {e}"
            )
        cur, rad = total_at(2 * Q)
        gap = abs(cur - prev)
        if gap <= e / 4:
            break
        prev = cur
        Q *= 2
    tail = 2.0**-lmax
    radius = rad + gap + tail
    value = PrecReal(mpf(cur), mpf(radius))
    if not (0 < value.lo and value.hi < 1):
        raise PrecisionUnreachableError(f"moment estimate escaped (0, 1): {value}")
    return MomentEstimate(
        L=L,
        value=value,
        method="series",
        params={"Q": 2 * Q, "lmax": lmax, "eps": e, "q_truncation": "heuristic-doubling"},
        tail_bound=tail,
    )


def symmetry_residual(estimates) -> list[PrecReal]:
    """Residuals of the reflection relations, one per moment order.

    With m_0 = 1 implicit, residual_L = sum_k C(L,k) (-1)^k m_k - m_L; each
    ball must contain 0 when the estimates are sound (L = 1 gives 1 - 2 m_1,
    L = 3 gives 1 - 3 m_1 + 3 m_2 - 2 m_3).
    """
    balls = [est.value if isinstance(est, MomentEstimate) else est for est in estimates]
    with mp.workprec(96):
        one = PrecReal.exact(1)
        out = []
        for L in range(1, len(balls) + 1):
            acc = one  # k = 0 term
            for k in range(1, L + 1):
                term = balls[k - 1] * math.comb(L, k)
                acc = acc + (-term if k % 2 else term)
            out.append(acc - balls[L - 1])
    return out


# -- digit-sum oracle -----------------------------------------------------------


def _iter_depth_tuples(depth: int, B: int):
    """Yield (num_prev, num, den_prev, den, digit_sum) for every tuple
    (b1..b_depth) in [2, B]^depth, carrying exact continuant pairs so the
    value is num/den and decrementing the final digit maps to
    (num - num_prev)/(den - den_prev)."""
    stack = [(0, -1, 0, 0, 1, 0)]
    while stack:
        d, np_, n, dp_, den, sb = stack.pop()
        if d == depth:
            yield np_, n, dp_, den, sb
            continue
        for b in range(2, B + 1):
            stack.append((d + 1, n, b * n - np_, den, b * den - dp_, sb + b))


def _a_sums(Ls, ell: int, B: int) -> dict[int, float]:
    """One digit-sweep shared by all requested L values."""
    sums = {L: _ChunkedSum() for L in Ls}
    for _, n, _, den, sb in _iter_depth_tuples(ell, B):
        weight = 2.0 ** (ell - sb)
        x = n / den
        for L in Ls:
            sums[L].add(weight * x**L)
    return {L: acc.total() for L, acc in sums.items()}


def _check_a_args(ell: int, B: int, depth: int):
    if not 0 <= ell <= 4:
        raise ResourceLimitError(f"digit-sum truncation supports ell <= 4, got {ell}")
    if B < 3:
        raise DomainError(f"digit cap must be >= 3, got {B}")
    if (B - 1) ** depth > _TUPLE_CAP:
        raise ResourceLimitError(f"(B-1)^{depth} = {(B - 1) ** depth} exceeds the tuple cap")


def a_partial_direct(L: int, ell: int, B: int) -> PrecReal:
    """Truncated A_l: lower bound with tail <= 2*l*2^-B folded into the radius."""
    if L < 1:
        raise DomainError(f"moment order must be >= 1, got {L}")
    _check_a_args(ell, B, ell)
    if ell == 0:
        return PrecReal.zero()
    val = _a_sums((L,), ell, B)[L]
    tail = 2.0 * ell * 2.0**-B
    rounding = abs(val) * 1e-13
    return PrecReal(mpf(val), mpf(tail + rounding))


def h_integral_identity_check(L: int, ell: int, B: int) -> tuple[PrecReal, PrecReal]:
    """Both sides of the step-weight integral identity

        L * int_0^1 f_(l+1)(x) x^(L-1) dx
            = -A_(l+1)/2 + sum_{i=0}^{l-1} A_(l-i)/2^(i+2) + 2^-(l+1).

    The left side is summed independently over the piecewise-constant
    structure: f_(l+1) is constant on ([[b1..b_(l+1)]], [[b1..b_(l+1)-1]]),
    so each tuple contributes 2^(l+1-sum b) * (y^L - x^L) exactly.  The
    right side combines the truncated digit sums.  Balls must overlap.
    """
    if L < 1:
        raise DomainError(f"moment order must be >= 1, got {L}")
    if not 0 <= ell <= 3:
        raise ResourceLimitError(f"identity check supports ell <= 3, got {ell}")
    _check_a_args(ell, B, ell + 1)

    parts = _ChunkedSum()
    for np_, n, dp_, den, sb in _iter_depth_tuples(ell + 1, B):
        x = n / den
        y = (n - np_) / (den - dp_)
        parts.add(2.0 ** (ell + 1 - sb) * (y**L - x**L))
    left_val = parts.total()
    left_tail = 2.0 * (ell + 1) * 2.0**-B
    left = PrecReal(mpf(left_val), mpf(left_tail + abs(left_val) * 1e-13))

    with mp.workprec(96):
        right = PrecReal.exact(Fraction(1, 1 << (ell + 1)))
        right = right - a_partial_direct(L, ell + 1, B) / 2
        for i in range(ell):
            right = right + a_partial_direct(L, ell - i, B) / (1 << (i + 2))
    return left, right

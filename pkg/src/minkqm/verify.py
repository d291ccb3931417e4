"""Named invariant checks behind the CLI's `verify all`.

Each check exercises one of the library's documented invariants at a
desk-friendly size; the acceptance test suite re-runs the contractual
criteria at their full stated sizes.  Checks return (name, passed, detail)
records and never raise on a mere numerical failure.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from mpmath import mp, mpf

from . import contfrac, minkowski, moments, quadrature, special
from .balls import PrecReal
from .conjecture import q_prime_at_minus_one, q_sequence
from .farey import farey_generation, farey_moment

__all__ = ["Check", "run_all"]

# Reference data: the published opening of the sequence Q_n'(-1).
QPRIME_REFERENCE = [
    Fraction(1, 2),
    Fraction(-1, 2),
    Fraction(1),
    Fraction(-5, 2),
    Fraction(25, 4),
    Fraction(-16),
    Fraction(43),
    Fraction(-971, 8),
    Fraction(1417, 4),
]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _random_fraction(rng: random.Random, qmax: int) -> Fraction:
    q = rng.randint(2, qmax)
    p = rng.randint(1, q - 1)
    return Fraction(p, q)


# -- precision-core -------------------------------------------------------------


def check_c_bounds() -> Check:
    prev = None
    for s in range(1, 41):
        c = special.c_coeff(s, 1e-20)
        if not (0 < c.lo and c.hi < mpf(2) ** (-s)):
            return Check("c-coeff-bounds", False, f"c_{s} escaped (0, 2^-{s})")
        if prev is not None and not c.hi < prev.lo:
            return Check("c-coeff-bounds", False, f"c_{s} not below c_{s - 1}")
        prev = c
    return Check("c-coeff-bounds", True, "0 < c_s < 2^-s and decreasing, s <= 40")


def check_ball_soundness(samples: int = 120) -> Check:
    rng = random.Random(20260810)
    for _ in range(samples):
        a = _random_fraction(rng, 500)
        b = _random_fraction(rng, 500)
        c = _random_fraction(rng, 500)
        exact = (a * b + c) / (a + b) - c * c
        balls = []
        for bits in (64, 128):
            with mp.workprec(bits):
                ba, bb, bc = (PrecReal.exact(t) for t in (a, b, c))
                balls.append((ba * bb + bc) / (ba + bb) - bc * bc)
        if not balls[0].agrees(balls[1]):
            return Check("ball-soundness", False, f"no overlap at two precisions for {a},{b},{c}")
        if not all(r.contains(exact) for r in balls):
            return Check("ball-soundness", False, f"exact value escaped enclosure for {a},{b},{c}")
    return Check("ball-soundness", True, f"{samples} random expressions enclosed at 64 and 128 bits")


def check_bessel_two_budgets() -> Check:
    rng = random.Random(1)
    for _ in range(40):
        x = Fraction(rng.randint(1, 400), rng.randint(1, 50))
        coarse = special.bessel_i1_scaled(x, 1e-10)
        # independent summation at twice the precision budget
        with mp.workprec(200):
            xs = mpf(x.numerator) / x.denominator
            total = mpf(0)
            term = xs
            q = 1
            while term > mpf(10) ** -40:
                total += term
                term = term * xs / (q * (q + 1))
                q += 1
        if not coarse.contains(total):
            return Check("bessel-series-consistency", False, f"S({x}) enclosure missed oracle")
    return Check("bessel-series-consistency", True, "ball output contains the high-precision sum")


# -- contfrac ---------------------------------------------------------------------


def check_roundtrips(samples: int = 400) -> Check:
    rng = random.Random(7)
    for _ in range(samples):
        x = _random_fraction(rng, 10_000)
        if contfrac.eval_regular(contfrac.regular_expand(x)) != x:
            return Check("cf-roundtrip", False, f"regular round trip failed at {x}")
        if contfrac.eval_semiregular(contfrac.semiregular_expand(x)) != x:
            return Check("cf-roundtrip", False, f"semi-regular round trip failed at {x}")
    return Check("cf-roundtrip", True, f"{samples} random rationals, q <= 1e4, both kinds")


def check_angle_equivalence() -> Check:
    for k in range(1, 6):
        for digits in product(range(2, 7), repeat=k):
            lhs = contfrac.eval_angle(contfrac.angle_from_semiregular(digits))
            if lhs != contfrac.eval_semiregular(digits):
                return Check("angle-equivalence", False, f"mismatch at {digits}")
    return Check("angle-equivalence", True, "exact over all digit tuples in [2,6]^k, k <= 5")


def check_ramharter(samples: int = 200) -> Check:
    # The empirical envelope is 2/K, not geometric: a mapped expansion can
    # carry runs of 2s (from large even-position digits or the padded twin
    # tail), and the nested intervals along a 2-run have k/(k+1) endpoints,
    # so the prefix error decays like 1/K there; K * err stays below 1 on
    # every family tried, and 2/K keeps a factor-two cushion.
    rng = random.Random(99)
    for _ in range(samples):
        x = _random_fraction(rng, 3000)
        digits = contfrac.regular_expand(x)
        for K in range(1, 40):
            try:
                prefix = contfrac.regular_to_semiregular(digits, K)
            except contfrac.NeedsMoreDigitsError:
                break
            err = abs(contfrac.eval_semiregular(prefix) - x)
            if err > Fraction(2, K):
                return Check("ramharter-convergence", False, f"|prefix - {x}| > 2/{K}")
    return Check("ramharter-convergence", True, f"2/K envelope held on {samples} rationals")


def check_all_two_runs() -> Check:
    for k in range(1, 65):
        if contfrac.eval_semiregular((2,) * k) != Fraction(k, k + 1):
            return Check("all-two-sequences", False, f"[[2_{k}]] != {k}/{k + 1}")
    return Check("all-two-sequences", True, "[[2_k]] = k/(k+1) exactly for k <= 64")


# -- minkowski --------------------------------------------------------------------


def check_prop1(sweep_q: int = 400, samples: int = 2000) -> Check:
    for q in range(2, sweep_q + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                x = Fraction(p, q)
                if minkowski.question_mark(x) != minkowski.question_mark_semiregular(x):
                    return Check("prop1-equivalence", False, f"route mismatch at {x}")
    rng = random.Random(12)
    for _ in range(samples):
        x = _random_fraction(rng, 10_000)
        if minkowski.question_mark(x) != minkowski.question_mark_semiregular(x):
            return Check("prop1-equivalence", False, f"route mismatch at {x}")
    return Check(
        "prop1-equivalence", True, f"all q <= {sweep_q} plus {samples} random to q <= 1e4"
    )


def check_functional_equations(samples: int = 2000) -> Check:
    rng = random.Random(13)
    one = minkowski.DyadicRational(1, 0)
    for _ in range(samples):
        x = _random_fraction(rng, 100_000)
        qx = minkowski.question_mark(x)
        if qx + minkowski.question_mark(1 - x) != one:
            return Check("functional-equations", False, f"symmetry failed at {x}")
        if minkowski.question_mark(x / (x + 1)) != qx.halved():
            return Check("functional-equations", False, f"contraction failed at {x}")
    return Check("functional-equations", True, f"symmetry and contraction exact on {samples} samples")


def check_telescoping(samples: int = 2000) -> Check:
    rng = random.Random(14)
    for _ in range(samples):
        x = _random_fraction(rng, 100_000)
        hs = minkowski.h_values(x)
        if any(h.num < 0 for h in hs):
            return Check("h-telescoping", False, f"negative h value at {x}")
        total = sum((h.as_fraction() for h in hs), Fraction(0))
        if total != 1 - minkowski.question_mark(x).as_fraction():
            return Check("h-telescoping", False, f"sum h != 1 - ?(x) at {x}")
    return Check("h-telescoping", True, f"finite sums matched 1 - ?(x) on {samples} samples")


def check_monotonicity(samples: int = 400) -> Check:
    rng = random.Random(15)
    xs = sorted({_random_fraction(rng, 50_000) for _ in range(samples)})
    vals = [minkowski.question_mark(x).as_fraction() for x in xs]
    ok = all(a < b for a, b in zip(vals, vals[1:]))
    return Check("qm-monotone", ok, f"strictly increasing over {len(xs)} sorted rationals")


# -- moments ----------------------------------------------------------------------


def check_farey_generation(nmax: int = 12) -> Check:
    for n in range(2, nmax + 1):
        gen = farey_generation(n)
        if len(gen) != 1 << (n - 2) or len(set(gen)) != len(gen):
            return Check("farey-generation", False, f"count/distinctness failed at n={n}")
        if any(not (0 < x < 1) for x in gen):
            return Check("farey-generation", False, f"value outside (0,1) at n={n}")
    return Check("farey-generation", True, f"2^(n-2) distinct fractions for n <= {nmax}")


def check_farey_first_moment(nmax: int = 12) -> Check:
    for n in range(2, nmax + 1):
        if farey_moment(1, n) != Fraction(1, 2):
            return Check("farey-first-moment", False, f"mean != 1/2 at n={n}")
    return Check("farey-first-moment", True, f"exactly 1/2 for every n <= {nmax}")


def check_vterm_bound() -> Check:
    for L in range(1, 6):
        for ell in range(21):
            v = moments.v_term(L, ell, Q=200)
            if not v.hi < mpf(2) ** (-ell):
                return Check("vterm-bound", False, f"V_{ell}(L={L}) not below 2^-{ell}")
            if not v.lo > 0:
                return Check("vterm-bound", False, f"V_{ell}(L={L}) not positive")
    return Check("vterm-bound", True, "0 < V_l < 2^-l for L <= 5, l <= 20")


def check_vterm_monotone_q() -> Check:
    for L in (1, 2):
        for ell in (1, 2, 3, 5):
            lo, rel_lo = moments.v_term_partial(L, ell, 100)
            hi, rel_hi = moments.v_term_partial(L, ell, 200)
            if hi < lo * (1 - rel_lo - rel_hi):
                return Check("vterm-monotone-Q", False, f"V_{ell}(L={L}) dropped from Q=100 to 200")
    return Check("vterm-monotone-Q", True, "doubling Q never lowered a term beyond rounding")


def check_suma_oracle(B: int = 30) -> Check:
    for L in (1, 2, 3):
        for ell in (0, 1, 2):
            v = moments.v_term(L, ell, Q=200)
            diff = moments.a_partial_direct(L, ell + 1, B) - moments.a_partial_direct(L, ell, B)
            if not v.agrees(diff):
                return Check("suma-oracle", False, f"V != delta A at L={L}, l={ell}")
    return Check("suma-oracle", True, "V_l matched A_(l+1) - A_l within combined radii")


def check_moment_range() -> Check:
    prev = None
    for L in range(1, 7):
        est = moments.moment(L, 1e-6)
        if not (0 < est.value.lo and est.value.hi < 1):
            return Check("moment-range", False, f"m_{L} escaped (0,1)")
        if prev is not None and not est.value.value < prev:
            return Check("moment-range", False, f"m_{L} not below m_{L - 1}")
        prev = est.value.value
    return Check("moment-range", True, "0 < m_6 < ... < m_1 < 1 at eps = 1e-6")


def check_symmetry_residuals() -> Check:
    ests = [moments.moment(L, 1e-6) for L in range(1, 6)]
    for L, res in enumerate(moments.symmetry_residual(ests), start=1):
        if not res.contains(0):
            return Check("symmetry-residuals", False, f"residual {L} excludes 0: {res}")
    return Check("symmetry-residuals", True, "reflection residuals contain 0 for L <= 5")


def check_transfer_entries() -> Check:
    tm = moments.build_transfer_matrix(10, 1e-12)
    if not ((tm.mid > 0).all() and (tm.mid < 1).all()):
        return Check("transfer-entries", False, "an entry escaped (0, 1)")
    c2 = special.c_coeff(2, 1e-15)
    c3 = special.c_coeff(3, 1e-15)
    if not tm.entry(1, 1).agrees(c2) or not tm.entry(1, 2).agrees(c3):
        return Check("transfer-entries", False, "corner entries disagree with c_2 / c_3")
    return Check("transfer-entries", True, "10x10 entries in (0,1); corners match c_2, c_3")


def check_h_integral_identity(B: int = 24) -> Check:
    for ell in range(3):
        left, right = moments.h_integral_identity_check(1, ell, B)
        if not left.agrees(right):
            return Check("h-integral-identity", False, f"sides disagree at l={ell}")
        if not left.hi < mpf(2) ** (-(ell + 1)):
            return Check("h-integral-identity", False, f"left side not below 2^-(l+1) at l={ell}")
    return Check("h-integral-identity", True, "sides overlap and obey the 2^-(l+1) bound, l <= 2")


# -- quadrature -------------------------------------------------------------------


def check_quadrature_ell0() -> Check:
    cfg = quadrature.QuadConfig(nodes_per_axis=64)
    for L in range(1, 7):
        got = quadrature.kernel_integral(L, 0, cfg)
        want = special.c_coeff(L, 1e-14) * math.factorial(L - 1)
        if not got.agrees(want, 1e-8):
            return Check("quadrature-ell0", False, f"integral != (L-1)! c_L at L={L}")
    return Check("quadrature-ell0", True, "1-D integrals matched (L-1)! c_L for L <= 6")


def check_quadrature_cross() -> Check:
    for L in (1, 2, 3):
        for ell, nodes, tol in ((0, 64, 1e-8), (1, 48, 1e-6), (2, 32, 1e-4)):
            got = quadrature.kernel_integral(L, ell, quadrature.QuadConfig(nodes_per_axis=nodes))
            want = moments.v_term(L, ell, Q=200) * math.factorial(L - 1)
            if not got.agrees(want, tol):
                return Check("quadrature-cross", False, f"mismatch at L={L}, l={ell}")
    return Check("quadrature-cross", True, "integrals matched (L-1)! V_l for L <= 3, l <= 2")


def check_quadrature_monotone_cfg() -> Check:
    base = quadrature.kernel_integral(1, 1, quadrature.QuadConfig(X=30.0, nodes_per_axis=48))
    for cfg in (
        quadrature.QuadConfig(X=40.0, nodes_per_axis=48),
        quadrature.QuadConfig(X=30.0, nodes_per_axis=96),
    ):
        other = quadrature.kernel_integral(1, 1, cfg)
        # the lower edge may move down only within the reported radii,
        # i.e. the enlarged-rule ball still overlaps the base ball
        if not other.agrees(base):
            return Check("quadrature-config-stability", False, f"ball escaped at {cfg}")
    return Check("quadrature-config-stability", True, "larger X / more nodes stayed within radii")


# -- conjecture -------------------------------------------------------------------


def check_qprime_reference() -> Check:
    got = q_prime_at_minus_one(8)
    ok = got == QPRIME_REFERENCE
    return Check("qprime-reference", ok, "first nine derivative values match the published list")


def check_dyadic_denominators() -> Check:
    for n, poly in enumerate(q_sequence(20)):
        for e, c in poly.coeffs:
            d = c.denominator
            if d & (d - 1):
                return Check("qn-dyadic-denominators", False, f"coeff z^{e} of Q_{n} has den {d}")
    return Check("qn-dyadic-denominators", True, "all Q_n coefficients dyadic for n <= 20")


def check_recurrence_deterministic() -> Check:
    full = q_sequence(12)
    for n in range(13):
        if q_sequence(n)[n].coeffs != full[n].coeffs:
            return Check("qn-recompute", False, f"fresh Q_{n} differs from incremental run")
    return Check("qn-recompute", True, "fresh and incremental coefficient maps identical")


ALL_CHECKS = [
    check_c_bounds,
    check_ball_soundness,
    check_bessel_two_budgets,
    check_roundtrips,
    check_angle_equivalence,
    check_ramharter,
    check_all_two_runs,
    check_prop1,
    check_functional_equations,
    check_telescoping,
    check_monotonicity,
    check_farey_generation,
    check_farey_first_moment,
    check_vterm_bound,
    check_vterm_monotone_q,
    check_suma_oracle,
    check_moment_range,
    check_symmetry_residuals,
    check_transfer_entries,
    check_h_integral_identity,
    check_quadrature_ell0,
    check_quadrature_cross,
    check_quadrature_monotone_cfg,
    check_qprime_reference,
    check_dyadic_denominators,
    check_recurrence_deterministic,
]


def run_all() -> list[Check]:
    out = []
    for fn in ALL_CHECKS:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failure, not an abort
            out.append(Check(fn.__name__.replace("check_", "", 1), False, f"raised {exc!r}"))
    return out

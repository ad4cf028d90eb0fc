"""Independent oracles used by the test suite.

Everything here is deliberately written from first principles, without
calling the code paths it is meant to check: the resultant oracle builds
its own Sylvester matrix and expands the determinant by cofactors, the
height oracle runs the defining limit d^-n h(f^n x) on raw integer pairs,
the local-height oracle iterates exact Fractions with no renormalization,
and the multiplier oracle finds fixed points numerically at 60 digits.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


# ---------------------------------------------------------------------------
# Determinants and resultants
# ---------------------------------------------------------------------------


def det_cofactor(m):
    """Recursive cofactor-expansion determinant (exact, any field)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_cofactor(minor)
    return total


def naive_resultant(p_desc, q_desc):
    """Resultant of two equal-degree binary forms from descending coefficients."""
    d = len(p_desc) - 1
    rows = []
    for i in range(d):
        rows.append([0] * i + list(p_desc) + [0] * (d - 1 - i))
    for i in range(d):
        rows.append([0] * i + list(q_desc) + [0] * (d - 1 - i))
    return det_cofactor(rows)


# ---------------------------------------------------------------------------
# Height oracles
# ---------------------------------------------------------------------------


def _apply_int(p_asc, q_asc, d, x0, x1):
    """One exact step on a coprime integer pair, reduced to coprime form."""
    w0 = sum(c * x0**i * x1 ** (d - i) for i, c in enumerate(p_asc))
    w1 = sum(c * x0**i * x1 ** (d - i) for i, c in enumerate(q_asc))
    g = math.gcd(abs(w0), abs(w1))
    return w0 // g, w1 // g


def hhat_limit(F, x, n: int) -> float:
    """Defining-limit canonical height oracle: d^-n h(f^n x).

    Accurate to within height_gap_constant(F) / d^n of the true value.
    """
    p_asc, q_asc, d = list(F.P.coeffs), list(F.Q.coeffs), F.d
    a, b = x.x0, x.x1
    for _ in range(n):
        a, b = _apply_int(p_asc, q_asc, d, a, b)
    return math.log(max(abs(a), abs(b))) / d**n


def local_height_padic_oracle(F, z, p: int, n: int) -> float:
    """d^-n log||F^n(z)||_p by raw exact iteration (no renormalization)."""
    d = F.d
    cur = (Fraction(z[0]), Fraction(z[1]))
    for _ in range(n):
        cur = (F.P.evaluate(*cur), F.Q.evaluate(*cur))
    norm_ord = min(_ord_frac(cur[0], p), _ord_frac(cur[1], p))
    return (-norm_ord * math.log(p)) / d**n


def local_height_arch_oracle(F, z, n: int) -> float:
    """d^-n log||F^n(z)||_inf by raw exact iteration, logged at 60 digits."""
    d = F.d
    cur = (Fraction(z[0]), Fraction(z[1]))
    for _ in range(n):
        cur = (F.P.evaluate(*cur), F.Q.evaluate(*cur))
    big = max(abs(cur[0]), abs(cur[1]))
    with mpmath.workdps(60):
        val = mpmath.log(mpmath.mpf(big.numerator)) - mpmath.log(mpmath.mpf(big.denominator))
        return float(val / d**n)


def _ord_int(n: int, p: int) -> int:
    """Valuation by repeated squaring of the divisor (fast on huge inputs)."""
    n = abs(n)
    v, q, e = 0, p, 1
    while True:
        quo, rem = divmod(n, q)
        if rem:
            break
        n, v = quo, v + e
        q, e = q * q, 2 * e
    while e > 1:
        e //= 2
        q = p**e
        quo, rem = divmod(n, q)
        if rem == 0:
            n, v = quo, v + e
    return v


def _ord_frac(x: Fraction, p: int):
    if x == 0:
        return float("inf")
    return _ord_int(x.numerator, p) - _ord_int(x.denominator, p)


# ---------------------------------------------------------------------------
# Numerical multiplier oracle (60-digit arithmetic)
# ---------------------------------------------------------------------------


def sigma_numeric(F):
    """(sigma1, sigma2, sigma3) of a quadratic map from numerical fixed points.

    Affine fixed points are the roots of p(z) - z q(z); the point at
    infinity is fixed iff that cubic degenerates, contributing multiplier
    g'(0) of g(w) = 1/f(1/w) with the remaining multiplicity.
    """
    if F.d != 2:
        raise ValueError("quadratic maps only")
    with mpmath.workdps(60):
        p_desc = [mpmath.mpf(c) for c in F.P.descending()]
        q_desc = [mpmath.mpf(c) for c in F.Q.descending()]
        # phi(z) = p(z) - z q(z), descending degree-3 coefficients
        phi = [mpmath.mpf(0)] * 4
        for i, c in enumerate(p_desc):  # p term: degree 2 shifted into slots 1..3
            phi[i + 1] += c
        for i, c in enumerate(q_desc):  # z*q term: degree 3
            phi[i] -= c
        while phi and phi[0] == 0:
            phi = phi[1:]
        inf_multiplicity = 4 - len(phi) if phi else 3
        lams = []
        if len(phi) > 1:
            roots = mpmath.polyroots(phi, maxsteps=200, extraprec=120)
            dp = _poly_deriv(p_desc)
            dq = _poly_deriv(q_desc)
            for r in roots:
                pv = _poly_eval(p_desc, r)
                qv = _poly_eval(q_desc, r)
                lams.append((_poly_eval(dp, r) * qv - pv * _poly_eval(dq, r)) / qv**2)
        # fixed point(s) at infinity: g(w) = q^(w)/p^(w) with reversed coefficients
        if inf_multiplicity > 0:
            p_rev = list(reversed(p_desc))
            q_rev = list(reversed(q_desc))
            dpr = _poly_deriv(p_rev)
            dqr = _poly_deriv(q_rev)
            w = mpmath.mpf(0)
            pv = _poly_eval(p_rev, w)
            qv = _poly_eval(q_rev, w)
            lam_inf = (_poly_eval(dqr, w) * pv - qv * _poly_eval(dpr, w)) / pv**2
            lams.extend([lam_inf] * inf_multiplicity)
        s1 = lams[0] + lams[1] + lams[2]
        s2 = lams[0] * lams[1] + lams[0] * lams[2] + lams[1] * lams[2]
        s3 = lams[0] * lams[1] * lams[2]
        return complex(s1), complex(s2), complex(s3)


def _poly_eval(desc, x):
    acc = mpmath.mpf(0)
    for c in desc:
        acc = acc * x + c
    return acc


def _poly_deriv(desc):
    n = len(desc) - 1
    return [c * (n - i) for i, c in enumerate(desc[:-1])] or [mpmath.mpf(0)]

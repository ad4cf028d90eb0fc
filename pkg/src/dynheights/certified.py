"""Certified real values: a float together with a proven absolute error radius.

Every limit-defined quantity in the package (local heights, canonical
heights, Green pairings) is returned as a ``CertifiedValue``.  The contract
is ``|value - true| <= err``.  Error radii combine sub-additively and are
always rounded outward, so chains of additions cannot silently shed error.

``exact=True`` means the mathematical truncation error is zero (the value
is a finitely-computed quantity such as 0, or a p-adic height at a
good-reduction prime); such values carry ``err == 0.0``.  Float conversion
of exactly-known nonzero logarithms is covered by a small rounding radius
instead, since ``math.log`` is only faithfully rounded.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

_EPS = sys.float_info.epsilon


def _up(x: float) -> float:
    """Round a nonnegative float one ulp outward."""
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class CertifiedValue:
    """Real number known to lie in [value - err, value + err]."""

    value: float
    err: float
    exact: bool = False

    def __post_init__(self):
        if self.err < 0 or math.isnan(self.err):
            raise ValueError(f"error radius must be >= 0, got {self.err}")
        if self.exact and self.err != 0.0:
            raise ValueError("exact values must carry err == 0")

    @classmethod
    def exact_zero(cls) -> "CertifiedValue":
        return cls(0.0, 0.0, exact=True)

    @classmethod
    def exact_float(cls, v: float) -> "CertifiedValue":
        """A value that is exactly the given float (no truncation, no rounding)."""
        return cls(float(v), 0.0, exact=True)

    def __add__(self, other: "CertifiedValue") -> "CertifiedValue":
        v = self.value + other.value
        # TwoSum: e is the exact rounding error of the float addition
        t = v - self.value
        e = (self.value - (v - t)) + (other.value - t)
        if self.exact and other.exact and e == 0.0:
            return CertifiedValue(v, 0.0, exact=True)
        return CertifiedValue(v, _up(_up(self.err + other.err) + abs(e)))

    def __sub__(self, other: "CertifiedValue") -> "CertifiedValue":
        return self + CertifiedValue(-other.value, other.err, other.exact)

    def __neg__(self) -> "CertifiedValue":
        return CertifiedValue(-self.value, self.err, self.exact)

    def scale(self, c: float) -> "CertifiedValue":
        """Multiply by a scalar whose float product is exact (int powers of two, signs)."""
        if self.exact:
            return CertifiedValue(self.value * c, 0.0, exact=True)
        return CertifiedValue(self.value * c, _up(self.err * abs(c)))

    def div_int(self, n: int) -> "CertifiedValue":
        """Divide by a nonzero integer, charging one rounding ulp to err."""
        v = self.value / n
        if self.exact and v * n == self.value:
            return CertifiedValue(v, 0.0, exact=True)
        return CertifiedValue(v, _up(self.err / abs(n) + 2.0 * _EPS * abs(v)))

    def widen(self, extra: float) -> "CertifiedValue":
        """Add slack to the error radius (drops the exact flag if extra > 0)."""
        if extra == 0.0:
            return self
        return CertifiedValue(self.value, _up(self.err + extra), exact=False)

    def to_json_dict(self) -> dict:
        return {"value": self.value, "err": self.err, "exact": self.exact}


def log_abs_certified(x) -> CertifiedValue:
    """log|x| for a nonzero int or Fraction, with a proven rounding radius.

    Computed as log(num) - log(den) on exact integers; math.log on a big int
    is faithful to ~1 ulp, so 4 ulps of each magnitude is a safe outward bound.
    """
    fr = Fraction(x)
    if fr == 0:
        raise ValueError("log|0| requested")
    num, den = abs(fr.numerator), fr.denominator
    if num == den:
        return CertifiedValue.exact_zero()
    ln = math.log(num) if num != 1 else 0.0
    ld = math.log(den) if den != 1 else 0.0
    value = ln - ld
    err = _up(4.0 * _EPS * (abs(ln) + abs(ld) + abs(value)) + 1e-320)
    return CertifiedValue(value, err)


def log_rational_multiple(q, p: int) -> CertifiedValue:
    """q * log(p) for exact rational q and integer p >= 2, with rounding radius."""
    q = Fraction(q)
    if q == 0:
        return CertifiedValue.exact_zero()
    lp = math.log(p)
    qf = float(q)
    value = qf * lp
    # |float(q) - q| <= eps*|q|, |log p| faithful to ~1 ulp, one multiply.
    err = _up(6.0 * _EPS * abs(value) + 1e-320)
    return CertifiedValue(value, err)

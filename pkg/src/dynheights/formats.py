"""Wire formats shared by the CLI and by file-based callers.

Map files are JSON objects like {"d": 2, "P": ["1","0","0"], "Q":
["0","0","1"]}: coefficient strings in base 10, listed from the x^d
coefficient down to the y^d coefficient.  Points are "[a:b]" with integer
entries; rational entries are accepted where an affine pair (not a
projective point) is expected.
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction

from .errors import InputError
from .maps_core import HomogeneousLift, ProjPoint

_POINT_RE = re.compile(r"^\[\s*(-?\d+)\s*:\s*(-?\d+)\s*\]$")
_PAIR_RE = re.compile(r"^\[\s*(-?\d+(?:/\d+)?)\s*:\s*(-?\d+(?:/\d+)?)\s*\]$")


def lift_from_json_dict(obj: dict, normalized: bool = True) -> HomogeneousLift:
    """Parse the map wire format; coefficients arrive from i = d down to 0."""
    try:
        d = int(obj["d"])
        p_desc = [int(str(c)) for c in obj["P"]]
        q_desc = [int(str(c)) for c in obj["Q"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed map object: {exc}") from exc
    if len(p_desc) != d + 1 or len(q_desc) != d + 1:
        raise InputError(f"expected {d + 1} coefficients for degree {d}")
    return HomogeneousLift.from_coeffs(p_desc[::-1], q_desc[::-1], normalized=normalized)


def lift_to_json_dict(F: HomogeneousLift) -> dict:
    return {
        "d": F.d,
        "P": [str(c) for c in F.P.descending()],
        "Q": [str(c) for c in F.Q.descending()],
    }


def load_map(path: str, normalized: bool = True) -> HomogeneousLift:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return lift_from_json_dict(obj, normalized=normalized)


def parse_point(text: str) -> ProjPoint:
    """Parse "[a:b]" with integer entries into a canonical projective point."""
    m = _POINT_RE.match(text.strip())
    if not m:
        raise InputError(f"cannot parse point {text!r}; expected [a:b] with integers")
    return ProjPoint(int(m.group(1)), int(m.group(2)))


def parse_pair(text: str) -> tuple:
    """Parse "[a:b]" with integer or rational entries into an affine pair."""
    m = _PAIR_RE.match(text.strip())
    if not m:
        raise InputError(f"cannot parse pair {text!r}; expected [a:b], rationals allowed")
    return (Fraction(m.group(1)), Fraction(m.group(2)))


def map_hash(F: HomogeneousLift) -> str:
    """Stable short hash of the coefficient vector (manifest and report key)."""
    payload = "|".join(str(c) for c in (F.d,) + F.coefficient_vector())
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def point_from_json_dict(obj: dict) -> ProjPoint:
    try:
        return ProjPoint(int(str(obj["x0"])), int(str(obj["x1"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed point object: {exc}") from exc

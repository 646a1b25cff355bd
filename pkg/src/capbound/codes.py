"""Explicit codes from root systems, with exact pair statistics.

Points are stored unnormalized with rational coordinates and a common
squared norm, so every inner product of unit vectors is an exact
rational: x.y / norm_sq. A code can carry a distinguished pole; cap
membership and the pair statistics (u, v, t) = (pole.x, pole.y, x.y),
all divided by the norm, then stay in exact arithmetic end to end.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

Point = Tuple[Fraction, ...]


def _dot(x: Point, y: Point) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


@dataclass(frozen=True)
class Code:
    points: Tuple[Point, ...]
    norm_sq: Fraction
    pole: Optional[Point] = None

    def __post_init__(self):
        pts = tuple(tuple(Fraction(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "norm_sq", Fraction(self.norm_sq))
        if not pts:
            raise ValueError("code has no points")
        dim = len(pts[0])
        for p in pts:
            if len(p) != dim:
                raise ValueError("points have mixed dimensions")
            if _dot(p, p) != self.norm_sq:
                raise ValueError(f"point {p} has squared norm {_dot(p, p)}, expected {self.norm_sq}")
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate points")
        if self.pole is not None:
            pole = tuple(Fraction(c) for c in self.pole)
            object.__setattr__(self, "pole", pole)
            if _dot(pole, pole) != self.norm_sq:
                raise ValueError("pole must have the same squared norm as the code")

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def cosine(self, x: Point, y: Point) -> Fraction:
        return _dot(x, y) / self.norm_sq


def e8_roots() -> Code:
    """The 240 roots of E8: 112 integer roots and 128 half-integer ones."""
    points = []
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            p = [Fraction(0)] * 8
            p[i], p[j] = Fraction(si), Fraction(sj)
            points.append(tuple(p))
    half = Fraction(1, 2)
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            points.append(tuple(half * s for s in signs))
    return Code(points=tuple(points), norm_sq=Fraction(2))


def dn_roots(n: int) -> Code:
    """The 2n(n-1) roots of D_n."""
    if n < 3:
        raise ValueError(f"D_n roots need n >= 3, got {n}")
    points = []
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            p = [Fraction(0)] * n
            p[i], p[j] = Fraction(si), Fraction(sj)
            points.append(tuple(p))
    return Code(points=tuple(points), norm_sq=Fraction(2))


def cap_subcode(code: Code, pole: Point, cos_phi) -> Code:
    """Points of the code in the closed cap {x : pole.x / norm >= cos phi}."""
    pole_t = tuple(Fraction(c) for c in pole)
    if _dot(pole_t, pole_t) != code.norm_sq:
        raise ValueError("pole must have the same squared norm as the code")
    threshold = Fraction(cos_phi) * code.norm_sq
    kept = tuple(p for p in code.points if _dot(pole_t, p) >= threshold)
    if not kept:
        raise ValueError("cap contains no points of the code")
    return Code(points=kept, norm_sq=code.norm_sq, pole=pole_t)


def distance_distribution(code: Code) -> Dict[Tuple[Fraction, Fraction, Fraction], Fraction]:
    """Weights y(u, v, t) = #{ordered pairs at that geometry} / card.

    Keys are (pole.x, pole.y, x.y) in unit-vector cosines with the first
    two sorted, taken over all ordered pairs including x = y; the weights
    sum to the cardinality, and the diagonal keys (u, u, 1) sum to 1.
    """
    if code.pole is None:
        raise ValueError("code has no pole; build it with cap_subcode")
    card = len(code.points)
    heights = [code.cosine(code.pole, p) for p in code.points]
    out: Dict[Tuple[Fraction, Fraction, Fraction], Fraction] = {}
    unit = Fraction(1, card)
    for a, x in enumerate(code.points):
        for b, y in enumerate(code.points):
            u, v = heights[a], heights[b]
            if u > v:
                u, v = v, u
            key = (u, v, code.cosine(x, y))
            out[key] = out.get(key, Fraction(0)) + unit
    return out


def max_cosine(code: Code) -> Fraction:
    """Largest inner product between distinct points (cosine of the min angle)."""
    best = Fraction(-1)
    pts = code.points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            c = code.cosine(pts[i], pts[j])
            if c > best:
                best = c
    return best


def min_angle(code: Code) -> float:
    return math.acos(float(max_cosine(code)))

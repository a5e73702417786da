"""Exact coefficient fields shared by every module.

Plain rationals are :class:`fractions.Fraction`.  Polynomial coefficients are
elements of sympy sparse polynomial rings (``sympy.polys.rings``), over
``QQ`` for coordinate polynomials and over the Gaussian rationals ``QQ_I``
for the formal symbol ``tau`` (standing for 2*pi).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import sympify
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing, ring

__all__ = [
    "Fraction",
    "PolyElement",
    "PolyRing",
    "poly_ring",
    "tau_ring",
    "TAU_RING",
    "TAU",
    "I",
    "frac",
    "to_fraction",
    "lift",
    "parse_poly",
    "gaussian_parts",
    "format_scalar",
]


def frac(x) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and mpq values to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


@lru_cache(maxsize=None)
def poly_ring(names: tuple[str, ...], domain=QQ) -> PolyRing:
    """Polynomial ring over ``domain`` in the given symbol names (cached)."""
    R, *_ = ring(",".join(names), domain, lex)
    return R


def tau_ring() -> PolyRing:
    return TAU_RING


TAU_RING: PolyRing = poly_ring(("tau",), QQ_I)
TAU: PolyElement = TAU_RING.gens[0]
I: PolyElement = TAU_RING(QQ_I(0, 1))


def to_fraction(c) -> Fraction:
    """Rational value of a scalar; polynomials must be constant."""
    if isinstance(c, PolyElement):
        if not c:
            return Fraction(0)
        if not c.is_ground:
            raise ValueError(f"{c} is not a constant")
        value = c.LC
        if c.ring.domain == QQ_I:
            if value.y:
                raise ValueError(f"{c} is not real")
            value = value.x
        return frac(value)
    return frac(c)


def lift(c, R: PolyRing | None):
    """Move a scalar into ring ``R`` (``None`` means plain rationals)."""
    if R is None:
        return to_fraction(c)
    if isinstance(c, PolyElement):
        if c.ring == R:
            return c
        if not c:
            return R.zero
        if c.is_ground:
            return R(c.LC if R.domain == c.ring.domain else to_fraction(c))
        return R.from_expr(c.as_expr())
    return R(frac(c))


def parse_poly(text: str, R: PolyRing) -> PolyElement:
    return R.from_expr(sympify(text, locals={s.name: s for s in R.symbols}))


def gaussian_parts(c) -> tuple[Fraction, Fraction]:
    """Real and imaginary parts of a constant Gaussian rational."""
    if isinstance(c, PolyElement) and c.ring.domain == QQ_I:
        if not c:
            return Fraction(0), Fraction(0)
        if not c.is_ground:
            raise ValueError(f"{c} is not a constant")
        return frac(c.LC.x), frac(c.LC.y)
    return to_fraction(c), Fraction(0)


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(c) -> str:
    if isinstance(c, PolyElement):
        if c.ring.domain == QQ_I and c.is_ground:
            re, im = gaussian_parts(c)
            if not im:
                return _fmt_rational(re)
            if not re:
                return f"{_fmt_rational(im)}*I"
            return f"({_fmt_rational(re)} + {_fmt_rational(im)}*I)"
        return str(c.as_expr())
    return _fmt_rational(frac(c))

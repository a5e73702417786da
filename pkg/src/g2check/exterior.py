"""Exact exterior algebra over a finite coordinate module.

A basis monomial ``e^{i1...ik}`` is stored as a bitmask with bit ``i-1`` set
for every index ``i``.  Coefficients are :class:`~fractions.Fraction` when
``ring`` is ``None`` and sympy ``PolyElement`` values otherwise.  A form either
lives on an abstract coframe (``coords is None``, rendered ``e^{127}``) or on
the coordinate differentials ``dx`` of named coordinates (rendered
``x1*dx4``); only the latter carries a polynomial exterior derivative.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from sympy import sympify
from sympy.polys.rings import PolyElement, PolyRing

from .scalars import format_scalar, frac, lift, poly_ring

__all__ = [
    "ExteriorForm",
    "PolyMap",
    "indices",
    "mask_of",
    "wedge_sign",
    "monomial",
    "coframe",
    "coordinate_coframe",
    "wedge",
    "contract",
    "d_poly",
    "derivation_d",
    "pullback",
    "pullback_linear",
    "restrict",
    "poly_substitute",
    "parse_form",
    "format_form",
    "basis_masks",
]


def indices(mask: int) -> tuple[int, ...]:
    """1-based indices of the set bits, increasing."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_of(idx: Iterable[int]) -> int:
    m = 0
    for i in idx:
        m |= 1 << (i - 1)
    return m


@lru_cache(maxsize=1 << 16)
def wedge_sign(a: int, b: int) -> int:
    """Sign of e^A ∧ e^B relative to e^{A∪B}; 0 when A and B overlap."""
    if a & b:
        return 0
    swaps = 0
    for j in indices(b):
        swaps += bin(a >> j).count("1")
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def basis_masks(n: int, k: int) -> tuple[int, ...]:
    """Degree-k monomials of rank n, sorted by bitmask value."""
    return tuple(sorted(mask_of(c) for c in combinations(range(1, n + 1), k)))


class ExteriorForm:
    """Immutable exterior form; ``*`` and ``^`` are the wedge product."""

    __slots__ = ("n", "ring", "coords", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[int, object] | None = None,
                 ring: PolyRing | None = None, coords: Sequence[str] | None = None):
        self.n = n
        self.ring = ring
        self.coords = tuple(coords) if coords is not None else None
        if self.coords is not None and len(self.coords) != n:
            raise ValueError("coordinate list must have one name per basis 1-form")
        clean = {}
        for m, c in (terms or {}).items():
            if m >> n:
                raise ValueError(f"index out of range for rank {n}: {indices(m)}")
            c = lift(c, ring)
            if c:
                clean[m] = c
        self._terms = clean
        self._hash = None

    # construction helpers
    def _new(self, terms: Mapping[int, object]) -> "ExteriorForm":
        return ExteriorForm(self.n, terms, self.ring, self.coords)

    def zero(self) -> "ExteriorForm":
        return self._new({})

    @property
    def terms(self) -> Mapping[int, object]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int | None:
        """Common degree of the stored monomials (``None`` for the zero form)."""
        degs = {bin(m).count("1") for m in self._terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("form is not homogeneous")
        return degs.pop()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, idx: Iterable[int] | int):
        m = idx if isinstance(idx, int) else mask_of(idx)
        zero = Fraction(0) if self.ring is None else self.ring.zero
        return self._terms.get(m, zero)

    def _compatible(self, other: "ExteriorForm") -> tuple["ExteriorForm", "ExteriorForm"]:
        if self.n != other.n:
            raise ValueError(f"rank mismatch: {self.n} vs {other.n}")
        if self.coords != other.coords:
            raise ValueError(f"coordinate mismatch: {self.coords} vs {other.coords}")
        if self.ring == other.ring:
            return self, other
        if other.ring is None:
            return self, other.with_ring(self.ring)
        if self.ring is None:
            return self.with_ring(other.ring), other
        raise ValueError("coefficient ring mismatch")

    def with_ring(self, ring: PolyRing | None) -> "ExteriorForm":
        return ExteriorForm(self.n, {m: lift(c, ring) for m, c in self._terms.items()}, ring, self.coords)

    def with_coords(self, coords: Sequence[str] | None) -> "ExteriorForm":
        return ExteriorForm(self.n, self._terms, self.ring, coords)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, ExteriorForm):
            if other == 0:
                return self
            return NotImplemented
        a, b = self._compatible(other)
        out = dict(a._terms)
        for m, c in b._terms.items():
            out[m] = out[m] + c if m in out else c
        return a._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "ExteriorForm":
        if isinstance(c, PolyElement) and self.ring is None:
            return self.with_ring(c.ring).scale(c)
        c = lift(c, self.ring)
        return self._new({m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, ExteriorForm):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __xor__(self, other):
        return wedge(self, other)

    def __truediv__(self, c):
        return self.scale(1 / frac(c))

    def __eq__(self, other):
        if isinstance(other, ExteriorForm):
            try:
                a, b = self._compatible(other)
            except ValueError:
                return False
            return a._terms == b._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.coords, tuple(sorted((m, str(c)) for m, c in self._terms.items()))))
        return self._hash

    def map_coefficients(self, fn) -> "ExteriorForm":
        return self._new({m: fn(c) for m, c in self._terms.items()})

    def subs(self, values: Mapping[str, object]) -> "ExteriorForm":
        """Substitute values for coefficient symbols, keeping the basis."""
        if self.ring is None:
            return self
        return self.map_coefficients(lambda c: poly_substitute(c, values, self.ring))

    def vector(self, k: int) -> list[Fraction]:
        """Coefficients in the degree-k basis ordered by bitmask."""
        return [frac(self._terms.get(m, 0)) if self.ring is None else self._terms.get(m, self.ring.zero)
                for m in basis_masks(self.n, k)]

    def __repr__(self):
        return f"ExteriorForm({format_form(self)!r})"

    __str__ = lambda self: format_form(self)


def monomial(n: int, idx: Iterable[int] | str, coeff=1, ring: PolyRing | None = None,
             coords: Sequence[str] | None = None) -> ExteriorForm:
    """``coeff * e^{idx}`` with the sorting sign applied; ``idx`` may be ``"127"``."""
    if isinstance(idx, str):
        idx = [int(ch) for ch in idx]
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return ExteriorForm(n, {}, ring, coords)
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return ExteriorForm(n, {mask_of(idx): sign * (lift(coeff, ring) if ring else frac(coeff))}, ring, coords)


def coframe(n: int, ring: PolyRing | None = None) -> list[ExteriorForm]:
    return [monomial(n, [i], ring=ring) for i in range(1, n + 1)]


def coordinate_coframe(names: Sequence[str], ring: PolyRing | None = None) -> tuple[PolyRing, list[ExteriorForm], list[PolyElement]]:
    """Ring, the differentials dx_i and the coordinate functions x_i."""
    R = ring or poly_ring(tuple(names))
    n = len(names)
    dxs = [monomial(n, [i], ring=R, coords=names) for i in range(1, n + 1)]
    xs = [R.gens[R.symbols.index(sympify(nm))] for nm in names]
    return R, dxs, xs


def wedge(a: ExteriorForm, b: ExteriorForm) -> ExteriorForm:
    a, b = a._compatible(b)
    out: dict[int, object] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            s = wedge_sign(ma, mb)
            if s:
                m = ma | mb
                v = ca * cb if s > 0 else -(ca * cb)
                out[m] = out[m] + v if m in out else v
    return a._new(out)


def contract(v: Sequence, a: ExteriorForm) -> ExteriorForm:
    """Interior product ι_v a for a coefficient vector v of length n."""
    if len(v) != a.n:
        raise ValueError(f"vector length {len(v)} does not match rank {a.n}")
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    out: dict[int, object] = {}
    for m, c in a._terms.items():
        for pos, i in enumerate(indices(m)):
            vi = v[i - 1]
            if not vi:
                continue
            t = lift(vi, a.ring) * c
            if pos & 1:
                t = -t
            r = m & ~(1 << (i - 1))
            out[r] = out[r] + t if r in out else t
    return a._new(out)


def _gen_index(R: PolyRing, name: str) -> int:
    return [str(s) for s in R.symbols].index(name)


def d_poly(a: ExteriorForm) -> ExteriorForm:
    """Exterior derivative of a form in coordinate differentials."""
    if a.coords is None:
        raise ValueError("d_poly needs a form written in coordinate differentials")
    if a.ring is None:
        return a.zero()
    gi = [_gen_index(a.ring, nm) for nm in a.coords]
    out: dict[int, object] = {}
    for m, c in a._terms.items():
        for j in range(a.n):
            if m >> j & 1:
                continue
            dc = c.diff(a.ring.gens[gi[j]])
            if not dc:
                continue
            s = wedge_sign(1 << j, m)
            t = dc if s > 0 else -dc
            r = m | 1 << j
            out[r] = out[r] + t if r in out else t
    return a._new(out)


def derivation_d(a: ExteriorForm, images: Sequence[ExteriorForm]) -> ExteriorForm:
    """Extend e^i ↦ images[i-1] to a degree-one antiderivation (constant coefficients)."""
    out = a.zero()
    for m, c in a._terms.items():
        idx = indices(m)
        for pos, i in enumerate(idx):
            left = mask_of(idx[:pos])
            right = mask_of(idx[pos + 1:])
            di = images[i - 1]
            if not di:
                continue
            piece = ExteriorForm(a.n, {left: 1}, a.ring, a.coords) * di * ExteriorForm(a.n, {right: 1}, a.ring, a.coords)
            out = out + piece.scale(-c if pos & 1 else c)
    return out


def poly_substitute(p, values: Mapping[str, object], target: PolyRing | None):
    """Evaluate polynomial ``p`` with named symbols replaced by ``values``.

    Symbols absent from ``values`` are sent to the same-named generator of
    ``target``.  With ``target=None`` every symbol must receive a rational value.
    """
    if not isinstance(p, PolyElement):
        return lift(p, target)
    names = [str(s) for s in p.ring.symbols]
    imgs = []
    for nm in names:
        if nm in values:
            imgs.append(lift(values[nm], target))
        elif target is not None and nm in [str(s) for s in target.symbols]:
            imgs.append(target.gens[_gen_index(target, nm)])
        else:
            imgs.append(None)
    total = Fraction(0) if target is None else target.zero
    powers: dict[tuple[int, int], object] = {}
    for exps, coeff in p.terms():
        if target is None:
            term = frac(coeff)
        elif target.domain == p.ring.domain:
            term = target(coeff)
        else:
            term = lift(frac(coeff), target)
        for k, e in enumerate(exps):
            if not e:
                continue
            if imgs[k] is None:
                raise ValueError(f"no value for symbol {names[k]}")
            key = (k, e)
            if key not in powers:
                powers[key] = imgs[k] ** e
            term = term * powers[key]
        total = total + term
    return total


class PolyMap:
    """Polynomial map from source coordinates to target coordinates.

    ``polys[i]`` expresses target coordinate ``target[i]`` in the source
    coordinates; the polynomials live in ``ring``.
    """

    __slots__ = ("source", "target", "polys", "ring")

    def __init__(self, source: Sequence[str], target: Sequence[str], polys: Sequence, ring: PolyRing | None = None):
        self.source = tuple(source)
        self.target = tuple(target)
        if len(polys) != len(self.target):
            raise ValueError("one polynomial per target coordinate is required")
        self.ring = ring or poly_ring(self.source)
        self.polys = tuple(lift(p, self.ring) for p in polys)

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        values = dict(zip(self.source, (frac(x) for x in point)))
        return tuple(poly_substitute(p, values, None) for p in self.polys)

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """``self ∘ inner`` (``inner`` feeds the source of ``self``)."""
        if inner.target != self.source:
            raise ValueError("symbol mismatch in composition")
        values = dict(zip(self.source, inner.polys))
        return PolyMap(inner.source, self.target, [poly_substitute(p, values, inner.ring) for p in self.polys], inner.ring)

    def differentials(self) -> list[ExteriorForm]:
        n = len(self.source)
        out = []
        for p in self.polys:
            f = ExteriorForm(n, {0: p}, self.ring, self.source)
            out.append(d_poly(f))
        return out

    @staticmethod
    def identity(names: Sequence[str], ring: PolyRing | None = None) -> "PolyMap":
        R = ring or poly_ring(tuple(names))
        return PolyMap(names, names, [R.gens[_gen_index(R, nm)] for nm in names], R)


def pullback(f: PolyMap, a: ExteriorForm) -> ExteriorForm:
    """f^* a for a form in the target's coordinate differentials."""
    if a.coords != f.target:
        raise ValueError(f"symbol mismatch: form on {a.coords}, map targets {f.target}")
    n = len(f.source)
    dfs = f.differentials()
    values = dict(zip(f.target, f.polys))
    out = ExteriorForm(n, {}, f.ring, f.source)
    for m, c in a._terms.items():
        piece = ExteriorForm(n, {0: poly_substitute(c, values, f.ring)}, f.ring, f.source)
        for i in indices(m):
            piece = piece * dfs[i - 1]
            if not piece:
                break
        out = out + piece
    return out


def pullback_linear(A: Sequence[Sequence], a: ExteriorForm) -> ExteriorForm:
    """Pull back along the linear map with e^i ↦ Σ_j A[i][j] e^j."""
    n = len(A[0])
    images = [ExteriorForm(n, {1 << j: A[i][j] for j in range(n)}, a.ring, a.coords) for i in range(a.n)]
    out = ExteriorForm(n, {}, a.ring, a.coords)
    for m, c in a._terms.items():
        piece = ExteriorForm(n, {0: c}, a.ring, a.coords)
        for i in indices(m):
            piece = piece * images[i - 1]
        out = out + piece
    return out


def restrict(a: ExteriorForm, subspace) -> ExteriorForm:
    """Restrict to a coordinate subspace or along an affine/polynomial parametrization.

    ``subspace`` is either an iterable of kept (1-based) indices, in which case
    every monomial containing a conormal index is discarded, or a
    :class:`PolyMap` parametrization, in which case this is the pullback.
    """
    if isinstance(subspace, PolyMap):
        return pullback(subspace, a)
    keep = mask_of(subspace)
    if bin(keep).count("1") > a.n:
        raise ValueError("subspace dimension exceeds the rank")
    return a._new({m: c for m, c in a._terms.items() if m & ~keep == 0})


# rendering and parsing

def _fmt_mono(m: int, n: int, coords: tuple[str, ...] | None) -> str:
    idx = indices(m)
    if coords is not None:
        return "^".join("d" + coords[i - 1] for i in idx)
    if not idx:
        return ""
    sep = "," if n > 9 else ""
    return "e^{" + sep.join(str(i) for i in idx) + "}"


def _needs_parens(s: str) -> bool:
    body = s[1:] if s.startswith("-") else s
    return any(ch in body for ch in "+-") or " " in body


def format_form(a: ExteriorForm) -> str:
    if not a._terms:
        return "0"
    parts = []
    for m in sorted(a._terms, key=lambda x: (bin(x).count("1"), indices(x))):
        c = a._terms[m]
        cs = format_scalar(c)
        neg = cs.startswith("-") and not _needs_parens(cs)
        if neg:
            cs = cs[1:]
        mono = _fmt_mono(m, a.n, a.coords)
        if not mono:
            body = cs if not _needs_parens(cs) else f"({cs})"
        elif cs == "1":
            body = mono
        else:
            cs = f"({cs})" if _needs_parens(cs) else cs
            body = f"{cs}*{mono}" if a.coords is not None else f"{cs} {mono}"
        parts.append(("-" if neg else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_E_MONO = re.compile(r"e\^\{([0-9,]*)\}|e\^([0-9])|e([0-9]+)")


def _split_terms(text: str) -> list[str]:
    terms, depth, cur = [], 0, ""
    for i, ch in enumerate(text):
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and not cur.rstrip().endswith(("*", "^")):
            terms.append(cur)
            cur = ch
            continue
        cur += ch
    if cur.strip():
        terms.append(cur)
    return terms


def _parse_coeff(s: str, ring: PolyRing | None):
    s = s.strip().rstrip("*").strip()
    if s in ("", "+"):
        s = "1"
    elif s == "-":
        s = "-1"
    if ring is None:
        return frac(str(sympify(s)))
    return ring.from_expr(sympify(s, locals={str(x): x for x in ring.symbols}))


def parse_form(text: str, n: int, ring: PolyRing | None = None, coords: Sequence[str] | None = None) -> ExteriorForm:
    """Parse the canonical rendering (``"e^{127} - 2 e^{46}"``, ``"x1*dx4"``)."""
    coords = tuple(coords) if coords is not None else None
    out = ExteriorForm(n, {}, ring, coords)
    text = text.strip()
    if text == "0":
        return out
    for term in _split_terms(text):
        if coords is not None:
            pat = re.compile(r"(?<![A-Za-z0-9_])d(" + "|".join(re.escape(c) for c in sorted(coords, key=len, reverse=True)) + r")(?![A-Za-z0-9_])")
            found = list(pat.finditer(term))
            idx = [coords.index(mt.group(1)) + 1 for mt in found]
            rest = pat.sub("", term).replace("^", "")
        else:
            mt = _E_MONO.search(term)
            if mt:
                digits = mt.group(1) if mt.group(1) is not None else (mt.group(2) or mt.group(3))
                idx = [int(x) for x in digits.split(",")] if "," in digits else [int(ch) for ch in digits]
                rest = term[:mt.start()] + term[mt.end():]
            else:
                idx, rest = [], term
        out = out + monomial(n, idx, _parse_coeff(rest, ring), ring, coords)
    return out

"""Finitely generated free commutative differential graded algebras.

A presentation is a list of generators with positive degrees and a
differential on each generator.  Monomials are exponent tuples in generator
order; odd generators square to zero and carry Koszul signs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

from . import linalg
from .exterior import ExteriorForm, basis_masks, format_form, indices, parse_form, pullback_linear
from .lie import LieAlgebraSpec, RHO_SIGNS, ce_cohomology, diagonal_action, invariant_cohomology, nilpotent_algebra
from .ring import GradedRing, RingElement, build_resolved_ring, invariant_ring
from .scalars import format_scalar

__all__ = [
    "ConfigError",
    "CDGA",
    "Element",
    "CDGACohomology",
    "CETarget",
    "RingTarget",
    "CDGAMorphism",
    "ce_algebra",
    "cdga_cohomology",
    "verify_morphism",
    "quasi_iso_range",
    "s_formality_check",
    "complete_model",
    "parse_config",
    "W_CONFIG",
    "z_config",
    "builtin_models",
    "default_targets",
    "identity_morphism",
]

Mono = tuple[int, ...]


class ConfigError(ValueError):
    """Malformed presentation or morphism text."""


class CDGA:
    """Free graded-commutative algebra on named generators with a differential."""

    def __init__(self, generators: Sequence[tuple[str, int]], differential: Mapping[str, object] | None = None,
                 name: str = "A", cutoff: int = 8):
        names = [g for g, _ in generators]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate generator names")
        if any(d <= 0 for _, d in generators):
            raise ConfigError("generator degrees must be positive")
        self.name = name
        self.names = tuple(names)
        self.degrees = tuple(int(d) for _, d in generators)
        self.cutoff = cutoff
        self._index = {g: i for i, g in enumerate(self.names)}
        self._d: dict[int, dict[Mono, Fraction]] = {}
        for g, expr in (differential or {}).items():
            if g not in self._index:
                raise ConfigError(f"differential given for unknown generator {g!r}")
            el = expr if isinstance(expr, Element) else self.parse(str(expr))
            i = self._index[g]
            if el.terms and el.degree != self.degrees[i] + 1:
                raise ConfigError(f"d {g} must have degree {self.degrees[i] + 1}")
            self._d[i] = dict(el.terms)
        bad = [g for g in self.names if not self.d(self.d(self.gen(g))).is_zero()]
        if bad:
            raise ValueError(f"d^2 != 0 on generators {bad}")

    # elements
    @property
    def n(self) -> int:
        return len(self.names)

    def element(self, terms: Mapping[Mono, object]) -> "Element":
        return Element(self, {m: Fraction(c) for m, c in terms.items() if c})

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {(0,) * self.n: Fraction(1)})

    def gen(self, name: str) -> "Element":
        if name not in self._index:
            raise KeyError(name)
        m = [0] * self.n
        m[self._index[name]] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def mono_degree(self, m: Mono) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def mul_mono(self, a: Mono, b: Mono) -> tuple[int, Mono] | None:
        """Sign and product of two monomials, or None when an odd generator repeats."""
        sign = 0
        for j, e in enumerate(b):
            if e and self.degrees[j] & 1:
                if a[j]:
                    return None
                sign += sum(1 for i in range(j + 1, self.n) if a[i] and self.degrees[i] & 1)
        return (-1 if sign & 1 else 1), tuple(x + y for x, y in zip(a, b))

    def factors(self, m: Mono) -> list[int]:
        return [i for i, e in enumerate(m) for _ in range(e)]

    def d(self, x: "Element") -> "Element":
        out: dict[Mono, Fraction] = {}
        for m, c in x.terms.items():
            for mm, v in self._d_mono(m).items():
                out[mm] = out.get(mm, 0) + c * v
        return Element(self, {m: v for m, v in out.items() if v})

    def _d_mono(self, m: Mono) -> dict[Mono, Fraction]:
        cache = self.__dict__.setdefault("_dcache", {})
        if m in cache:
            return cache[m]
        fs = self.factors(m)
        total = self.zero()
        before = 0
        for pos, i in enumerate(fs):
            di = Element(self, self._d.get(i, {}))
            if di.terms:
                left = self.one()
                for j in fs[:pos]:
                    left = left * Element(self, {self._unit(j): Fraction(1)})
                right = self.one()
                for j in fs[pos + 1:]:
                    right = right * Element(self, {self._unit(j): Fraction(1)})
                term = left * di * right
                total = total + (term.scale(-1) if before & 1 else term)
            before += self.degrees[i]
        # the factor list of an even power x^k produces k equal terms, which is the
        # derivative k x^{k-1} dx; no normalization is needed
        cache[m] = dict(total.terms)
        return cache[m]

    def _unit(self, i: int) -> Mono:
        m = [0] * self.n
        m[i] = 1
        return tuple(m)

    def is_closed_generator(self, name: str) -> bool:
        return not self._d.get(self._index[name])

    # graded pieces
    def basis(self, k: int) -> list[Mono]:
        """Monomials of degree k in generator order (lexicographic in exponents)."""
        if k > self.cutoff:
            raise ValueError(f"degree {k} exceeds the enumeration cutoff {self.cutoff}")
        return _enumerate(self.degrees, k)

    def d_matrix(self, k: int) -> list[list[Fraction]]:
        src, tgt = self.basis(k), self.basis(k + 1)
        pos = {m: r for r, m in enumerate(tgt)}
        M = [[Fraction(0)] * len(src) for _ in tgt]
        for c, m in enumerate(src):
            for mm, v in self._d_mono(m).items():
                M[pos[mm]][c] = v
        return M

    def vector(self, x: "Element", k: int) -> list[Fraction]:
        B = self.basis(k)
        pos = {m: i for i, m in enumerate(B)}
        v = [Fraction(0)] * len(B)
        for m, c in x.terms.items():
            if m not in pos:
                raise ValueError("element is not homogeneous of the requested degree")
            v[pos[m]] = c
        return v

    def from_vector(self, v: Sequence, k: int) -> "Element":
        return Element(self, {m: Fraction(c) for m, c in zip(self.basis(k), v) if c})

    def parse(self, text: str) -> "Element":
        return _parse_poly(self, text)

    def format_mono(self, m: Mono) -> str:
        parts = []
        for i, e in enumerate(m):
            if e:
                parts.append(self.names[i] if e == 1 else f"{self.names[i]}^{e}")
        return "*".join(parts) or "1"

    def describe(self) -> str:
        lines = [f"{g} : {d}" for g, d in zip(self.names, self.degrees)]
        for i in sorted(self._d):
            lines.append(f"d {self.names[i]} = {Element(self, self._d[i])}")
        return "\n".join(lines)

    def extend(self, generators: Sequence[tuple[str, int]], differential: Mapping[str, object],
               name: str | None = None) -> "CDGA":
        """New presentation with extra generators appended (differential text in the old names)."""
        gens = list(zip(self.names, self.degrees)) + list(generators)
        dd = {self.names[i]: _element_text(self, t) for i, t in self._d.items()}
        dd.update({g: (e if isinstance(e, str) else str(e)) for g, e in differential.items()})
        return CDGA(gens, dd, name or self.name, self.cutoff)


def _element_text(A: CDGA, terms) -> str:
    return str(Element(A, terms))


@lru_cache(maxsize=None)
def _enumerate(degrees: tuple[int, ...], k: int) -> list[Mono]:
    out: list[Mono] = []
    n = len(degrees)

    def rec(i: int, left: int, acc: list[int]):
        if i == n:
            if left == 0:
                out.append(tuple(acc))
            return
        d = degrees[i]
        top = min(1, left // d) if d & 1 else left // d
        for e in range(top, -1, -1):
            acc.append(e)
            rec(i + 1, left - e * d, acc)
            acc.pop()

    rec(0, k, [])
    return sorted(out, reverse=True)


@dataclass(frozen=True)
class Element:
    algebra: CDGA = field(repr=False, compare=False)
    terms: Mapping[Mono, Fraction]

    @property
    def degree(self) -> int | None:
        degs = {self.algebra.mono_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Element") -> "Element":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Element(self.algebra, {m: c for m, c in out.items() if c})

    def __neg__(self) -> "Element":
        return self.scale(-1)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        c = Fraction(c)
        return Element(self.algebra, {m: c * v for m, v in self.terms.items()} if c else {})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        A = self.algebra
        out: dict[Mono, Fraction] = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                r = A.mul_mono(a, b)
                if r is None:
                    continue
                s, m = r
                out[m] = out.get(m, 0) + s * x * y
        return Element(A, {m: c for m, c in out.items() if c})

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        return isinstance(other, Element) and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            mono = self.algebra.format_mono(m)
            if mono == "1":
                parts.append(format_scalar(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_scalar(c)} {mono}")
        return " + ".join(parts).replace("+ -", "- ")


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?|([+\-*()]))")


def _parse_poly(A: CDGA, text: str) -> Element:
    """Sums of products: ``b2^2 + 2 a1*c5``, ``-3/2 x*y``, ``0``."""
    text = text.strip()
    if not text:
        raise ConfigError("empty polynomial")
    pos = 0
    tokens = []
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ConfigError(f"cannot parse {text!r} at position {pos}")
        tokens.append(mt.groups())
        pos = mt.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    total = A.zero()
    term = None
    sign = 1
    for num, name, power, op in tokens:
        if op in ("+", "-"):
            if term is not None:
                total = total + term.scale(sign)
                term = None
            sign = -1 if op == "-" else 1
            continue
        if op == "*":
            continue
        if op:
            raise ConfigError("parentheses are not supported in polynomials")
        if num is not None:
            factor = A.one().scale(Fraction(num))
        else:
            if name not in A.names:
                raise ConfigError(f"unknown generator {name!r}")
            factor = A.gen(name)
            for _ in range(int(power or 1) - 1):
                factor = factor * A.gen(name)
        term = factor if term is None else term * factor
    if term is None:
        raise ConfigError(f"dangling operator in {text!r}")
    return total + term.scale(sign)


# cohomology of presentations

@dataclass(frozen=True)
class CDGACohomology:
    algebra: CDGA = field(repr=False)
    k: int
    representatives: tuple[Element, ...]
    boundary_rref: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    boundary_pivots: tuple[int, ...] = field(repr=False)
    rep_rows: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    rep_pivots: tuple[int, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def class_of(self, x: Element) -> list[Fraction]:
        if x.is_zero():
            return [Fraction(0)] * self.dim
        if x.degree != self.k:
            raise ValueError("degree mismatch")
        if not self.algebra.d(x).is_zero():
            raise ValueError(f"{x} is not closed")
        v = self.algebra.vector(x, self.k)
        for row, p in zip(self.boundary_rref, self.boundary_pivots):
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, row)]
        coords = [v[p] for p in self.rep_pivots]
        return coords


def cdga_cohomology(A: CDGA, k: int) -> CDGACohomology:
    """H^k from the monomial bases of degrees k-1, k, k+1."""
    if k + 1 > A.cutoff:
        raise ValueError(f"cutoff {A.cutoff} too small for H^{k}")
    cache = A.__dict__.setdefault("_hcache", {})
    if k in cache:
        return cache[k]
    size = len(A.basis(k))
    Z = linalg.nullspace(A.d_matrix(k), size) if A.basis(k + 1) else linalg.identity(size)
    bnd = [b for b in linalg.transpose(A.d_matrix(k - 1), size)] if k > 0 and A.basis(k - 1) else []
    bnd = [b for b in bnd if any(b)]
    B, bp = linalg.rref(bnd, size) if bnd else ([], ())
    reduced = []
    for z in Z:
        for row, p in zip(B, bp):
            if z[p]:
                c = z[p]
                z = [a - c * b for a, b in zip(z, row)]
        if any(z):
            reduced.append(z)
    R, rp = linalg.rref(reduced, size) if reduced else ([], ())
    H = CDGACohomology(A, k, tuple(A.from_vector(r, k) for r in R), tuple(map(tuple, B)), tuple(bp),
                       tuple(map(tuple, R)), tuple(rp))
    cache[k] = H
    return H


def ce_algebra(spec: LieAlgebraSpec) -> CDGA:
    """Chevalley-Eilenberg algebra as a presentation on degree-1 generators e1..en."""
    names = [f"e{i}" for i in range(1, spec.n + 1)]
    dd = {}
    for i, f in enumerate(spec.de):
        parts = []
        for m, c in sorted(f.terms.items()):
            a, b = indices(m)
            parts.append(f"{'+' if c > 0 else '-'} {format_scalar(abs(c))} e{a}*e{b}")
        dd[names[i]] = " ".join(parts) if parts else "0"
    return CDGA([(g, 1) for g in names], dd, f"CE({spec.name})")


# targets of morphisms

class CETarget:
    """Chevalley-Eilenberg forms of a Lie algebra, optionally restricted to invariants."""

    def __init__(self, spec: LieAlgebraSpec, actions=None, name: str = "CE"):
        self.spec, self.actions, self.name = spec, actions, name

    def unit(self) -> ExteriorForm:
        return ExteriorForm(self.spec.n, {0: 1})

    def zero(self, k: int) -> ExteriorForm:
        return ExteriorForm(self.spec.n)

    def d(self, x: ExteriorForm) -> ExteriorForm:
        return self.spec.d(x)

    def degree(self, x: ExteriorForm) -> int | None:
        return x.degree

    def is_zero(self, x) -> bool:
        return x.is_zero()

    @cached_property
    def _H(self) -> list:
        if self.actions:
            return [invariant_cohomology(self.spec, k, self.actions) for k in range(self.spec.n + 1)]
        return [ce_cohomology(self.spec, k) for k in range(self.spec.n + 1)]

    def h_dim(self, k: int) -> int:
        return self._H[k].dim if 0 <= k <= self.spec.n else 0

    def class_coords(self, x: ExteriorForm, k: int) -> list[Fraction]:
        if not 0 <= k <= self.spec.n:
            return []
        return self._H[k].class_of(x)

    def parse(self, text: str) -> ExteriorForm:
        return parse_form(text, self.spec.n)

    def primitive(self, x: ExteriorForm, k: int) -> ExteriorForm | None:
        """An invariant y of degree k - 1 with dy = x, or None when x is not exact."""
        if x.is_zero():
            return None
        D = self.spec.d_matrix(k - 1)
        y = linalg.solve(D, x.vector(k), len(D[0]))
        if y is None:
            raise ValueError(f"{format_form(x)} is not exact")
        form = ExteriorForm(self.spec.n, {m: c for m, c in zip(basis_masks(self.spec.n, k - 1), y) if c})
        group = _group_closure(self.actions) if self.actions else [linalg.identity(self.spec.n)]
        avg = ExteriorForm(self.spec.n)
        for A in group:
            avg = avg + pullback_linear(A, form)
        return avg.scale(Fraction(1, len(group)))

    def format(self, x) -> str:
        return format_form(x)


_TENSOR = re.compile(r"^\s*(?:(1|e\^\{[347]+\})\s*\*\s*)?E(\d+)\s*$")


class RingTarget:
    """A cohomology ring with zero differential."""

    def __init__(self, ring: GradedRing):
        self.ring = ring
        self.name = ring.name

    def unit(self) -> RingElement:
        return self.ring.unit()

    def zero(self, k: int) -> RingElement:
        return RingElement(self.ring, k, {})

    def d(self, x: RingElement) -> RingElement:
        return RingElement(self.ring, x.degree + 1, {})

    def degree(self, x: RingElement) -> int | None:
        return x.degree

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def h_dim(self, k: int) -> int:
        return self.ring.betti[k] if 0 <= k <= self.ring.top else 0

    def class_coords(self, x: RingElement, k: int) -> list:
        if not 0 <= k <= self.ring.top:
            return []
        return x.vector()

    def primitive(self, x: RingElement, k: int) -> None:
        if not x.is_zero():
            raise ValueError("nonzero element of a ring with zero differential is not exact")
        return None

    def parse(self, text: str) -> RingElement:
        """Linear combinations of bracketed classes, e.g. ``[e^{25} + e^{34}]`` or ``2 [e^{4}*E3]``."""
        total = None
        for coeff, body in re.findall(r"([+-]?\s*[\d/]*)\s*\[([^\]]*)\]", text):
            c = coeff.replace(" ", "")
            c = Fraction(-1 if c == "-" else 1 if c in ("", "+") else c)
            mt = _TENSOR.match(body)
            if mt:
                beta = mt.group(1) or "1"
                x = self.ring.by_label(2 + (0 if beta == "1" else len(beta) - 4), f"{beta}*E{mt.group(2)}")
            else:
                x = self.ring.from_form(parse_form(body, 7))
            x = x.scale(c)
            total = x if total is None else total + x
        if total is None:
            if text.strip() == "0":
                return None
            raise ConfigError(f"cannot parse ring element {text!r}")
        return total

    def format(self, x) -> str:
        return str(x)


@dataclass
class CDGAMorphism:
    """Algebra map determined by generator images (zero images may be given as None)."""

    source: CDGA
    target: object
    images: dict[str, object]
    name: str = "f"

    def __call__(self, x: Element):
        A, T = self.source, self.target
        total = None
        for m, c in x.terms.items():
            val = T.unit()
            dead = False
            for i in A.factors(m):
                img = self.images.get(A.names[i])
                if img is None:
                    dead = True
                    break
                val = val * img
            if dead:
                continue
            val = val * c if not isinstance(val, ExteriorForm) else val.scale(c)
            total = val if total is None else total + val
        if total is None:
            return T.zero(x.degree or 0)
        return total


def _morphism_degree_ok(f: CDGAMorphism, g: str) -> bool:
    img = f.images.get(g)
    if img is None or f.target.is_zero(img):
        return True
    return f.target.degree(img) == f.source.degrees[f.source.names.index(g)]


def verify_morphism(f: CDGAMorphism) -> dict:
    """Check degrees and f(dx) = d f(x) on every generator."""
    A, T = f.source, f.target
    offending = []
    for g in A.names:
        if not _morphism_degree_ok(f, g):
            offending.append(g)
            continue
        x = A.gen(g)
        lhs = f(A.d(x))
        img = f.images.get(g)
        rhs = T.d(img) if img is not None else None
        diff_zero = T.is_zero(lhs) if rhs is None or T.is_zero(rhs) else T.is_zero(lhs - rhs)
        if not diff_zero:
            offending.append(g)
    return {"morphism": f.name, "ok": not offending, "offending": offending}


def quasi_iso_range(f: CDGAMorphism, s: int) -> dict:
    """Induced maps on H^i: isomorphism for i <= s and injective for i = s + 1."""
    A, T = f.source, f.target
    rows = []
    ok = True
    for i in range(s + 2):
        H = cdga_cohomology(A, i)
        cols = [T.class_coords(f(r), i) for r in H.representatives]
        dt = T.h_dim(i)
        M = linalg.transpose(cols, dt) if cols and dt else []
        r = linalg.rank(M, H.dim) if M else 0
        kernel = []
        if r < H.dim:
            K = linalg.nullspace(M, H.dim) if M else linalg.identity(H.dim)
            for v in K:
                el = A.zero()
                for c, rep in zip(v, H.representatives):
                    if c:
                        el = el + rep.scale(c)
                kernel.append(el)
        want = "iso" if i <= s else "mono"
        passed = r == H.dim == dt if want == "iso" else r == H.dim
        ok = ok and passed
        rows.append({"degree": i, "source_dim": H.dim, "target_dim": dt, "rank": r, "required": want,
                     "pass": passed, "kernel_dim": len(kernel), "kernel_sample": [str(k) for k in kernel[:5]],
                     "kernel": kernel})
    return {"morphism": f.name, "s": s, "ok": ok, "degrees": rows}


def s_formality_check(A: CDGA, nonclosed: Sequence[str], s: int, f: CDGAMorphism, max_degree: int = 7,
                      force_enumeration: bool = False) -> dict:
    """Closed elements of the ideal generated by N^{<=s} map to exact elements.

    When every generator of N^{<=s} maps to zero the ideal maps to zero and the
    degree-by-degree enumeration is skipped (``method`` records which route ran).

    The split V^i = C^i ⊕ N^i is given by the non-closed generator names;
    C must be closed and d must be injective on each N^i.
    """
    N = [g for g in nonclosed]
    C = [g for g in A.names if g not in N and A.degrees[A.names.index(g)] <= s]
    split_ok = all(A.is_closed_generator(g) for g in C)
    for k in sorted({A.degrees[A.names.index(g)] for g in N}):
        Nk = [g for g in N if A.degrees[A.names.index(g)] == k]
        imgs = [A.vector(A.d(A.gen(g)), k + 1) for g in Nk]
        if linalg.rank(imgs, len(imgs[0])) != len(Nk):
            split_ok = False
    Nidx = [A.names.index(g) for g in N if A.degrees[A.names.index(g)] <= s]
    high = [i for i in range(A.n) if A.degrees[i] > s]
    per_degree = []
    failures = []
    checked = 0
    if not force_enumeration and all(f.images.get(A.names[i]) is None or f.target.is_zero(f.images[A.names[i]]) for i in Nidx):
        # f is multiplicative, so f(n·x) = f(n)·f(x) = 0 on the whole ideal
        return {"s": s, "split_ok": split_ok, "closed_checked": 0, "failures": [], "per_degree": [],
                "method": "multiplicative", "ok": split_ok}
    for k in range(1, max_degree + 1):
        B = [m for m in A.basis(k) if any(m[i] for i in Nidx) and not any(m[i] for i in high)]
        if not B:
            per_degree.append({"degree": k, "ideal_dim": 0, "closed_dim": 0})
            continue
        full = A.basis(k + 1)
        pos = {m: r for r, m in enumerate(full)}
        D = [[Fraction(0)] * len(B) for _ in full]
        for c, m in enumerate(B):
            for mm, v in A._d_mono(m).items():
                D[pos[mm]][c] = v
        closed = linalg.nullspace(D, len(B)) if full else linalg.identity(len(B))
        for v in closed:
            el = A.element({m: c for m, c in zip(B, v) if c})
            img = f(el)
            checked += 1
            exact = f.target.is_zero(img) or not any(f.target.class_coords(img, k))
            if not exact:
                failures.append(str(el))
        per_degree.append({"degree": k, "ideal_dim": len(B), "closed_dim": len(closed)})
    return {"s": s, "split_ok": split_ok, "closed_checked": checked, "failures": failures,
            "per_degree": per_degree, "method": "enumeration", "ok": split_ok and not failures}


def complete_model(f: CDGAMorphism, s: int, rounds: int = 3, prefix: str = "xi") -> tuple[CDGAMorphism, list[dict]]:
    """Add degree-s generators killing ker(f*) on H^{s+1} until f* is injective there.

    Each new generator maps to a primitive of the (exact) image of its
    differential, so the extended map is again a morphism.
    Returns the extended morphism and a log of the generators added per round.
    """
    log = []
    count = 0
    for _ in range(rounds):
        rep = quasi_iso_range(f, s)
        row = rep["degrees"][s + 1]
        if row["pass"]:
            break
        gens, diffs = [], {}
        for el in row["kernel"]:
            count += 1
            g = f"{prefix}{count}"
            gens.append((g, s))
            diffs[g] = str(el)
        A2 = f.source.extend(gens, diffs, f.source.name + "+")
        images = dict(f.images)
        for (g, _), el in zip(gens, row["kernel"]):
            images[g] = f.target.primitive(f(el), s + 1)
        f = CDGAMorphism(A2, f.target, images, f.name)
        log.append({"added": len(gens), "degree": s})
    return f, log


def _group_closure(actions) -> list:
    """All products of the given coframe matrices (a finite group), identity first."""
    group = [linalg.identity(len(actions[0]))]
    frontier = list(group)
    while frontier:
        new = []
        for g in frontier:
            for a in actions:
                h = linalg.matmul(g, a)
                if h not in group:
                    group.append(h)
                    new.append(h)
        frontier = new
    return group


# declarative configuration

def parse_config(text: str, targets: Mapping[str, object] | None = None) -> dict:
    """Read ``[algebra NAME]`` and ``[morphism NAME: SOURCE -> TARGET]`` sections.

    Algebra lines are ``name : degree`` or ``d name = polynomial``.  Morphism
    lines are ``f(name) = image`` with images in the target's syntax; a
    ``split`` line ``N = g1, g2`` records non-closed generators.  Lines
    starting with ``#`` are comments.
    """
    targets = dict(targets or {})
    algebras: dict[str, CDGA] = {}
    morphisms: dict[str, CDGAMorphism] = {}
    splits: dict[str, list[str]] = {}
    section = None
    buf: list[tuple[int, str]] = []

    def flush():
        if section is None:
            if buf:
                raise ConfigError(f"line {buf[0][0]}: content outside a section")
            return
        kind, header = section
        if kind == "algebra":
            gens, dd, nname = [], {}, header
            for ln, line in buf:
                mt = re.match(r"^d\s+(\w+)\s*=\s*(.+)$", line)
                if mt:
                    dd[mt.group(1)] = mt.group(2)
                    continue
                mt = re.match(r"^N\s*=\s*(.+)$", line)
                if mt:
                    splits[nname] = [x.strip() for x in mt.group(1).split(",") if x.strip()]
                    continue
                mt = re.match(r"^(\w+)\s*:\s*(\d+)$", line)
                if not mt:
                    raise ConfigError(f"line {ln}: expected 'name : degree' or 'd name = polynomial'")
                gens.append((mt.group(1), int(mt.group(2))))
            try:
                algebras[nname] = CDGA(gens, dd, nname)
            except ConfigError as exc:
                raise ConfigError(f"algebra {nname}: {exc}") from None
        else:
            mt = re.match(r"^(\w+)\s*:\s*(\w+)\s*->\s*([\w\-]+)$", header)
            if not mt:
                raise ConfigError(f"bad morphism header {header!r}")
            fname, src, tgt = mt.groups()
            if src not in algebras:
                raise ConfigError(f"morphism {fname}: unknown source {src!r}")
            T = algebras[tgt] if tgt in algebras else targets.get(tgt)
            if T is None:
                raise ConfigError(f"morphism {fname}: unknown target {tgt!r}")
            if isinstance(T, CDGA):
                T = _SelfTarget(T)
            A = algebras[src]
            images: dict[str, object] = {}
            for ln, line in buf:
                m2 = re.match(r"^" + re.escape(fname) + r"\((\w+)\)\s*=\s*(.+)$", line)
                if not m2:
                    raise ConfigError(f"line {ln}: expected '{fname}(name) = image'")
                g, body = m2.groups()
                if g not in A.names:
                    raise ConfigError(f"line {ln}: unknown generator {g!r}")
                images[g] = None if body.strip() == "0" else T.parse(body)
            missing = [g for g in A.names if g not in images]
            if missing:
                raise ConfigError(f"morphism {fname}: no image for {missing}")
            morphisms[fname] = CDGAMorphism(A, T, images, fname)

    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = re.match(r"^\[(algebra|morphism)\s+(.+)\]$", line)
        if mt:
            flush()
            section, buf = (mt.group(1), mt.group(2).strip()), []
            continue
        if line.startswith("["):
            raise ConfigError(f"line {ln}: unknown section {line!r}")
        buf.append((ln, line))
    flush()
    return {"algebras": algebras, "morphisms": morphisms, "splits": splits}


class _SelfTarget:
    """A presentation used as the target of a morphism."""

    def __init__(self, A: CDGA):
        self.A, self.name = A, A.name

    def unit(self):
        return self.A.one()

    def zero(self, k):
        return self.A.zero()

    def d(self, x):
        return self.A.d(x)

    def degree(self, x):
        return x.degree

    def is_zero(self, x):
        return x.is_zero()

    def h_dim(self, k):
        return cdga_cohomology(self.A, k).dim

    def class_coords(self, x, k):
        return cdga_cohomology(self.A, k).class_of(x)

    def parse(self, text):
        return self.A.parse(text)

    def primitive(self, x, k):
        if x.is_zero():
            return None
        D = self.A.d_matrix(k - 1)
        y = linalg.solve(D, self.A.vector(x, k), len(self.A.basis(k - 1)))
        if y is None:
            raise ValueError(f"{x} is not exact")
        return self.A.from_vector(y, k - 1)

    def format(self, x):
        return str(x)


def identity_morphism(A: CDGA) -> CDGAMorphism:
    return CDGAMorphism(A, _SelfTarget(A), {g: A.gen(g) for g in A.names}, "id")


W_CONFIG = """\
[algebra W]
a1 : 1
b1 : 2
b2 : 2
c1 : 3
c2 : 3
c3 : 3
c4 : 3
c5 : 3
c6 : 3
eta1 : 3
eta2 : 3
d eta1 = b1^2
d eta2 = b2^2 + 2 a1*c5
N = eta1, eta2

[morphism rho: W -> invariant-ce]
rho(a1) = e^{3}
rho(b1) = e^{16}
rho(b2) = e^{25} + e^{34}
rho(c1) = e^{146}
rho(c2) = e^{157}
rho(c3) = e^{167}
rho(c4) = e^{246}
rho(c5) = e^{236} + e^{245}
rho(c6) = e^{257} + e^{347} + e^{356}
rho(eta1) = 0
rho(eta2) = 0
"""


def z_config(components: int = 16) -> str:
    """Presentation of Z = W ⊕ S ⊕ T and the map theta into the resolved ring."""
    w_gens, w_diff = W_CONFIG.split("N =", 1)[0].split("\n", 1)[1].rstrip().rsplit("d eta1", 1)
    lines = ["[algebra Z]", w_gens.rstrip()]
    lines += [f"B{i} : 2" for i in range(1, components + 1)]
    lines += [f"C4_{i} : 3" for i in range(1, components + 1)]
    lines += [f"C7_{i} : 3" for i in range(1, components + 1)]
    lines += ["d eta1" + w_diff.rstrip(), "N = eta1, eta2", "", "[morphism theta: Z -> resolved-ring]"]
    images = {"a1": "[e^{3}]", "b1": "[e^{16}]", "b2": "[e^{25} + e^{34}]", "c1": "[e^{146}]",
              "c2": "[e^{157}]", "c3": "[e^{167}]", "c4": "[e^{246}]", "c5": "[e^{236} + e^{245}]",
              "c6": "[e^{257} + e^{347} + e^{356}]", "eta1": "0", "eta2": "0"}
    lines += [f"theta({g}) = {v}" for g, v in images.items()]
    for i in range(1, components + 1):
        lines += [f"theta(B{i}) = [E{i}]", f"theta(C4_{i}) = [e^{{4}}*E{i}]", f"theta(C7_{i}) = [e^{{7}}*E{i}]"]
    return "\n".join(lines) + "\n"


def default_targets() -> dict:
    G = nilpotent_algebra()
    return {
        "ce": CETarget(G, None, "CE(g)"),
        "invariant-ce": CETarget(G, [diagonal_action(RHO_SIGNS)], "CE(g)^Z2"),
        "resolved-ring": RingTarget(build_resolved_ring(invariant_ring())),
    }


def builtin_models() -> dict:
    """The W model with rho and the Z model with theta, parsed from the canned configuration."""
    targets = default_targets()
    w = parse_config(W_CONFIG, targets)
    z = parse_config(z_config(), targets)
    return {
        "W": w["algebras"]["W"], "rho": w["morphisms"]["rho"], "W_split": w["splits"]["W"],
        "Z": z["algebras"]["Z"], "theta": z["morphisms"]["theta"], "Z_split": z["splits"]["Z"],
        "targets": targets,
    }

"""Exact characteristic-class arithmetic on T × T̂ × P¹ (and a curve S).

Generators: t (point class of T), t̂ (point class of T̂), p (point class of P¹),
s (point class of the curve S) and π = c₁ of the Poincaré bundle.  All are treated as
commuting degree-2 classes subject to

    t² = t̂² = p² = s² = 0,     π² = 2·t·t̂,     π·t = π·t̂ = 0.

The last pair holds for degree reasons: π lives in H¹(T)⊗H¹(T̂), so π·t has a degree-3
component on the real surface T.  Coefficients are Fractions.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

GENERATORS = ("t", "th", "p", "s", "pi")
DISPLAY = {"t": "t", "th": "t̂", "p": "p", "s": "s", "pi": "π"}
_INDEX = {g: i for i, g in enumerate(GENERATORS)}
_ALIASES = {"t̂": "th", "that": "th", "π": "pi", "t_hat": "th"}

Monomial = tuple  # exponent vector, entries 0/1


def _mono(*names) -> Monomial:
    e = [0] * len(GENERATORS)
    for n in names:
        e[_INDEX[n]] += 1
    return tuple(e)


ONE = _mono()


def _reduce(mono: Monomial, coeff: Fraction) -> dict:
    """Normal form of coeff·mono as {monomial: coefficient}."""
    e = list(mono)
    it, ith, ipi = _INDEX["t"], _INDEX["th"], _INDEX["pi"]
    while e[ipi] >= 2:
        e[ipi] -= 2
        e[it] += 1
        e[ith] += 1
        coeff *= 2
    if any(x > 1 for x in e):
        return {}
    if e[ipi] and (e[it] or e[ith]):
        return {}
    return {tuple(e): coeff} if coeff else {}


@dataclass(frozen=True)
class RingElement:
    terms: tuple  # sorted ((monomial, Fraction), ...)

    @classmethod
    def from_dict(cls, d: dict) -> "RingElement":
        out: dict = {}
        for m, c in d.items():
            for mm, cc in _reduce(m, Fraction(c)).items():
                out[mm] = out.get(mm, Fraction(0)) + cc
        return cls(tuple(sorted((m, c) for m, c in out.items() if c != 0)))

    @classmethod
    def const(cls, c) -> "RingElement":
        return cls.from_dict({ONE: Fraction(c)})

    @classmethod
    def gen(cls, name: str) -> "RingElement":
        name = _ALIASES.get(name, name)
        if name not in _INDEX:
            raise DomainError(f"unknown generator {name!r}")
        return cls.from_dict({_mono(name): 1})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def _coerce(self, other):
        if isinstance(other, RingElement):
            return other
        if isinstance(other, (int, Fraction)):
            return RingElement.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, Fraction(0)) + c
        return RingElement.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                for mm, cc in _reduce(m, c1 * c2).items():
                    d[mm] = d.get(mm, Fraction(0)) + cc
        return RingElement.from_dict(d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise DomainError("only non-negative integer powers")
        out = RingElement.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)) and c != 0:
            return RingElement.from_dict({m: v / Fraction(c) for m, v in self.terms})
        raise DomainError("division only by nonzero rational constants")

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def coefficient(self, *names) -> Fraction:
        return self.as_dict().get(_mono(*[_ALIASES.get(n, n) for n in names]), Fraction(0))

    def degree_part(self, deg: int) -> "RingElement":
        """Homogeneous component of real degree ``deg`` (every generator has degree 2)."""
        return RingElement(tuple((m, c) for m, c in self.terms if 2 * sum(m) == deg))

    def integrate(self, *over) -> "RingElement":
        """Fiber integration: keep terms divisible by the product of ``over``, divide it out."""
        idx = [_INDEX[_ALIASES.get(g, g)] for g in over]
        out = {}
        for m, c in self.terms:
            if all(m[i] == 1 for i in idx):
                mm = list(m)
                for i in idx:
                    mm[i] = 0
                out[tuple(mm)] = c
        return RingElement.from_dict(out)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.terms)

    def scalar(self):
        """The value of a degree-0 element (error otherwise)."""
        if any(m != ONE for m, _ in self.terms):
            raise DomainError("element is not a scalar")
        c = self.as_dict().get(ONE, Fraction(0))
        return int(c) if c.denominator == 1 else c

    def monomials(self) -> list:
        """[(monomial string, coefficient)] in display order (JSON friendly)."""
        return [(_mono_str(m) or "1", _num_json(c)) for m, c in self._display_order()]

    def _display_order(self):
        return sorted(self.terms, key=lambda mc: (sum(mc[0]), [-x for x in mc[0]]))

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self._display_order()):
            sign = "−" if c < 0 else "+"
            a = abs(c)
            name = _mono_str(m)
            if not name:
                body = _num_str(a)
            elif a == 1:
                body = name
            elif sum(m) == 1:
                body = f"{_num_str(a)}{name}"
            else:
                body = f"{_num_str(a)} {name}"
            if i == 0:
                parts.append(("−" if c < 0 else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RingElement({self.format()!r})"


def _mono_str(m) -> str:
    return "·".join(DISPLAY[g] for g, e in zip(GENERATORS, m) if e)


def _num_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _num_json(c: Fraction):
    return int(c) if c.denominator == 1 else str(c)


# ----------------------------------------------------------------------------------------
# expression parsing


def _normalize_source(expr: str) -> str:
    rep = {"−": "-", "·": "*", "∧": "*", "^": "**", "t̂": "th", "π": "pi"}
    for a, b in rep.items():
        expr = expr.replace(a, b)
    return expr


def ring_eval(expr: str, **constants) -> RingElement:
    """Normal form of an arithmetic expression in t, t̂ (th), p, s, π (pi) and integer constants."""
    tree = ast.parse(_normalize_source(expr), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return RingElement.const(node.value)
        if isinstance(node, ast.Name):
            if node.id in constants:
                return RingElement.const(Fraction(constants[node.id]))
            return RingElement.gen(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = ev(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise DomainError("exponent must be a literal integer")
                return a ** node.right.value
            b = ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b.scalar()
        raise DomainError(f"unsupported expression element: {ast.dump(node)}")

    return ev(tree)


# ----------------------------------------------------------------------------------------
# the four computations

SCENARIOS = ("ch_V", "ch_E_check", "deg_I", "index_c1")

CHI_P_SHEAF = 0  # χ of the auxiliary sheaf 𝒫 on T̂ entering the Ě computation


def _ch_V(k):
    # −ch(G)·td(T×P¹)/[T×P¹], with td = 1 + ½c₁(P¹) = 1 + p and c₂(E) = k·t·p
    g = ring_eval("2 + 2*pi + pi**2 - k*t*p", k=k)
    return -(g * ring_eval("1 + p")).integrate("t", "p")


def _ch_E_check(k):
    # (c₁𝒫 − c₁V + c₁𝒫∧p − (k/2)c₁(P)²∧p)/[T̂] with c₁V the degree-2 part of ch V
    c1V = _ch_V(k).degree_part(2)
    c1P = RingElement.const(CHI_P_SHEAF) * RingElement.gen("th")
    p = RingElement.gen("p")
    pi = RingElement.gen("pi")
    expr = c1P - c1V + c1P * p - Fraction(k, 2) * pi * pi * p
    return expr.integrate("th")


def _deg_I(k):
    e = ring_eval("(2 - k*t*(2*s)) * (1 + pi + (2*t)*(k*s)/2)", k=k)
    return e.integrate("t", "s")


def _index_c1(k):
    # ch(E)·td(p₁*K_T⁻¹)/[T]; K_T is trivial so the Todd factor is 1
    e = _ch_E_check(k) * RingElement.const(1)
    return e.integrate("t")


def scenario(name: str, k: int) -> RingElement:
    if k < 1:
        raise DomainError("k must be >= 1")
    fn = {"ch_V": _ch_V, "ch_E_check": _ch_E_check, "deg_I": _deg_I, "index_c1": _index_c1}.get(name)
    if fn is None:
        raise DomainError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    return fn(k)


def degree_of_V(k: int) -> int:
    """t̂-coefficient of ch V."""
    return int(scenario("ch_V", k).coefficient("th"))


def rank_of_V(k: int) -> int:
    return int(scenario("ch_V", k).degree_part(0).scalar())


def index_c1(k: int) -> int:
    """c₁ of the index bundle over P¹: the p-coefficient."""
    return int(scenario("index_c1", k).coefficient("p"))


def chern_report(k: int) -> dict:
    return {
        "ch_V": scenario("ch_V", k).format(),
        "ch_E_check": scenario("ch_E_check", k).format(),
        "deg_I": scenario("deg_I", k).scalar(),
        "index_c1": index_c1(k),
        "deg_V": degree_of_V(k),
        "rank_V": rank_of_V(k),
    }


__all__ = [
    "RingElement",
    "GENERATORS",
    "SCENARIOS",
    "ring_eval",
    "scenario",
    "degree_of_V",
    "rank_of_V",
    "index_c1",
    "chern_report",
]

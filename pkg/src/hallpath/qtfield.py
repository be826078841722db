"""Exact arithmetic in Q(q, t), univariate series over it, and evaluation fields.

A :class:`RatFunc` is stored as ``q^a t^b * N / D`` with ``N, D`` integer
polynomials, neither divisible by ``q`` or ``t``, coprime over ``Z[q, t]``,
and ``D`` sign-normalized.  That representation is unique, so structural
equality is equality of rational functions.  GCDs are delegated to FLINT.
"""

from __future__ import annotations

import ast
import random
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Mapping

import flint

__all__ = [
    "LaurentPoly", "RatFunc", "PoleError", "QHalf", "AuxRatFunc", "BivarPoly",
    "series_expand", "series_exp", "g_poly", "g_factored", "rand_eval", "rf_arith", "parse_ratfunc",
    "Q", "T", "ONE", "ZERO", "SIGMA1", "SIGMA2", "Q1", "Q2", "Q3",
    "ExactField", "PointField", "EXACT", "monomial",
]

_CTX = flint.fmpz_mpoly_ctx.get(("q", "t"), "deglex")


class PoleError(ArithmeticError):
    """A denominator vanished: at an evaluation point or at an expansion point."""


def _order_key(exp: tuple[int, int]) -> tuple[int, int]:
    # Print order: ascending total degree, q before t within a degree.
    return (exp[0] + exp[1], -exp[0])


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(a: int, b: int) -> str:
    parts = []
    for name, e in (("q", a), ("t", b)):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class LaurentPoly:
    """Sparse Laurent polynomial in q, t with Fraction coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[(int(a), int(b))] = clean.get((int(a), int(b)), 0) + c
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    def items_sorted(self):
        return sorted(self._terms.items(), key=lambda kv: _order_key(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly({(0, 0): other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _as_laurent(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_laurent(other))

    def __rsub__(self, other):
        return _as_laurent(other) - self

    def __mul__(self, other):
        other = _as_laurent(other)
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a Laurent polynomial; use RatFunc")
        result = LaurentPoly({(0, 0): 1})
        for _ in range(n):
            result = result * self
        return result

    def evaluate(self, q0, t0) -> Fraction:
        q0, t0 = Fraction(q0), Fraction(t0)
        total = Fraction(0)
        for (a, b), c in self._terms.items():
            if (a < 0 and q0 == 0) or (b < 0 and t0 == 0):
                raise PoleError("negative power evaluated at zero")
            total += c * q0**a * t0**b
        return total

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for (a, b), c in self.items_sorted():
            mono = _fmt_mono(a, b)
            if not mono:
                s = _fmt_coeff(c)
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{_fmt_coeff(c)}*{mono}"
            if not out:
                out.append(s)
            elif s.startswith("-"):
                out.append(" - " + s[1:])
            else:
                out.append(" + " + s)
        return "".join(out)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def to_json(self):
        return [[a, b, _fmt_coeff(c)] for (a, b), c in self.items_sorted()]

    @classmethod
    def from_json(cls, data):
        return cls({(int(a), int(b)): Fraction(c) for a, b, c in data})


def _as_laurent(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly({(0, 0): x})
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")


# ---------------------------------------------------------------------------
# RatFunc

def _mono_poly(a: int, b: int):
    return _CTX.from_dict({(a, b): 1})


_ONE_P = _CTX.from_dict({(0, 0): 1})
_ZERO_P = _CTX.from_dict({})


def _strip_monomial(p):
    """Return (p / m, exponents of m) where m is the largest monomial dividing p."""
    if p.is_zero():
        return p, (0, 0)
    exps = p.monoms()
    a = min(e[0] for e in exps)
    b = min(e[1] for e in exps)
    if a == 0 and b == 0:
        return p, (0, 0)
    return _CTX.from_dict({(e[0] - a, e[1] - b): c for e, c in p.to_dict().items()}), (a, b)


def _shifted(p, a: int, b: int):
    if a == 0 and b == 0:
        return p
    return p * _mono_poly(a, b)


def _poly_key(p):
    return tuple(sorted((tuple(e), int(c)) for e, c in p.to_dict().items()))


class RatFunc:
    """An element of Q(q, t) in canonical reduced form."""

    __slots__ = ("_shift", "_n", "_d", "_hash")

    def __init__(self, value=0):
        if isinstance(value, RatFunc):
            self._shift, self._n, self._d, self._hash = value._shift, value._n, value._d, value._hash
            return
        if isinstance(value, LaurentPoly):
            other = RatFunc.from_laurent(value)
        elif isinstance(value, (int, Fraction)):
            f = Fraction(value)
            other = RatFunc._make((0, 0), _CTX.from_dict({(0, 0): f.numerator}),
                                  _CTX.from_dict({(0, 0): f.denominator}))
        else:
            raise TypeError(f"cannot build RatFunc from {type(value).__name__}")
        self._shift, self._n, self._d, self._hash = other._shift, other._n, other._d, None

    @classmethod
    def _raw(cls, shift, n, d):
        obj = cls.__new__(cls)
        obj._shift, obj._n, obj._d, obj._hash = shift, n, d, None
        return obj

    @classmethod
    def _make(cls, shift, n, d, reduced: bool = False):
        if d.is_zero():
            raise ZeroDivisionError("zero denominator")
        if n.is_zero():
            return cls._raw((0, 0), _ZERO_P, _ONE_P)
        if not reduced:
            g = n.gcd(d)
            if g != _ONE_P:
                n, d = n / g, d / g
        n, (na, nb) = _strip_monomial(n)
        d, (da, db) = _strip_monomial(d)
        shift = (shift[0] + na - da, shift[1] + nb - db)
        lead = min(d.monoms(), key=lambda e: _order_key(tuple(e)))
        if d.to_dict()[tuple(lead)] < 0:
            n, d = -n, -d
        return cls._raw(shift, n, d)

    # -- construction -------------------------------------------------------
    @classmethod
    def from_laurent(cls, num: LaurentPoly, den: LaurentPoly | None = None) -> "RatFunc":
        (n_p, n_den), ns = _laurent_to_flint(_as_laurent(num))
        if den is None:
            (d_p, d_den), ds = (_ONE_P, 1), (0, 0)
        else:
            (d_p, d_den), ds = _laurent_to_flint(_as_laurent(den))
        # (n_p / n_den) / (d_p / d_den)
        return cls._make((ns[0] - ds[0], ns[1] - ds[1]), n_p * d_den, d_p * n_den)

    # -- accessors ----------------------------------------------------------
    @property
    def num(self) -> LaurentPoly:
        a, b = self._shift
        return LaurentPoly({(e[0] + a, e[1] + b): int(c) for e, c in self._n.to_dict().items()})

    @property
    def den(self) -> LaurentPoly:
        return LaurentPoly({tuple(e): int(c) for e, c in self._d.to_dict().items()})

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def __bool__(self):
        return not self._n.is_zero()

    def is_laurent(self) -> bool:
        return self._d == _ONE_P

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._n.is_zero():
            return other
        if other._n.is_zero():
            return self
        a = (min(self._shift[0], other._shift[0]), min(self._shift[1], other._shift[1]))
        n1 = _shifted(self._n, self._shift[0] - a[0], self._shift[1] - a[1])
        n2 = _shifted(other._n, other._shift[0] - a[0], other._shift[1] - a[1])
        d1, d2 = self._d, other._d
        if d1 == d2:
            return RatFunc._make(a, n1 + n2, d1)
        if d1 == _ONE_P:
            return RatFunc._make(a, n1 * d2 + n2, d2, reduced=True)
        if d2 == _ONE_P:
            return RatFunc._make(a, n1 + n2 * d1, d1, reduced=True)
        g = d1.gcd(d2)
        if g == _ONE_P:
            return RatFunc._make(a, n1 * d2 + n2 * d1, d1 * d2, reduced=True)
        d2g = d2 / g
        return RatFunc._make(a, n1 * d2g + n2 * (d1 / g), d1 * d2g)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(self._shift, -self._n, self._d)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._n.is_zero() or other._n.is_zero():
            return ZERO
        shift = (self._shift[0] + other._shift[0], self._shift[1] + other._shift[1])
        n1, d1, n2, d2 = self._n, self._d, other._n, other._d
        if d2 != _ONE_P:
            g = n1.gcd(d2)
            if g != _ONE_P:
                n1, d2 = n1 / g, d2 / g
        if d1 != _ONE_P:
            g = n2.gcd(d1)
            if g != _ONE_P:
                n2, d1 = n2 / g, d1 / g
        return RatFunc._make(shift, n1 * n2, d1 * d2, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self._n.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(q,t)")
        return RatFunc._make((-self._shift[0], -self._shift[1]), self._d, self._n, reduced=True)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if self._d == _ONE_P and self._n == _ONE_P:
            return RatFunc._raw((self._shift[0] * n, self._shift[1] * n), _ONE_P, _ONE_P)
        return RatFunc._make((self._shift[0] * n, self._shift[1] * n), self._n ** n, self._d ** n,
                             reduced=True)

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._shift == other._shift and self._n == other._n and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._shift, _poly_key(self._n), _poly_key(self._d)))
        return self._hash

    def normalize(self) -> "RatFunc":
        return RatFunc._make(self._shift, self._n, self._d)

    # -- evaluation / formatting ---------------------------------------------
    def evaluate(self, q0, t0) -> Fraction:
        """Exact value at a rational point; raises PoleError on a vanishing denominator."""
        den = self.den.evaluate(q0, t0)
        if den == 0:
            raise PoleError(f"denominator vanishes at q={q0}, t={t0}")
        return self.num.evaluate(q0, t0) / den

    def __str__(self):
        num, den = self.num, self.den
        if den == 1:
            return str(num)
        ns, ds = str(num), str(den)
        if len(num.terms) > 1:
            ns = f"({ns})"
        if len(den.terms) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"RatFunc({self})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "RatFunc":
        if isinstance(data, str):
            return parse_ratfunc(data)
        return cls.from_laurent(LaurentPoly.from_json(data["num"]), LaurentPoly.from_json(data["den"]))


def _laurent_to_flint(p: LaurentPoly):
    """Laurent polynomial -> ((integer poly, common denominator), monomial shift)."""
    terms = p._terms
    if not terms:
        return (_ZERO_P, 1), (0, 0)
    a = min(k[0] for k in terms)
    b = min(k[1] for k in terms)
    den = reduce(lcm, (c.denominator for c in terms.values()), 1)
    poly = _CTX.from_dict({(k[0] - a, k[1] - b): int(c * den) for k, c in terms.items()})
    return (poly, den), (a, b)


def _coerce(x):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, Fraction, LaurentPoly)):
        return RatFunc(x)
    return NotImplemented


def monomial(a: int, b: int, c=1) -> RatFunc:
    f = Fraction(c)
    if f == 0:
        return ZERO
    return RatFunc._make((a, b), _CTX.from_dict({(0, 0): f.numerator}),
                         _CTX.from_dict({(0, 0): f.denominator}), reduced=True)


ZERO = RatFunc._raw((0, 0), _ZERO_P, _ONE_P)
ONE = RatFunc._raw((0, 0), _ONE_P, _ONE_P)
Q = monomial(1, 0)
T = monomial(0, 1)
Q1, Q2, Q3 = Q, T, 1 / (Q * T)
SIGMA1 = Q1 + Q2 + Q3
SIGMA2 = Q1 * Q2 + Q1 * Q3 + Q2 * Q3


def rf_arith(op: str, a, b=None) -> RatFunc:
    """Dispatch form of the field operations (add, sub, mul, div, neg, inv)."""
    a = RatFunc(a)
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    b = RatFunc(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Parsing "(1 - q*t)/(1 - t)" style strings

_BINOPS = {ast.Add: lambda x, y: x + y, ast.Sub: lambda x, y: x - y,
           ast.Mult: lambda x, y: x * y, ast.Div: lambda x, y: x / y}


def parse_ratfunc(text: str) -> RatFunc:
    """Parse the canonical string form (or any +,-,*,/,^ expression in q, t)."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse rational function {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return RatFunc(node.value)
        if isinstance(node, ast.Name) and node.id in ("q", "t"):
            return Q if node.id == "q" else T
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            exp = ev(node.right)
            if not exp.is_laurent() or set(exp.num.terms) - {(0, 0)}:
                raise ValueError(f"non-integer exponent in {text!r}")
            e = exp.num.terms.get((0, 0), Fraction(0))
            if e.denominator != 1:
                raise ValueError(f"non-integer exponent in {text!r}")
            return ev(node.left) ** int(e)
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(tree)


# ---------------------------------------------------------------------------
# Half-integral powers of q (only used by the anti-involution)

class QHalf:
    """``value * q^(half/2)`` with ``half`` in {0, 1} after folding."""

    __slots__ = ("value", "half")

    def __init__(self, value, half: int = 0):
        value = RatFunc(value)
        extra, half = divmod(half, 2)
        self.value = value * Q**extra if extra else value
        self.half = half

    def __mul__(self, other):
        if not isinstance(other, QHalf):
            other = QHalf(other)
        return QHalf(self.value * other.value, self.half + other.half)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, QHalf):
            other = QHalf(other)
        if other.value.is_zero():
            return self
        if self.value.is_zero():
            return other
        if self.half != other.half:
            raise ValueError("sum mixes integral and half-integral powers of q")
        return QHalf(self.value + other.value, self.half)

    def __eq__(self, other):
        if not isinstance(other, QHalf):
            other = QHalf(other)
        return self.half == other.half and self.value == other.value

    def __hash__(self):
        return hash((self.value, self.half))

    def integral(self) -> RatFunc:
        if self.half:
            raise ValueError("result retains a half-integral power of q")
        return self.value

    def __repr__(self):
        return f"QHalf({self.value}, q^{self.half}/2)"


# ---------------------------------------------------------------------------
# One auxiliary variable

def _strip_zeros(coeffs: list) -> list:
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _valuation(coeffs: list) -> int:
    for i, c in enumerate(coeffs):
        if c:
            return i
    raise ZeroDivisionError("zero polynomial has no valuation")


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _strip_zeros(out)


def _series_div(num: list, den: list, order: int) -> list:
    """Power-series quotient num/den (den[0] != 0), coefficients 0..order."""
    inv0 = den[0].inverse()
    out = []
    for n in range(order + 1):
        acc = num[n] if n < len(num) else ZERO
        for k in range(1, min(n, len(den) - 1) + 1):
            if den[k]:
                acc = acc - den[k] * out[n - k]
        out.append(acc * inv0)
    return out


class AuxRatFunc:
    """``z^shift * N(z) / D(z)`` with N, D polynomials in z over Q(q, t).

    Coefficient lists are in ascending powers of z.
    """

    def __init__(self, num: Iterable, den: Iterable = (1,), shift: int = 0):
        self.num = _strip_zeros([RatFunc(c) for c in num])
        self.den = _strip_zeros([RatFunc(c) for c in den])
        self.shift = int(shift)
        if not self.den:
            raise ZeroDivisionError("zero denominator in AuxRatFunc")

    @classmethod
    def from_factors(cls, num_roots: Iterable, den_roots: Iterable, scale=1, shift: int = 0):
        """scale * z^shift * prod(1 - a/z) / prod(1 - b/z), as polynomials in z.

        ``(1 - a/z) = (z - a)/z``; the z's cancel when the factor counts match,
        otherwise they are absorbed into ``shift``.
        """
        num, den = [RatFunc(scale)], [ONE]
        na = nb = 0
        for a in num_roots:
            num = _poly_mul(num, [-RatFunc(a), ONE])
            na += 1
        for b in den_roots:
            den = _poly_mul(den, [-RatFunc(b), ONE])
            nb += 1
        return cls(num, den, shift - na + nb)

    def __mul__(self, other: "AuxRatFunc") -> "AuxRatFunc":
        return AuxRatFunc(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den),
                          self.shift + other.shift)

    def evaluate_at(self, z: RatFunc) -> RatFunc:
        z = RatFunc(z)
        n = sum((c * z**i for i, c in enumerate(self.num)), ZERO)
        d = sum((c * z**i for i, c in enumerate(self.den)), ZERO)
        return n / d * z**self.shift


def series_expand(f: AuxRatFunc, at: str, order: int) -> list[RatFunc]:
    """Coefficients c_0..c_order of f as a series in z^-1 (at='infinity') or z (at='zero')."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if not f.num:
        return [ZERO] * (order + 1)
    if at in ("infinity", "inf"):
        # z = 1/u:  N(z) = z^n Nr(u), D(z) = z^d Dr(u),  f = u^(d - n - shift) Nr/Dr
        n, d = len(f.num) - 1, len(f.den) - 1
        val = d - n - f.shift
        nr, dr = f.num[::-1], f.den[::-1]
    elif at in ("zero", "0"):
        v = _valuation(f.den)
        nr, dr = f.num, f.den[v:]
        val = f.shift - v
    else:
        raise ValueError(f"unknown expansion point {at!r}")
    lead = _valuation(nr)
    e = val + lead
    if e < 0:
        raise PoleError(f"pole of order {-e} at the expansion point")
    body = _series_div(nr[lead:], dr, order - e) if order >= e else []
    return ([ZERO] * e + body)[: order + 1]


def series_exp(log_coeffs: list, order: int) -> list[RatFunc]:
    """exp of a power series with zero constant term, truncated at ``order``.

    Uses E' = L' E, i.e. n E_n = sum_k k L_k E_(n-k).
    """
    if log_coeffs and log_coeffs[0]:
        raise ValueError("log series must have zero constant term")
    out = [ONE]
    for n in range(1, order + 1):
        acc = ZERO
        for k in range(1, n + 1):
            if k < len(log_coeffs) and log_coeffs[k]:
                acc = acc + k * log_coeffs[k] * out[n - k]
        out.append(acc / n)
    return out


# ---------------------------------------------------------------------------
# Two auxiliary variables

class BivarPoly:
    """Polynomial in z, w over Q(q, t): mapping (i, j) -> coefficient of z^i w^j."""

    def __init__(self, coeffs: Mapping[tuple[int, int], object]):
        self.coeffs = {k: RatFunc(v) for k, v in coeffs.items() if RatFunc(v)}

    def __mul__(self, other: "BivarPoly") -> "BivarPoly":
        out: dict[tuple[int, int], RatFunc] = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return BivarPoly(out)

    def __eq__(self, other):
        return isinstance(other, BivarPoly) and self.coeffs == other.coeffs

    def coeff(self, i: int, j: int) -> RatFunc:
        return self.coeffs.get((i, j), ZERO)

    def swapped(self) -> "BivarPoly":
        """g(w, z) from g(z, w)."""
        return BivarPoly({(j, i): c for (i, j), c in self.coeffs.items()})

    def evaluate(self, z, w) -> RatFunc:
        z, w = RatFunc(z), RatFunc(w)
        return sum((c * z**i * w**j for (i, j), c in self.coeffs.items()), ZERO)


def g_factored() -> BivarPoly:
    out = BivarPoly({(0, 0): 1})
    for qi in (Q1, Q2, Q3):
        out = out * BivarPoly({(1, 0): 1, (0, 1): -qi})
    return out


def g_poly() -> BivarPoly:
    """g(z, w) = z^3 - sigma1 z^2 w + sigma2 z w^2 - w^3."""
    return BivarPoly({(3, 0): 1, (2, 1): -SIGMA1, (1, 2): SIGMA2, (0, 3): -1})


# ---------------------------------------------------------------------------
# Evaluation fields

def rand_eval(f: RatFunc, q0, t0) -> Fraction:
    return RatFunc(f).evaluate(q0, t0)


class ExactField:
    """Coefficients live in Q(q, t) itself."""

    name = "exact"
    q, t, one, zero = Q, T, ONE, ZERO

    def coerce(self, x: RatFunc) -> RatFunc:
        return x

    def __repr__(self):
        return "ExactField()"

    def __eq__(self, other):
        return isinstance(other, ExactField)

    def __hash__(self):
        return hash("exact")


class PointField:
    """Coefficients specialized at a rational point (q0, t0)."""

    def __init__(self, q0, t0):
        self.q0, self.t0 = Fraction(q0), Fraction(t0)
        self.name = f"point(q={self.q0},t={self.t0})"
        self.q, self.t = self.q0, self.t0
        self.one, self.zero = Fraction(1), Fraction(0)

    def coerce(self, x) -> Fraction:
        if isinstance(x, RatFunc):
            return x.evaluate(self.q0, self.t0)
        return Fraction(x)

    @classmethod
    def random(cls, rng: random.Random) -> "PointField":
        def pick():
            while True:
                v = Fraction(rng.randint(-97, 97), rng.randint(1, 29))
                if v not in (0, 1, -1):
                    return v
        return cls(pick(), pick())

    def __repr__(self):
        return f"PointField({self.q0}, {self.t0})"

    def __eq__(self, other):
        return isinstance(other, PointField) and (self.q0, self.t0) == (other.q0, other.t0)

    def __hash__(self):
        return hash((self.q0, self.t0))


EXACT = ExactField()

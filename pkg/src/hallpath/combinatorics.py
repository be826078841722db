"""Partitions, boxes, (q,t)-contents, the Lambda-genus, and the coefficients c, c*, d.

Every coefficient is computed two ways (the Lambda-genus form and the
telescoped row product) and the two are required to agree.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

from .qtfield import (ONE, Q, T, ZERO, AuxRatFunc, PoleError, RatFunc, Q1, Q2, Q3,
                      monomial, series_exp, series_expand)

log = logging.getLogger(__name__)

__all__ = [
    "Partition", "BoxPos", "QTCharge", "ConsistencyError", "addable_boxes", "removable_boxes",
    "lambda_genus", "c_coeff", "cstar_coeff", "d_lambda", "c_lambda_form", "c_product_form",
    "cstar_lambda_form", "cstar_lambda_form_shifted", "cstar_product_form", "monodromy_check", "dual_monodromy_check",
    "monodromy_rhs", "dual_monodromy_rhs", "exp_identity_series", "partitions_upto",
    "partitions_of",
]


class ConsistencyError(AssertionError):
    """Two independent routes to the same quantity disagreed."""


class BoxPos(NamedTuple):
    row: int
    col: int

    @property
    def exps(self) -> tuple[int, int]:
        return (self.col - 1, self.row - 1)

    @property
    def content(self) -> RatFunc:
        return monomial(self.col - 1, self.row - 1)

    def to_json(self):
        return [self.row, self.col]


class Partition(tuple):
    """Weakly decreasing tuple of positive integers."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(p <= 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"not a partition: {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    def part(self, i: int) -> int:
        """lambda_i with 1-based rows; zero past the length."""
        return self[i - 1] if i <= len(self) else 0

    def boxes(self) -> list[BoxPos]:
        return [BoxPos(r, c) for r, n in enumerate(self, 1) for c in range(1, n + 1)]

    def __contains__(self, box) -> bool:
        if isinstance(box, BoxPos):
            return 1 <= box.row <= len(self) and 1 <= box.col <= self[box.row - 1]
        return tuple.__contains__(self, box)

    def add(self, box: BoxPos) -> "Partition":
        if box not in addable_boxes(self):
            raise ValueError(f"{tuple(box)} is not addable to {list(self)}")
        parts = list(self) + [0]
        parts[box.row - 1] += 1
        return Partition(parts)

    def remove(self, box: BoxPos) -> "Partition":
        if box not in removable_boxes(self):
            raise ValueError(f"{tuple(box)} is not removable from {list(self)}")
        parts = list(self)
        parts[box.row - 1] -= 1
        return Partition(parts)

    def __repr__(self):
        return f"Partition({list(self)})"

    def to_json(self):
        return list(self)


@lru_cache(maxsize=None)
def addable_boxes(lam: Partition) -> tuple[BoxPos, ...]:
    """Boxes x with lam + x a partition, top row first."""
    lam = Partition(lam)
    out = []
    for i in range(1, len(lam) + 2):
        if i == 1 or lam.part(i - 1) > lam.part(i):
            out.append(BoxPos(i, lam.part(i) + 1))
    return tuple(out)


@lru_cache(maxsize=None)
def removable_boxes(mu: Partition) -> tuple[BoxPos, ...]:
    """Boxes x with mu - x a partition, top row first."""
    mu = Partition(mu)
    return tuple(BoxPos(i, mu.part(i)) for i in range(1, len(mu) + 1)
                 if mu.part(i) > mu.part(i + 1))


def partitions_of(n: int) -> list[Partition]:
    def gen(n, cap):
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in gen(n - first, first):
                yield (first,) + rest
    return [Partition(p) for p in gen(n, n)]


def partitions_upto(n: int) -> list[Partition]:
    return [p for k in range(n + 1) for p in partitions_of(k)]


# ---------------------------------------------------------------------------
# Charges and the Lambda-genus

class QTCharge:
    """Finite integer combination of monomials q^i t^j."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], int] | None = None):
        self.terms = {k: int(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def of_boxes(cls, boxes: Iterable[BoxPos], dual: bool = False) -> "QTCharge":
        out: dict[tuple[int, int], int] = {}
        for b in boxes:
            a, c = b.exps
            k = (-a, -c) if dual else (a, c)
            out[k] = out.get(k, 0) + 1
        return cls(out)

    def __add__(self, other: "QTCharge") -> "QTCharge":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return QTCharge(out)

    def __neg__(self):
        return QTCharge({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "QTCharge":
        if isinstance(other, int):
            return QTCharge({k: v * other for k, v in self.terms.items()})
        out: dict[tuple[int, int], int] = {}
        for (a, b), u in self.terms.items():
            for (c, d), v in other.terms.items():
                out[(a + c, b + d)] = out.get((a + c, b + d), 0) + u * v
        return QTCharge(out)

    __rmul__ = __mul__

    def shift(self, a: int, b: int) -> "QTCharge":
        """Multiply every monomial by q^a t^b."""
        return QTCharge({(i + a, j + b): v for (i, j), v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, QTCharge) and self.terms == other.terms

    def __repr__(self):
        return f"QTCharge({self.terms})"


def charge(*pairs) -> QTCharge:
    """charge(((i, j), mult), ...) convenience constructor."""
    return QTCharge(dict(pairs))


ONE_MINUS_Q_ONE_MINUS_T = QTCharge({(0, 0): 1, (1, 0): -1, (0, 1): -1, (1, 1): 1})


def lambda_genus(phi: QTCharge) -> RatFunc:
    """Lambda(sum phi_ij q^i t^j) = prod (1 - q^i t^j)^phi_ij."""
    num, den = ONE, ONE
    for (i, j), m in phi.terms.items():
        if (i, j) == (0, 0):
            if m > 0:
                log.warning("Lambda-genus evaluated at a charge with a positive constant term")
                return ZERO
            raise PoleError("Lambda-genus has a negative multiple of the constant monomial")
        f = 1 - monomial(i, j)
        if m > 0:
            num = num * f**m
        else:
            den = den * f**(-m)
    return num / den


# ---------------------------------------------------------------------------
# c(lambda; x)

def _row_of_addable(lam: Partition, x: BoxPos) -> int:
    if x not in addable_boxes(lam):
        raise ValueError(f"box {tuple(x)} is not addable to {list(lam)}")
    return x.row


def _row_of_removable(mu: Partition, x: BoxPos) -> int:
    if x not in removable_boxes(mu):
        raise ValueError(f"box {tuple(x)} is not removable from {list(mu)}")
    return x.row


def c_lambda_form(lam: Partition, x: BoxPos) -> RatFunc:
    """-Lambda(-x^-1 + (1-q)(1-t) B_lam x^-1 + 1)."""
    _row_of_addable(lam, x)
    a, b = x.exps
    ch = (QTCharge({(-a, -b): -1}) + QTCharge({(0, 0): 1})
          + (ONE_MINUS_Q_ONE_MINUS_T * QTCharge.of_boxes(lam.boxes())).shift(-a, -b))
    return -lambda_genus(ch)


def c_product_form(lam: Partition, x: BoxPos) -> RatFunc:
    """-(1-t) prod_{j != i} (1 - q^{l_j-l_i} t^{j-i+1}) / (1 - q^{l_j-l_i} t^{j-i}).

    Rows past L = len(lam)+1 have l_j = 0 and telescope (t-adically) to the
    single factor 1 / (1 - q^{-l_i} t^{L+1-i}).
    """
    i = _row_of_addable(lam, x)
    li = lam.part(i)
    L = len(lam) + 1
    out = -(1 - T)
    for j in range(1, L + 1):
        if j == i:
            continue
        d = lam.part(j) - li
        out = out * (1 - monomial(d, j - i + 1)) / (1 - monomial(d, j - i))
    return out / (1 - monomial(-li, L + 1 - i))


@lru_cache(maxsize=None)
def c_coeff(lam: Partition, x: BoxPos) -> RatFunc:
    lam, x = Partition(lam), BoxPos(*x)
    a, b = c_lambda_form(lam, x), c_product_form(lam, x)
    if a != b:
        raise ConsistencyError(f"c({list(lam)}; {tuple(x)}): Lambda form {a} != product form {b}")
    return a


# ---------------------------------------------------------------------------
# c*(mu; x)

def cstar_lambda_form(mu: Partition, x: BoxPos) -> RatFunc:
    """x^-1 Lambda(-(1-q)(1-t) B*_lam x), lam = mu - x, taken literally over the finite box sum.

    This differs from :func:`cstar_coeff` by the factor (1-qt)/(1-qtx); it is
    kept because the ratio law with d_lam is stated for this form.
    """
    _row_of_removable(mu, x)
    lam = mu.remove(x)
    a, b = x.exps
    ch = -(ONE_MINUS_Q_ONE_MINUS_T * QTCharge.of_boxes(lam.boxes(), dual=True)).shift(a, b)
    return monomial(-a, -b) * lambda_genus(ch)


def cstar_lambda_form_shifted(mu: Partition, x: BoxPos) -> RatFunc:
    """x^-1 Lambda(-(1-q)(1-t) B*_lam x + qt x - qt): the Lambda-form that matches the row product."""
    _row_of_removable(mu, x)
    lam = mu.remove(x)
    a, b = x.exps
    ch = (-(ONE_MINUS_Q_ONE_MINUS_T * QTCharge.of_boxes(lam.boxes(), dual=True)).shift(a, b)
          + QTCharge({(a + 1, b + 1): 1}) - QTCharge({(1, 1): 1}))
    return monomial(-a, -b) * lambda_genus(ch)


def cstar_product_form(mu: Partition, x: BoxPos) -> RatFunc:
    """x^-1 / (1-q) prod_{j != i} (1 - q^{l_i-l_j+1} t^{i-j+1}) / (1 - q^{l_i-l_j+1} t^{i-j}).

    Here lam = mu - x.  The rows j > L = len(lam)+1 have l_j = 0 and telescope
    t^-1-adically to the single factor (1 - q^{l_i+1} t^{i-L}).
    """
    i = _row_of_removable(mu, x)
    lam = mu.remove(x)
    li = lam.part(i)
    L = max(len(lam) + 1, i)
    out = monomial(-li, -(i - 1)) / (1 - Q)
    for j in range(1, L + 1):
        if j == i:
            continue
        d = li - lam.part(j) + 1
        out = out * (1 - monomial(d, i - j + 1)) / (1 - monomial(d, i - j))
    return out * (1 - monomial(li + 1, i - L))


@lru_cache(maxsize=None)
def cstar_coeff(mu: Partition, x: BoxPos) -> RatFunc:
    """The f-coefficient: row product, cross-checked against the shifted Lambda-form."""
    mu, x = Partition(mu), BoxPos(*x)
    a, b = cstar_product_form(mu, x), cstar_lambda_form_shifted(mu, x)
    if a != b:
        raise ConsistencyError(f"c*({list(mu)}; {tuple(x)}): product form {a} != Lambda form {b}")
    return a


@lru_cache(maxsize=None)
def d_lambda(lam: Partition) -> RatFunc:
    lam = Partition(lam)
    boxes = lam.boxes()
    B = QTCharge.of_boxes(boxes)
    Bs = QTCharge.of_boxes(boxes, dual=True)
    prod = ONE
    for b in boxes:
        prod = prod * b.content
    return prod * lambda_genus(-Bs + ONE_MINUS_Q_ONE_MINUS_T * B * Bs)


# ---------------------------------------------------------------------------
# Monodromy

def monodromy_rhs(x: RatFunc, y: RatFunc) -> RatFunc:
    return -((x - T * y) * (x - Q * y) * (y - Q * T * x)) / ((y - T * x) * (y - Q * x) * (x - Q * T * y))


def dual_monodromy_rhs(x: RatFunc, y: RatFunc) -> RatFunc:
    return -((y - T * x) * (y - Q * x) * (x - Q * T * y)) / ((x - T * y) * (x - Q * y) * (y - Q * T * x))


def monodromy_check(lam: Partition, x: BoxPos, y: BoxPos) -> tuple[RatFunc, RatFunc]:
    lam, x, y = Partition(lam), BoxPos(*x), BoxPos(*y)
    add = addable_boxes(lam)
    if x == y or x not in add or y not in add:
        raise ValueError("monodromy needs two distinct addable boxes")
    lhs = (c_coeff(lam, x) * c_coeff(lam.add(x), y)) / (c_coeff(lam, y) * c_coeff(lam.add(y), x))
    return lhs, monodromy_rhs(x.content, y.content)


def dual_monodromy_check(mu: Partition, x: BoxPos, y: BoxPos) -> tuple[RatFunc, RatFunc]:
    mu, x, y = Partition(mu), BoxPos(*x), BoxPos(*y)
    rem = removable_boxes(mu)
    if x == y or x not in rem or y not in rem:
        raise ValueError("dual monodromy needs two distinct removable boxes")
    lhs = (cstar_coeff(mu, x) * cstar_coeff(mu.remove(x), y)) / (
        cstar_coeff(mu, y) * cstar_coeff(mu.remove(y), x))
    return lhs, dual_monodromy_rhs(x.content, y.content)


def exp_identity_series(order: int) -> tuple[list[RatFunc], list[RatFunc]]:
    """Both sides of exp[-sum u^m (1-q^m)(1-t^m)(1-(qt)^-m)/m] = -g(w,z)/g(z,w), u = w/z.

    Returned as coefficient lists in u up to ``order``.
    """
    log_coeffs = [ZERO] + [-(1 - Q**m) * (1 - T**m) * (1 - (Q * T) ** -m) / m
                           for m in range(1, order + 1)]
    lhs = series_exp(log_coeffs, order)
    # g(w,z)/z^3 = prod (u - q_i),  g(z,w)/z^3 = prod (1 - q_i u)
    num, den = [-ONE], [ONE]
    for qi in (Q1, Q2, Q3):
        num = _lin_mul(num, -qi, ONE)
        den = _lin_mul(den, ONE, -qi)
    rhs = series_expand(AuxRatFunc(num, den), "zero", order)
    return lhs, rhs


def _lin_mul(poly: list, c0: RatFunc, c1: RatFunc) -> list:
    out = [ZERO] * (len(poly) + 1)
    for k, a in enumerate(poly):
        out[k] = out[k] + a * c0
        out[k + 1] = out[k + 1] + a * c1
    return out

"""Spherical elements: e_m, f_m, Y, A, psi^{+-}, and an independent oracle for e, f, psi on V_0."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .combinatorics import (ConsistencyError, Partition, addable_boxes, c_coeff, cstar_coeff,
                            removable_boxes)
from .polyrep import State, TruncationPolicy, Vect, apply_word, delta_eigenvalue
from .qtfield import (EXACT, ONE, Q, Q3, T, ZERO, AuxRatFunc, RatFunc, series_exp,
                      series_expand)
from .words import A_word, LevelError, Word, e_word, f_word, Y_word

__all__ = [
    "e_act", "f_act", "ft_e_act", "ft_f_act", "Y_act", "A_act", "psi_rational", "psi_exponential",
    "psi_coeffs", "psi_eigenvalue", "psi_act", "h_poly", "level0", "PSI_ORDER",
]

PSI_ORDER = 6


def level0(lam: Iterable[int]) -> State:
    return State("0", Partition(lam), ())


def _need_level0(v: Vect):
    if v.level not in (0, None):
        raise LevelError(f"expected a level-0 vector, got level {v.level}")


def e_act(m: int, v: Vect, policy: TruncationPolicy | None = None, field=EXACT) -> Vect:
    _need_level0(v)
    return apply_word(e_word(m), v, policy, field)


def f_act(m: int, v: Vect, policy: TruncationPolicy | None = None, field=EXACT) -> Vect:
    _need_level0(v)
    return apply_word(f_word(m), v, policy, field)


def Y_act(ms: Iterable[int], v: Vect, policy: TruncationPolicy | None = None, field=EXACT) -> Vect:
    _need_level0(v)
    return apply_word(Y_word(ms), v, policy, field)


def A_act(ms: Iterable[int], v: Vect, policy: TruncationPolicy | None = None, field=EXACT) -> Vect:
    return apply_word(A_word(ms), v, policy, field)


# ---------------------------------------------------------------------------
# Sum-over-boxes oracle: never leaves level 0

_FT_E_SCALE = -1 / ((1 - Q) * (1 - T))


def ft_e_act(m: int, v: Vect) -> Vect:
    _need_level0(v)
    out = []
    for s, c in v.terms.items():
        for x in addable_boxes(s.lam):
            coeff = _FT_E_SCALE * c_coeff(s.lam, x) * x.content ** m
            out.append((level0(s.lam.add(x)), c * coeff))
    return Vect(out, 0)


def ft_f_act(m: int, v: Vect) -> Vect:
    _need_level0(v)
    out = []
    for s, c in v.terms.items():
        for x in removable_boxes(s.lam):
            coeff = cstar_coeff(s.lam, x) * x.content ** m
            out.append((level0(s.lam.remove(x)), c * coeff))
    return Vect(out, 0)


# ---------------------------------------------------------------------------
# psi eigenvalues

def _prefactor() -> AuxRatFunc:
    # -(1 - q^-1 t^-1 z^-1) / (1 - z^-1)
    return AuxRatFunc.from_factors([Q3], [ONE], scale=-1)


def _at(sign: str) -> str:
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return "infinity" if sign == "+" else "zero"


def psi_rational(sign: str, lam: Iterable[int], order: int) -> list[RatFunc]:
    """Expand the closed product form, in z^-1 for psi+ and in z for psi-."""
    lam = Partition(lam)
    num_roots, den_roots = [], []
    for b in lam.boxes():
        x = b.content
        num_roots += [x / Q, x / T, Q * T * x]
        den_roots += [Q * x, T * x, x / (Q * T)]
    f = _prefactor() * AuxRatFunc.from_factors(num_roots, den_roots)
    return series_expand(f, _at(sign), order)


def _c(m: int) -> RatFunc:
    return (1 - Q ** m) * (1 - T ** m) * (1 - (Q * T) ** (-m))


def psi_exponential(sign: str, lam: Iterable[int], order: int) -> list[RatFunc]:
    """Prefactor times the truncated exponential built from Delta / Delta* eigenvalues."""
    s = level0(lam)
    log = [ZERO]
    for m in range(1, order + 1):
        if sign == "+":
            log.append(-delta_eigenvalue(s, m) * _c(m) / m)
        else:
            log.append(delta_eigenvalue(s, -m) * _c(m) / m)
    ex = series_exp(log, order)
    pre = series_expand(_prefactor(), _at(sign), order)
    return [sum((pre[i] * ex[n - i] for i in range(n + 1)), ZERO) for n in range(order + 1)]


@lru_cache(maxsize=None)
def _psi_cached(sign: str, lam: Partition, order: int) -> tuple[RatFunc, ...]:
    a = psi_rational(sign, lam, order)
    b = psi_exponential(sign, lam, order)
    for n, (x, y) in enumerate(zip(a, b)):
        if x != y:
            raise ConsistencyError(
                f"psi{sign}_{n} on I_{tuple(lam)}: product form {x} != exponential form {y}")
    return tuple(a)


def psi_coeffs(sign: str, lam: Iterable[int], order: int = PSI_ORDER) -> list[RatFunc]:
    """psi+-_n eigenvalues on I_lam for n = 0..order (psi-_n means the coefficient of z^n).

    Both the product form and the exponential form are computed; any
    disagreement raises ConsistencyError.
    """
    return list(_psi_cached(sign, Partition(lam), order))


def psi_eigenvalue(sign: str, n: int, lam: Iterable[int]) -> RatFunc:
    if n < 0:
        return ZERO
    return _psi_cached(sign, Partition(lam), max(n, 1))[n]


def psi_act(sign: str, n: int, v: Vect, field=EXACT) -> Vect:
    _need_level0(v)
    out = []
    for s, c in v.terms.items():
        ev = field.coerce(psi_eigenvalue(sign, n, s.lam))
        if ev:
            out.append((s, c * ev))
    return Vect(out, 0)


# ---------------------------------------------------------------------------

def h_poly(j: int) -> dict[tuple[int, int], int]:
    """h_j(z1, z2) = (z1^(j+1) - z2^(j+1)) / (z1 - z2) as {(a, b): coeff}."""
    m = j + 1
    if m > 0:
        return {(m - 1 - b, b): 1 for b in range(m)}
    if m == 0:
        return {}
    # -(z1 z2)^m h_{-m-1}
    return {(a + m, b + m): -c for (a, b), c in h_poly(-m - 1).items()}

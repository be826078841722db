"""Word rewriting in the positive half of the algebra.

Three tools live here:

* affine Hecke normal forms ``T_w z^a`` inside one level,
* the special-form normalization: every word from level k to level 0 becomes a
  combination of special words (only ``d-``, ``phi``, ``z``), ``Y`` words and
  products ``Y...Y * special``,
* the anti-involution ``theta`` exchanging the two halves.

Every rewrite is checked against the polynomial representation (``eval_oracle``)
by the instance builders at the bottom of the module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .eha import h_poly
from .polyrep import TruncationOverflow, TruncationPolicy, Vect, apply_word, enumerate_states
from .qtfield import EXACT, ONE, Q, QHalf, RatFunc, T as QT, ZERO
from .words import (DMINUS, DPLUS, PHI, STEP, Delta, DeltaStar, Expr, Letter, LevelError, Word,
                    Y_word, e_word, f_word, z as zl)

__all__ = [
    "ScopeError", "MeasureError", "Special", "SpecialTerm", "to_special", "special_expr",
    "hecke_normalize", "push_z_through_Tinv", "alpha_beta", "theta", "theta_expr", "expand_phi",
    "eval_oracle", "oracle_equal", "OracleMatrix", "soundness_instances", "theta_instances",
    "measure_checks", "alpha_beta_residual", "integral_terms",
]


class ScopeError(ValueError):
    """The input is not a positive-half word from some level k >= 0 to level 0."""


class MeasureError(RuntimeError):
    """A recursive call did not shrink the number of d- and phi letters."""


def _acc(d: dict, key, c) -> None:
    v = d.get(key)
    v = c if v is None else v + c
    if v:
        d[key] = v
    else:
        d.pop(key, None)


# ---------------------------------------------------------------------------
# Laurent polynomials in z_1..z_k as {exponent tuple: RatFunc}

def _mono_mul(e1: tuple, e2: tuple) -> tuple:
    return tuple(a + b for a, b in zip(e1, e2))


def _swap(e: tuple, i: int) -> tuple:
    e = list(e)
    e[i - 1], e[i] = e[i], e[i - 1]
    return tuple(e)


def _h_at(j: int, e_len: int, i: int) -> dict:
    """h_j(z_i, z_{i+1}) embedded in k = e_len variables."""
    out = {}
    for (a, b), c in h_poly(j).items():
        e = [0] * e_len
        e[i - 1], e[i] = a, b
        out[tuple(e)] = RatFunc(c)
    return out


@lru_cache(maxsize=None)
def _divdiff(e: tuple, i: int) -> tuple:
    """(z^e - z^{s_i e}) / (z_{i+1} - z_i) as ((exps, coeff), ...)."""
    a, b = e[i - 1], e[i]
    if a == b:
        return ()
    rest = list(e)
    rest[i - 1] = rest[i] = 0
    m = min(a, b)
    rest[i - 1] += m
    rest[i] += m
    sign = -1 if a > b else 1
    out = {}
    for ex, c in _h_at(abs(a - b) - 1, len(e), i).items():
        _acc(out, _mono_mul(ex, tuple(rest)), c * sign)
    return tuple(sorted(out.items()))


@lru_cache(maxsize=None)
def _push_through_T(e: tuple, i: int) -> tuple:
    """z^e T_i = T_i z^{s_i e} + D_i(z^e); returns D_i(z^e) = (1-q) z_{i+1} (z^e - z^{s e})/(z_{i+1} - z_i)."""
    unit = [0] * len(e)
    unit[i] = 1
    unit = tuple(unit)
    return tuple((_mono_mul(ex, unit), c * (1 - Q)) for ex, c in _divdiff(e, i))


# ---------------------------------------------------------------------------
# Affine Hecke normal form

def _length(p: tuple) -> int:
    return sum(1 for a in range(len(p)) for b in range(a + 1, len(p)) if p[a] > p[b])


def reduced_word(p: tuple) -> tuple[int, ...]:
    """Lexicographically minimal reduced word of a permutation in one-line notation."""
    p = list(p)
    out = []
    while True:
        pos = {v: i for i, v in enumerate(p)}
        for j in range(1, len(p)):
            if pos[j + 1] < pos[j]:           # left descent at j
                out.append(j)
                a, b = pos[j], pos[j + 1]
                p[a], p[b] = j + 1, j
                break
        else:
            return tuple(out)


def _hecke_times(nf: dict, letter: Letter) -> dict:
    out: dict = {}
    if letter.kind == "z":
        for (p, e), c in nf.items():
            e2 = list(e)
            e2[letter.i - 1] += letter.a
            _acc(out, (p, tuple(e2)), c)
        return out
    if letter.kind != "T":
        raise ScopeError(f"{letter} is not an affine Hecke letter")
    i = letter.i
    if letter.a == -1:
        # T^-1 = q^-1 T - q^-1 (1 - q)
        for key, c in _hecke_times(nf, Letter("T", i, 1)).items():
            _acc(out, key, c / Q)
        for key, c in nf.items():
            _acc(out, key, -c * (1 - Q) / Q)
        return out
    for (p, e), c in nf.items():
        for ex, c2 in _push_through_T(e, i):
            _acc(out, (p, ex), c * c2)
        sp = _swap(p, i)
        se = _swap(e, i)
        if p[i - 1] < p[i]:
            _acc(out, (sp, se), c)
        else:
            # T_w T_i = (1-q) T_w + q T_{w s_i} when w s_i is shorter
            _acc(out, (p, se), c * (1 - Q))
            _acc(out, (sp, se), c * Q)
    return out


def hecke_normalize(e: Word | Expr) -> Expr:
    """Rewrite a combination of z/T words at one level k >= 1 in the basis T_w z^a."""
    expr = _as_expr(e)
    k = expr.source
    if expr.target != k or k < 1:
        raise ScopeError("hecke_normalize works on loops at a positive level")
    total: dict = {}
    for w, c in expr.items():
        nf = {(tuple(range(1, k + 1)), (0,) * k): c}
        for letter in w.letters:
            nf = _hecke_times(nf, letter)
        for key, c2 in nf.items():
            _acc(total, key, c2)
    terms = []
    for (p, ex), c in total.items():
        letters = [Letter("T", j, 1) for j in reduced_word(p)]
        letters += [zl(j + 1, a) for j, a in enumerate(ex) if a]
        terms.append((Word(tuple(letters), k), c))
    return Expr(terms, k, k)


def push_z_through_Tinv(i: int, a: int, level: int | None = None,
                        mirrored: bool = False) -> tuple[Expr, Expr]:
    """(lhs, rhs) of z_i^a T_i^-1 = T_i^-1 z_{i+1}^a - q^-1(1-q) h_{a-1}(z_i, z_{i+1}) z_i.

    With ``mirrored`` the rule for z_{i+1}^a T_i^-1 (opposite sign of the tail).
    """
    k = level if level is not None else i + 1
    if not 1 <= i < k:
        raise LevelError(f"T{i} does not exist at level {k}")
    src, dst = (i + 1, i) if mirrored else (i, i + 1)
    tinv = Letter("T", i, -1)
    lhs = Expr.of(Word(((zl(src, a),) if a else ()) + (tinv,), k))
    rhs = Expr.of(Word((tinv,) + ((zl(dst, a),) if a else ()), k))
    sign = 1 if mirrored else -1
    unit = [0] * k
    unit[i - 1] = 1
    for ex, c in _h_at(a - 1, k, i).items():
        ex = _mono_mul(ex, tuple(unit))
        letters = tuple(zl(j + 1, b) for j, b in enumerate(ex) if b)
        rhs = rhs + Expr.of(Word(letters, k), c * sign * (1 - Q) / Q)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Special elements

D = "D"


@dataclass(frozen=True, order=True)
class Special:
    """A special word in canonical form.

    ``tokens`` is a sequence of ``"D"`` (a d-) and ``("P", a)`` (z_1^a phi),
    read left to right from level 0; ``f`` is the trailing monomial in
    z_1..z_k.  Every special word can be brought to this form by moving z's
    to the right through d- and phi.
    """

    tokens: tuple
    f: tuple

    @property
    def level(self) -> int:
        return len(self.f)

    @property
    def count(self) -> int:
        """Number of d- and phi letters: the induction measure."""
        return len(self.tokens)

    def with_f(self, f: tuple) -> "Special":
        return Special(self.tokens, tuple(f))

    def times_z(self, e: tuple) -> "Special":
        return Special(self.tokens, _mono_mul(self.f, e))

    def append_dminus(self) -> "Special":
        return Special(self.tokens + (D,), self.f + (0,))

    def append_phi(self) -> "Special":
        if not self.f:
            raise ScopeError("phi at level 0 leaves the positive half")
        return Special(self.tokens + (("P", self.f[0]),), self.f[1:] + (0,))

    def letters(self) -> tuple:
        out: list = []
        for tok in self.tokens:
            if tok == D:
                out.append(DMINUS)
            else:
                if tok[1]:
                    out.append(zl(1, tok[1]))
                out.append(PHI)
        out += [zl(j + 1, a) for j, a in enumerate(self.f) if a]
        return tuple(out)

    def word(self) -> Word:
        return Word(self.letters(), self.level)

    def y_indices(self) -> tuple:
        """For a level-1 special A_{m_1..m_n}, the indices m_1..m_n."""
        if self.level != 1:
            raise ValueError("only level-1 special words are A-words")
        return tuple(tok[1] for tok in self.tokens[1:]) + self.f


_MEASURE = {"checks": 0}


def _descend(parent: Special | tuple, child: Special | tuple) -> None:
    pc = parent.count if isinstance(parent, Special) else len(parent)
    cc = child.count if isinstance(child, Special) else len(child)
    if cc >= pc:
        raise MeasureError(f"recursion from measure {pc} to {cc}")
    _MEASURE["checks"] += 1


def measure_checks() -> int:
    """How many recursive descents have been checked so far in this process."""
    return _MEASURE["checks"]


def _items(d: dict) -> tuple:
    return tuple(sorted(d.items(), key=lambda kv: repr(kv[0])))


@lru_cache(maxsize=None)
def _base_T(tokens: tuple, i: int) -> tuple:
    """(special with tokens and f = 0) * T_i as special words."""
    k = sum(1 for t in tokens if t == D)
    zero = (0,) * k
    last, prev = tokens[-1], tokens[:-1]
    out: dict = {}
    if i < k - 1:
        if last == D:
            child = Special(prev, (0,) * (k - 1))
            _descend(tokens, child)
            for s2, c in _special_T(child, i):
                _acc(out, s2.append_dminus(), c)
        else:
            child = Special(prev, (last[1],) + (0,) * (k - 1))
            _descend(tokens, child)
            for s2, c in _special_T(child, i + 1):
                _acc(out, s2.append_phi(), c)
        return _items(out)
    before = prev[-1]
    if last == D and before == D:
        # d-^2 T_{k-1} = d-^2
        _acc(out, Special(tokens, zero), ONE)
    elif last == D:
        # phi d- T_{k-1} = d- phi + (1-q) phi d-   (z_1^a rides along)
        _acc(out, Special(prev[:-1] + (D, before), zero), ONE)
        _acc(out, Special(tokens, zero), 1 - Q)
    elif before == D:
        # d- phi T_{k-1} = q phi d-
        _acc(out, Special(prev[:-1] + (last, D), zero), Q)
    else:
        # phi z1^a phi T_{k-1} = z2^a phi^2 T_{k-1} = z2^a T_1 phi^2
        f = [0] * k
        f[0], f[1] = before[1], last[1]
        child = Special(prev[:-1], tuple(f))
        _descend(tokens, child)
        for s2, c in _special_T(child, 1):
            _acc(out, s2.append_phi().append_phi(), c)
    return _items(out)


@lru_cache(maxsize=None)
def _special_T(sp: Special, i: int) -> tuple:
    k = sp.level
    if not 1 <= i <= k - 1:
        raise LevelError(f"T{i} does not exist at level {k}")
    out: dict = {}
    for ex, c in _push_through_T(sp.f, i):
        _acc(out, sp.with_f(ex), c)
    sf = _swap(sp.f, i)
    for s2, c in _base_T(sp.tokens, i):
        _acc(out, s2.times_z(sf), c)
    return _items(out)


def _special_Tinv(sp: Special, i: int) -> tuple:
    out: dict = {}
    for s2, c in _special_T(sp, i):
        _acc(out, s2, c / Q)
    _acc(out, sp, -(1 - Q) / Q)
    return _items(out)


# A term is (ys, special): the product Y_{ys[0]} ... Y_{ys[-1]} * special,
# where special is None for a level-0 term.
_UNIT = ((), None)


def _term_times(term: tuple, letter: Letter) -> dict:
    ys, sp = term
    if sp is None:
        if letter != DMINUS:
            raise ScopeError(f"{letter} cannot follow a level-0 element in the positive half")
        return {(ys, Special((D,), (0,))): ONE}
    return {(ys + ys2, sp2): c for (ys2, sp2), c in _special_times(sp, letter)}


def _term_times_z(term: tuple, e: tuple) -> tuple:
    ys, sp = term
    if sp is None:
        if any(e):
            raise LevelError("no z variables at level 0")
        return term
    return ys, sp.times_z(e)


@lru_cache(maxsize=None)
def _special_times(sp: Special, letter: Letter) -> tuple:
    kind = letter.kind
    if kind == "d-":
        return ((((), sp.append_dminus()), ONE),)
    if kind == "phi":
        return ((((), sp.append_phi()), ONE),)
    if kind == "z":
        e = [0] * sp.level
        e[letter.i - 1] = letter.a
        return ((((), sp.times_z(tuple(e))), ONE),)
    if kind == "T":
        pairs = _special_T(sp, letter.i) if letter.a == 1 else _special_Tinv(sp, letter.i)
        return tuple((((), s2), c) for s2, c in pairs)
    if kind == "d+":
        return _special_dplus(sp)
    raise ScopeError(f"{letter} is outside the positive half")


@lru_cache(maxsize=None)
def _special_dplus(sp: Special) -> tuple:
    k = sp.level
    if k == 1:
        return ((((sp.y_indices(),), None), ONE),)
    out: dict = {}
    last = sp.tokens[-1]
    g = sp.f[1:]
    if last == D:
        # d- z1^a1 d+ = z1^a1 d- d+ and d- d+ = d+ d- - (q-1) phi
        child = Special(sp.tokens[:-1], (sp.f[0],) + (0,) * (k - 2))
        _descend(sp, child)
        for term, c in _special_dplus(child):
            for term2, c2 in _term_times(term, DMINUS).items():
                _acc(out, _term_times_z(term2, g), c * c2)
        _acc(out, ((), child.append_phi().times_z(g)), -(Q - 1))
    else:
        # z1^a phi z1^a1 d+ = z1^a z2^a1 phi d+ = q z1^a z2^a1 T1^-1 d+ phi
        f = [0] * k
        f[0], f[1] = last[1], sp.f[0]
        child = Special(sp.tokens[:-1], tuple(f))
        for s2, c in _special_Tinv(child, 1):
            _descend(sp, s2)
            for term, c2 in _special_dplus(s2):
                for term2, c3 in _term_times(term, PHI).items():
                    _acc(out, _term_times_z(term2, g), Q * c * c2 * c3)
    return _items(out)


@dataclass(frozen=True, order=True)
class SpecialTerm:
    """``Y_{ys[0]} ... Y_{ys[-1]} * special`` (special is None at level 0)."""

    ys: tuple
    special: Special | None

    @property
    def level(self) -> int:
        return 0 if self.special is None else self.special.level

    @property
    def kind(self) -> str:
        if not self.ys:
            return "unit" if self.special is None else "special"
        if self.special is None and len(self.ys) == 1:
            return "Y"
        return "factorizable"

    def factors(self) -> tuple[Word | None, Word]:
        """The pair (X, rest) with X a non-unit level-0 element, or (None, word)."""
        if self.kind in ("unit", "special", "Y"):
            return None, self.word()
        if self.special is None:
            return _ys_word(self.ys[:-1]), Y_word(self.ys[-1])
        return _ys_word(self.ys), self.special.word()

    def word(self) -> Word:
        out = _ys_word(self.ys)
        if self.special is not None:
            out = out * self.special.word()
        return out

    def __str__(self):
        parts = [f"Y[{','.join(map(str, y))}]" for y in self.ys]
        if self.special is not None:
            parts.append(f"<{self.special.word()}>")
        return " * ".join(parts) if parts else "1_0"

    def to_json(self):
        x, rest = self.factors()
        return {"kind": self.kind, "ys": [list(y) for y in self.ys],
                "special": None if self.special is None else str(self.special.word()),
                "X": None if x is None else str(x), "rest": str(rest), "word": str(self.word())}


def _ys_word(ys: tuple) -> Word:
    out = Word((), 0)
    for y in ys:
        out = out * Y_word(y)
    return out


def _as_expr(e) -> Expr:
    if isinstance(e, Word):
        return Expr.of(e)
    if isinstance(e, Expr):
        return e
    raise TypeError(f"expected a Word or Expr, got {type(e).__name__}")


def _check_scope(w: Word) -> None:
    if w.target != 0:
        raise ScopeError(f"{w} must end (on the left) at level 0, not {w.target}")
    for letter, level in zip(w.letters, w.letter_levels()):
        if letter.kind not in ("d+", "d-", "phi", "z", "T"):
            raise ScopeError(f"{letter} is not a positive-half letter")
        after = level + STEP.get(letter.kind, 0)
        if level < 0 or after < 0 or (letter.kind == "phi" and level < 1):
            raise ScopeError(f"{w} leaves the positive half at {letter} (level {level})")


def to_special(e: Word | Expr) -> list[tuple[SpecialTerm, RatFunc]]:
    """Rewrite an element of 1_0 B 1_k as special words, Y words and factorizable products.

    Raises ScopeError for words outside the positive half, MeasureError if a
    recursive step fails to shrink the number of d- and phi letters.
    """
    expr = _as_expr(e)
    total: dict = {}
    for w, c in expr.items():
        _check_scope(w)
        combo = {_UNIT: ONE}
        for letter in w.letters:
            nxt: dict = {}
            for term, c1 in combo.items():
                for term2, c2 in _term_times(term, letter).items():
                    _acc(nxt, term2, c1 * c2)
            combo = nxt
        for term, c1 in combo.items():
            _acc(total, term, c * c1)
    return sorted(((SpecialTerm(*t), c) for t, c in total.items()), key=lambda kv: str(kv[0]))


def special_expr(result: Iterable[tuple[SpecialTerm, RatFunc]], source: int) -> Expr:
    return Expr([(t.word(), c) for t, c in result], source, 0)


# ---------------------------------------------------------------------------
# The alpha/beta decomposition at level 2

def _lp_add(a: dict, b: dict, s=ONE) -> dict:
    out = dict(a)
    for k, v in b.items():
        _acc(out, k, v * s)
    return out


def _lp_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            _acc(out, _mono_mul(e1, e2), c1 * c2)
    return out


_S1 = {(1, 0): ONE, (0, 1): ONE}
_S2 = {(1, 1): ONE}


@lru_cache(maxsize=None)
def _ab_pure(m: int, var: int) -> tuple:
    """alpha, beta for z_var^m with m >= 0 (var 1 or 2)."""
    t, q = QT, Q
    if m == 0:
        den = (t + 1 / q) * (1 - t)
        alpha = {(-1, 0): 1 / den, (0, -1): t / den}
        beta = {(-1, 0): -t / q / den, (0, -1): -t / q / den}
    elif m == 1 and var == 1:
        den = (1 - t) / q
        alpha, beta = {(0, 0): 1 / den}, {(0, 0): -t / q / den}
    elif m == 1:
        den = 1 - t
        alpha, beta = {(0, 0): 1 / den}, {(0, 0): -1 / q / den}
    else:
        a1, b1 = _ab_pure(m - 1, var)
        a2, b2 = _ab_pure(m - 2, var)
        alpha = _lp_add(_lp_mul(dict(a1), _S1), _lp_mul(dict(a2), _S2), -ONE)
        beta = _lp_add(_lp_mul(dict(b1), _S1), _lp_mul(dict(b2), _S2), -ONE)
    return tuple(sorted(alpha.items())), tuple(sorted(beta.items()))


def alpha_beta(m1: int, m2: int) -> tuple[dict, dict]:
    """Laurent alpha and symmetric Laurent beta with
    z1^m1 z2^m2 = (q^-1 z1 - t z2) alpha + (z1 - q z2) beta."""
    c = min(m1, m2)
    if m1 - c:
        a, b = _ab_pure(m1 - c, 1)
    else:
        a, b = _ab_pure(m2 - c, 2)
    shift = {(c, c): ONE}
    return _lp_mul(dict(a), shift), _lp_mul(dict(b), shift)


ALPHA_FACTOR = {(1, 0): 1 / Q, (0, 1): -QT}
BETA_FACTOR = {(1, 0): ONE, (0, 1): -Q}


def alpha_beta_residual(m1: int, m2: int) -> dict:
    """z^m minus the recombined decomposition; empty when the identity holds."""
    alpha, beta = alpha_beta(m1, m2)
    total = _lp_add(_lp_mul(ALPHA_FACTOR, alpha), _lp_mul(BETA_FACTOR, beta))
    return _lp_add({(m1, m2): ONE}, total, -ONE)


# ---------------------------------------------------------------------------
# The anti-involution

def expand_phi(w: Word) -> dict[Word, RatFunc]:
    """Replace each phi by (d+ d- - d- d+)/(q - 1)."""
    parts: list[tuple[tuple, RatFunc]] = [((), ONE)]
    inv = 1 / (Q - 1)
    for letter in w.letters:
        if letter.kind == "phi":
            parts = ([(p + (DPLUS, DMINUS), c * inv) for p, c in parts]
                     + [(p + (DMINUS, DPLUS), -c * inv) for p, c in parts])
        else:
            parts = [(p + (letter,), c) for p, c in parts]
    out: dict = {}
    for letters, c in parts:
        _acc(out, Word(letters, w.source), c)
    return out


def _theta_letter(letter: Letter, k: int) -> list[tuple[tuple, QHalf]]:
    kk = abs(k)
    kind = letter.kind
    if kind == "d+":
        return [((DPLUS,), QHalf(ONE, k if k >= 0 else k + 1))]
    if kind == "d-":
        return [((DMINUS,), QHalf(ONE, k - 1 if k > 0 else k))]
    if kind == "z":
        return [((zl(kk + 1 - letter.i, letter.a),), QHalf(ONE))]
    if kind == "T":
        return [((Letter("T", kk - letter.i, -letter.a),), QHalf(ONE))]
    if kind in ("Delta", "DeltaStar"):
        m = letter.i if kind == "Delta" else -letter.i
        # on the negative side the sign flips so that theta squares to the identity
        sign = ONE if k >= 0 else -ONE
        out = [((letter,), QHalf(ONE))]
        out += [((zl(j, m),), QHalf(sign)) for j in range(1, kk + 1)]
        return out
    raise ValueError(f"theta is not defined on {letter} directly")


def theta(w: Word) -> dict[Word, QHalf]:
    """Theta of a word, as {word: scalar}; phi letters are expanded first.

    Words without phi or Delta letters map to a single word.
    """
    out: dict = {}
    for w2, c in expand_phi(w).items():
        parts: list[tuple[tuple, QHalf]] = [((), QHalf(c))]
        for letter, k in zip(w2.letters, w2.letter_levels()):
            images = _theta_letter(letter, k)
            parts = [(img + p, ci * cp) for p, cp in parts for img, ci in images]
        for letters, c2 in parts:
            key = Word(letters, -w.target)
            prev = out.get(key)
            val = c2 if prev is None else prev + c2
            if val.value:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def theta_expr(e: Word | Expr) -> dict[Word, QHalf]:
    out: dict = {}
    for w, c in _as_expr(e).items():
        for w2, c2 in theta(w).items():
            prev = out.get(w2)
            val = c2 * c if prev is None else prev + c2 * c
            if val.value:
                out[w2] = val
            else:
                out.pop(w2, None)
    return out


def integral_terms(d: dict[Word, QHalf]) -> dict[Word, RatFunc]:
    """Drop the q^(1/2) slot; errors if any term still carries a half power."""
    return {w: c.integral() for w, c in d.items()}


# ---------------------------------------------------------------------------
# The oracle

@dataclass(frozen=True)
class OracleMatrix:
    source: int
    target: int
    rows: tuple          # ((state json, vector json), ...) in state order
    excluded: tuple      # states whose evaluation exceeded the box cap

    def to_json(self):
        return {"source": self.source, "target": self.target,
                "rows": [{"state": s, "image": v} for s, v in self.rows],
                "excluded": list(self.excluded)}


def eval_oracle(e: Word | Expr, policy: TruncationPolicy, margin: int | None = None,
                field=EXACT) -> OracleMatrix:
    """Matrix of e on every basis state that leaves room for ``margin`` added boxes."""
    expr = _as_expr(e)
    margin = expr.margin() if margin is None else margin
    rows, excluded = [], []
    for s in enumerate_states(expr.source, policy.N - margin) if policy.N >= margin else ():
        v = Vect.basis(s, field.one)
        out = Vect({}, expr.target)
        try:
            for w, c in expr.items():
                out = out + apply_word(w, v, policy, field).scale(field.coerce(c))
        except TruncationOverflow:
            excluded.append(s.to_json())
            continue
        rows.append((s.to_json(), out.to_json()))
    return OracleMatrix(expr.source, expr.target, tuple(rows), tuple(excluded))


def oracle_equal(a: Word | Expr, b: Word | Expr, policy: TruncationPolicy) -> bool:
    a, b = _as_expr(a), _as_expr(b)
    margin = max(a.margin(), b.margin())
    return eval_oracle(a, policy, margin) == eval_oracle(b, policy, margin)


# ---------------------------------------------------------------------------
# Checker instances

def _expr_op(e: Expr):
    from .checker import Op
    out = Op({}, e.source, e.target)
    for w, c in e.items():
        out = out + Op.word(w, c)
    return out


def random_positive_word(rng: random.Random, max_len: int = 6, max_end: int = 2,
                         max_level: int = 3) -> Word:
    """A random word in 1_0 B 1_k with k <= max_end, built from level 0 rightwards."""
    while True:
        n = rng.randint(1, max_len)
        level, letters = 0, []
        for _ in range(n):
            options = ["d-"] if level < max_level else []
            if level >= 1:
                options += ["d+", "d+", "phi", "z"]
            if level >= 2:
                options += ["T"]
            pick = rng.choice(options)
            if pick == "d-":
                letters.append(DMINUS)
                level += 1
            elif pick == "d+":
                letters.append(DPLUS)
                level -= 1
            elif pick == "phi":
                letters.append(PHI)
            elif pick == "z":
                letters.append(zl(rng.randint(1, level), rng.choice((-2, -1, 1, 2))))
            else:
                letters.append(Letter("T", rng.randint(1, level - 1), rng.choice((1, -1))))
        if level <= max_end:
            return Word(tuple(letters), level)


def random_word(rng: random.Random, max_len: int = 6, max_level: int = 3) -> Word:
    """A random well-typed word anywhere in the quiver (both halves, all letters)."""
    n = rng.randint(0, max_len)
    level = rng.randint(-max_level, max_level)
    target = level
    letters = []
    for _ in range(n):
        kk = abs(level)
        options = ["phi", "Delta", "DeltaStar"]
        if level - 1 >= -max_level:
            options.append("d+")
        if level + 1 <= max_level:
            options.append("d-")
        if kk >= 1:
            options.append("z")
        if kk >= 2:
            options.append("T")
        pick = rng.choice(options)
        # appending on the right: the new letter's target is the current level
        if pick == "d+":
            letters.append(DPLUS)
            level -= 1
        elif pick == "d-":
            letters.append(DMINUS)
            level += 1
        elif pick == "phi":
            letters.append(PHI)
        elif pick == "Delta":
            letters.append(Delta(rng.randint(1, 2)))
        elif pick == "DeltaStar":
            letters.append(DeltaStar(rng.randint(1, 2)))
        elif pick == "z":
            letters.append(zl(rng.randint(1, kk), rng.choice((-1, 1, 2))))
        else:
            letters.append(Letter("T", rng.randint(1, kk - 1), rng.choice((1, -1))))
    w = Word(tuple(letters), level)
    assert w.target == target
    return w


def _special_T_case(sp: Special, i: int) -> int:
    last, before = sp.tokens[-1], sp.tokens[-2]
    if i < sp.level - 1:
        return 1 if last == D else 2
    if last == D:
        return 3 if before == D else 4
    return 5 if before == D else 6


def _all_specials(max_count: int, max_level: int) -> Iterator[Special]:
    def grow(tokens, level):
        yield tokens, level
        if len(tokens) >= max_count:
            return
        if level < max_level:
            yield from grow(tokens + (D,), level + 1)
        for a in (0, 1):
            yield from grow(tokens + (("P", a),), level)
    for tokens, level in grow((D,), 1):
        yield Special(tokens, (0,) * level)


SOUNDNESS_WORDS = 200


def soundness_instances(cfg) -> Iterator:
    from .checker import Instance, Op, zpoly

    def inst(rid, lhs, rhs, **params):
        return Instance(rid, tuple(sorted(params.items())), lhs, rhs)

    rng = random.Random(f"{cfg.seed}:to_special")
    for n in range(SOUNDNESS_WORDS):
        w = random_positive_word(rng, max_level=cfg.K)
        out = special_expr(to_special(w), w.source)
        yield inst("rewriter/to_special", Op.word(w), _expr_op(out), index=n, word=str(w))

    for k in (2, 3):
        for i in range(1, k):
            for a in range(-2, 4):
                for mirrored in (False, True):
                    lhs, rhs = push_z_through_Tinv(i, a, k, mirrored)
                    yield inst("rewriter/push_z_through_Tinv", _expr_op(lhs), _expr_op(rhs),
                               k=k, i=i, a=a, mirrored=mirrored)

    hrng = random.Random(f"{cfg.seed}:hecke")
    for n in range(24):
        k = hrng.choice((2, 3))
        letters = []
        for _ in range(hrng.randint(1, 4)):
            if hrng.random() < 0.5:
                letters.append(Letter("T", hrng.randint(1, k - 1), hrng.choice((1, -1))))
            else:
                letters.append(zl(hrng.randint(1, k), hrng.choice((-1, 1, 2))))
        w = Word(tuple(letters), k)
        yield inst("rewriter/hecke_normalize", Op.word(w), _expr_op(hecke_normalize(w)),
                   index=n, word=str(w))

    frng = random.Random(f"{cfg.seed}:special")
    for sp in _all_specials(4, cfg.K):
        k = sp.level
        tail = tuple(frng.choice((-1, 0, 1)) for _ in range(k))
        sp = sp.with_f(tail)
        for i in range(1, k):
            rhs = Expr([(s2.word(), c) for s2, c in _special_T(sp, i)], k, 0)
            yield inst("rewriter/special_T", Op.word(sp.word() * Word((Letter("T", i, 1),), k)),
                       _expr_op(rhs), case=_special_T_case(sp, i), i=i, word=str(sp.word()))
        if k >= 2:
            rhs = Expr([(SpecialTerm(*t).word(), c) for t, c in _special_dplus(sp)], k - 1, 0)
            yield inst("rewriter/special_dplus", Op.word(sp.word() * Word((DPLUS,), k - 1)),
                       _expr_op(rhs), case=1 if sp.tokens[-1] == D else 2, word=str(sp.word()))

    for m1 in range(-2, 3):
        for m2 in range(-2, 3):
            alpha, _beta = alpha_beta(m1, m2)
            outer_l, outer_r = Op.word(Word((DMINUS, DMINUS), 2)), Op.word(Word((DPLUS, DPLUS), 0))
            lhs = outer_l * zpoly(2, {(m1, m2): ONE}) * outer_r
            rhs = outer_l * zpoly(2, _lp_mul(ALPHA_FACTOR, alpha)) * outer_r
            yield inst("rewriter/alpha_beta", lhs, rhs, m1=m1, m2=m2)
            yield Instance("rewriter/alpha_beta_identity", (("m1", m1), ("m2", m2)),
                           scalar_cells=lambda m1=m1, m2=m2: _alpha_beta_cells(m1, m2))


def _alpha_beta_cells(m1: int, m2: int) -> list:
    _alpha, beta = alpha_beta(m1, m2)
    resid = alpha_beta_residual(m1, m2)
    asym = _lp_add(beta, {(b, a): c for (a, b), c in beta.items()}, -ONE)
    return [({"check": "identity"}, ONE if not resid else ZERO, ONE),
            ({"check": "beta symmetric"}, ONE if not asym else ZERO, ONE)]


def _theta_op(op):
    """Theta of a checker Op made of words; returns (Op, parity of the dropped q^(1/2))."""
    from .checker import Op
    acc: dict = {}
    for factors, c in op.terms.items():
        w = factors[0] if factors else Word((), op.source)
        if len(factors) > 1 or not isinstance(w, Word):
            raise TypeError("theta only applies to word operators")
        for w2, c2 in theta(w).items():
            prev = acc.get(w2)
            acc[w2] = c2 * c if prev is None else prev + c2 * c
    halves = {c.half for c in acc.values() if c.value}
    return acc, halves, (-op.target, -op.source)


def _qhalf_op(acc: dict, half: int, levels: tuple):
    from .checker import Op
    out = Op({}, *levels)
    for w, c in acc.items():
        v = (c * QHalf(ONE, half)).integral()
        if v:
            out = out + Op.word(w, v)
    return out


def theta_instances(cfg, db_plus: Iterable) -> Iterator:
    from .checker import Instance, Op

    def exact_match(d: dict, expected: dict) -> list:
        ok = d == expected
        return [({"got": {str(w): repr(c) for w, c in d.items()}}, ONE if ok else ZERO, ONE)]

    yield Instance("theta/unit", (), scalar_cells=lambda: exact_match(
        theta(Word((), 0)), {Word((), 0): QHalf(ONE)}))
    for m in range(-2, 3):
        yield Instance("theta/e_to_f_scalar", (("m", m),), scalar_cells=lambda m=m: exact_match(
            theta(e_word(m)), {f_word(m): QHalf(ONE)}))
        img = integral_terms(theta(e_word(m)))
        lhs = Op({(w,): c for w, c in img.items()}, 0, 0)
        yield Instance("theta/e_to_f", (("m", m),), lhs, Op.word(f_word(m)))

    for inst in db_plus:
        a, ha, lv = _theta_op(inst.lhs)
        b, hb, _ = _theta_op(inst.rhs)
        halves = ha | hb
        name = "theta/" + inst.rid.split("/", 1)[1]
        if len(halves) > 1:
            yield Instance(name, inst.params, scalar_cells=lambda: [
                ({"error": "mixed half-integral powers of q"}, ZERO, ONE)])
            continue
        h = halves.pop() if halves else 0
        yield Instance(name, inst.params, _qhalf_op(a, h, lv), _qhalf_op(b, h, lv))

    rng = random.Random(f"{cfg.seed}:theta")
    for n in range(100):
        w = random_word(rng, 6, cfg.K)
        yield Instance("theta/involution", (("index", n), ("word", str(w))),
                       scalar_cells=lambda w=w: _involution_cells(w))


def _involution_cells(w: Word) -> list:
    twice: dict = {}
    for w1, c1 in theta(w).items():
        for w2, c2 in theta(w1).items():
            prev = twice.get(w2)
            val = c1 * c2 if prev is None else prev + c1 * c2
            if val.value:
                twice[w2] = val
            else:
                twice.pop(w2, None)
    expected = {w2: QHalf(c) for w2, c in expand_phi(w).items()}
    ok = twice == expected
    return [({"word": str(w), "theta2": {str(k): repr(v) for k, v in sorted(
        twice.items(), key=lambda kv: kv[0].sort_key())}}, ONE if ok else ZERO, ONE)]

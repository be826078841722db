"""The polynomial representation V = sum_k V_k on both ladders.

Plus-side state (lam, w) at level k: ``lam`` is the inner partition and the
marked boxes are added in the order w_k, ..., w_1.  Minus-side state at
level -k: ``lam`` is the outer partition and the marked boxes are removed in
the order w_k, ..., w_1.  The tuple ``w`` is stored in that same order, so
``w[0]`` is w_k and ``w[-1]`` is w_1; ``d+`` (plus side) and ``d-`` (minus
side) append the new box as w_1.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, NamedTuple

from .combinatorics import (BoxPos, Partition, addable_boxes, c_coeff, cstar_coeff,
                            partitions_upto, removable_boxes)
from .qtfield import EXACT, ONE, Q, T, ZERO, RatFunc
from .words import Letter, LevelError, Word

__all__ = [
    "State", "Vect", "TruncationPolicy", "TruncationOverflow", "InvalidState", "state",
    "act_z", "act_T", "act_Tinv", "act_dplus", "act_dminus", "act_phi", "act_delta",
    "act_delta_star", "act_letter", "act_word", "apply_word", "enumerate_states",
    "is_valid", "delta_eigenvalue",
]


class TruncationOverflow(RuntimeError):
    """An intermediate state exceeded the box cap of the policy."""


class InvalidState(ValueError):
    pass


class TruncationPolicy(NamedTuple):
    N: int = 6   # cap on total boxes of every intermediate state
    K: int = 3   # cap on |level| of the base level of checked identities


class State(NamedTuple):
    side: str                      # '+', '-', or '0' (level 0)
    lam: Partition
    w: tuple[BoxPos, ...] = ()

    @property
    def level(self) -> int:
        return len(self.w) if self.side != "-" else -len(self.w)

    @property
    def boxes(self) -> int:
        return self.lam.size + (len(self.w) if self.side == "+" else 0)

    def wj(self, j: int) -> BoxPos:
        """w_j in the 1-based labelling (w_1 = most recently appended)."""
        k = len(self.w)
        if not 1 <= j <= k:
            raise LevelError(f"w_{j} does not exist at level {self.level}")
        return self.w[k - j]

    def sort_key(self):
        return (self.boxes, self.side, tuple(self.lam), tuple(tuple(b) for b in self.w))

    def __str__(self):
        lam = "(" + ",".join(map(str, self.lam)) + ")"
        if not self.w:
            return f"I_{lam}"
        ws = ",".join(f"({b.row},{b.col})" for b in self.w)
        return f"I{'-' if self.side == '-' else ''}_{lam},({ws})"

    def to_json(self):
        return {"side": self.side, "lambda": list(self.lam), "w": [[b.row, b.col] for b in self.w]}

    @classmethod
    def from_json(cls, data) -> "State":
        return state(data.get("side", "+"), data.get("lambda", []), data.get("w", []))


def state(side: str, lam: Iterable[int] = (), w: Iterable = ()) -> State:
    w = tuple(BoxPos(*b) for b in w)
    side = {"plus": "+", "minus": "-"}.get(side, side)
    if side not in ("+", "-", "0"):
        raise InvalidState(f"unknown side {side!r}")
    if not w:
        side = "0"
    elif side == "0":
        raise InvalidState("a level-0 state carries no marked boxes")
    s = State(side, Partition(lam), w)
    if not is_valid(s):
        raise InvalidState(f"{s} is not a valid chain")
    return s


def _full_partition(s: State) -> Partition:
    """lam + w (plus side) or lam - w (minus side)."""
    p = s.lam
    for b in s.w:
        p = p.add(b) if s.side == "+" else p.remove(b)
    return p


def is_valid(s: State) -> bool:
    """Chain condition plus pairwise distinct contents."""
    if len(set(s.w)) != len(s.w):
        return False
    p = s.lam
    for b in s.w:
        if s.side == "+":
            if b not in addable_boxes(p):
                return False
            p = p.add(b)
        else:
            if b not in removable_boxes(p):
                return False
            p = p.remove(b)
    return True


# ---------------------------------------------------------------------------
# Vectors

class Vect:
    """Sparse linear combination of states of one level."""

    __slots__ = ("terms", "level")

    def __init__(self, terms=None, level: int | None = None):
        out: dict[State, object] = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for s, c in items:
            if level is None:
                level = s.level
            elif s.level != level:
                raise LevelError(f"mixed levels in a vector: {s.level} and {level}")
            out[s] = out[s] + c if s in out else c
        self.terms = {s: c for s, c in out.items() if c}
        self.level = level

    @classmethod
    def basis(cls, s: State, one=ONE) -> "Vect":
        return cls({s: one})

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def is_zero(self):
        return not self.terms

    def coeff(self, s: State):
        return self.terms.get(s, 0)

    def __add__(self, other: "Vect") -> "Vect":
        if self.level is not None and other.level is not None and self.level != other.level:
            raise LevelError("adding vectors of different levels")
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out[s] + c if s in out else c
        return Vect(out, self.level if self.level is not None else other.level)

    def __neg__(self):
        return Vect({s: -c for s, c in self.terms.items()}, self.level)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Vect":
        return Vect({s: c * v for s, v in self.terms.items()}, self.level)

    def __eq__(self, other):
        return isinstance(other, Vect) and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{s}" for s, c in self.items())

    def __repr__(self):
        return f"Vect({self})"

    def to_json(self):
        return [[s.to_json(), RatFunc(c).to_json() if isinstance(c, RatFunc) else str(c)]
                for s, c in self.items()]

    @classmethod
    def from_json(cls, data) -> "Vect":
        return cls([(State.from_json(s), RatFunc.from_json(c)) for s, c in data])


# ---------------------------------------------------------------------------
# Single-state actions.  Each returns a tuple of (State, exact RatFunc coefficient).

def _content(b: BoxPos) -> RatFunc:
    return b.content


@lru_cache(maxsize=None)
def _z_state(s: State, j: int, a: int):
    return ((s, _content(s.wj(j)) ** a),)


@lru_cache(maxsize=None)
def _T_state(s: State, i: int):
    k = len(s.w)
    if not 1 <= i <= k - 1:
        raise LevelError(f"T{i} does not exist at level {s.level}")
    qq = Q if s.side == "+" else 1 / Q
    wi, wi1 = _content(s.wj(i)), _content(s.wj(i + 1))
    diag = (qq - 1) * wi1 / (wi - wi1)
    off = (wi - qq * wi1) / (wi - wi1)
    out = []
    if diag:
        out.append((s, diag))
    if off:
        w = list(s.w)
        w[k - i], w[k - i - 1] = w[k - i - 1], w[k - i]
        swapped = State(s.side, s.lam, tuple(w))
        if not is_valid(swapped):
            raise InvalidState(f"T{i} maps {s} outside the state space")
        out.append((swapped, off))
    return tuple(out)


@lru_cache(maxsize=None)
def _Tinv_state(s: State, i: int):
    # plus: T^-1 = q^-1 T + (1 - q^-1); minus: T^-1 = q T + (1 - q)
    qq = Q if s.side == "+" else 1 / Q
    out: dict[State, RatFunc] = {s: 1 - 1 / qq}
    for s2, c in _T_state(s, i):
        out[s2] = out.get(s2, ZERO) + c / qq
    return tuple((s2, c) for s2, c in out.items() if c)


@lru_cache(maxsize=None)
def _dplus_state(s: State):
    if s.side == "-":
        lam = s.lam.remove(s.w[0])
        rest = s.w[1:]
        return ((State("-" if rest else "0", lam, rest), ONE),)
    k = len(s.w)
    mu = _full_partition(s)
    ws = [_content(b) for b in s.w]
    out = []
    for x in addable_boxes(mu):
        X = _content(x)
        coeff = -(Q ** k) * c_coeff(mu, x)
        for wc in ws:
            coeff = coeff * (X - T * wc) / (X - Q * T * wc)
        if coeff:
            out.append((State("+", s.lam, s.w + (x,)), coeff))
    return tuple(out)


@lru_cache(maxsize=None)
def _dminus_state(s: State):
    if s.side == "+":
        lam = s.lam.add(s.w[0])
        rest = s.w[1:]
        return ((State("+" if rest else "0", lam, rest), ONE),)
    k = len(s.w)
    nu = _full_partition(s)
    ws = [_content(b) for b in s.w]
    out = []
    for x in removable_boxes(nu):
        X = _content(x)
        coeff = -(Q ** -k) * cstar_coeff(nu, x)
        for wc in ws:
            coeff = coeff * (X - wc / T) / (X - wc / (Q * T))
        if coeff:
            out.append((State("-", s.lam, s.w + (x,)), coeff))
    return tuple(out)


def delta_eigenvalue(s: State, m: int) -> RatFunc:
    """Eigenvalue of Delta_{p_m} (m > 0) or Delta*_{p_|m|} (m < 0) on a state."""
    val = sum((_content(b) ** m for b in s.lam.boxes()), ZERO)
    wsum = sum((_content(b) ** m for b in s.w), ZERO)
    return val + wsum if s.side == "+" else val - wsum


@lru_cache(maxsize=None)
def _delta_state(s: State, m: int):
    v = delta_eigenvalue(s, m)
    return ((s, v),) if v else ()


def _combine(pairs) -> tuple:
    out: dict[State, RatFunc] = {}
    for s, c in pairs:
        out[s] = out.get(s, ZERO) + c
    return tuple((s, c) for s, c in out.items() if c)


@lru_cache(maxsize=None)
def _phi_state(s: State):
    # (q-1)^-1 (d+ d- - d- d+)
    pairs = []
    for s1, c1 in _dminus_state(s):
        for s2, c2 in _dplus_state(s1):
            pairs.append((s2, c1 * c2))
    for s1, c1 in _dplus_state(s):
        for s2, c2 in _dminus_state(s1):
            pairs.append((s2, -c1 * c2))
    inv = 1 / (Q - 1)
    return _combine((s2, c * inv) for s2, c in pairs)


def _letter_state_exact(letter: Letter, s: State):
    kind = letter.kind
    if kind == "z":
        return _z_state(s, letter.i, letter.a)
    if kind == "T":
        return _T_state(s, letter.i) if letter.a == 1 else _Tinv_state(s, letter.i)
    if kind == "d+":
        return _dplus_state(s)
    if kind == "d-":
        return _dminus_state(s)
    if kind == "phi":
        return _phi_state(s)
    if kind == "Delta":
        return _delta_state(s, letter.i)
    if kind == "DeltaStar":
        return _delta_state(s, -letter.i)
    raise ValueError(f"unknown letter {letter}")


@lru_cache(maxsize=None)
def _letter_state(field, letter: Letter, s: State):
    exact = _letter_state_exact(letter, s)
    if field is EXACT:
        return exact
    out = []
    for s2, c in exact:
        v = field.coerce(c)
        if v:
            out.append((s2, v))
    return tuple(out)


@lru_cache(maxsize=None)
def _word_state(field, letters: tuple, s: State):
    """Apply letters (rightmost first) to a basis state.

    Returns (pairs, max boxes of any intermediate state).
    """
    if not letters:
        return ((s, field.one),), s.boxes
    inner, peak = _word_state(field, letters[1:], s)
    acc: dict[State, object] = {}
    for s1, c1 in inner:
        for s2, c2 in _letter_state(field, letters[0], s1):
            acc[s2] = acc[s2] + c1 * c2 if s2 in acc else c1 * c2
            if s2.boxes > peak:
                peak = s2.boxes
    return tuple((s2, c) for s2, c in acc.items() if c), peak


def _check_level(letters: tuple, source: int, v: Vect):
    if v.level is not None and v.level != source:
        raise LevelError(f"word has source level {source} but the vector is at level {v.level}")


def apply_word(w: Word, v: Vect, policy: TruncationPolicy | None = None, field=EXACT) -> Vect:
    _check_level(w.letters, w.source, v)
    out: dict[State, object] = {}
    for s, c in v.terms.items():
        pairs, peak = _word_state(field, w.letters, s)
        if policy is not None and peak > policy.N:
            raise TruncationOverflow(f"{w} applied to {s} reaches {peak} boxes > N={policy.N}")
        for s2, c2 in pairs:
            out[s2] = out[s2] + c * c2 if s2 in out else c * c2
    return Vect(out, w.target)


def act_word(w: Word, v: Vect, policy: TruncationPolicy | None = None, field=EXACT) -> Vect:
    """Right-to-left composition of generator actions."""
    return apply_word(w, v, policy, field)


def act_letter(letter: Letter, v: Vect, field=EXACT) -> Vect:
    from .words import STEP
    lv = v.level if v.level is not None else 0
    return apply_word(Word((letter,), lv), v, None, field)


def act_z(j: int, v: Vect, a: int = 1, field=EXACT) -> Vect:
    return act_letter(Letter("z", j, a), v, field)


def act_T(i: int, v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("T", i, 1), v, field)


def act_Tinv(i: int, v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("T", i, -1), v, field)


def act_dplus(v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("d+"), v, field)


def act_dminus(v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("d-"), v, field)


def act_phi(v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("phi"), v, field)


def act_delta(m: int, v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("Delta", m), v, field)


def act_delta_star(m: int, v: Vect, field=EXACT) -> Vect:
    return act_letter(Letter("DeltaStar", m), v, field)


# ---------------------------------------------------------------------------
# State enumeration

@lru_cache(maxsize=None)
def enumerate_states(level: int, N: int) -> tuple[State, ...]:
    """All states at ``level`` with at most N boxes, as the d+/d- closure of level 0."""
    layer = {State("0", lam, ()) for lam in partitions_upto(N)}
    step = _dplus_state if level > 0 else _dminus_state
    for _ in range(abs(level)):
        nxt = set()
        for s in layer:
            if level > 0 and s.boxes + 1 > N:
                continue
            for s2, _c in step(s):
                if s2.boxes <= N:
                    nxt.add(s2)
        layer = nxt
    return tuple(sorted(layer, key=State.sort_key))

"""Level-typed words in the quiver path algebra and their linear combinations.

A word is written left to right as in the algebra and acts right to left:
in ``1_0 d- z1^2 d+ 1_0`` the ``d+`` acts first.  ``Word.source`` is the
level at the right end, ``Word.target`` the level at the left end.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .qtfield import ONE, RatFunc, ZERO, parse_ratfunc

__all__ = [
    "Letter", "Word", "Expr", "ParseError", "LevelError", "parse_word", "parse_expr",
    "DPLUS", "DMINUS", "PHI", "z", "T", "Tinv", "Delta", "DeltaStar", "word", "e_word",
    "f_word", "Y_word", "A_word", "STEP",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        super().__init__(message if position is None else f"{message} (token {position})")


class LevelError(ValueError):
    """A letter was placed at a level where it does not exist."""


class Letter(NamedTuple):
    kind: str      # 'd+', 'd-', 'phi', 'z', 'T', 'Delta', 'DeltaStar'
    i: int = 0     # index for z/T, m for Delta/DeltaStar
    a: int = 0     # exponent for z, +-1 for T

    def __str__(self):
        k = self.kind
        if k in ("d+", "d-", "phi"):
            return k
        if k == "z":
            return f"z{self.i}" if self.a == 1 else f"z{self.i}^{self.a}"
        if k == "T":
            return f"T{self.i}" if self.a == 1 else f"T{self.i}^-1"
        return f"{k}[{self.i}]"


DPLUS = Letter("d+")
DMINUS = Letter("d-")
PHI = Letter("phi")
STEP = {"d+": 1, "d-": -1}


def z(i: int, a: int = 1) -> Letter:
    return Letter("z", i, a)


def T(i: int) -> Letter:
    return Letter("T", i, 1)


def Tinv(i: int) -> Letter:
    return Letter("T", i, -1)


def Delta(m: int) -> Letter:
    return Letter("Delta", m)


def DeltaStar(m: int) -> Letter:
    return Letter("DeltaStar", m)


def _check_letter(letter: Letter, level: int) -> None:
    k = abs(level)
    if letter.kind == "z" and not 1 <= letter.i <= k:
        raise LevelError(f"z{letter.i} does not exist at level {level}")
    if letter.kind == "T" and not 1 <= letter.i <= k - 1:
        raise LevelError(f"T{letter.i} does not exist at level {level}")
    if letter.kind in ("Delta", "DeltaStar") and letter.i < 1:
        raise LevelError(f"{letter.kind} needs m >= 1")


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...]
    source: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(Letter(*l) for l in self.letters))
        for letter, level in zip(self.letters, self.letter_levels()):
            _check_letter(letter, level)

    def letter_levels(self) -> list[int]:
        """The level each letter acts on (its source), aligned with ``letters``."""
        out = [0] * len(self.letters)
        level = self.source
        for pos in range(len(self.letters) - 1, -1, -1):
            out[pos] = level
            level += STEP.get(self.letters[pos].kind, 0)
        return out

    @property
    def target(self) -> int:
        return self.source + sum(STEP.get(l.kind, 0) for l in self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if self.source != other.target:
            raise LevelError(f"cannot compose: left source {self.source} != right target {other.target}")
        return Word(self.letters + other.letters, other.source)

    def is_special(self) -> bool:
        return all(l.kind in ("d-", "phi", "z") for l in self.letters)

    def margin(self) -> int:
        """Largest number of boxes any prefix of the action can add to a state."""
        best = running = 0
        for letter, level in zip(reversed(self.letters), reversed(self.letter_levels())):
            if letter.kind == "d+":
                running += 1 if level >= 0 else -1
                best = max(best, running)
            elif letter.kind == "phi":
                # phi = (d+ d- - d- d+)/(q-1); worst prefix of either order
                if level >= 0:
                    best = max(best, running + 1)
                    running += 1
                else:
                    running -= 1
        return best

    def max_level(self) -> int:
        """Largest |level| visited, counting the excursion inside each phi."""
        out = max(abs(self.source), abs(self.target))
        for letter, level in zip(self.letters, self.letter_levels()):
            out = max(out, abs(level) + (letter.kind == "phi"))
        return out

    def __str__(self):
        body = " ".join(str(l) for l in self.letters)
        return f"1_{self.target} {body} 1_{self.source}" if body else f"1_{self.source}"

    def __repr__(self):
        return f"Word({str(self)!r})"

    def sort_key(self):
        return (len(self.letters), str(self))


def word(text_or_letters, source: int | None = None) -> Word:
    if isinstance(text_or_letters, str):
        return parse_word(text_or_letters, source)
    return Word(tuple(text_or_letters), source if source is not None else 0)


# ---------------------------------------------------------------------------
# Linear combinations

class Expr:
    """Finite Q(q,t)-combination of words with one source and one target level."""

    __slots__ = ("terms", "source", "target")

    def __init__(self, terms: dict | Iterable | None = None, source: int | None = None,
                 target: int | None = None):
        clean: dict[Word, RatFunc] = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for w, c in items:
            c = RatFunc(c)
            if source is None:
                source, target = w.source, w.target
            if (w.source, w.target) != (source, target):
                raise LevelError(f"word {w} does not run from level {source} to {target}")
            clean[w] = clean.get(w, ZERO) + c
        self.terms = {w: c for w, c in clean.items() if c}
        if source is None:
            raise LevelError("an empty Expr needs explicit source and target levels")
        self.source, self.target = source, target

    @classmethod
    def of(cls, w: Word, c=ONE) -> "Expr":
        return cls({w: c})

    @classmethod
    def identity(cls, level: int) -> "Expr":
        return cls({Word((), level): ONE})

    @classmethod
    def zero(cls, source: int, target: int) -> "Expr":
        return cls({}, source, target)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __iter__(self) -> Iterator:
        return iter(self.items())

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other: "Expr"):
        if (self.source, self.target) != (other.source, other.target):
            raise LevelError("adding expressions with different levels")

    def __add__(self, other):
        other = _as_expr(other, self)
        self._same(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return Expr(out, self.source, self.target)

    __radd__ = __add__

    def __neg__(self):
        return Expr({w: -c for w, c in self.terms.items()}, self.source, self.target)

    def __sub__(self, other):
        return self + (-_as_expr(other, self))

    def __rsub__(self, other):
        return _as_expr(other, self) - self

    def scale(self, c) -> "Expr":
        c = RatFunc(c)
        return Expr({w: c * v for w, v in self.terms.items()}, self.source, self.target)

    def __mul__(self, other):
        if isinstance(other, Word):
            other = Expr.of(other)
        if isinstance(other, Expr):
            if self.source != other.target:
                raise LevelError(f"cannot compose: left source {self.source} != right target {other.target}")
            out: dict[Word, RatFunc] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 * w2
                    out[w] = out.get(w, ZERO) + c1 * c2
            return Expr(out, other.source, self.target)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Word):
            return Expr.of(other) * self
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, Word):
            other = Expr.of(other)
        return (isinstance(other, Expr) and self.terms == other.terms
                and (self.source, self.target) == (other.source, other.target))

    def margin(self) -> int:
        return max((w.margin() for w in self.terms), default=0)

    def max_level(self) -> int:
        return max((w.max_level() for w in self.terms), default=max(abs(self.source), abs(self.target)))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*[{w}]" for w, c in self.items())

    def __repr__(self):
        return f"Expr({self})"

    def to_json(self):
        return {"source": self.source, "target": self.target,
                "terms": [{"word": str(w), "coeff": str(c)} for w, c in self.items()]}

    @classmethod
    def from_json(cls, data) -> "Expr":
        terms = [(parse_word(t["word"], data["source"]), parse_ratfunc(t["coeff"]))
                 for t in data["terms"]]
        return cls(terms, data["source"], data["target"])


def _as_expr(x, like: Expr) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Word):
        return Expr.of(x)
    c = RatFunc(x)
    if like.source != like.target:
        raise LevelError("scalars only make sense as loops")
    return Expr.identity(like.source).scale(c)


# ---------------------------------------------------------------------------
# Surface syntax

_TOKEN = re.compile(r"""
    (?P<idem>1_(?P<k>-?\d+))
  | (?P<d>d(?P<sign>[+-]))(?:\^(?P<dpow>\d+))?
  | (?P<phi>phi)(?:\^(?P<phipow>\d+))?
  | z(?P<zi>\d+)(?:\^(?P<zexp>-?\d+))?
  | (?P<tinv>Tinv)(?P<tii>\d+)
  | T(?P<ti>\d+)(?:\^(?P<texp>-?\d+))?
  | (?P<dstar>DeltaStar)\[(?P<dsm>\d+)\]
  | (?P<delta>Delta)\[(?P<dm>\d+)\]
  | (?P<macro>[efYA])\[(?P<margs>[-\d,\s]*)\]
""", re.VERBOSE)


def _macro_letters(name: str, args: list[int], pos: int) -> list[Letter]:
    if name in "ef":
        if len(args) != 1:
            raise ParseError(f"{name}[m] takes exactly one index", pos)
        m = args[0]
        zl = [z(1, m)] if m else []
        return [DMINUS] + zl + [DPLUS] if name == "e" else [DPLUS] + zl + [DMINUS]
    if not args:
        raise ParseError(f"{name}[...] needs at least one index", pos)
    body: list[Letter] = []
    for k, m in enumerate(args):
        if k:
            body.append(PHI)
        if m:
            body.append(z(1, m))
    return [DMINUS] + body + ([DPLUS] if name == "Y" else [])


def parse_word(text: str, source: int | None = None) -> Word:
    """Parse the surface syntax, e.g. ``"1_0 d- z1^2 phi z1^-1 d+ 1_0"``.

    Idempotents pin levels; without any, ``source`` must be given.  Macros
    e[m], f[m], Y[m1,...] and A[m1,...] expand to their defining words.
    """
    tokens = text.split()
    letters: list[Letter] = []
    pins: list[tuple[int, int]] = []   # (number of letters to the left, level)
    for pos, tok in enumerate(tokens):
        m = _TOKEN.fullmatch(tok)
        if not m:
            raise ParseError(f"unknown token {tok!r}", pos)
        if m.group("idem"):
            pins.append((len(letters), int(m.group("k"))))
        elif m.group("d"):
            letters += [DPLUS if m.group("sign") == "+" else DMINUS] * int(m.group("dpow") or 1)
        elif m.group("phi"):
            letters += [PHI] * int(m.group("phipow") or 1)
        elif m.group("zi"):
            a = int(m.group("zexp") or 1)
            if a:
                letters.append(z(int(m.group("zi")), a))
        elif m.group("tinv"):
            letters.append(Tinv(int(m.group("tii"))))
        elif m.group("ti"):
            e = int(m.group("texp") or 1)
            letters += [T(int(m.group("ti"))) if e > 0 else Tinv(int(m.group("ti")))] * abs(e)
        elif m.group("dstar"):
            letters.append(DeltaStar(int(m.group("dsm"))))
        elif m.group("delta"):
            letters.append(Delta(int(m.group("dm"))))
        else:
            args = [int(a) for a in m.group("margs").replace(",", " ").split()]
            letters += _macro_letters(m.group("macro"), args, pos)
    # level just right of position p = source + sum of steps of letters[p:]
    suffix = [0] * (len(letters) + 1)
    for p in range(len(letters) - 1, -1, -1):
        suffix[p] = suffix[p + 1] + STEP.get(letters[p].kind, 0)
    derived = None
    for p, level in pins:
        s = level - suffix[p]
        if derived is None:
            derived = s
        elif s != derived:
            raise ParseError(f"idempotent 1_{level} contradicts the level typing of the word")
    if derived is None:
        if source is None:
            raise ParseError("no idempotent in word and no source level given")
        derived = source
    elif source is not None and source != derived:
        raise LevelError(f"word has source level {derived}, expected {source}")
    try:
        return Word(tuple(letters), derived)
    except LevelError as exc:
        raise ParseError(str(exc)) from None


def parse_expr(text: str, source: int | None = None) -> Expr:
    """Parse ``coeff * [word] + coeff * [word] ...`` (the ``str`` form of Expr)."""
    text = text.strip()
    if text == "0":
        raise ParseError("zero expression needs explicit levels")
    terms = []
    for m in re.finditer(r"\(([^\[\]]*)\)\*\[([^\]]*)\]", text):
        terms.append((parse_word(m.group(2), source), parse_ratfunc(m.group(1))))
    if not terms:
        return Expr.of(parse_word(text, source))
    return Expr(terms)


# ---------------------------------------------------------------------------
# Named words

def e_word(m: int) -> Word:
    return Word(tuple(_macro_letters("e", [m], 0)), 0)


def f_word(m: int) -> Word:
    return Word(tuple(_macro_letters("f", [m], 0)), 0)


def Y_word(ms: Iterable[int]) -> Word:
    return Word(tuple(_macro_letters("Y", list(ms), 0)), 0)


def A_word(ms: Iterable[int]) -> Word:
    return Word(tuple(_macro_letters("A", list(ms), 0)), 1)

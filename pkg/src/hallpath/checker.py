"""Verification harness: relation registry, exact/fast evaluation, deterministic reports."""

from __future__ import annotations

import itertools
import json
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from . import combinatorics as cb
from .eha import (PSI_ORDER, ft_e_act, ft_f_act, h_poly, level0, psi_act, psi_coeffs,
                  psi_exponential, psi_rational)
from .polyrep import (State, TruncationOverflow, TruncationPolicy, Vect, apply_word,
                      enumerate_states)
from .qtfield import (EXACT, ONE, Q, Q3, T, ZERO, PointField, PoleError, RatFunc, g_poly)
from .words import (DMINUS, DPLUS, LevelError, Word, Y_word, A_word, e_word, f_word,
                    parse_word, z as zl)

log = logging.getLogger(__name__)

__all__ = [
    "Op", "Instance", "RelationReport", "Config", "REGISTRY", "GROUPS", "build_instances",
    "check_instance", "verify", "sign_constants", "report_json", "relation_ids",
]

SIGMA1 = Q + T + Q3
SIGMA2 = Q * T + 1 / Q + 1 / T


# ---------------------------------------------------------------------------
# Operator sums

class Psi:
    """Diagonal psi^{+-}_n at level 0 (psi-_n is the coefficient of z^n)."""

    __slots__ = ("sign", "n")
    source = target = 0

    def __init__(self, sign: str, n: int):
        self.sign, self.n = sign, n

    def apply(self, v, policy, fld):
        return psi_act(self.sign, self.n, v, fld)

    def margin_letters(self):
        return ()

    def _key(self):
        return ("psi", self.sign, self.n)

    def __eq__(self, o):
        return isinstance(o, Psi) and self._key() == o._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return f"psi{self.sign}[{self.n}]"


class Ft:
    """The box-sum oracle e~_m / f~_m at level 0 (exact field only)."""

    __slots__ = ("kind", "m")
    source = target = 0

    def __init__(self, kind: str, m: int):
        self.kind, self.m = kind, m

    def apply(self, v, policy, fld):
        act = ft_e_act if self.kind == "e" else ft_f_act
        if fld is EXACT:
            return act(self.m, v)
        out = Vect({}, 0)
        for s, c in v.terms.items():
            img = act(self.m, Vect.basis(s))
            out = out + Vect({s2: c * fld.coerce(c2) for s2, c2 in img.terms.items()}, 0)
        return out

    def margin_letters(self):
        return (DMINUS, DPLUS) if self.kind == "e" else (DPLUS, DMINUS)

    def _key(self):
        return ("ft", self.kind, self.m)

    def __eq__(self, o):
        return isinstance(o, Ft) and self._key() == o._key()

    def __hash__(self):
        return hash(self._key())

    def __str__(self):
        return f"{self.kind}~[{self.m}]"


def _merge(factors: Iterable) -> tuple:
    out: list = []
    for f in factors:
        if isinstance(f, Word) and not f.letters:
            continue
        if out and isinstance(f, Word) and isinstance(out[-1], Word):
            out[-1] = out[-1] * f
        else:
            out.append(f)
    return tuple(out)


class Op:
    """Q(q,t)-combination of products of factors (words, Psi, Ft), one source/target."""

    __slots__ = ("terms", "source", "target")

    def __init__(self, terms=None, source: int = 0, target: int = 0):
        acc: dict[tuple, RatFunc] = {}
        for factors, c in (terms.items() if isinstance(terms, dict) else terms or []):
            key = _merge(factors)
            acc[key] = acc.get(key, ZERO) + RatFunc(c)
        self.terms = {k: c for k, c in acc.items() if c}
        self.source, self.target = source, target

    @classmethod
    def word(cls, w: Word, c=ONE) -> "Op":
        return cls({(w,): c}, w.source, w.target)

    @classmethod
    def factor(cls, f, c=ONE) -> "Op":
        return cls({(f,): c}, f.source, f.target)

    @classmethod
    def identity(cls, level: int, c=ONE) -> "Op":
        return cls({(): c}, level, level)

    def _check(self, o: "Op"):
        if (self.source, self.target) != (o.source, o.target):
            raise LevelError(f"level mismatch: {self.source}->{self.target} vs {o.source}->{o.target}")

    def __add__(self, o: "Op") -> "Op":
        self._check(o)
        d = dict(self.terms)
        for k, c in o.terms.items():
            d[k] = d.get(k, ZERO) + c
        return Op(d, self.source, self.target)

    def __neg__(self):
        return Op({k: -c for k, c in self.terms.items()}, self.source, self.target)

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c) -> "Op":
        c = RatFunc(c)
        return Op({k: c * v for k, v in self.terms.items()}, self.source, self.target)

    def __mul__(self, o):
        if not isinstance(o, Op):
            return self.scale(o)
        if self.source != o.target:
            raise LevelError(f"cannot compose: {self.source} != {o.target}")
        d: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                k = _merge(k1 + k2)
                d[k] = d.get(k, ZERO) + c1 * c2
        return Op(d, o.source, self.target)

    def __rmul__(self, c):
        return self.scale(c)

    def margin(self) -> int:
        best = 0
        for factors in self.terms:
            letters: list = []
            for f in factors:
                letters += list(f.letters) if isinstance(f, Word) else list(f.margin_letters())
            best = max(best, Word(tuple(letters), self.source).margin())
        return best

    def words(self) -> list[tuple[tuple, RatFunc]]:
        return sorted(self.terms.items(), key=lambda kv: str_factors(kv[0]))

    def apply(self, v: Vect, policy: TruncationPolicy | None, fld=EXACT) -> Vect:
        out = Vect({}, self.target)
        for factors, c in self.terms.items():
            w = v
            for f in reversed(factors):
                if isinstance(f, Word):
                    w = apply_word(f, w, policy, fld)
                else:
                    w = f.apply(w, policy, fld)
            if w.level is None or w.level != self.target:
                w = Vect(w.terms, self.target)
            out = out + w.scale(fld.coerce(c))
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*[{str_factors(k)}]" for k, c in self.words())


def str_factors(factors: tuple) -> str:
    return " ".join(str(f) for f in factors) if factors else "1"


def W(text: str, source: int, c=ONE) -> Op:
    return Op.word(parse_word(text, source) if text.strip() else Word((), source), c)


def I(level: int, c=ONE) -> Op:
    return Op.identity(level, c)


def E(m: int) -> Op:
    return Op.word(e_word(m))


def F(m: int) -> Op:
    return Op.word(f_word(m))


def Yop(ms) -> Op:
    return Op.word(Y_word(ms))


def Aop(ms) -> Op:
    return Op.word(A_word(ms))


def zpoly(level: int, poly: dict) -> Op:
    """sum c * z1^a1 ... zk^ak as a level-k loop; keys are exponent tuples."""
    out = Op({}, level, level)
    for exps, c in poly.items():
        letters = tuple(zl(i + 1, a) for i, a in enumerate(exps) if a)
        out = out + Op.word(Word(letters, level), c)
    return out


def _pmul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, ZERO) + RatFunc(c1) * RatFunc(c2)
    return {k: v for k, v in out.items() if v}


def comm(a: Op, b: Op) -> Op:
    return a * b - b * a


# ---------------------------------------------------------------------------
# Instances and reports

@dataclass(frozen=True)
class Instance:
    rid: str
    params: tuple                      # sorted (name, value) pairs
    lhs: object = None                 # Op, or None for scalar instances
    rhs: object = None
    scalar_cells: Callable | None = None   # () -> list of (witness, lhs_value, rhs_value)

    def params_json(self):
        return {k: v for k, v in self.params}


@dataclass
class RelationReport:
    id: str
    params: dict
    domain_size: int
    status: str                        # pass | fail | skipped
    counterexample: dict | None = None
    overflow: int = 0
    point: str | None = None

    def to_json(self):
        d = {"id": self.id, "params": self.params, "domain_size": self.domain_size,
             "status": self.status}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.overflow:
            d["overflow_states"] = self.overflow
        if self.point is not None:
            d["point"] = self.point
        return d


@dataclass(frozen=True)
class Config:
    N: int = 6
    K: int = 3
    M: int = 6
    seed: int = 0
    point: tuple | None = None         # (q0, t0) for fast mode, or None
    fast: bool = False

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(self.N, self.K)

    def to_json(self):
        return {"N": self.N, "K": self.K, "M": self.M, "seed": self.seed, "fast": self.fast,
                "point": None if self.point is None else [str(Fraction(x)) for x in self.point]}


def _vjson(v) -> object:
    if isinstance(v, Vect):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_vjson(x) for x in v]
    if isinstance(v, RatFunc):
        return str(v)
    return str(v)


def _coerce_val(v, fld):
    if isinstance(v, (list, tuple)):
        return tuple(_coerce_val(x, fld) for x in v)
    return fld.coerce(v)


def _cells_operator(inst: Instance, cfg: Config, fld) -> Iterator:
    lhs, rhs = inst.lhs, inst.rhs
    margin = max(lhs.margin(), rhs.margin())
    states = enumerate_states(lhs.source, cfg.N - margin) if cfg.N - margin >= 0 else ()
    policy = cfg.policy
    for s in states:
        v = Vect.basis(s, fld.one)
        try:
            a = lhs.apply(v, policy, fld)
            b = rhs.apply(v, policy, fld)
        except TruncationOverflow:
            yield s.to_json(), None, None
            continue
        yield s.to_json(), a, b


def _run_cells(inst: Instance, cfg: Config, fld) -> RelationReport:
    size = over = 0
    cells = (_cells_operator(inst, cfg, fld) if inst.scalar_cells is None
             else ((w, _coerce_val(a, fld), _coerce_val(b, fld)) for w, a, b in inst.scalar_cells()))
    for witness, a, b in cells:
        if a is None:
            over += 1
            continue
        size += 1
        if a != b:
            return RelationReport(inst.rid, inst.params_json(), size, "fail",
                                  {"witness": witness, "lhs": _vjson(a), "rhs": _vjson(b)}, over)
    status = "pass" if size else "skipped"
    return RelationReport(inst.rid, inst.params_json(), size, status, None, over)


def check_instance(inst: Instance, cfg: Config, index: int = 0) -> RelationReport:
    if not cfg.fast:
        return _run_cells(inst, cfg, EXACT)
    rng = random.Random(f"{cfg.seed}:{index}:{inst.rid}")
    fld = PointField(*cfg.point) if cfg.point is not None else PointField.random(rng)
    for _attempt in range(8):
        try:
            rep = _run_cells(inst, cfg, fld)
            rep.point = f"q={fld.q0},t={fld.t0}"
            return rep
        except (PoleError, ZeroDivisionError):
            log.info("pole at %s for %s; retrying at a fresh point", fld, inst.rid)
            fld = PointField.random(rng)
    raise PoleError(f"{inst.rid}: no pole-free evaluation point found")


# ---------------------------------------------------------------------------
# Sign constants (e vs e~, f vs f~)

@lru_cache(maxsize=None)
def sign_constants() -> tuple[int, int]:
    """(s, s') with e_m = s(1-q)(1-t) e~_m and f_m = s' f~_m, read off at the smallest states."""
    v = Vect.basis(level0(()))
    a = apply_word(e_word(0), v).coeff(level0((1,)))
    b = ft_e_act(0, v).coeff(level0((1,))) * (1 - Q) * (1 - T)
    s = a / b
    v1 = Vect.basis(level0((1,)))
    a2 = apply_word(f_word(0), v1).coeff(level0(()))
    b2 = ft_f_act(0, v1).coeff(level0(()))
    s2 = a2 / b2
    for x in (s, s2):
        if x not in (ONE, -ONE):
            raise cb.ConsistencyError(f"comparison scalar {x} is not a sign")
    return (1 if s == ONE else -1, 1 if s2 == ONE else -1)


# ---------------------------------------------------------------------------
# Relation families

def _inst(rid, lhs, rhs, **params) -> Instance:
    return Instance(rid, tuple(sorted(params.items())), lhs, rhs)


def _db_plus(cfg: Config) -> Iterator[Instance]:
    q = Q
    levels = range(0, cfg.K + 1)
    for k in levels:
        if k >= 2:
            for i in range(1, k):
                yield _inst("db+/hecke_quadratic", W(f"T{i} T{i}", k),
                            W(f"T{i}", k, 1 - q) + I(k, q), k=k, i=i)
                yield _inst("db+/T_z", W(f"Tinv{i} z{i+1} Tinv{i}", k), W(f"z{i}", k, 1 / q), k=k, i=i)
            for i in range(1, k + 1):
                for j in range(i + 1, k + 1):
                    yield _inst("db+/z_commute", W(f"z{i} z{j}", k), W(f"z{j} z{i}", k), k=k, i=i, j=j)
            yield _inst("db+/dminus2_T", W(f"d- d- T{k-1}", k), W("d- d-", k), k=k)
            yield _inst("db+/phi_dminus", W("phi d-", k, q), W(f"d- phi T{k-1}", k), k=k)
            for i in range(1, k):
                yield _inst("db+/z_dminus", W(f"z{i} d-", k), W(f"d- z{i}", k), k=k, i=i)
        if k >= 3:
            for i in range(1, k - 1):
                yield _inst("db+/braid", W(f"T{i} T{i+1} T{i}", k), W(f"T{i+1} T{i} T{i+1}", k), k=k, i=i)
                yield _inst("db+/dminus_T", W(f"d- T{i}", k), W(f"T{i} d-", k), k=k, i=i)
            for j in range(1, k):
                for i in range(1, k + 1):
                    if i not in (j, j + 1):
                        yield _inst("db+/z_T_commute", W(f"z{i} T{j}", k), W(f"T{j} z{i}", k), k=k, i=i, j=j)
        yield _inst("db+/T_dplus2", W("T1 d+ d+", k), W("d+ d+", k), k=k)
        for i in range(1, k):
            yield _inst("db+/dplus_T", W(f"d+ T{i}", k), W(f"T{i+1} d+", k), k=k, i=i)
        if k >= 1:
            yield _inst("db+/T_phi_dplus", W("T1 phi d+", k), W("d+ phi", k, q), k=k)
            for i in range(1, k + 1):
                yield _inst("db+/dplus_z", W(f"d+ z{i}", k), W(f"z{i+1} d+", k), k=k, i=i)
            yield _inst("db+/qphi", W("z1 d+ d-", k, q) - W("z1 d- d+", k),
                        (W(f"d+ d- z{k}", k) - W(f"d- d+ z{k}", k)).scale(q * T), k=k)
        yield from _delta_family("db+", k, cfg)
    # far commutation needs level >= 4
    for k in range(4, max(cfg.K, 4) + 1):
        for i in range(1, k):
            for j in range(i + 2, k):
                yield _inst("db+/far_commute", W(f"T{i} T{j}", k), W(f"T{j} T{i}", k), k=k, i=i, j=j)


def _db_minus(cfg: Config) -> Iterator[Instance]:
    qi = 1 / Q
    for kk in range(0, cfg.K + 1):
        k = -kk
        if kk >= 2:
            for i in range(1, kk):
                yield _inst("db-/hecke_quadratic", W(f"T{i} T{i}", k),
                            W(f"T{i}", k, 1 - qi) + I(k, qi), k=k, i=i)
                yield _inst("db-/T_z", W(f"Tinv{i} z{i+1} Tinv{i}", k), W(f"z{i}", k, Q), k=k, i=i)
            for i in range(1, kk + 1):
                for j in range(i + 1, kk + 1):
                    yield _inst("db-/z_commute", W(f"z{i} z{j}", k), W(f"z{j} z{i}", k), k=k, i=i, j=j)
            yield _inst("db-/dplus2_T", W(f"d+ d+ T{kk-1}", k), W("d+ d+", k), k=k)
            yield _inst("db-/phi_dplus", W("phi d+", k, qi), W(f"d+ phi T{kk-1}", k), k=k)
            for i in range(1, kk):
                yield _inst("db-/z_dplus", W(f"z{i} d+", k), W(f"d+ z{i}", k), k=k, i=i)
        if kk >= 3:
            for i in range(1, kk - 1):
                yield _inst("db-/braid", W(f"T{i} T{i+1} T{i}", k), W(f"T{i+1} T{i} T{i+1}", k), k=k, i=i)
                yield _inst("db-/dplus_T", W(f"d+ T{i}", k), W(f"T{i} d+", k), k=k, i=i)
            for j in range(1, kk):
                for i in range(1, kk + 1):
                    if i not in (j, j + 1):
                        yield _inst("db-/z_T_commute", W(f"z{i} T{j}", k), W(f"T{j} z{i}", k), k=k, i=i, j=j)
        yield _inst("db-/T_dminus2", W("T1 d- d-", k), W("d- d-", k), k=k)
        for i in range(1, kk):
            yield _inst("db-/dminus_T", W(f"d- T{i}", k), W(f"T{i+1} d-", k), k=k, i=i)
        if kk >= 1:
            yield _inst("db-/T_phi_dminus", W("T1 phi d-", k), W("d- phi", k, qi), k=k)
            for i in range(1, kk + 1):
                yield _inst("db-/dminus_z", W(f"d- z{i}", k), W(f"z{i+1} d-", k), k=k, i=i)
            yield _inst("db-/qphi", W("z1 d- d+", k, qi) - W("z1 d+ d-", k),
                        (W(f"d- d+ z{kk}", k) - W(f"d+ d- z{kk}", k)).scale(qi / T), k=k)
        yield from _delta_family("db-", k, cfg)
    for kk in range(4, max(cfg.K, 4) + 1):
        for i in range(1, kk):
            for j in range(i + 2, kk):
                yield _inst("db-/far_commute", W(f"T{i} T{j}", -kk), W(f"T{j} T{i}", -kk), k=-kk, i=i, j=j)


DELTA_MS = (1, 2)


def _delta_family(prefix: str, k: int, cfg: Config) -> Iterator[Instance]:
    kk = abs(k)
    plus = prefix == "db+"
    for name in ("Delta", "DeltaStar"):
        for m in DELTA_MS:
            D = f"{name}[{m}]"
            for other in ("Delta", "DeltaStar"):
                for n in DELTA_MS:
                    if (other, n) <= (name, m):
                        continue
                    O = f"{other}[{n}]"
                    yield _inst(f"{prefix}/delta_commute", W(f"{D} {O}", k), W(f"{O} {D}", k),
                                k=k, a=D, b=O)
            for i in range(1, kk):
                yield _inst(f"{prefix}/delta_T", W(f"{D} T{i}", k), W(f"T{i} {D}", k), k=k, a=D, i=i)
            for j in range(1, kk + 1):
                yield _inst(f"{prefix}/delta_z", W(f"{D} z{j}", k), W(f"z{j} {D}", k), k=k, a=D, j=j)
            zexp = m if name == "Delta" else -m
            if plus:
                if k >= 1:
                    yield _inst("db+/delta_dminus", W(f"{D} d-", k), W(f"d- {D}", k), k=k, a=D)
                yield _inst("db+/delta_dplus", W(f"{D} d+", k) - W(f"d+ {D}", k),
                            W(f"z1^{zexp} d+", k), k=k, a=D)
            else:
                if k <= -1:
                    yield _inst("db-/delta_dplus", W(f"{D} d+", k), W(f"d+ {D}", k), k=k, a=D)
                yield _inst("db-/delta_dminus", W(f"{D} d-", k) - W(f"d- {D}", k),
                            W(f"z1^{zexp} d-", k, -ONE), k=k, a=D)


def _psi_rhs(n: int, m: int, eps: int) -> Op:
    s = m + n
    if s > 0:
        psi = Op.factor(Psi("+", s))
    elif s < 0:
        psi = -Op.factor(Psi("-", -s))
    else:
        psi = Op.factor(Psi("+", 0)) - Op.factor(Psi("-", 0))
    return psi.scale(eps / (1 - Q3))


def _db_zero(cfg: Config) -> Iterator[Instance]:
    s, s2 = sign_constants()
    for n in range(-2, 3):
        for m in range(-2, 3):
            yield _inst("db0/ef_commutator", comm(E(n), F(m)), _psi_rhs(n, m, s * s2), n=n, m=m)


def _series_instances(rid, X: Callable, Y: Callable, G: dict, Gp: dict, As, Bs, **extra):
    """Coefficient of z^A w^B in G(z,w) X(z) Y(w) = -G'(z,w) Y(w) X(z).

    X(i), Y(j) return the Op of the coefficient of z^-i (resp. w^-j), or None for zero.
    """
    for A in As:
        for B in Bs:
            lhs = rhs = None
            for (a, b), c in sorted(G.items()):
                x, y = X(a - A), Y(b - B)
                if x is not None and y is not None:
                    t = (x * y).scale(c)
                    lhs = t if lhs is None else lhs + t
            for (a, b), c in sorted(Gp.items()):
                x, y = X(a - A), Y(b - B)
                if x is not None and y is not None:
                    t = (y * x).scale(-c)
                    rhs = t if rhs is None else rhs + t
            if lhs is None and rhs is None:
                continue
            zero = I(0, ZERO)
            yield _inst(rid, lhs or zero, rhs or zero, A=A, B=B, **extra)


def _gdict(swap: bool) -> dict:
    g = g_poly()
    return {((j, i) if swap else (i, j)): c for (i, j), c in g.coeffs.items()}


def _eha(cfg: Config) -> Iterator[Instance]:
    for n in range(-2, 3):
        for m in range(-2, 3):
            lhs = E(n + 3) * E(m) - (E(n + 2) * E(m + 1)).scale(SIGMA1) \
                + (E(n + 1) * E(m + 2)).scale(SIGMA2) - E(n) * E(m + 3)
            rhs = -(E(m + 3) * E(n)) + (E(m + 2) * E(n + 1)).scale(SIGMA1) \
                - (E(m + 1) * E(n + 2)).scale(SIGMA2) + E(m) * E(n + 3)
            yield _inst("e_quadratic", lhs, rhs, n=n, m=m)
    # f(z) f(w): G = g(w,z), G' = g(z,w); A = -n, B = -m
    yield from _series_instances("f_quadratic", F, F, _gdict(True), _gdict(False),
                                 range(-2, 3), range(-2, 3))
    zero = I(0, ZERO)
    yield _inst("cubic_e", comm(E(0), comm(E(1), E(-1))), zero)
    yield _inst("cubic_e", W("d- d- d+ d+ d- d+", 0), W("d- d+ d- d- d+ d+", 0), form="d2")
    yield _inst("cubic_f", comm(F(0), comm(F(1), F(-1))), zero)
    yield _inst("cubic_f", W("d+ d+ d- d- d+ d-", 0), W("d+ d- d+ d+ d- d-", 0), form="d2")
    for m in (1, 2, 3):
        for k in range(-2, 3):
            yield _inst("delta_e", comm(W(f"Delta[{m}]", 0), E(k)), E(k + m), m=m, k=k)
            yield _inst("delta_e", comm(W(f"DeltaStar[{m}]", 0), E(k)), E(k - m), m=-m, k=k)
            yield _inst("delta_f", comm(W(f"Delta[{m}]", 0), F(k)), -F(k + m), m=m, k=k)
            yield _inst("delta_f", comm(W(f"DeltaStar[{m}]", 0), F(k)), -F(k - m), m=-m, k=k)
    order = 5

    def psi(sign):
        def X(i):
            if sign == "+":
                return Op.factor(Psi("+", i)) if 0 <= i <= order else None
            return Op.factor(Psi("-", -i)) if 0 <= -i <= order else None
        return X
    for sign in ("+", "-"):
        As = range(3 - order, 4) if sign == "+" else range(0, order + 1)
        yield from _series_instances("psi_e", psi(sign), E, _gdict(False), _gdict(True),
                                     As, range(-2, 3), sign=sign)
        yield from _series_instances("psi_f", psi(sign), F, _gdict(True), _gdict(False),
                                     As, range(-2, 3), sign=sign)


def _coefficients(cfg: Config) -> Iterator[Instance]:
    pairs = [(mu, x) for mu in cb.partitions_upto(7) for x in cb.removable_boxes(mu)]

    def wit(mu, x):
        return {"mu": list(mu), "x": list(x)}

    def c_cells():
        return [(wit(mu, x), cb.c_lambda_form(mu.remove(x), x), cb.c_product_form(mu.remove(x), x))
                for mu, x in pairs]

    def cs_cells():
        return [(wit(mu, x), cb.cstar_lambda_form(mu, x), cb.cstar_product_form(mu, x))
                for mu, x in pairs]

    def ratio_cells():
        out = []
        for mu, x in pairs:
            lam = mu.remove(x)
            lhs = cb.c_lambda_form(lam, x) / cb.cstar_lambda_form(mu, x)
            rhs = -(1 - Q) * (1 - T) * cb.d_lambda(mu) / ((1 - Q * T) * cb.d_lambda(lam))
            out.append((wit(mu, x), lhs, rhs))
        return out
    yield Instance("c_forms", (), scalar_cells=c_cells)
    yield Instance("cstar_forms", (), scalar_cells=cs_cells)
    yield Instance("c_cstar_ratio", (), scalar_cells=ratio_cells)


def _monodromy(cfg: Config) -> Iterator[Instance]:
    def cells(dual):
        out = []
        for lam in cb.partitions_upto(6):
            boxes = cb.removable_boxes(lam) if dual else cb.addable_boxes(lam)
            for x, y in itertools.permutations(boxes, 2):
                fn = cb.dual_monodromy_check if dual else cb.monodromy_check
                a, b = fn(lam, x, y)
                out.append(({"lambda": list(lam), "x": list(x), "y": list(y)}, a, b))
        return out
    yield Instance("monodromy", (), scalar_cells=lambda: cells(False))
    yield Instance("dual_monodromy", (), scalar_cells=lambda: cells(True))


def _ft(cfg: Config) -> Iterator[Instance]:
    s, s2 = sign_constants()
    for m in range(-2, 3):
        yield _inst("ft_e", E(m), Op.factor(Ft("e", m)).scale(s * (1 - Q) * (1 - T)), m=m, s=s)
        yield _inst("ft_f", F(m), Op.factor(Ft("f", m)).scale(s2), m=m, s_prime=s2)


def _psi_dual(cfg: Config) -> Iterator[Instance]:
    for sign in ("+", "-"):
        def cells(sign=sign):
            return [({"lambda": list(lam)}, tuple(psi_rational(sign, lam, cfg.M)),
                     tuple(psi_exponential(sign, lam, cfg.M)))
                    for lam in cb.partitions_upto(5)]
        yield Instance("psi_dual", (("sign", sign),), scalar_cells=cells)


def _replace(ms, i, a, b):
    ms = list(ms)
    ms[i], ms[i + 1] = a, b
    return tuple(ms)


def _y_rel2_rhs(k: int, ms: tuple) -> Op:
    out = I(0, ZERO)
    for i, mi in enumerate(ms):
        pre, post = ms[:i], ms[i + 1:]
        if k > mi:
            for a in range(1, k - mi + 1):
                out = out + Yop(pre + (k - a, mi + a) + post)
        elif k < mi:
            for a in range(1, mi - k + 1):
                out = out - Yop(pre + (mi - a, k + a) + post)
    return out.scale((T - 1) * (Q - 1))


def _y_relations(cfg: Config) -> Iterator[Instance]:
    rng = (-1, 0, 1)
    for n in (1, 2, 3):
        for ms in itertools.product(rng, repeat=n):
            for i in range(n - 1):
                lhs = Yop(ms) - Yop(_replace(ms, i, ms[i] - 1, ms[i + 1] + 1)).scale(Q * T)
                rhs = -(Yop(ms[:i + 1]) * Yop(ms[i + 1:]))
                yield _inst("y_relation_1", lhs, rhs, m=list(ms), i=i + 1)
            for k in rng:
                yield _inst("y_relation_2", comm(E(k), Yop(ms)), _y_rel2_rhs(k, ms), m=list(ms), k=k)
    den = (T + 1 / Q) * (1 - T)
    yield _inst("y00", W("d- d- d+ d+", 0),
                (E(0) * E(0)).scale((1 - T * T) / den) + comm(E(1), E(-1)).scale(T / den))


def _h_op(j: int, extra: tuple = (0, 0)) -> dict:
    return {(a + extra[0], b + extra[1]): c for (a, b), c in h_poly(j).items()}


def _lemmas(cfg: Config) -> Iterator[Instance]:
    q = Q
    c = (1 - q) / q
    # level-2 vanishing for a few symmetric a
    sym = {"1": {(0, 0): 1}, "z1z2+1": {(1, 1): 1, (0, 0): 1}, "z1+z2": {(1, 0): 1, (0, 1): 1},
           "z1^-1+z2^-1": {(-1, 0): 1, (0, -1): 1}, "z1^2+z2^2": {(2, 0): 1, (0, 2): 1}}
    for name, a in sym.items():
        poly = _pmul({(1, 0): 1, (0, 1): -q}, a)
        yield _inst("level2_zero", W("d- d-", 2) * zpoly(2, poly) * W("d+ d+", 0), I(0, ZERO), a=name)
    for k in range(-2, 3):
        for m in range(-2, 3):
            lhs = E(k + 1) * E(m) - (E(k) * E(m + 1)).scale(T)
            poly = {(k + 1, m): 1 / q, (k, m + 1): -T}
            yield _inst("ee_level2", lhs, W("d- d-", 2) * zpoly(2, poly) * W("d+ d+", 0), k=k, m=m)
    for m1 in range(-2, 3):
        for m2 in range(-2, 3):
            rhs = (E(m1) * E(m2)).scale(1 / (q - 1)) \
                - (W("d- d-", 2) * zpoly(2, {(m1, m2): 1}) * W("d+ d+", 0)).scale(1 / (q - 1))
            yield _inst("degree2_example", Yop((m1, m2)), rhs, m1=m1, m2=m2)
    yield _inst("e1em1_Y", comm(E(1), E(-1)), (Yop((0, 0)) + Yop((-1, 1))).scale((q - 1) * (T - 1)))
    for k in (2, 3):
        for i in range(2, k + 1):
            yield _inst("phi_relations", W(f"z{i} phi", k), W(f"phi z{i-1}", k), k=k, form="z", i=i)
            if i <= k - 1:
                yield _inst("phi_relations", W(f"T{i} phi", k), W(f"phi T{i-1}", k), k=k, form="T", i=i)
        yield _inst("phi_relations", W(f"phi phi T{k-1}", k), W("T1 phi phi", k), k=k, form="phi2")
    for a in range(-2, 3):
        # z1^a T1^-1 = T1^-1 z2^a - q^-1 (1-q) h_{a-1}(z1,z2) z1
        yield _inst("z_through_Tinv", zpoly(2, {(a, 0): 1}) * W("Tinv1", 2),
                    W("Tinv1", 2) * zpoly(2, {(0, a): 1}) - zpoly(2, _h_op(a - 1, (1, 0))).scale(c),
                    a=a, slot=1)
        # z2^a T1^-1 = T1^-1 z1^a + q^-1 (1-q) h_{a-1}(z1,z2) z1
        yield _inst("z_through_Tinv", zpoly(2, {(0, a): 1}) * W("Tinv1", 2),
                    W("Tinv1", 2) * zpoly(2, {(a, 0): 1}) + zpoly(2, _h_op(a - 1, (1, 0))).scale(c),
                    a=a, slot=2)
    for k in range(-2, 3):
        bracket = W("d-", 2) * W("Tinv1", 2) * zpoly(2, {(k, 0): 1}) * W("d+", 1)
        lhs = W("phi", 1) * bracket
        rhs = bracket * W("phi", 1) + (W("d-", 2) * zpoly(2, _h_op(k - 1, (1, 0))) * W("d+ phi", 1)).scale(c)
        yield _inst("push_T_left", lhs, rhs, k=k)
        for m in range(-2, 3):
            lhs = W(f"z1^{m} phi", 1) * bracket if m else W("phi", 1) * bracket
            zm = zpoly(1, {(m,): 1})
            poly = {(a + k + 1, b + k): v for (a, b), v in h_poly(m - k - 1).items()}
            rhs = bracket * zm * W("phi", 1) - (W("d-", 2) * zpoly(2, poly) * W("d+ phi", 1)).scale(c)
            yield _inst("push_T_left_cor", lhs, rhs, k=k, m=m)
            # right end
            lhs = zm * W("d+ d-", 1) * zpoly(1, {(k,): 1}) * W("d+", 0)
            rhs = (zm * W("phi", 1) * zpoly(1, {(k,): 1}) * W("d+", 0)).scale(q - 1) \
                + W("d-", 2) * W("Tinv1", 2) * zpoly(2, {(k, 0): 1}) * W("d+", 1) * zm * W("d+", 0) \
                - (W("d-", 2) * zpoly(2, poly) * W("d+ d+", 0)).scale(c)
            yield _inst("right_end", lhs, rhs, k=k, m=m)
    rng = (-1, 0, 1)
    for n in (1, 2):
        for ms in itertools.product(rng, repeat=n):
            lhs = Aop(ms + (0,)) - Aop(ms[:-1] + (ms[-1] - 1, 1)).scale(q * T)
            yield _inst("A_relation_1", lhs, -(Aop(ms) * W("d+ d-", 1)), m=list(ms))
    for pre in [()] + [(x,) for x in rng]:
        for mi in range(-2, 3):
            for k in range(-2, 3):
                poly = {(a + k + 1, b + k): v for (a, b), v in h_poly(mi - k - 1).items()}
                bracket = W("d-", 2) * zpoly(2, poly) * W("d+", 1)
                lhs = Aop(pre + (0,)) * bracket
                rhs = _a_rel2_rhs(pre, mi, k, Aop)
                yield _inst("A_relation_2", lhs, rhs, prefix=list(pre), mi=mi, k=k)
                for post in [()] + [(x,) for x in rng]:
                    tail = I(1)
                    for x in post:
                        tail = tail * W("phi", 1) * zpoly(1, {(x,): 1})
                    lhs = Aop(pre + (0,)) * bracket * tail * W("d+", 0)
                    rhs = _a_rel2_rhs(pre, mi, k, lambda ms: Yop(tuple(ms) + post))
                    yield _inst("Di_to_Y", lhs, rhs, prefix=list(pre), mi=mi, k=k, post=list(post))


def _a_rel2_rhs(pre: tuple, mi: int, k: int, mk) -> Op:
    q = Q
    out = mk(pre + (k, mi)).scale(q) - mk(pre + (mi, k)).scale(q)
    if mi > k:
        for a in range(1, mi - k + 1):
            out = out + mk(pre + (mi - a, k + a)).scale(q * (T - 1))
    elif mi < k:
        for a in range(1, k - mi + 1):
            out = out - mk(pre + (k - a, mi + a)).scale(q * (T - 1))
    return out


def _rewriter_family(cfg: Config) -> Iterator[Instance]:
    from . import rewriter
    yield from rewriter.soundness_instances(cfg)


def _theta_family(cfg: Config) -> Iterator[Instance]:
    from . import rewriter
    yield from rewriter.theta_instances(cfg, _db_plus(cfg))


# name -> (builder, id prefixes it produces); GROUPS maps acceptance criteria to ids
REGISTRY: dict[str, tuple[Callable[[Config], Iterator[Instance]], tuple[str, ...]]] = {
    "coefficients": (_coefficients, ("c_forms", "cstar_forms", "c_cstar_ratio")),
    "monodromy": (_monodromy, ("monodromy", "dual_monodromy")),
    "db+": (_db_plus, ("db+/",)),
    "db-": (_db_minus, ("db-/",)),
    "db0": (_db_zero, ("db0/",)),
    "eha": (_eha, ("e_quadratic", "f_quadratic", "cubic_e", "cubic_f", "delta_e", "delta_f",
                   "psi_e", "psi_f")),
    "ft": (_ft, ("ft_e", "ft_f")),
    "psi_dual": (_psi_dual, ("psi_dual",)),
    "y": (_y_relations, ("y_relation_1", "y_relation_2", "y00")),
    "lemmas": (_lemmas, ("level2_zero", "ee_level2", "degree2_example", "e1em1_Y",
                         "phi_relations", "z_through_Tinv", "push_T_left", "push_T_left_cor",
                         "right_end", "A_relation_1", "A_relation_2", "Di_to_Y")),
    "rewriter": (_rewriter_family, ("rewriter/",)),
    "theta": (_theta_family, ("theta/",)),
}

GROUPS = {
    1: REGISTRY["coefficients"][1],
    2: REGISTRY["monodromy"][1],
    3: ("db+/", "db-/", "db0/"),
    4: REGISTRY["eha"][1],
    5: REGISTRY["ft"][1],
    6: ("psi_dual",),
    7: REGISTRY["y"][1],
    8: ("rewriter/",),
    9: ("theta/",),
}


def _matches(rid: str, selectors: Iterable[str]) -> bool:
    for s in selectors:
        if s == "all" or rid == s or (s.endswith("/") and rid.startswith(s)) or rid.startswith(s + "/"):
            return True
    return False


def _builder_selected(name: str, prefixes: tuple, selectors: tuple) -> bool:
    for s in selectors:
        if s in ("all", name):
            return True
        for p in prefixes:
            if p.endswith("/"):
                if s.startswith(p) or s == p.rstrip("/"):
                    return True
            elif s == p:
                return True
    return False


def build_instances(cfg: Config, selectors: Iterable[str] = ("all",)) -> list[Instance]:
    selectors = tuple(selectors)
    out = []
    for name, (builder, prefixes) in REGISTRY.items():
        if not _builder_selected(name, prefixes, selectors):
            continue
        whole = any(s == name for s in selectors)
        for inst in builder(cfg):
            if whole or _matches(inst.rid, selectors):
                out.append(inst)
    return out


def relation_ids(cfg: Config | None = None) -> list[str]:
    cfg = cfg or Config()
    seen: dict[str, None] = {}
    for builder, _prefixes in REGISTRY.values():
        for inst in builder(cfg):
            seen.setdefault(inst.rid)
    return list(seen)


_WORKER_CFG: Config | None = None
_WORKER_SEL: tuple = ()


def _worker_init(cfg, selectors):
    global _WORKER_CFG, _WORKER_SEL, _WORKER_INSTANCES
    _WORKER_CFG, _WORKER_SEL = cfg, selectors
    _WORKER_INSTANCES = build_instances(cfg, selectors)


def _worker_run(index: int) -> dict:
    return check_instance(_WORKER_INSTANCES[index], _WORKER_CFG, index).to_json()


def threads() -> int:
    env = os.environ.get("HALLPATH_THREADS")
    n = int(env) if env else (os.cpu_count() or 1)
    return max(1, n)


def verify(cfg: Config, selectors: Iterable[str] = ("all",), workers: int | None = None) -> list[dict]:
    """Run every selected instance; the result order is the registry order."""
    selectors = tuple(selectors)
    instances = build_instances(cfg, selectors)
    workers = threads() if workers is None else workers
    if workers <= 1 or len(instances) < 2:
        return [check_instance(inst, cfg, i).to_json() for i, inst in enumerate(instances)]
    with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                             initargs=(cfg, selectors)) as pool:
        return list(pool.map(_worker_run, range(len(instances)), chunksize=4))


def report_json(cfg: Config, reports: list[dict]) -> str:
    s, s2 = sign_constants()
    counts = {k: sum(r["status"] == k for r in reports) for k in ("pass", "fail", "skipped")}
    doc = {"config": cfg.to_json(),
           "constants": {"s": s, "s_prime": s2, "epsilon": s * s2},
           "summary": counts,
           "reports": reports}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

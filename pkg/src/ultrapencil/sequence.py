"""Diagonal pencils on a p-adic sequence space, modeled as a finite prefix
plus a symbolic tail rule.

All infima and suprema over the infinitely many diagonal entries are read
off the tail rule exactly, never from a floating truncation: a constant
tail contributes a single entry value, a geometric tail a finite head plus
a known limit behavior.  This keeps the essential spectrum and the
complete-continuity classification exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .padic import (
    PAdicContext,
    UltraNorm,
    UltrapencilError,
    cmp_norm,
    ensure_epsilon,
    format_rational,
    padic_abs,
    parse_rational,
    valuation,
)
from .linalg import Matrix
from .pencil import Kappa, Pencil


class UnsupportedTailError(UltrapencilError):
    """The tail-rule combination is outside the supported families."""


class EssentialPointError(UltrapencilError):
    """No finite-rank perturbation can regularize an essential point."""


CONST = "const"
GEOM = "geom"


@dataclass(frozen=True)
class TailRule:
    """Eventual entries: Constant c, or Geometric c * p^(step_v * (i - N))."""

    kind: str
    c: Fraction
    step_v: int = 0

    def __post_init__(self) -> None:
        if self.kind not in (CONST, GEOM):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == GEOM and self.step_v < 1:
            raise ValueError("geometric tails need step_v >= 1")

    @staticmethod
    def constant(c) -> "TailRule":
        return TailRule(CONST, Fraction(c))

    @staticmethod
    def geometric(c, step_v: int) -> "TailRule":
        return TailRule(GEOM, Fraction(c), step_v)

    def to_json(self) -> dict:
        obj = {"kind": self.kind, "c": format_rational(self.c)}
        if self.kind == GEOM:
            obj["step_v"] = self.step_v
        return obj

    @staticmethod
    def from_json(obj: dict) -> "TailRule":
        if obj["kind"] == GEOM:
            return TailRule.geometric(parse_rational(obj["c"]), int(obj["step_v"]))
        return TailRule.constant(parse_rational(obj["c"]))


@dataclass(frozen=True)
class TailDiagonalOperator:
    prefix: Tuple[Fraction, ...]
    tail: TailRule
    ctx: PAdicContext

    @staticmethod
    def create(prefix: Sequence, tail: TailRule, ctx: PAdicContext) -> "TailDiagonalOperator":
        return TailDiagonalOperator(tuple(Fraction(x) for x in prefix), tail, ctx)

    @property
    def start(self) -> int:
        return len(self.prefix)

    def entry(self, i: int) -> Fraction:
        if i < self.start:
            return self.prefix[i]
        if self.tail.kind == CONST:
            return self.tail.c
        return self.tail.c * Fraction(self.ctx.p) ** (self.tail.step_v * (i - self.start))

    def norm(self) -> UltraNorm:
        # A geometric tail peaks at its first index, so |c| bounds it.
        vals = [padic_abs(x, self.ctx) for x in self.prefix]
        vals.append(padic_abs(self.tail.c, self.ctx))
        return max(vals)

    def padded(self, n: int) -> "TailDiagonalOperator":
        if n <= self.start:
            return self
        prefix = list(self.prefix) + [self.entry(i) for i in range(self.start, n)]
        tail = self.tail
        if tail.kind == GEOM:
            tail = TailRule.geometric(self.entry(n), tail.step_v)
        return TailDiagonalOperator(tuple(prefix), tail, self.ctx)


def is_completely_continuous(T: TailDiagonalOperator) -> bool:
    """True iff the tail entry norms tend to zero, i.e. the prefix
    truncations converge to T in operator norm."""
    if T.tail.kind == GEOM:
        return True
    return T.tail.c == 0


@dataclass(frozen=True)
class TailDiagonalPencil:
    A: TailDiagonalOperator
    B: TailDiagonalOperator

    def __post_init__(self) -> None:
        if self.A.ctx != self.B.ctx:
            raise ValueError("operators must share a context")
        if self.A.start != self.B.start:
            raise ValueError("prefixes must be padded to a common length")

    @staticmethod
    def create(A: TailDiagonalOperator, B: TailDiagonalOperator) -> "TailDiagonalPencil":
        n = max(A.start, B.start)
        return TailDiagonalPencil(A.padded(n), B.padded(n))

    @property
    def ctx(self) -> PAdicContext:
        return self.A.ctx

    @property
    def start(self) -> int:
        return self.A.start

    def entry(self, i: int, lam: Fraction) -> Fraction:
        return self.A.entry(i) - Fraction(lam) * self.B.entry(i)

    def require_spectrum_invariants(self) -> None:
        if any(x == 0 for x in self.B.prefix):
            raise UnsupportedTailError("B prefix entries must be nonzero")
        if self.B.tail.kind != CONST or self.B.tail.c == 0:
            raise UnsupportedTailError(
                "spectrum operations need a nonzero constant B tail"
            )

    def truncation(self, n: int) -> Pencil:
        """Finite section on the first n coordinates as a matrix pencil."""
        return Pencil(
            Matrix.diagonal([self.A.entry(i) for i in range(n)]),
            Matrix.diagonal([self.B.entry(i) for i in range(n)]),
            self.ctx,
        )

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "prefix_a": [format_rational(x) for x in self.A.prefix],
            "prefix_b": [format_rational(x) for x in self.B.prefix],
            "tail_a": self.A.tail.to_json(),
            "tail_b": self.B.tail.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "TailDiagonalPencil":
        ctx = PAdicContext(int(obj["p"]))
        A = TailDiagonalOperator.create(
            [parse_rational(s) for s in obj["prefix_a"]],
            TailRule.from_json(obj["tail_a"]),
            ctx,
        )
        B = TailDiagonalOperator.create(
            [parse_rational(s) for s in obj["prefix_b"]],
            TailRule.from_json(obj["tail_b"]),
            ctx,
        )
        return TailDiagonalPencil.create(A, B)


# Tail behavior of the entries a_i - lam*b_i beyond the explicit head.
TAIL_ZERO = "zero"  # every remaining entry is exactly zero
TAIL_NORM_CONST = "norm_const"  # every remaining entry has one fixed norm
TAIL_DECAY = "decay"  # nonzero entries with norms strictly decreasing to 0


@dataclass(frozen=True)
class EntryAnalysis:
    """Exact description of the diagonal of A - lam*B.

    ``explicit`` covers indices [0, cutoff); beyond the cutoff the entries
    follow ``tail`` with common norm ``tail_norm`` (the first tail norm for
    a decaying tail).
    """

    explicit: Tuple[Tuple[int, Fraction], ...]
    cutoff: int
    tail: str
    tail_norm: UltraNorm


def analyze_entries(D: TailDiagonalPencil, lam: Fraction) -> EntryAnalysis:
    lam = Fraction(lam)
    ctx = D.ctx
    n = D.start
    explicit = [(i, D.entry(i, lam)) for i in range(n)]
    ta, tb = D.A.tail, D.B.tail
    if tb.kind != CONST:
        raise UnsupportedTailError("B tails must be constant")
    lcb = lam * tb.c
    if ta.kind == CONST or ta.c == 0:
        t_val = ta.c - lcb if ta.kind == CONST else -lcb
        if t_val == 0:
            return EntryAnalysis(tuple(explicit), n, TAIL_ZERO, UltraNorm.zero())
        return EntryAnalysis(
            tuple(explicit), n, TAIL_NORM_CONST, padic_abs(t_val, ctx)
        )
    # Geometric A tail over a constant B tail.
    if lcb == 0:
        return EntryAnalysis(
            tuple(explicit), n, TAIL_DECAY, padic_abs(ta.c, ctx)
        )
    v_ca = valuation(ta.c, ctx)
    v_lcb = valuation(lcb, ctx)
    # Head of the tail until the geometric part is strictly below |lam*c_B|.
    head = max(0, (v_lcb - v_ca) // ta.step_v + 1)
    for k in range(head):
        i = n + k
        explicit.append((i, D.entry(i, lam)))
    return EntryAnalysis(
        tuple(explicit), n + head, TAIL_NORM_CONST, padic_abs(lcb, ctx)
    )


@dataclass(frozen=True)
class InfSup:
    inf: UltraNorm
    sup: UltraNorm
    zero_indices: Tuple[int, ...]
    zero_infinite: bool
    inf_nonzero: UltraNorm  # infimum over nonzero entries; Zero when 0 is a limit


def tail_inf_sup(D: TailDiagonalPencil, lam: Fraction) -> InfSup:
    """Exact inf/sup of |a_i - lam*b_i| over all indices, with zero counting."""
    ana = analyze_entries(D, lam)
    ctx = D.ctx
    norms = [padic_abs(v, ctx) for _, v in ana.explicit]
    zeros = tuple(i for (i, v) in ana.explicit if v == 0)
    nonzero = [x for x in norms if not x.is_zero]
    if ana.tail == TAIL_ZERO:
        inf = UltraNorm.zero()
        sup = max(norms) if norms else UltraNorm.zero()
        inf_nz = min(nonzero) if nonzero else UltraNorm.infinity()
        return InfSup(inf, sup, zeros, True, inf_nz)
    if ana.tail == TAIL_DECAY:
        sup = max(norms + [ana.tail_norm])
        return InfSup(UltraNorm.zero(), sup, zeros, False, UltraNorm.zero())
    inf = min(norms + [ana.tail_norm])
    sup = max(norms + [ana.tail_norm])
    inf_nz = min(nonzero + [ana.tail_norm])
    return InfSup(inf, sup, zeros, False, inf_nz)


def seq_spectrum_membership(D: TailDiagonalPencil, lam: Fraction) -> bool:
    """lam is spectral iff some entry vanishes or the entry norms are not
    bounded away from zero."""
    D.require_spectrum_invariants()
    info = tail_inf_sup(D, lam)
    return info.zero_infinite or bool(info.zero_indices) or info.inf.is_zero


def seq_kappa(D: TailDiagonalPencil, lam: Fraction) -> Kappa:
    D.require_spectrum_invariants()
    info = tail_inf_sup(D, lam)
    if info.zero_infinite or bool(info.zero_indices) or info.inf.is_zero:
        degenerate = info.sup.is_zero
        return Kappa(UltraNorm.infinity(), degenerate=degenerate)
    return Kappa(info.sup / info.inf)


def is_fredholm_index0(D: TailDiagonalPencil, lam: Fraction) -> bool:
    """Diagonal criterion: finitely many zero entries and the nonzero
    entries bounded below in norm."""
    D.require_spectrum_invariants()
    info = tail_inf_sup(D, lam)
    return (not info.zero_infinite) and not info.inf_nonzero.is_zero


def essential_spectrum(D: TailDiagonalPencil) -> List[Fraction]:
    """The finite set of lambda where A - lam*B fails to be Fredholm of
    index 0; supported for constant and geometric A tails over a nonzero
    constant B tail."""
    D.require_spectrum_invariants()
    ta = D.A.tail
    cb = D.B.tail.c
    if ta.kind == CONST:
        return [ta.c / cb]
    return [Fraction(0)]


@dataclass(frozen=True)
class FiniteRankOp:
    """Sum of terms coeff * y[j] * e_i, stored as (j, i, coeff) triples."""

    terms: Tuple[Tuple[int, int, Fraction], ...]

    @staticmethod
    def create(terms: Sequence[Tuple[int, int, Fraction]]) -> "FiniteRankOp":
        return FiniteRankOp(tuple((int(j), int(i), Fraction(c)) for j, i, c in terms))

    @staticmethod
    def zero() -> "FiniteRankOp":
        return FiniteRankOp(())

    def indices(self) -> List[int]:
        out = set()
        for j, i, _ in self.terms:
            out.add(j)
            out.add(i)
        return sorted(out)

    def is_diagonal(self) -> bool:
        return all(j == i for j, i, _ in self.terms)

    def to_json(self) -> dict:
        return {
            "terms": [
                {"j": j, "i": i, "coeff": format_rational(c)} for j, i, c in self.terms
            ]
        }


def regularizer(D: TailDiagonalPencil, lam: Fraction) -> FiniteRankOp:
    """Finite-rank K, supported exactly on the vanishing coordinates, with
    lam outside the spectrum of (A + K, B).

    Coefficients are the power of p matching ||A - lam*B||, so
    ||K|| <= ||A - lam*B||.  Raises EssentialPointError at essential points;
    returns the zero operator off the spectrum.
    """
    D.require_spectrum_invariants()
    info = tail_inf_sup(D, lam)
    if info.zero_infinite or info.inf_nonzero.is_zero:
        raise EssentialPointError(
            "infinitely many vanishing entries or vanishing infimum"
        )
    if not info.zero_indices:
        return FiniteRankOp.zero()
    if not info.sup.is_finite:
        raise UnsupportedTailError("unbounded pencil norm")
    u = Fraction(D.ctx.p) ** info.sup.v  # |u| = ||A - lam*B||
    return FiniteRankOp.create([(i, i, u) for i in info.zero_indices])


def perturbed_spectrum_membership(
    D: TailDiagonalPencil, lam: Fraction, K: FiniteRankOp
) -> bool:
    """Is lam in the spectrum of (A + K, B), for finite-rank K?

    Outside the finitely many affected coordinates the operator stays
    diagonal, so invertibility reduces to a bordered finite determinant on
    the affected block plus the symbolic tail condition.
    """
    D.require_spectrum_invariants()
    lam = Fraction(lam)
    info = tail_inf_sup(D, lam)
    if info.zero_infinite or info.inf_nonzero.is_zero:
        return True  # finite-rank perturbations cannot cure the tail
    support = sorted(set(K.indices()) | set(info.zero_indices))
    if not support:
        return False  # untouched invertible diagonal
    pos = {i: r for r, i in enumerate(support)}
    m = len(support)
    block = [[Fraction(0)] * m for _ in range(m)]
    for i in support:
        block[pos[i]][pos[i]] = D.entry(i, lam)
    for j, i, c in K.terms:
        block[pos[i]][pos[j]] += c
    return Matrix.from_rows(block).det() == 0


def perturbed_fredholm_index0(
    D: TailDiagonalPencil, lam: Fraction, K: FiniteRankOp
) -> bool:
    """Fredholmness of index 0 for A + K - lam*B with finite-rank K: decided
    by the diagonal behavior outside the finite support."""
    D.require_spectrum_invariants()
    info = tail_inf_sup(D, lam)
    return (not info.zero_infinite) and not info.inf_nonzero.is_zero


def essential_cond_pseudo_member(
    D: TailDiagonalPencil, lam: Fraction, eps: Fraction
) -> bool:
    """Membership in the essential condition pseudospectrum for diagonal
    pencils: infinitely many entries with |a_i - lam*b_i| < eps * ||A - lam*B||.

    A diagonal perturbation cancelling those entries then has small norm and
    creates an infinite-dimensional kernel; finitely many small entries leave
    every small perturbation Fredholm of index 0.
    """
    eps = ensure_epsilon(eps)
    D.require_spectrum_invariants()
    info = tail_inf_sup(D, lam)
    if info.sup.is_zero:
        raise UltrapencilError("A - lambda*B vanishes identically")
    if info.zero_infinite:
        return True
    ana = analyze_entries(D, lam)
    if ana.tail == TAIL_DECAY:
        return True
    bound = eps * info.sup.as_fraction(D.ctx.p)
    return cmp_norm(ana.tail_norm, bound, D.ctx) < 0

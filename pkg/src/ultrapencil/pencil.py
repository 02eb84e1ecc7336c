"""Membership predicates, the condition number kappa, witnesses, and the
rank-one destabilizer for matrix pencils (A, B) over Q_p.

Everything here is exact: kappa is a p-power or infinity, and every strict
inequality against a rational epsilon is decided by integer arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .padic import (
    PAdicContext,
    UltraNorm,
    UltrapencilError,
    cmp_norm,
    ensure_epsilon,
    format_rational,
    largest_ppow_below,
    padic_abs,
)
from .linalg import Matrix, Vector, basis_vector, op_norm, outer, vec_norm


class SpectralPointError(UltrapencilError):
    """Raised when an operation requires lambda outside the spectrum."""


class NotInCondPseudospectrumError(UltrapencilError):
    """Raised when a constructive operation needs kappa(lambda) > 1/eps."""

    def __init__(self, kappa_value: UltraNorm):
        self.kappa_value = kappa_value
        super().__init__(f"kappa = {kappa_value!r} does not exceed the threshold")


class DegeneratePencilError(UltrapencilError):
    """A - lambda*B is the zero matrix; norms and kappa are formally undefined."""


@dataclass(frozen=True)
class Pencil:
    A: Matrix
    B: Matrix
    ctx: PAdicContext

    def __post_init__(self) -> None:
        if self.A.n != self.B.n:
            raise ValueError("A and B must have the same dimension")

    @property
    def n(self) -> int:
        return self.A.n

    def eval_at(self, lam: Fraction) -> Matrix:
        return self.A - self.B.scale(Fraction(lam))

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "A": self.A.to_json(),
            "B": self.B.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "Pencil":
        ctx = PAdicContext(int(obj["p"]))
        return Pencil(Matrix.from_json(obj["A"]), Matrix.from_json(obj["B"]), ctx)


@dataclass(frozen=True)
class Kappa:
    """The exact value of ||A - lam*B|| * ||(A - lam*B)^-1||.

    Infinity exactly when lambda lies in the spectrum; ``degenerate`` marks
    the corner case A - lam*B = 0, where the product is formally 0 * inf but
    the pencil is certainly not invertible.
    """

    value: UltraNorm
    degenerate: bool = False

    @property
    def is_infinite(self) -> bool:
        return self.value.is_infinite

    def to_json(self) -> dict:
        obj = {"value": self.value.to_json()}
        if self.degenerate:
            obj["degenerate"] = True
        return obj


def in_spectrum(P: Pencil, lam: Fraction) -> bool:
    return P.eval_at(lam).det() == 0


def kappa(P: Pencil, lam: Fraction) -> Kappa:
    M = P.eval_at(lam)
    if M.is_zero():
        return Kappa(UltraNorm.infinity(), degenerate=True)
    Minv = M.inverse(P.ctx)
    if Minv is None:
        return Kappa(UltraNorm.infinity())
    return Kappa(op_norm(M, P.ctx) * op_norm(Minv, P.ctx))


def kappa_exceeds(k: Kappa, eps: Fraction, ctx: PAdicContext) -> bool:
    """Exact test kappa > 1/eps (always true on the spectrum)."""
    eps = ensure_epsilon(eps)
    if k.is_infinite:
        return True
    return cmp_norm(k.value, 1 / eps, ctx) > 0


def in_cond_pseudospectrum(P: Pencil, lam: Fraction, eps: Fraction) -> bool:
    return kappa_exceeds(kappa(P, lam), eps, P.ctx)


def in_pseudospectrum(P: Pencil, lam: Fraction, eps: Fraction) -> bool:
    eps = ensure_epsilon(eps)
    M = P.eval_at(lam)
    Minv = M.inverse(P.ctx)
    if Minv is None:
        return True
    return cmp_norm(op_norm(Minv, P.ctx), 1 / eps, P.ctx) > 0


COND_TO_PSEUDO = "cond_to_pseudo"
PSEUDO_TO_COND = "pseudo_to_cond"


def translate_eps(P: Pencil, lam: Fraction, eps: Fraction, direction: str) -> Fraction:
    """Move eps between the plain and the condition pseudospectrum scales.

    Multiplies (cond -> pseudo) or divides (pseudo -> cond) by ||A - lam*B||.
    """
    eps = ensure_epsilon(eps)
    norm = op_norm(P.eval_at(lam), P.ctx)
    if norm.is_zero:
        raise DegeneratePencilError("A - lambda*B vanishes identically")
    scale = norm.as_fraction(P.ctx.p)
    if direction == COND_TO_PSEUDO:
        return eps * scale
    if direction == PSEUDO_TO_COND:
        return eps / scale
    raise ValueError(f"unknown direction {direction!r}")


def find_witness(P: Pencil, lam: Fraction, eps: Fraction) -> Optional[Vector]:
    """A norm-1 vector x with ||(A - lam*B)x|| < eps * ||A - lam*B|| * ||x||.

    Exists exactly when kappa(lam) > 1/eps; the search runs over coordinate
    vectors of the inverse (lowest column index on ties) and rescales by a
    power of p.  Returns None when kappa(lam) <= 1/eps.
    """
    eps = ensure_epsilon(eps)
    ctx = P.ctx
    M = P.eval_at(lam)
    Minv = M.inverse(ctx)
    if Minv is None:
        raise SpectralPointError("lambda lies in the spectrum")
    if not kappa_exceeds(kappa(P, lam), eps, ctx):
        return None
    best_j = 0
    best = UltraNorm.zero()
    for j in range(M.n):
        nrm = vec_norm(Minv.column(j), ctx)
        if nrm > best:
            best = nrm
            best_j = j
    x = Minv.column(best_j)
    w = best.v  # vec_norm(x) = p^(-w); p^(-w) * x has norm 1
    factor = Fraction(ctx.p) ** (-w)
    return tuple(factor * a for a in x)


@dataclass(frozen=True)
class RankOnePerturbation:
    """C = u * f, i.e. Cy = f(y) * u, stored as range direction and functional."""

    u: Vector
    f: Vector

    def matrix(self) -> Matrix:
        return outer(self.u, self.f)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.u) or all(a == 0 for a in self.f)


def rank_one_destabilizer(P: Pencil, lam: Fraction, eps: Fraction) -> RankOnePerturbation:
    """A rank-one C with ||C|| < eps * ||A - lam*B|| and det(A + C - lam*B) = 0.

    On the spectrum the zero perturbation already certifies membership.
    Raises NotInCondPseudospectrumError outside the condition pseudospectrum.
    """
    eps = ensure_epsilon(eps)
    ctx = P.ctx
    n = P.n
    if in_spectrum(P, lam):
        zero = tuple(Fraction(0) for _ in range(n))
        return RankOnePerturbation(zero, zero)
    x = find_witness(P, lam, eps)
    if x is None:
        raise NotInCondPseudospectrumError(kappa(P, lam).value)
    M = P.eval_at(lam)
    one = UltraNorm.one()
    idx = next(i for i, a in enumerate(x) if padic_abs(a, ctx) == one)
    f = tuple(1 / x[idx] if j == idx else Fraction(0) for j in range(n))
    u = tuple(-a for a in M.matvec(x))
    return RankOnePerturbation(u, f)


def _random_unit(rng: random.Random, p: int, digits: int) -> int:
    while True:
        u = rng.randrange(1, p**digits)
        if u % p != 0:
            return u


def random_small_matrix(
    rng: random.Random,
    n: int,
    bound: Fraction,
    ctx: PAdicContext,
    v_window: int = 3,
    digits: int = 3,
) -> Matrix:
    """Random matrix with every entry norm (hence operator norm) < bound.

    Entries are p^v * u with v in a window just below the bound and u a
    random unit mod p^digits; some entries are zeroed to vary the support.
    """
    p = ctx.p
    v0 = largest_ppow_below(bound, p)
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            if rng.random() < 0.25:
                row.append(Fraction(0))
            else:
                v = v0 + rng.randrange(0, v_window)
                u = _random_unit(rng, p, digits)
                # |p^v| = p^(-v) <= p^(-v0) < bound, and units keep it there.
                row.append(Fraction(u) * Fraction(p) ** v)
        rows.append(row)
    return Matrix.from_rows(rows)


@dataclass
class UnionCertificate:
    perturbation: Matrix
    perturbation_norm: UltraNorm
    singular: bool

    def to_json(self) -> dict:
        return {
            "C": self.perturbation.to_json(),
            "norm": self.perturbation_norm.to_json(),
            "singular": self.singular,
        }


@dataclass
class UnionReport:
    """Pointwise record of the perturbation-union characterization."""

    lam: Fraction
    eps: Fraction
    member: bool
    spectral: bool
    certificate: Optional[UnionCertificate]
    samples_tried: int
    singular_sample_found: bool
    consistent: bool

    def to_json(self) -> dict:
        return {
            "lambda": format_rational(self.lam),
            "epsilon": format_rational(self.eps),
            "member": self.member,
            "spectral": self.spectral,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "samples_tried": self.samples_tried,
            "singular_sample_found": self.singular_sample_found,
            "consistent": self.consistent,
        }


def union_characterization_check(
    P: Pencil, lam: Fraction, eps: Fraction, trials: int, seed: int
) -> UnionReport:
    """Check both directions of the perturbation-union identity at one point.

    Members get an explicit small singular-making C (zero on the spectrum,
    the rank-one destabilizer elsewhere); at non-members, `trials` random
    small C are sampled and none may make A + C - lam*B singular.
    """
    eps = ensure_epsilon(eps)
    ctx = P.ctx
    M = P.eval_at(lam)
    spectral = in_spectrum(P, lam)
    member = in_cond_pseudospectrum(P, lam, eps)
    norm_M = op_norm(M, ctx)
    if member:
        C = rank_one_destabilizer(P, lam, eps).matrix()
        c_norm = op_norm(C, ctx)
        singular = (P.A + C - P.B.scale(Fraction(lam))).det() == 0
        small = spectral or cmp_norm(c_norm, eps * norm_M.as_fraction(ctx.p), ctx) < 0
        cert = UnionCertificate(C, c_norm, singular)
        return UnionReport(
            lam, eps, True, spectral, cert, 0, False, singular and small
        )
    rng = random.Random(seed)
    bound = eps * norm_M.as_fraction(ctx.p)
    found = False
    for _ in range(trials):
        C = random_small_matrix(rng, P.n, bound, ctx)
        if (M + C).det() == 0:
            found = True
            break
    return UnionReport(lam, eps, False, spectral, None, trials, found, not found)


def affine(P: Pencil, alpha: Fraction, beta: Fraction) -> Pencil:
    """The pencil (beta*A + alpha*B, B); its kappa at lam equals kappa of P
    at (lam - alpha)/beta."""
    beta = Fraction(beta)
    if beta == 0:
        raise ValueError("beta must be nonzero")
    alpha = Fraction(alpha)
    return Pencil(P.A.scale(beta) + P.B.scale(alpha), P.B, P.ctx)


@dataclass
class SimilarityResult:
    pencil: Pencil
    k: UltraNorm  # ||U|| * ||U^-1||


def similarity(P: Pencil, U: Matrix) -> SimilarityResult:
    """Conjugate A by an invertible U commuting with B; k = ||U|| ||U^-1||."""
    ctx = P.ctx
    Uinv = U.inverse(ctx)
    if Uinv is None:
        raise ValueError("U is singular")
    if U.mul(P.B).rows != P.B.mul(U).rows:
        raise ValueError("U must commute with B")
    C = Uinv.mul(P.A).mul(U)
    k = op_norm(U, ctx) * op_norm(Uinv, ctx)
    return SimilarityResult(Pencil(C, P.B, ctx), k)


@dataclass
class ImplicationReport:
    """Record of a pointwise kappa implication check."""

    name: str
    lam: Fraction
    eps: Fraction
    k: Optional[UltraNorm]
    premise_kappa: Kappa
    conclusion_kappa: Optional[Kappa]
    premise: bool
    conclusion: Optional[bool]
    holds: bool
    vacuous: bool

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "lambda": format_rational(self.lam),
            "epsilon": format_rational(self.eps),
            "k": self.k.to_json() if self.k else None,
            "premise_kappa": self.premise_kappa.to_json(),
            "conclusion_kappa": self.conclusion_kappa.to_json()
            if self.conclusion_kappa
            else None,
            "premise": self.premise,
            "conclusion": self.conclusion,
            "holds": self.holds,
            "vacuous": self.vacuous,
        }


def inversion_map_check(P: Pencil, lam: Fraction, eps: Fraction) -> ImplicationReport:
    """kappa_(A^-1,B)(lam) > 1/eps implies kappa_(A,B^-1)(1/lam) > 1/(eps*k),
    with k the product of the four norms of A, A^-1, B, B^-1."""
    eps = ensure_epsilon(eps)
    lam = Fraction(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    ctx = P.ctx
    Ainv = P.A.inverse(ctx)
    Binv = P.B.inverse(ctx)
    if Ainv is None:
        raise ValueError("A is singular")
    if Binv is None:
        raise ValueError("B is singular")
    k = (
        op_norm(Ainv, ctx)
        * op_norm(P.A, ctx)
        * op_norm(Binv, ctx)
        * op_norm(P.B, ctx)
    )
    k_frac = k.as_fraction(ctx.p)
    kap1 = kappa(Pencil(Ainv, P.B, ctx), lam)
    premise = kappa_exceeds(kap1, eps, ctx)
    if not premise:
        return ImplicationReport(
            "inversion", lam, eps, k, kap1, None, False, None, True, True
        )
    kap2 = kappa(Pencil(P.A, Binv, ctx), 1 / lam)
    conclusion = kappa_exceeds(kap2, eps * k_frac, ctx)
    return ImplicationReport(
        "inversion", lam, eps, k, kap1, kap2, True, conclusion, conclusion, False
    )


def b_inverse_reduction_check(P: Pencil, lam: Fraction, eps: Fraction) -> ImplicationReport:
    """kappa_(B^-1 A, I)(lam) > ||B|| ||B^-1|| / eps implies kappa_P(lam) > 1/eps."""
    eps = ensure_epsilon(eps)
    ctx = P.ctx
    Binv = P.B.inverse(ctx)
    if Binv is None:
        raise ValueError("B is singular")
    if P.A.mul(P.B).rows != P.B.mul(P.A).rows:
        raise ValueError("A and B must commute")
    k = op_norm(P.B, ctx) * op_norm(Binv, ctx)
    k_frac = k.as_fraction(ctx.p)
    reduced = Pencil(Binv.mul(P.A), Matrix.identity(P.n), ctx)
    kap1 = kappa(reduced, lam)
    premise = kappa_exceeds(kap1, eps / k_frac, ctx)
    if not premise:
        return ImplicationReport(
            "b_inverse_reduction", lam, eps, k, kap1, None, False, None, True, True
        )
    kap2 = kappa(P, lam)
    conclusion = kappa_exceeds(kap2, eps, ctx)
    return ImplicationReport(
        "b_inverse_reduction", lam, eps, k, kap1, kap2, True, conclusion, conclusion, False
    )

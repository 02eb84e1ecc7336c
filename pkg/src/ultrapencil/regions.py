"""Exact spectral regions for diagonal pencils.

A diagonal pencil diag(a_i) - lam * diag(b_i) has entry norms
|b_i| * |lam - z_i| with centers z_i = a_i / b_i, so membership in the
condition pseudospectrum depends on lam only through its ultrametric
distances to the centers.  For at most two distinct centers this reduces,
via the trichotomy |lam - z_2| = max(|lam - z_1|, |z_1 - z_2|) off the
equal-distance locus, to a finite union of p-adic balls computed here
exactly; the membership predicate itself stays exact for any number of
centers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .padic import (
    PAdicContext,
    UltraNorm,
    UltrapencilError,
    cmp_norm,
    ensure_epsilon,
    format_rational,
    largest_ppow_below,
    padic_abs,
    parse_rational,
    valuation,
)
from .linalg import Matrix
from .pencil import Kappa, Pencil


class ZeroBEntryError(UltrapencilError):
    """Region and spectrum operations need every b_i nonzero."""


@dataclass(frozen=True)
class DiagonalPencil:
    a: Tuple[Fraction, ...]
    b: Tuple[Fraction, ...]
    ctx: PAdicContext

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("a and b must be nonempty and of equal length")

    @staticmethod
    def create(a: Sequence, b: Sequence, ctx: PAdicContext) -> "DiagonalPencil":
        return DiagonalPencil(
            tuple(Fraction(x) for x in a), tuple(Fraction(x) for x in b), ctx
        )

    @property
    def n(self) -> int:
        return len(self.a)

    def require_invertible_b(self) -> None:
        if any(x == 0 for x in self.b):
            raise ZeroBEntryError("every b entry must be nonzero")

    def as_pencil(self) -> Pencil:
        return Pencil(Matrix.diagonal(self.a), Matrix.diagonal(self.b), self.ctx)

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "a": [format_rational(x) for x in self.a],
            "b": [format_rational(x) for x in self.b],
        }

    @staticmethod
    def from_json(obj: dict) -> "DiagonalPencil":
        ctx = PAdicContext(int(obj["p"]))
        return DiagonalPencil.create(
            [parse_rational(s) for s in obj["a"]],
            [parse_rational(s) for s in obj["b"]],
            ctx,
        )


@dataclass(frozen=True)
class PBall:
    """Closed ball {lam : |lam - center| <= p^(-radius_v)}.

    Open balls are canonicalized to closed ones of the next smaller radius,
    which is lossless over the discrete value group.
    """

    center: Fraction
    radius_v: int

    def contains(self, lam: Fraction, ctx: PAdicContext) -> bool:
        return padic_abs(lam - self.center, ctx) <= UltraNorm.ppow(self.radius_v)

    def to_json(self) -> dict:
        return {
            "center": format_rational(self.center),
            "radius_v": self.radius_v,
            "closed": True,
        }

    @staticmethod
    def from_json(obj: dict) -> "PBall":
        return PBall(parse_rational(obj["center"]), int(obj["radius_v"]))


@dataclass(frozen=True)
class RegionDescription:
    """Finite points plus a finite ball union, optionally complemented."""

    points: Tuple[Fraction, ...]
    balls: Tuple[PBall, ...]
    complement: bool = False
    exact: bool = True

    def contains(self, lam: Fraction, ctx: PAdicContext) -> bool:
        inside = lam in self.points or any(b.contains(lam, ctx) for b in self.balls)
        return inside != self.complement

    def to_json(self) -> dict:
        return {
            "points": [format_rational(x) for x in sorted(self.points)],
            "balls": [b.to_json() for b in self.balls],
            "complement": self.complement,
            "exact": self.exact,
        }

    @staticmethod
    def from_json(obj: dict) -> "RegionDescription":
        return RegionDescription(
            tuple(parse_rational(s) for s in obj["points"]),
            tuple(PBall.from_json(b) for b in obj["balls"]),
            bool(obj.get("complement", False)),
            bool(obj.get("exact", True)),
        )


def diag_spectrum(D: DiagonalPencil) -> List[Fraction]:
    D.require_invertible_b()
    return sorted({ai / bi for ai, bi in zip(D.a, D.b)})


def diag_kappa(D: DiagonalPencil, lam: Fraction) -> Kappa:
    """sup |a_i - lam b_i| over inf |a_i - lam b_i|; infinity on the spectrum."""
    lam = Fraction(lam)
    vals = [padic_abs(ai - lam * bi, D.ctx) for ai, bi in zip(D.a, D.b)]
    if all(v.is_zero for v in vals):
        return Kappa(UltraNorm.infinity(), degenerate=True)
    if any(v.is_zero for v in vals):
        return Kappa(UltraNorm.infinity())
    return Kappa(max(vals) / min(vals))


def _kappa_exceeds_threshold(kappa_exp: Optional[int], inv_eps: Fraction, p: int) -> bool:
    """Is p^kappa_exp > 1/eps?  None means an infinite kappa."""
    if kappa_exp is None:
        return True
    if kappa_exp >= 0:
        return Fraction(p) ** kappa_exp > inv_eps
    return Fraction(1, p ** (-kappa_exp)) > inv_eps


def _shell_balls(center: Fraction, t: int, p: int) -> List[PBall]:
    """The sphere {v(lam - center) = t} as p-1 balls one level deeper."""
    pt = Fraction(p) ** t
    return [PBall(center + u * pt, t + 1) for u in range(1, p)]


def _center_weight_exponents(D: DiagonalPencil) -> Dict[Fraction, List[int]]:
    """Map distinct center z_i = a_i/b_i to the valuations of its b-weights."""
    out: Dict[Fraction, List[int]] = {}
    for ai, bi in zip(D.a, D.b):
        out.setdefault(ai / bi, []).append(valuation(Fraction(bi), D.ctx))
    return out


def cond_region(D: DiagonalPencil, eps: Fraction) -> RegionDescription:
    """Exact ball-union description of the condition pseudospectrum.

    Exact for at most two distinct centers (single-center pencils have a
    constant kappa off the spectrum); for more centers a certified sampled
    description is returned with ``exact=False`` and only the provably
    correct tail balls around each center.
    """
    eps = ensure_epsilon(eps)
    D.require_invertible_b()
    p = D.ctx.p
    inv_eps = 1 / eps
    centers = _center_weight_exponents(D)
    points = tuple(sorted(centers))
    if len(centers) == 1:
        (exps,) = centers.values()
        kappa0 = max(exps) - min(exps)
        if _kappa_exceeds_threshold(kappa0, inv_eps, p):
            return RegionDescription((), (), complement=True)
        return RegionDescription(points, ())
    if len(centers) == 2:
        return _two_center_cond_region(D, centers, inv_eps)
    return _sampled_cond_region(D, centers, eps)


def _two_center_cond_region(
    D: DiagonalPencil, centers: Dict[Fraction, List[int]], inv_eps: Fraction
) -> RegionDescription:
    p = D.ctx.p
    (z1, e1), (z2, e2) = sorted(centers.items())
    delta = valuation(z1 - z2, D.ctx)
    all_exps = e1 + e2

    # Off both center balls the two distances agree, so kappa is the constant
    # weight spread; inside the ball around z_j it depends only on
    # t = v(lam - z_j) through the exponent multiset below.
    kappa0 = max(all_exps) - min(all_exps)
    far_member = _kappa_exceeds_threshold(kappa0, inv_eps, p)

    def near_member(own: List[int], other: List[int], t: Optional[int]) -> bool:
        if t is None:  # lam equals the center: spectrum point
            return True
        exps = [e + t for e in own] + [e + delta for e in other]
        return _kappa_exceeds_threshold(max(exps) - min(exps), inv_eps, p)

    def member_layers(own: List[int], other: List[int]):
        """(tail_v, isolated shells) for t in [delta+1, inf]."""
        other_shifted = [e + delta for e in other]
        # Beyond t_stab the value set splits and kappa grows strictly with t.
        t_stab = max(other_shifted) - min(own) + 1
        hi = max(t_stab, delta + 1) + 1
        while not near_member(own, other, hi):
            hi += 1
        tail = hi
        while tail - 1 >= delta + 1 and near_member(own, other, tail - 1):
            tail -= 1
        shells = [
            t for t in range(delta + 1, tail) if near_member(own, other, t)
        ]
        non_members = [
            t for t in range(delta + 1, tail) if not near_member(own, other, t)
        ]
        return tail, shells, non_members

    tail1, shells1, miss1 = member_layers(e1, e2)
    tail2, shells2, miss2 = member_layers(e2, e1)

    if not far_member:
        balls = [PBall(z1, tail1), PBall(z2, tail2)]
        for t in shells1:
            balls.extend(_shell_balls(z1, t, p))
        for t in shells2:
            balls.extend(_shell_balls(z2, t, p))
        return RegionDescription((z1, z2), tuple(balls))

    # Far field in: describe the complement, the finitely many non-member
    # spheres inside each center ball.
    balls: List[PBall] = []
    for t in miss1:
        balls.extend(_shell_balls(z1, t, p))
    for t in miss2:
        balls.extend(_shell_balls(z2, t, p))
    return RegionDescription((), tuple(balls), complement=True)


def _sampled_cond_region(
    D: DiagonalPencil, centers: Dict[Fraction, List[int]], eps: Fraction
) -> RegionDescription:
    """Tail balls around each center, certified by the eventual strict growth
    of kappa toward a spectrum point; marked non-exact."""
    p = D.ctx.p
    inv_eps = 1 / eps
    balls = []
    for z in sorted(centers):
        deltas = [valuation(z - w, D.ctx) for w in centers if w != z]
        start = (max(deltas) if deltas else 0) + 1
        exps_all = [e for es in centers.values() for e in es]
        t = start + (max(exps_all) - min(exps_all)) + 1
        while True:
            k = diag_kappa(D, z + Fraction(p) ** t)
            if k.value.is_infinite or _kappa_exceeds_threshold(-k.value.v, inv_eps, p):
                break
            t += 1
        balls.append(PBall(z, t))
    return RegionDescription(tuple(sorted(centers)), tuple(balls), exact=False)


def pseudo_region(D: DiagonalPencil, eps: Fraction) -> RegionDescription:
    """Exact description of {lam : inf_i |a_i - lam b_i| < eps} plus spectrum.

    The infimum over entries drops below eps exactly when some entry does,
    so the region is the union over entries of the ball
    {|lam - z_i| < eps / |b_i|}; nested balls are merged.
    """
    eps = ensure_epsilon(eps)
    D.require_invertible_b()
    p = D.ctx.p
    balls: List[PBall] = []
    for ai, bi in zip(D.a, D.b):
        z = ai / bi
        w = padic_abs(bi, D.ctx).as_fraction(p)
        radius_v = largest_ppow_below(eps / w, p)
        balls.append(PBall(z, radius_v))
    merged: List[PBall] = []
    for b in sorted(balls, key=lambda b: b.radius_v):
        if not any(m.contains(b.center, D.ctx) for m in merged):
            merged.append(b)
    return RegionDescription(tuple(diag_spectrum(D)), tuple(merged))


@dataclass(frozen=True)
class SampleGrid:
    """Deterministic probe set: center + p^v * unit for seeded random units."""

    centers: Tuple[Fraction, ...]
    v_min: int
    v_max: int
    digits: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.v_min > self.v_max:
            raise ValueError("v_min must not exceed v_max")
        if self.digits < 1:
            raise ValueError("digits must be >= 1")


def sample(grid: SampleGrid, ctx: PAdicContext) -> List[Fraction]:
    rng = random.Random(grid.seed)
    p = ctx.p
    out: List[Fraction] = []
    seen = set()
    for c in grid.centers:
        for v in range(grid.v_min, grid.v_max + 1):
            for _ in range(grid.digits):
                while True:
                    u = rng.randrange(1, p**grid.digits)
                    if u % p != 0:
                        break
                lam = c + Fraction(u) * Fraction(p) ** v
                if lam not in seen:
                    seen.add(lam)
                    out.append(lam)
    return out


@dataclass
class AuditReport:
    total: int
    mismatches: List[Fraction] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "mismatches": [format_rational(x) for x in self.mismatches],
            "ok": self.ok,
        }


def region_vs_predicate_audit(
    D: DiagonalPencil,
    R: RegionDescription,
    eps: Fraction,
    probes: Sequence[Fraction],
) -> AuditReport:
    """Check R.contains against the kappa predicate on every probe."""
    eps = ensure_epsilon(eps)
    inv_eps = 1 / eps
    spectrum = set(diag_spectrum(D))
    report = AuditReport(total=len(probes))
    for lam in probes:
        k = diag_kappa(D, lam)
        expected = (
            lam in spectrum
            or k.value.is_infinite
            or cmp_norm(k.value, inv_eps, D.ctx) > 0
        )
        if R.contains(lam, D.ctx) != expected:
            report.mismatches.append(lam)
    return report


def kappa_exponent(D: DiagonalPencil, lam: Fraction) -> Optional[int]:
    """Exponent e with kappa = p^e, or None on the spectrum (heatmap value)."""
    k = diag_kappa(D, lam)
    if k.value.is_infinite:
        return None
    return -k.value.v

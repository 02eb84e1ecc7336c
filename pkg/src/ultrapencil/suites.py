"""Seeded property suites verifying every implemented identity and
inequality pointwise-exactly on random pencils.

Each suite returns a record with instance counts and the first
counterexample, so a run is fully reproducible from (seed, trials) and the
assembled report serializes deterministically.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .padic import PAdicContext, UltraNorm, cmp_norm, format_rational, padic_abs
from .linalg import Matrix, op_norm, vec_norm
from . import pencil as pc
from .pencil import Kappa, Pencil
from . import regions as rg
from . import sequence as sq


@dataclass
class SuiteRecord:
    name: str
    statement: str
    instances: int = 0
    failures: int = 0
    first_counterexample: Optional[str] = None

    @property
    def passes(self) -> int:
        return self.instances - self.failures

    def check(self, ok: bool, describe: Callable[[], str]) -> None:
        self.instances += 1
        if not ok:
            self.failures += 1
            if self.first_counterexample is None:
                self.first_counterexample = describe()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "instances": self.instances,
            "passes": self.passes,
            "failures": self.failures,
            "first_counterexample": self.first_counterexample,
        }


@dataclass
class SuiteReport:
    seed: int
    trials: int
    records: List[SuiteRecord] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(r.failures for r in self.records)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "ok": self.ok,
            "records": [r.to_json() for r in sorted(self.records, key=lambda r: r.name)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def random_scalar(
    rng: random.Random, p: int, v_range: Tuple[int, int] = (-3, 3), digits: int = 3
) -> Fraction:
    """p^v * u with v uniform in the window and u a random unit mod p^digits."""
    v = rng.randrange(v_range[0], v_range[1] + 1)
    while True:
        u = rng.randrange(1, p**digits)
        if u % p != 0:
            break
    return Fraction(u) * Fraction(p) ** v


def random_matrix(
    rng: random.Random,
    n: int,
    ctx: PAdicContext,
    family: str = "dense",
    invertible: bool = False,
) -> Matrix:
    p = ctx.p
    while True:
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if family == "diagonal" and i != j:
                    row.append(Fraction(0))
                elif family == "triangular" and i > j:
                    row.append(Fraction(0))
                elif rng.random() < 0.2 and not (invertible and i == j):
                    row.append(Fraction(0))
                else:
                    row.append(random_scalar(rng, p))
            rows.append(row)
        M = Matrix.from_rows(rows)
        if not invertible or M.det() != 0:
            return M


def random_pencil(
    rng: random.Random, ctx: PAdicContext, n_choices: Sequence[int] = (2, 3, 4)
) -> Pencil:
    n = rng.choice(list(n_choices))
    family = rng.choice(["diagonal", "triangular", "dense"])
    A = random_matrix(rng, n, ctx, family)
    B = random_matrix(rng, n, ctx, family, invertible=True)
    return Pencil(A, B, ctx)


def eps_sweep(p: int) -> List[Fraction]:
    # Straddles the discrete value group around 1.
    return [Fraction(1, p**2), Fraction(1, p), Fraction(1), Fraction(p)]


def probe_lambdas(rng: random.Random, P: Pencil, count: int = 3) -> List[Fraction]:
    """A few random probes plus perturbed generalized eigenvalue guesses."""
    probes = [random_scalar(rng, P.ctx.p) for _ in range(count)]
    # Diagonal/triangular pencils expose spectrum points on the diagonal.
    for i in range(P.n):
        if P.B.rows[i][i] != 0:
            z = P.A.rows[i][i] / P.B.rows[i][i]
            probes.append(z)
            probes.append(z + Fraction(P.ctx.p) ** rng.randrange(1, 4))
    return probes


def _fmt(P: Pencil, lam: Fraction, extra: str = "") -> str:
    return f"p={P.ctx.p} lambda={format_rational(lam)} {extra} pencil={P.to_json()}"


def run_kappa_floor(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord("kappa_floor", "kappa(lam) >= 1 off the spectrum")
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P):
            k = pc.kappa(P, lam)
            if k.is_infinite:
                continue
            rec.check(k.value >= UltraNorm.one(), lambda: _fmt(P, lam, f"kappa={k!r}"))
    return rec


def run_nesting(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "nesting", "membership at eps1 implies membership at every eps2 >= eps1"
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            members = [pc.in_cond_pseudospectrum(P, lam, e) for e in sweep]
            ok = all(
                (not m1) or m2 for m1, m2 in zip(members, members[1:])
            )
            rec.check(ok, lambda: _fmt(P, lam, f"members={members}"))
    return rec


def run_intersection(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "spectrum_intersection",
        "spectral points belong to every level; off the spectrum eps = 1/(p*kappa) excludes",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            if pc.in_spectrum(P, lam):
                ok = all(pc.in_cond_pseudospectrum(P, lam, e) for e in sweep)
                rec.check(ok, lambda: _fmt(P, lam, "spectral not in all levels"))
            else:
                k = pc.kappa(P, lam)
                if not k.value.is_finite:
                    continue
                excl = 1 / (ctx.p * k.value.as_fraction(ctx.p))
                rec.check(
                    not pc.in_cond_pseudospectrum(P, lam, excl),
                    lambda: _fmt(P, lam, f"excluding eps={excl} failed"),
                )
    return rec


def run_witness(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "witness",
        "a witness with ||(A-lam B)x|| < eps ||A-lam B|| ||x|| exists iff kappa > 1/eps",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            if pc.in_spectrum(P, lam):
                continue
            M = P.eval_at(lam)
            norm_M = op_norm(M, ctx).as_fraction(ctx.p)
            Minv = M.inverse(ctx)
            for eps in sweep:
                x = pc.find_witness(P, lam, eps)
                exceeds = pc.kappa_exceeds(pc.kappa(P, lam), eps, ctx)
                if x is None:
                    ok = not exceeds
                    if ok:
                        # No coordinate column may beat the bound either.
                        for j in range(P.n):
                            col = Minv.column(j)
                            lhs = vec_norm(M.matvec(col), ctx)
                            rhs = eps * norm_M * vec_norm(col, ctx).as_fraction(ctx.p)
                            if cmp_norm(lhs, rhs, ctx) < 0:
                                ok = False
                                break
                else:
                    lhs = vec_norm(M.matvec(x), ctx)
                    rhs = eps * norm_M * vec_norm(x, ctx).as_fraction(ctx.p)
                    ok = exceeds and cmp_norm(lhs, rhs, ctx) < 0
                rec.check(ok, lambda: _fmt(P, lam, f"eps={eps}"))
    return rec


def run_destabilizer(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "destabilizer",
        "the rank-one perturbation is small and makes A + C - lam B singular",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            for eps in sweep:
                if not pc.in_cond_pseudospectrum(P, lam, eps):
                    continue
                if pc.in_spectrum(P, lam):
                    continue
                C = pc.rank_one_destabilizer(P, lam, eps).matrix()
                M = P.eval_at(lam)
                small = (
                    cmp_norm(
                        op_norm(C, ctx),
                        eps * op_norm(M, ctx).as_fraction(ctx.p),
                        ctx,
                    )
                    < 0
                )
                singular = (M + C).det() == 0
                rec.check(small and singular, lambda: _fmt(P, lam, f"eps={eps}"))
    return rec


def run_converse_sampling(
    rng: random.Random, ctx: PAdicContext, trials: int, samples: int = 25
) -> SuiteRecord:
    rec = SuiteRecord(
        "converse_sampling",
        "no small perturbation makes the pencil singular at a non-member",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P, count=1):
            for eps in sweep:
                if pc.in_cond_pseudospectrum(P, lam, eps):
                    continue
                rep = pc.union_characterization_check(
                    P, lam, eps, trials=samples, seed=rng.randrange(2**32)
                )
                rec.check(
                    not rep.singular_sample_found, lambda: _fmt(P, lam, f"eps={eps}")
                )
    return rec


def run_translation(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "translation",
        "condition membership at eps equals plain membership at eps * ||A - lam B||",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            if op_norm(P.eval_at(lam), ctx).is_zero:
                continue
            for eps in sweep:
                fwd = pc.translate_eps(P, lam, eps, pc.COND_TO_PSEUDO)
                ok = pc.in_cond_pseudospectrum(P, lam, eps) == pc.in_pseudospectrum(
                    P, lam, fwd
                )
                back = pc.translate_eps(P, lam, eps, pc.PSEUDO_TO_COND)
                ok = ok and pc.in_pseudospectrum(P, lam, eps) == pc.in_cond_pseudospectrum(
                    P, lam, back
                )
                rec.check(ok, lambda: _fmt(P, lam, f"eps={eps}"))
    return rec


def run_affine(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "affine_transport",
        "kappa of (beta A + alpha B, B) at lam equals kappa of (A, B) at (lam-alpha)/beta",
    )
    for _ in range(trials):
        P = random_pencil(rng, ctx)
        alpha = random_scalar(rng, ctx.p)
        beta = random_scalar(rng, ctx.p)
        Q = pc.affine(P, alpha, beta)
        for lam in probe_lambdas(rng, P, count=2):
            left = pc.kappa(Q, lam)
            right = pc.kappa(P, (lam - alpha) / beta)
            rec.check(
                left.value == right.value,
                lambda: _fmt(P, lam, f"alpha={alpha} beta={beta}"),
            )
    return rec


def run_similarity(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "similarity_sandwich",
        "conjugation by U commuting with B moves kappa by at most k^2 = (||U|| ||U^-1||)^2",
    )
    for _ in range(trials):
        n = rng.choice([2, 3])
        A = random_matrix(rng, n, ctx, "dense")
        # Scalar B commutes with every U, so U can range over dense matrices.
        B = Matrix.identity(n).scale(random_scalar(rng, ctx.p))
        P = Pencil(A, B, ctx)
        U = random_matrix(rng, n, ctx, rng.choice(["diagonal", "dense"]), invertible=True)
        sim = pc.similarity(P, U)
        k2 = sim.k * sim.k
        for lam in probe_lambdas(rng, P, count=2):
            kc = pc.kappa(sim.pencil, lam)
            ka = pc.kappa(P, lam)
            if kc.is_infinite or ka.is_infinite:
                ok = kc.is_infinite == ka.is_infinite
            else:
                ok = kc.value <= k2 * ka.value and ka.value <= k2 * kc.value
            rec.check(ok, lambda: _fmt(P, lam, f"k={sim.k!r}"))
    return rec


def run_inversion(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "inversion_map",
        "kappa of (A^-1, B) at lam bounds kappa of (A, B^-1) at 1/lam up to k",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        n = rng.choice([2, 3])
        A = random_matrix(rng, n, ctx, "dense", invertible=True)
        B = random_matrix(rng, n, ctx, "diagonal", invertible=True)
        P = Pencil(A, B, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            if lam == 0:
                continue
            for eps in sweep:
                rep = pc.inversion_map_check(P, lam, eps)
                rec.check(rep.holds, lambda: _fmt(P, lam, f"eps={eps}"))
    return rec


def run_b_inverse(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "b_inverse_reduction",
        "the reduced pencil (B^-1 A, I) at the scaled level sits inside the original",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        n = rng.choice([2, 3])
        # Commuting pair: both diagonal.
        A = random_matrix(rng, n, ctx, "diagonal")
        B = random_matrix(rng, n, ctx, "diagonal", invertible=True)
        P = Pencil(A, B, ctx)
        for lam in probe_lambdas(rng, P, count=2):
            for eps in sweep:
                rep = pc.b_inverse_reduction_check(P, lam, eps)
                rec.check(rep.holds, lambda: _fmt(P, lam, f"eps={eps}"))
    return rec


def random_diag_pencil(
    rng: random.Random, ctx: PAdicContext, n_choices: Sequence[int] = (2, 3)
) -> rg.DiagonalPencil:
    n = rng.choice(list(n_choices))
    a = [random_scalar(rng, ctx.p) for _ in range(n)]
    b = [random_scalar(rng, ctx.p) for _ in range(n)]
    return rg.DiagonalPencil.create(a, b, ctx)


def run_diag_agreement(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "diag_formula_matrix_agreement",
        "the sup/inf ratio formula equals matrix kappa on diagonal realizations",
    )
    for _ in range(trials):
        D = random_diag_pencil(rng, ctx)
        P = D.as_pencil()
        grid = rg.SampleGrid(tuple(rg.diag_spectrum(D)), -2, 3, seed=rng.randrange(2**32))
        for lam in rg.sample(grid, ctx):
            left = rg.diag_kappa(D, lam)
            right = pc.kappa(P, lam)
            rec.check(
                left.value == right.value,
                lambda: f"p={ctx.p} lambda={format_rational(lam)} diag={D.to_json()}",
            )
    return rec


def run_region_audit(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "region_audit",
        "exact two-center regions match the kappa predicate on every probe",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        D = random_diag_pencil(rng, ctx, n_choices=(2,))
        try:
            D.require_invertible_b()
        except rg.ZeroBEntryError:
            continue
        grid = rg.SampleGrid(
            tuple(rg.diag_spectrum(D)) + (Fraction(0),),
            -3,
            6,
            digits=3,
            seed=rng.randrange(2**32),
        )
        probes = rg.sample(grid, ctx)
        for eps in sweep:
            region = rg.cond_region(D, eps)
            audit = rg.region_vs_predicate_audit(D, region, eps, probes)
            rec.check(
                audit.ok,
                lambda: f"p={ctx.p} eps={eps} diag={D.to_json()} mismatches={audit.to_json()}",
            )
    return rec


def run_region_monotone(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "region_monotonicity",
        "regions grow with eps and always contain the spectrum points",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        D = random_diag_pencil(rng, ctx, n_choices=(1, 2))
        grid = rg.SampleGrid(
            tuple(rg.diag_spectrum(D)), -2, 4, seed=rng.randrange(2**32)
        )
        probes = rg.sample(grid, ctx)
        regions = [rg.cond_region(D, e) for e in sweep]
        spectrum = rg.diag_spectrum(D)
        ok = True
        for r1, r2 in zip(regions, regions[1:]):
            for lam in probes:
                if r1.contains(lam, ctx) and not r2.contains(lam, ctx):
                    ok = False
        for r in regions:
            for z in spectrum:
                if not r.contains(z, ctx):
                    ok = False
        rec.check(ok, lambda: f"p={ctx.p} diag={D.to_json()}")
    return rec


def random_tail_pencil(rng: random.Random, ctx: PAdicContext) -> sq.TailDiagonalPencil:
    p = ctx.p
    n = rng.choice([1, 2, 3])
    A = sq.TailDiagonalOperator.create(
        [random_scalar(rng, p) for _ in range(n)],
        sq.TailRule.constant(random_scalar(rng, p)),
        ctx,
    )
    B = sq.TailDiagonalOperator.create(
        [random_scalar(rng, p, (-1, 1)) for _ in range(n)],
        sq.TailRule.constant(random_scalar(rng, p, (-1, 1))),
        ctx,
    )
    return sq.TailDiagonalPencil.create(A, B)


def random_finite_rank(
    rng: random.Random, ctx: PAdicContext, max_index: int = 5, max_terms: int = 4
) -> sq.FiniteRankOp:
    terms = []
    for _ in range(rng.randrange(1, max_terms + 1)):
        j = rng.randrange(0, max_index)
        i = rng.randrange(0, max_index)
        terms.append((j, i, random_scalar(rng, ctx.p)))
    return sq.FiniteRankOp.create(terms)


def run_essential(rng: random.Random, ctx: PAdicContext, trials: int) -> SuiteRecord:
    rec = SuiteRecord(
        "essential_spectrum",
        "essential points survive every sampled finite-rank perturbation; "
        "other spectral points are cured by the regularizer",
    )
    for _ in range(trials):
        D = random_tail_pencil(rng, ctx)
        ess = sq.essential_spectrum(D)
        spectral_probes = set(ess)
        for i in range(D.start):
            if D.B.entry(i) != 0:
                spectral_probes.add(D.A.entry(i) / D.B.entry(i))
        extra = [random_scalar(rng, ctx.p) for _ in range(2)]
        for lam in sorted(spectral_probes) + extra:
            essential = not sq.is_fredholm_index0(D, lam)
            if essential:
                ok = lam in ess
                for _ in range(5):
                    K = random_finite_rank(rng, ctx)
                    if not sq.perturbed_spectrum_membership(D, lam, K):
                        ok = False
                rec.check(ok, lambda: f"essential lam={format_rational(lam)} {D.to_json()}")
            else:
                ok = lam not in ess
                if sq.seq_spectrum_membership(D, lam):
                    K = sq.regularizer(D, lam)
                    if sq.perturbed_spectrum_membership(D, lam, K):
                        ok = False
                    # Support must sit exactly on the vanishing coordinates.
                    zero_set = set(sq.tail_inf_sup(D, lam).zero_indices)
                    if set(K.indices()) != zero_set:
                        ok = False
                    # Fredholm stability under sampled finite-rank noise.
                    for _ in range(3):
                        if not sq.perturbed_fredholm_index0(
                            D, lam, random_finite_rank(rng, ctx)
                        ):
                            ok = False
                rec.check(ok, lambda: f"lam={format_rational(lam)} {D.to_json()}")
    return rec


def run_truncation_consistency(
    rng: random.Random, ctx: PAdicContext, trials: int
) -> SuiteRecord:
    rec = SuiteRecord(
        "truncation_consistency",
        "finite sections agree with the symbolic pencil once the tail is bounded below",
    )
    for _ in range(trials):
        D = random_tail_pencil(rng, ctx)
        for lam in [random_scalar(rng, ctx.p) for _ in range(2)]:
            info = sq.tail_inf_sup(D, lam)
            if info.inf.is_zero or info.zero_indices:
                continue
            sym = sq.seq_kappa(D, lam)
            for n in (D.start + 1, D.start + 3):
                P = D.truncation(n)
                mat = pc.kappa(P, lam)
                # The section can only miss entries, so kappa may only shrink;
                # both must agree once the extremes are inside the section.
                ok = mat.value <= sym.value
                rec.check(ok, lambda: _fmt(P, lam, "truncation"))
            big = pc.kappa(D.truncation(D.start + 4), lam)
            rec.check(
                big.value == sym.value,
                lambda: f"lam={format_rational(lam)} {D.to_json()}",
            )
    return rec


def run_essential_cond_pseudo(
    rng: random.Random, ctx: PAdicContext, trials: int
) -> SuiteRecord:
    rec = SuiteRecord(
        "essential_cond_pseudo",
        "membership matches the infinitely-many-small-entries criterion and "
        "non-members stay Fredholm under sampled small perturbations",
    )
    sweep = eps_sweep(ctx.p)
    for _ in range(trials):
        D = random_tail_pencil(rng, ctx)
        for lam in sq.essential_spectrum(D) + [random_scalar(rng, ctx.p)]:
            info = sq.tail_inf_sup(D, lam)
            if info.sup.is_zero:
                continue
            for eps in sweep:
                member = sq.essential_cond_pseudo_member(D, lam, eps)
                if not sq.is_fredholm_index0(D, lam):
                    rec.check(
                        member, lambda: f"essential point not member eps={eps}"
                    )
                elif not member:
                    ok = True
                    for _ in range(3):
                        K = random_finite_rank(rng, ctx)
                        if not sq.perturbed_fredholm_index0(D, lam, K):
                            ok = False
                    rec.check(ok, lambda: f"lam={format_rational(lam)} eps={eps}")
                else:
                    rec.check(True, lambda: "")
    return rec


ALL_SUITES = [
    run_kappa_floor,
    run_nesting,
    run_intersection,
    run_witness,
    run_destabilizer,
    run_converse_sampling,
    run_translation,
    run_affine,
    run_similarity,
    run_inversion,
    run_b_inverse,
    run_diag_agreement,
    run_region_audit,
    run_region_monotone,
    run_essential,
    run_truncation_consistency,
    run_essential_cond_pseudo,
]


def run_all_suites(
    seed: int, trials: int, primes: Sequence[int] = (2, 3, 5)
) -> SuiteReport:
    report = SuiteReport(seed=seed, trials=trials)
    merged = {}
    for p in primes:
        ctx = PAdicContext(p)
        rng = random.Random(seed * 1000003 + p)
        for suite in ALL_SUITES:
            rec = suite(rng, ctx, max(1, trials // len(primes)))
            if rec.name in merged:
                tgt = merged[rec.name]
                tgt.instances += rec.instances
                tgt.failures += rec.failures
                if tgt.first_counterexample is None:
                    tgt.first_counterexample = rec.first_counterexample
            else:
                merged[rec.name] = rec
    report.records = list(merged.values())
    return report

import random
from fractions import Fraction as F

import pytest

from ultrapencil.padic import PAdicContext, UltraNorm, cmp_norm
from ultrapencil import regions as rg
from ultrapencil.regions import (
    DiagonalPencil,
    PBall,
    RegionDescription,
    SampleGrid,
    ZeroBEntryError,
)
from ultrapencil import pencil as pc
from ultrapencil.suites import random_diag_pencil

CTX = PAdicContext(5)
TWO_CENTER = DiagonalPencil.create([1, 2], [1, 1], CTX)


def kappa_member(D, lam, eps):
    """Membership oracle straight from the definition."""
    k = rg.diag_kappa(D, lam)
    return k.value.is_infinite or cmp_norm(k.value, 1 / eps, D.ctx) > 0


def test_diag_spectrum_examples():
    assert rg.diag_spectrum(TWO_CENTER) == [F(1), F(2)]
    assert rg.diag_spectrum(DiagonalPencil.create([0, 0], [1, 2], CTX)) == [F(0)]
    assert rg.diag_spectrum(DiagonalPencil.create([1, 2, 4], [1, 2, 4], CTX)) == [F(1)]
    with pytest.raises(ZeroBEntryError):
        rg.diag_spectrum(DiagonalPencil.create([1], [0], CTX))


def test_diag_kappa_examples():
    assert rg.diag_kappa(TWO_CENTER, F(6)).value == UltraNorm.ppow(-1)
    assert rg.diag_kappa(TWO_CENTER, F(1)).is_infinite
    single = DiagonalPencil.create([1, 1], [1, 1], CTX)
    assert rg.diag_kappa(single, F(7)).value == UltraNorm.one()


def test_diag_kappa_matches_matrix_kappa():
    rng = random.Random(23)
    for _ in range(20):
        D = random_diag_pencil(rng, CTX)
        P = D.as_pencil()
        for lam in [F(0), F(1), F(1, 5), F(26, 5)]:
            assert rg.diag_kappa(D, lam).value == pc.kappa(P, lam).value


def test_cond_region_worked_example():
    region = rg.cond_region(TWO_CENTER, F(1, 5))
    assert region.exact and not region.complement
    assert sorted(region.points) == [F(1), F(2)]
    assert sorted((b.center, b.radius_v) for b in region.balls) == [
        (F(1), 2),
        (F(2), 2),
    ]


def test_cond_region_large_eps_contains_center_balls():
    region = rg.cond_region(TWO_CENTER, F(1))
    for z in (F(1), F(2)):
        assert region.contains(z + F(5), CTX)
        assert region.contains(z + F(25), CTX)


def test_cond_region_single_center():
    single = DiagonalPencil.create([1], [1], CTX)
    region = rg.cond_region(single, F(1, 2))
    assert region.contains(F(1), CTX)
    assert not region.contains(F(0), CTX)
    everything = rg.cond_region(single, F(5))
    for lam in [F(0), F(1), F(123, 5)]:
        assert everything.contains(lam, CTX)


def test_cond_region_audit_on_random_two_center_pencils():
    rng = random.Random(31)
    for p in (2, 3, 5):
        ctx = PAdicContext(p)
        for _ in range(10):
            D = random_diag_pencil(rng, ctx, n_choices=(2,))
            grid = SampleGrid(
                tuple(rg.diag_spectrum(D)) + (F(0),),
                -4,
                7,
                digits=3,
                seed=rng.randrange(2**31),
            )
            probes = rg.sample(grid, ctx)
            for eps in [F(1, p**2), F(1, p), F(1), F(p)]:
                region = rg.cond_region(D, eps)
                audit = rg.region_vs_predicate_audit(D, region, eps, probes)
                assert audit.ok, (p, D.to_json(), eps, audit.to_json())


def test_region_audit_negative_control():
    # A deliberately shrunken radius must surface as a mismatch.
    wrong = RegionDescription((F(1), F(2)), (PBall(F(1), 3), PBall(F(2), 3)))
    probes = rg.sample(SampleGrid((F(1), F(2)), 1, 3, seed=9), CTX)
    audit = rg.region_vs_predicate_audit(TWO_CENTER, wrong, F(1, 5), probes)
    assert not audit.ok


def test_region_audit_empty_grid_is_vacuous():
    region = rg.cond_region(TWO_CENTER, F(1, 5))
    audit = rg.region_vs_predicate_audit(TWO_CENTER, region, F(1, 5), [])
    assert audit.ok and audit.total == 0


def test_pseudo_region_worked_example():
    region = rg.pseudo_region(TWO_CENTER, F(1, 5))
    assert sorted((b.center, b.radius_v) for b in region.balls) == [
        (F(1), 2),
        (F(2), 2),
    ]
    # Matches the inf-based predicate on samples.
    probes = rg.sample(SampleGrid((F(1), F(2), F(0)), -3, 5, digits=3, seed=4), CTX)
    for lam in probes:
        expected = any(
            cmp_norm(rg.padic_abs(a - lam * b, CTX), F(1, 5), CTX) < 0
            for a, b in zip(TWO_CENTER.a, TWO_CENTER.b)
        ) or lam in (F(1), F(2))
        assert region.contains(lam, CTX) == expected


def test_pseudo_region_merges_nested_balls():
    # Large epsilon swallows both centers into one ball.
    region = rg.pseudo_region(TWO_CENTER, F(25))
    assert len(region.balls) == 1
    for lam in [F(1), F(2), F(7), F(1, 1)]:
        assert region.contains(lam, CTX)


def test_pseudo_region_center_member_for_all_eps():
    for eps in [F(1, 5**6), F(1, 5), F(5)]:
        region = rg.pseudo_region(TWO_CENTER, eps)
        assert region.contains(F(1), CTX) and region.contains(F(2), CTX)


def test_sample_grid_examples():
    grid = SampleGrid((F(0),), 0, 0, digits=1, seed=0)
    vals = rg.sample(grid, CTX)
    assert len(vals) == 1 and rg.padic_abs(vals[0], CTX) == UltraNorm.one()
    grid = SampleGrid((F(1),), 1, 2, digits=1, seed=0)
    for lam in rg.sample(grid, CTX):
        assert rg.padic_abs(lam - 1, CTX) in (UltraNorm.ppow(1), UltraNorm.ppow(2))
    assert rg.sample(SampleGrid((), 0, 1, seed=0), CTX) == []


def test_sample_deterministic():
    grid = SampleGrid((F(1), F(2)), -2, 3, digits=3, seed=42)
    assert rg.sample(grid, CTX) == rg.sample(grid, CTX)


def test_many_center_region_is_flagged_sampled():
    D = DiagonalPencil.create([1, 2, 3], [1, 1, 1], CTX)
    region = rg.cond_region(D, F(1, 5))
    assert not region.exact
    # Tail balls are certified: deep inside each center ball we are members.
    for z in rg.diag_spectrum(D):
        assert region.contains(z, CTX)


def test_region_json_roundtrip():
    region = rg.cond_region(TWO_CENTER, F(1, 5))
    clone = RegionDescription.from_json(region.to_json())
    probes = rg.sample(SampleGrid((F(1), F(2)), -1, 4, seed=2), CTX)
    for lam in probes:
        assert clone.contains(lam, CTX) == region.contains(lam, CTX)


def test_kappa_exponent_heatmap_values():
    assert rg.kappa_exponent(TWO_CENTER, F(1)) is None
    assert rg.kappa_exponent(TWO_CENTER, F(6)) == 1
    assert rg.kappa_exponent(TWO_CENTER, F(0)) == 0

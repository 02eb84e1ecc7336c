"""Command-line surface.

Subcommands: classify, region, perturb, essential, check-theorems.
Exit codes: 0 ok, 2 input error, 3 precondition violation, 4 suite failure.
All outputs are plain JSON / CSV / PGM and byte-stable for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from .padic import PAdicContext, UltrapencilError, format_rational, parse_rational
from . import pencil as pc
from . import regions as rg
from . import sequence as sq
from .pencil import NotInCondPseudospectrumError, Pencil
from .regions import DiagonalPencil, SampleGrid
from .sequence import TailDiagonalPencil, UnsupportedTailError
from .suites import run_all_suites

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_SUITE_FAILURE = 4


class CliInputError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from exc


def _parse_rational_list(text: str) -> List[Fraction]:
    try:
        return [parse_rational(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliInputError(str(exc)) from exc


def _parse_grid(spec: str) -> tuple:
    # Format: vmin:vmax:digits
    try:
        vmin, vmax, digits = (int(tok) for tok in spec.split(":"))
        return vmin, vmax, digits
    except ValueError as exc:
        raise CliInputError(f"bad grid spec {spec!r}, expected vmin:vmax:digits") from exc


def _load_pencil(args) -> Pencil:
    obj = _load_json(args.input)
    if args.p is not None:
        obj["p"] = args.p
    try:
        return Pencil.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise CliInputError(f"bad pencil JSON: {exc}") from exc


def _load_diag_pencil(args) -> DiagonalPencil:
    obj = _load_json(args.input)
    if args.p is not None:
        obj["p"] = args.p
    try:
        if "a" in obj and "b" in obj:
            return DiagonalPencil.from_json(obj)
        P = Pencil.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise CliInputError(f"bad pencil JSON: {exc}") from exc
    if not (P.A.is_diagonal() and P.B.is_diagonal()):
        raise CliInputError("region computation needs a diagonal pencil")
    return DiagonalPencil.create(
        [P.A.rows[i][i] for i in range(P.n)],
        [P.B.rows[i][i] for i in range(P.n)],
        P.ctx,
    )


def _load_tail_pencil(args) -> TailDiagonalPencil:
    obj = _load_json(args.input)
    if args.p is not None:
        obj["p"] = args.p
    try:
        return TailDiagonalPencil.from_json(obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise CliInputError(f"bad tail pencil JSON: {exc}") from exc


def _emit(args, name: str, text: str) -> None:
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        Path(args.out, name).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args) -> int:
    P = _load_pencil(args)
    lambdas = _parse_rational_list(args.lam or "")
    if not lambdas:
        raise CliInputError("classify needs --lambda")
    eps_list = _parse_rational_list(args.eps or "") or [Fraction(1)]
    lines = []
    for lam in lambdas:
        for eps in eps_list:
            k = pc.kappa(P, lam)
            rec = {
                "lambda": format_rational(lam),
                "epsilon": format_rational(eps),
                "in_spectrum": pc.in_spectrum(P, lam),
                "in_pseudo": pc.in_pseudospectrum(P, lam, eps),
                "in_cond_pseudo": pc.in_cond_pseudospectrum(P, lam, eps),
                "kappa": k.to_json(),
            }
            lines.append(json.dumps(rec, sort_keys=True))
    _emit(args, "classify.jsonl", "\n".join(lines) + "\n")
    return EXIT_OK


def _heatmap_rows(D: DiagonalPencil, grid: SampleGrid):
    probes = rg.sample(grid, D.ctx)
    return [(lam, rg.kappa_exponent(D, lam)) for lam in probes]


SPECTRUM_SENTINEL = 255


def _write_pgm(rows, path: Path) -> None:
    """One PGM row per probe; gray value clips the kappa exponent, spectrum
    points saturate."""
    values = []
    for _, e in rows:
        if e is None:
            values.append(SPECTRUM_SENTINEL)
        else:
            values.append(max(0, min(SPECTRUM_SENTINEL - 1, e * 16)))
    width = max(1, len(values))
    lines = [f"P2 {width} 1 {SPECTRUM_SENTINEL}"]
    lines.append(" ".join(str(v) for v in values))
    path.write_text("\n".join(lines) + "\n")


def cmd_region(args) -> int:
    D = _load_diag_pencil(args)
    eps_list = _parse_rational_list(args.eps or "")
    if not eps_list:
        raise CliInputError("region needs --eps")
    out = {}
    for eps in eps_list:
        out[format_rational(eps)] = rg.cond_region(D, eps).to_json()
    _emit(args, "region.json", json.dumps(out, indent=2, sort_keys=True) + "\n")
    if args.grid:
        vmin, vmax, digits = _parse_grid(args.grid)
        grid = SampleGrid(
            tuple(rg.diag_spectrum(D)), vmin, vmax, digits, seed=args.seed
        )
        rows = _heatmap_rows(D, grid)
        csv_lines = ["lambda,kappa_exponent"]
        for lam, e in rows:
            csv_lines.append(
                f"{format_rational(lam)},{'spectrum' if e is None else e}"
            )
        _emit(args, "heatmap.csv", "\n".join(csv_lines) + "\n")
        if args.pgm and args.out:
            _write_pgm(rows, Path(args.out, "heatmap.pgm"))
    return EXIT_OK


def cmd_perturb(args) -> int:
    P = _load_pencil(args)
    lambdas = _parse_rational_list(args.lam or "")
    eps_list = _parse_rational_list(args.eps or "")
    if len(lambdas) != 1 or len(eps_list) != 1:
        raise CliInputError("perturb needs exactly one --lambda and one --eps")
    lam, eps = lambdas[0], eps_list[0]
    try:
        C = pc.rank_one_destabilizer(P, lam, eps).matrix()
    except NotInCondPseudospectrumError as exc:
        print(
            f"lambda is not in the condition pseudospectrum: kappa = "
            f"{json.dumps(exc.kappa_value.to_json())} does not exceed 1/eps",
            file=sys.stderr,
        )
        return EXIT_PRECONDITION
    from .linalg import op_norm

    shifted = P.A + C - P.B.scale(lam)
    out = {
        "lambda": format_rational(lam),
        "epsilon": format_rational(eps),
        "C": C.to_json(P.ctx),
        "norm_C": op_norm(C, P.ctx).to_json(),
        "det_A_plus_C_minus_lambda_B": format_rational(shifted.det()),
        "singular": shifted.det() == 0,
    }
    _emit(args, "perturb.json", json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_essential(args) -> int:
    D = _load_tail_pencil(args)
    probes = _parse_rational_list(args.lam or "")
    ess = sq.essential_spectrum(D)
    probes = sorted(set(probes) | set(ess))
    records = []
    for lam in probes:
        spectral = sq.seq_spectrum_membership(D, lam)
        essential = not sq.is_fredholm_index0(D, lam)
        rec = {
            "lambda": format_rational(lam),
            "spectral": spectral,
            "essential": essential,
        }
        if spectral and not essential:
            K = sq.regularizer(D, lam)
            rec["regularizer"] = K.to_json()
            rec["regularized_spectral"] = sq.perturbed_spectrum_membership(D, lam, K)
        records.append(rec)
    out = {
        "essential_spectrum": [format_rational(x) for x in ess],
        "probes": records,
    }
    _emit(args, "essential.json", json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_check_theorems(args) -> int:
    report = run_all_suites(seed=args.seed, trials=args.trials)
    text = report.dumps()
    _emit(args, "report.json", text)
    for rec in sorted(report.records, key=lambda r: r.name):
        verdict = "PASS" if rec.failures == 0 else "FAIL"
        print(
            f"{verdict} {rec.name}: {rec.passes}/{rec.instances}",
            file=sys.stderr,
        )
    return EXIT_OK if report.ok else EXIT_SUITE_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultrapencil",
        description="Exact p-adic spectra and condition pseudospectra of operator pencils.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="pencil JSON file")
        sp.add_argument("--p", type=int, default=None, help="prime override")
        sp.add_argument("--eps", default=None, help="comma-separated rationals")
        sp.add_argument(
            "--lambda", dest="lam", default=None, help="comma-separated rationals"
        )
        sp.add_argument("--grid", default=None, help="sample grid vmin:vmax:digits")
        sp.add_argument(
            "--seed",
            type=int,
            default=int(os.environ.get("ULTRAPENCIL_SEED", "0")),
        )
        sp.add_argument("--trials", type=int, default=200)
        sp.add_argument("--out", default=None, help="output directory")

    sp = sub.add_parser("classify", help="point classification for a matrix pencil")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("region", help="exact regions for a diagonal pencil")
    common(sp)
    sp.add_argument("--pgm", action="store_true", help="also write a PGM heatmap")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("perturb", help="rank-one destabilizer certificate")
    common(sp)
    sp.set_defaults(func=cmd_perturb)

    sp = sub.add_parser("essential", help="essential spectrum of a tail pencil")
    common(sp)
    sp.set_defaults(func=cmd_essential)

    sp = sub.add_parser("check-theorems", help="run every property suite")
    common(sp, needs_input=False)
    sp.set_defaults(func=cmd_check_theorems)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UnsupportedTailError,) as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UltrapencilError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())

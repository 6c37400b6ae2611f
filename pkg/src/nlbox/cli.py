"""Batch command line for every verification and report.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
errors. ``--json`` prints the run report to stdout instead of text.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from . import bounds as B
from .boxes import RNG_ALGORITHM, NoiseParameter, sampler_report
from .fixtures import clean_fixture_path, infer_completions, load_appendix_v, load_fixture_file, same_family, verify_appendix_v
from .gf2 import BitVector
from .invariant import angle_scan_csv, chsh_max_over_angles
from .spaces import below_reference_regime, check_admissibility, enumerate_inputs, enumerate_translations, odd_sum_closure_check
from .symmetry import partition_by_symmetry, partition_dump, symmetry_parameter_W

SQRT2 = math.sqrt(2)


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    parameters: dict
    seed: Optional[int] = None
    checks: list[dict] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    text: list[str] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "pass": bool(ok), "detail": detail})

    def say(self, line: str) -> None:
        self.text.append(line)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "version": __version__,
            "seed": self.seed,
            "checks": self.checks,
            "artifacts": self.artifacts,
            "results": self.results,
        }


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _write(path: str, text: str, rep: RunReport) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    rep.artifacts.append(path)


def _parse_p(text: str) -> NoiseParameter:
    try:
        return NoiseParameter(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad probability {text!r}: {exc}") from None


def read_settings(path: str, keys: tuple[str, ...]) -> dict[str, BitVector]:
    """``name bitstring`` per line (``=`` or ``:`` also accepted), ``#`` comments."""
    vals: dict[str, BitVector] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].replace("=", " ").replace(":", " ").split()
        if not line:
            continue
        if len(line) != 2 or line[0] not in keys:
            raise UsageError(f"{path}:{lineno}: expected one of {', '.join(keys)} followed by a bitstring")
        vals[line[0]] = BitVector.parse(line[1])
    missing = [k for k in keys if k not in vals]
    if missing:
        raise UsageError(f"{path}: missing {', '.join(missing)}")
    return vals


def _quad(args) -> B.SettingsQuad:
    if args.settings:
        v = read_settings(args.settings, ("x1", "x2", "y1", "y2"))
        return B.SettingsQuad(v["x1"], v["x2"], v["y1"], v["y2"])
    if args.n not in (None, 6):
        raise UsageError("default settings exist for n = 6 only; pass --settings")
    return B.CORRECTED_QUAD


# ---------------------------------------------------------------- commands


def cmd_inputs(args, rep: RunReport) -> None:
    n = args.n
    space = enumerate_inputs(n)
    trans = enumerate_translations(n)
    text = "# inputs\n" + space.dump() + "# translations\n" + "".join(f"{t}\n" for t in trans)
    if args.out:
        _write(args.out, text, rep)
    else:
        rep.say(text.rstrip("\n"))
    full = 1 << (n - 1)
    rep.check("input count", len(space) == full, f"{len(space)} = 2^{n - 1}")
    rep.check("translation count", len(trans) == full, f"{len(trans)} = 2^{n - 1}")
    if n <= 8:
        ok = all(check_admissibility(x, y) for x in space for y in space)
        rep.check("admissibility", ok, "every pair, exhaustive")
    rep.check("odd-sum closure", odd_sum_closure_check(space), "")
    rep.results["below_reference_regime"] = below_reference_regime(n)
    if below_reference_regime(n):
        rep.say(f"note: n={n} is below the n >= 6 regime of the stated claims")


def cmd_partition(args, rep: RunReport) -> None:
    subs = partition_by_symmetry(args.n)
    text = partition_dump(subs, with_rotations=args.rotations)
    if args.out:
        _write(args.out, text, rep)
    else:
        rep.say(text.rstrip("\n"))
    rep.results["subsets"] = len(subs)
    rep.results["construction"] = subs[0].construction
    if args.verify:
        n = args.n
        ones = (1 << n) - 1
        cell = 1 << (n // 2)
        expected = (1 << ((n - 2) // 2)) + 1
        rep.check("subset count", len(subs) == expected, f"{len(subs)} subsets")
        rep.check("subset size", all(len(s.T) == cell and len(s.X) == cell for s in subs), f"|T_m| = |X_m| = {cell}")
        inter = all({t.word for t in a.T} & {t.word for t in b.T} == {0, ones} for a in subs for b in subs if a.m < b.m)
        rep.check("pairwise intersection", inter, "{0…0, 1…1}")
        cover = {t.word for s in subs for t in s.T}
        rep.check("cover", len(cover) == 1 << (n - 1), f"{len(cover)} translations")
        if n == 6:
            match = same_family(subs, load_appendix_v())
            rep.results["matches_fixture"] = match
            rep.say(f"same T_m family as the shipped fixture: {match}")


def cmd_fixtures(args, rep: RunReport) -> None:
    path = args.file or str(clean_fixture_path())
    # with --verify, structural faults surface as failed checks, not load errors
    fx = load_fixture_file(path, strict=not args.verify)
    rep.parameters["file"] = path
    rep.say(f"{path}: {len(fx.inputs)} inputs, {len(fx.translations)} translations, {len(fx.subsets)} subsets")
    raw = load_appendix_v(clean=False)
    for c in infer_completions(raw):
        rep.say(f"raw subset {c.m} {c.section}: duplicate {', '.join(map(str, c.duplicates))}; inferred {', '.join(map(str, c.inferred))}")
    if args.verify:
        r = verify_appendix_v(fx)
        for c in r.checks:
            rep.check(c.name, c.passed, c.detail)


def cmd_tradeoff(args, rep: RunReport) -> None:
    pts = B.tradeoff_curve(args.steps)
    csv = B.tradeoff_csv(pts)
    if args.out:
        _write(args.out, csv, rep)
    else:
        rep.say(csv.rstrip("\n"))
    rep.check("endpoints", pts[0].sum == 2 and pts[-1].sum == 2, "Q+P = 2 at E = ±1")
    rep.check("even in E", all(a.sum == b.sum for a, b in zip(pts, reversed(pts))), "")


def cmd_tsirelson(args, rep: RunReport) -> None:
    u = B.threshold_square()
    E = B.consistency_threshold()
    qs = (1 + 3 * u * u) / 4
    ps = (1 + u) ** 2 / 4
    rep.say(f"threshold E = {E:.15g}")
    rep.say(f"E^2 = {_frac(u)}, Q(W=0) = {_frac(qs)}, P(W=1) = {_frac(ps)}")
    rep.say("Q+P=1 at threshold: exact" if qs + ps == 1 else f"Q+P={qs + ps} at threshold")
    rep.results.update({"threshold": E, "E_squared": _frac(u), "q_w0": _frac(qs), "p_w1": _frac(ps)})
    rep.check("Q+P=1 at threshold", qs + ps == 1, f"{_frac(qs)} + {_frac(ps)}")
    rep.check("threshold value", abs(E - SQRT2 / 2) <= 1e-15, f"{E!r}")
    grid = [Fraction(i, 100) for i in range(101)]
    ok = all(B.q_w0_from_p(p) == B.q_w0(2 * p - 1) and B.p_w1_from_p(p) == B.p_w1(2 * p - 1) for p in grid)
    rep.check("closed forms on a 101-point p grid", ok, "exact")
    rep.check("inconsistent at E=1", B.q_w0(1) + B.p_w1(1) > 1, "Q+P = 2")


def cmd_variance(args, rep: RunReport) -> None:
    q = _quad(args)
    r = B.mean_square_chsh(q)
    rep.results.update(B.bound_report("S", q.n, q.as_dict(), r.mean_square))
    rep.results["histogram"] = {str(k): v for k, v in r.histogram().items()}
    rep.results["degenerate"] = q.degenerate
    rep.say(f"mean_square = {_frac(r.mean_square)}, bound = {r.bound:.13g}")
    rep.say(f"S^2 histogram over translations: {r.histogram()}")
    rep.check("mean square at most 16", r.mean_square <= 16, _frac(r.mean_square))
    if not args.settings:
        rep.check("default quad gives 8", r.mean_square == 8, _frac(r.mean_square))


def cmd_uncertainty(args, rep: RunReport) -> None:
    tally = B.fine_grained_scan(args.n)
    rep.results["tally"] = {_frac(k): v for k, v in tally.items()}
    values = sorted(tally)
    zeta = 0.5 + math.sqrt(values[-1]) / 4
    rep.results["zeta"] = zeta
    rep.say(f"<G^2> over {sum(tally.values())} triples: {', '.join(_frac(v) for v in values)}")
    rep.say(f"zeta = {zeta:.15g}")
    rep.check("<G^2> = 2 for every triple", values == [2], "")
    rep.check("zeta", abs(zeta - (0.5 + 1 / (2 * SQRT2))) <= 1e-12, f"{zeta!r}")


def cmd_tripartite(args, rep: RunReport) -> None:
    if args.n != 8:
        raise UsageError("the tripartite settings are defined for n = 8")
    if args.settings:
        v = read_settings(args.settings, ("x0", "x1", "y0", "y1", "z0", "z1", "c"))
        s = B.TripartiteSettings(**v)
    else:
        s = B.REFERENCE_TRIPARTITE
    if args.parameter == "I":
        corr = B.tripartite_correlations(s)
        I = B.tripartite_bell_I(s)
        ms = B.mean_square_tripartite_I(s)
        rep.results.update(B.bound_report("I", 8, s.as_dict(), ms.mean_square))
        rep.results.update({"correlations": list(corr), "I": I, "mean_square_signed": _frac(ms.mean_square_signed),
                            "symmetry_reduced": ms.symmetry_reduced})
        rep.say(f"correlations {corr}, I = {I}, <I^2> = {_frac(ms.mean_square)}, bound = {ms.bound:.13g}")
        if not args.settings:
            rep.check("correlations", corr == (1, 1, 1, -1), str(corr))
            rep.check("I = 4", I == 4, str(I))
            rep.check("<I^2> = 8", ms.mean_square == 8, _frac(ms.mean_square))
    else:
        r = B.tripartite_bell_J_bound(8, budget=args.budget)
        rep.results.update(B.bound_report("J", 8, r.witness.as_dict() if r.witness else {}, r.max_mean_square, exact=not r.partial))
        rep.results.update({"signed_max": r.signed_max, "local_max": B.local_J_max(), "evaluated": r.evaluated, "partial": r.partial})
        rep.say(f"max <J^2> = {_frac(r.max_mean_square)}, bound = {r.bound:.13g} over {r.evaluated} settings")
        rep.say(f"signed J max = {r.signed_max}, local max = {B.local_J_max()}")
        rep.check("search complete", not r.partial, f"{r.evaluated} settings")
        rep.check("bound 4*sqrt(2)", abs(r.bound - 4 * SQRT2) <= 1e-9, f"{r.bound!r}")


def cmd_mc(args, rep: RunReport) -> None:
    noise = _parse_p(args.p)
    rep.seed = args.seed
    x, y = BitVector.parse(args.x), BitVector.parse(args.y)
    samp = sampler_report(x, y, noise, args.seed, args.trials)
    qh, ph = B.monte_carlo_tradeoff(noise.p, args.trials, args.seed)
    E = float(noise.E)
    q, p = float(B.q_w0(noise.E)), float(B.p_w1(noise.E))
    sq = math.sqrt(q * (1 - q) / args.trials)
    sp = math.sqrt(p * (1 - p) / args.trials)
    se = math.sqrt(max(1 - E * E, 0.0) / args.trials)
    rep.results.update({"sampler": samp, "rng": RNG_ALGORITHM, "q_hat": qh, "q_exact": q, "p_hat": ph, "p_exact": p})
    rep.say(f"empirical E = {samp['empirical_E']:.6f} (exact {samp['exact_E']:.6f})")
    rep.say(f"q_hat = {qh:.6f} (exact {q:.6f}), p_hat = {ph:.6f} (exact {p:.6f})")
    rep.check("E within 3 sigma", abs(samp["empirical_E"] - samp["exact_E"]) <= 3 * se + 1e-12, f"sigma = {se:.3g}")
    rep.check("q_hat within 3 sigma", abs(qh - q) <= 3 * sq + 1e-12, f"sigma = {sq:.3g}")
    rep.check("p_hat within 3 sigma", abs(ph - p) <= 3 * sp + 1e-12, f"sigma = {sp:.3g}")


def cmd_invariant(args, rep: RunReport) -> None:
    scan = chsh_max_over_angles(args.grid)
    rep.results.update({"S_max": scan.S_max, "argmax": list(scan.argmax)})
    rep.say(f"S_max = {scan.S_max:.15g} at {tuple(round(a / math.pi, 6) for a in scan.argmax)} (units of pi)")
    if args.out:
        _write(args.out, angle_scan_csv(args.grid), rep)
    rep.check("S_max = 2*sqrt(2)", abs(scan.S_max - 2 * SQRT2) <= 1e-12, f"{scan.S_max!r}")


def cmd_chsh(args, rep: RunReport) -> None:
    q = _quad(args)
    noise = _parse_p(args.p)
    S = B.chsh_of_settings(q, noise)
    W = symmetry_parameter_W(q.x1, q.x2, q.y1, q.y2)
    rep.results.update({"settings": q.as_dict(), "p": _frac(noise.p), "S": _frac(S), "W": W, "degenerate": q.degenerate})
    rep.say(f"S = {_frac(S)} ({float(S):.12g}), W = {W}")
    rep.check("S within algebraic maximum", S <= 4, _frac(S))


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nlbox", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="print the run report as JSON")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("inputs", help="dump the input and translation spaces")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_inputs)

    s = sub.add_parser("partition", help="build the symmetry subsets")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--rotations", type=int, default=0, help="stabilizer matrices to list per subset")
    s.add_argument("--out")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("fixtures", help="load and check the n = 6 fixture")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--file")
    s.set_defaults(func=cmd_fixtures)

    s = sub.add_parser("tradeoff", help="Q(W=0), P(W=1) curve as CSV")
    s.add_argument("--steps", type=int, default=201)
    s.add_argument("--out")
    s.set_defaults(func=cmd_tradeoff)

    s = sub.add_parser("tsirelson", help="consistency threshold and closed-form checks")
    s.set_defaults(func=cmd_tsirelson)

    s = sub.add_parser("variance", help="mean-square CHSH over translations")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--settings")
    s.set_defaults(func=cmd_variance)

    s = sub.add_parser("uncertainty", help="fine-grained uncertainty bound")
    s.add_argument("--n", type=int, default=6)
    s.set_defaults(func=cmd_uncertainty)

    s = sub.add_parser("tripartite", help="tripartite Bell parameters")
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--parameter", choices=("I", "J"), default="I")
    s.add_argument("--settings")
    s.add_argument("--budget", type=int, default=None)
    s.set_defaults(func=cmd_tripartite)

    s = sub.add_parser("mc", help="Monte Carlo trade-off and sampler check")
    s.add_argument("--p", required=True)
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--x", default="100000")
    s.add_argument("--y", default="010000")
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("invariant", help="CHSH maximum of the averaged correlation")
    s.add_argument("--grid", type=int, default=16)
    s.add_argument("--out")
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("chsh", help="CHSH value of a settings quadruple")
    s.add_argument("--settings")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--p", default="1")
    s.set_defaults(func=cmd_chsh)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "json", "command")}
        rep = RunReport(args.command, params)
        args.func(args, rep)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(rep.as_dict(), indent=2, sort_keys=True))
    else:
        for line in rep.text:
            print(line)
        for c in rep.checks:
            print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}" + (f": {c['detail']}" if c["detail"] else ""))
    failed = [c["name"] for c in rep.checks if not c["pass"]]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

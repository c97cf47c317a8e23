"""Batch front end: basis checks, regularity, modulus, witness hunts, Friedberg.

Every command builds a fresh instance, so a run is a pure function of the
command line.  Reports are plain dicts; ``--json`` prints them with sorted
keys, the text renderer reads the same records.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .continuity import (apply_operator, build_noninclusion_witness, classify_probe, dense_selector,
                         friedberg_diagnostic, modulus, real_operator)
from .instances import (Interval, make_reals, make_sierpinski, sierpinski_delta, BOT, TOP)
from .kernel import Enumerator, pair, run, unpair
from .quasimetric import RegularityWitness, conjugate
from .space import (CheckRecord, check_effective_regularity, sample_triples, sb_search,
                    show_open)

REPORT_VERSION = 1
OPERATORS = ("identity", "add_const", "scale2", "max0")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class ConfigError(ValueError):
    """Bad command line input; exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    fuel: int = 10**5
    samples: int = 20
    instance: str = "reals"
    output: str = "text"


# -- parsing ----------------------------------------------------------------

_DYADIC = re.compile(r"^\s*([+-]?\d+)\s*(?:\*\s*2\s*\^\s*\(?\s*([+-]?\d+)\s*\)?)?\s*$")


def parse_dyadic(text: str) -> Fraction:
    """``"m*2^e"``, ``"p/2^k"`` written as a fraction, or a plain integer."""
    num, _, den = text.strip().partition("/")
    if den:
        try:
            q = Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"not a dyadic number: {text!r}") from None
        if q.denominator & (q.denominator - 1):
            raise ConfigError(f"not a dyadic number: {text!r}")
        return q
    m = _DYADIC.match(text)
    if not m:
        raise ConfigError(f"not a dyadic number: {text!r}")
    mant, exp = int(m.group(1)), int(m.group(2) or 0)
    return Fraction(mant) * Fraction(2) ** exp


def parse_ball(text: str) -> Interval:
    """``"(lo,inf)"`` or ``"(-inf,hi)"``."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")) or body.count(",") != 1:
        raise ConfigError(f"not a ball spec: {text!r}")
    lo, hi = (s.strip() for s in body[1:-1].split(","))
    if hi in ("inf", "+inf") and lo not in ("-inf", "inf"):
        return Interval(parse_dyadic(lo), None)
    if lo == "-inf" and hi not in ("-inf", "inf", "+inf"):
        return Interval(None, parse_dyadic(hi))
    raise ConfigError(f"ball spec must have exactly one infinite end: {text!r}")


def ball_code(R, iv: Interval) -> tuple[int, bool]:
    """Radius-one code of an upper or lower ray; ``conj`` is True for ``(-inf,hi)``."""
    if iv.hi is None:
        return R.ball(iv.lo + 1, 0), False
    return R.ball(iv.hi - 1, 0), True


# -- reports ------------------------------------------------------------------

def make_report(command: str, config: RunConfig, records: Sequence[CheckRecord],
                extra: Optional[dict] = None) -> dict:
    recs = sorted((r.as_dict() for r in records), key=lambda r: r["name"])
    summary = {s: sum(r["status"] == s for r in recs) for s in ("pass", "fail", "inconclusive")}
    report = {"report_version": REPORT_VERSION, "command": command, "config": asdict(config),
              "records": recs, "summary": summary}
    if extra:
        report.update(extra)
    return report


def exit_code(report: dict) -> int:
    s = report["summary"]
    if s["fail"]:
        return EXIT_FAIL
    if s["inconclusive"] and not s["pass"]:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str)


def render_text(report: dict) -> str:
    lines = [f"{report['command']}  (report v{report['report_version']})"]
    cfg = report["config"]
    lines.append("  " + " ".join(f"{k}={cfg[k]}" for k in sorted(cfg)))
    for key in sorted(k for k in report if k not in
                      ("records", "summary", "config", "command", "report_version")):
        lines.append(f"  {key}: {json.dumps(report[key], sort_keys=True, default=str)}")
    for r in report["records"]:
        w = "" if r["witness"] is None else "  " + json.dumps(r["witness"], sort_keys=True,
                                                              default=str)
        lines.append(f"  [{r['status']:>12}] {r['name']}  fuel={r['fuel_used']}{w}")
    s = report["summary"]
    lines.append(f"  {s['pass']} pass, {s['fail']} fail, {s['inconclusive']} inconclusive")
    return "\n".join(lines)


# -- shared fixtures ------------------------------------------------------------

def real_points(R) -> list[int]:
    """The standard sample pool: multiples of 1/4 in [-2, 2]."""
    return [R.point(Fraction(v, 4)) for v in range(-8, 9)]


def _instance(config: RunConfig):
    if config.instance == "reals":
        return make_reals()
    if config.instance == "sierpinski":
        return make_sierpinski()
    raise ConfigError(f"unknown instance {config.instance!r}")


def _sides(inst, config):
    if config.instance == "reals":
        return [("U", inst.bi, inst.q, real_points(inst)),
                ("L", inst.bi.dual, inst.qL, real_points(inst))]
    pts = [inst.bot, inst.top]
    return [("S", inst.bi, inst.q, pts), ("S^c", inst.bi.dual, conjugate(inst.q), pts)]


# -- commands ---------------------------------------------------------------------

def cmd_check_basis(config: RunConfig) -> dict:
    inst = _instance(config)
    records = []
    for tag, bi, _, pts in _sides(inst, config):
        space = bi.tau
        oracle = space.oracle
        triples = sample_triples(space, pts, config.samples, config.seed)
        for k, (i, m, n) in enumerate(triples):
            name = f"sb[{tag}]#{k:03d}(i={i},m={m},n={n})"
            out = sb_search(space, i, m, n, config.fuel)
            if not out.confirmed:
                records.append(CheckRecord(name, "inconclusive", None, out.steps))
                continue
            a = out.witness
            B = space.basis(a)
            ok = (oracle.contains(B, space.point_handle(i)) and oracle.subset(B, space.basis(m))
                  and oracle.subset(B, space.basis(n)))
            records.append(CheckRecord(name, "pass" if ok else "fail",
                                       {"a": a, "basis": show_open(B)}, out.steps))
    extra = None
    if config.instance == "sierpinski":
        extra = {"strong_inclusion": {f"<{a},1> < <{b},1>": v
                                      for (a, b), v in sorted(inst.incl_table().items())},
                 "delta": {f"d({y},{z})": str(sierpinski_delta(y, z))
                           for y in (BOT, TOP) for z in (BOT, TOP)},
                 "base": {f"beta_{a}": inst.q.base(a) for a in (0, 1, 2)},
                 "basis": {f"B_<{a},0>": sorted(B) for a, B in inst.basis_table(0).items()}}
    return make_report("check-basis", config, records, extra)


def regularity_samples(inst, bi, pts, count: int, rng: random.Random,
                       codes_per_point: int = 200) -> list[tuple[int, int]]:
    out = []
    for _ in range(count):
        i = rng.choice(pts)
        out.append((i, rng.choice(bi.tau.section(i).values(codes_per_point))))
    return out


def cmd_regularity(config: RunConfig, t_override=None) -> dict:
    """Both directions; ``t_override(witness)`` replaces ``t`` (a test hook)."""
    inst = _instance(config)
    rng = random.Random(config.seed)
    records = []
    for tag, bi, q, pts in _sides(inst, config):
        W = RegularityWitness(q, bi.tau)
        samples = regularity_samples(inst, bi, pts, config.samples, rng)
        oracle = bi.tau.oracle

        def complement(m, bi=bi, pts=pts):
            B = bi.tau.basis(m)
            return [p for p in pts if not oracle.contains(B, bi.tau.point_handle(p))][:20]
        t = W.t if t_override is None else t_override(W)
        records += check_effective_regularity(bi, W.s, t, samples, complement, config.fuel,
                                              pool=pts, tag=f"[{tag}]")
    return make_report("regularity", config, records)


def _need_reals(config: RunConfig):
    if config.instance != "reals":
        raise ConfigError("this command runs on the reals instance")
    if config.fuel <= 0:
        raise ConfigError("fuel must be positive")


def _operator(R, name: Optional[str]):
    if name not in OPERATORS:
        raise ConfigError(f"operator must be one of {', '.join(OPERATORS)}")
    return real_operator(R, name)


def cmd_modulus(config: RunConfig, operator: str, point: str, target: str) -> dict:
    _need_reals(config)
    R = make_reals()
    F = _operator(R, operator)
    x = parse_dyadic(point)
    iv = parse_ball(target)
    if F.point_map(x) not in iv:
        raise ConfigError(f"{operator}({x}) = {F.point_map(x)} is not in {iv}")
    n, conj = ball_code(R, iv)
    side = "sigma" if conj else "tau"
    i = R.point(x)
    out = modulus(F, i, n, config.fuel, side)
    name = f"modulus[{operator}]({x}->{iv})"
    if out.confirmed:
        a = out.witness
        rec = CheckRecord(name, "pass", {"code": a, "ball": str(R.interval(a, conj))}, out.steps)
    else:
        rec = CheckRecord(name, "inconclusive", None, out.steps)
    return make_report("modulus", config, [rec])


def cmd_witness(config: RunConfig, operator: str, point: str, n_ball: str, m_ball: str) -> dict:
    _need_reals(config)
    R = make_reals()
    F = _operator(R, operator)
    x = parse_dyadic(point)
    n_iv, m_iv = parse_ball(n_ball), parse_ball(m_ball)
    if n_iv.hi is not None or m_iv.hi is not None:
        raise ConfigError("witness balls are upper rays (lo,inf)")
    if x not in n_iv or F.point_map(x) not in m_iv:
        raise ConfigError("the point must lie in the n-ball and its image in the m-ball")
    n, _ = ball_code(R, n_iv)
    m, _ = ball_code(R, m_iv)
    i = R.point(x)
    W = RegularityWitness(R.q, R.tau)
    wit = build_noninclusion_witness(F, W, dense_selector(R))
    rec = witness_record(R, F, W, wit, i, n, m, config.fuel,
                         f"witness[{operator}]({x};{n_iv};{m_iv})")
    return make_report("witness", config, [rec])


def witness_record(R, F, W, wit, i: int, n: int, m: int, fuel: int, name: str) -> CheckRecord:
    """Run ``r(i, n, m)`` and check a returned ``z`` against the interval oracle."""
    out, rung = wit.run_r(i, n, m, cap=fuel)
    if not out.confirmed:
        return CheckRecord(name, "inconclusive", None, out.steps)
    z = out.witness
    zv = R.value(z)
    fz = F.point_map(zv)
    fi = apply_operator(F, i, fuel).witness
    sp = run(W.s(fi, m), fuel).witness
    cover = W.t(fi, m).codes(4096)
    in_n = zv in R.interval(n)
    in_cover = any(fz in R.interval(c, conj=True) for c in cover)
    outside = fz not in R.interval(sp)
    # the cover is only scanned up to a prefix, so a miss there is not a refutation
    if in_n and outside and not in_cover:
        status = "inconclusive"
    else:
        status = "pass" if in_n and in_cover and outside else "fail"
    return CheckRecord(name, status,
                       {"z": z, "value": str(zv), "image": str(fz), "rung": rung,
                        "in_n": in_n, "in_cover": in_cover, "outside_s": outside,
                        "s_ball": str(R.interval(sp))}, out.steps)


# Friedberg probes: programs that halt after j ticks, and programs that never do

def _halts_after(j: int):
    def prog(_):
        for _ in range(j):
            yield
        return 0
    return prog


def _loops(_):
    while True:
        yield


def probe_battery(S, halting: int = 10, looping: int = 10) -> tuple[list[int], list[int]]:
    reg = S.registry
    yes = [reg.register(_halts_after(3 * j + 1), key=("probe", "halt", j)) for j in range(halting)]
    no = [reg.register(_loops, key=("probe", "loop", j)) for j in range(looping)]
    return yes, no


def seeded_candidates(S, probes: Sequence[int], count: int, seed: int) -> dict[str, Enumerator]:
    """Finite candidate enumerations of bottom's indices.

    Each lists the computable bottom plus a seeded subset of the probe points;
    subsets that include a halting probe are unsound.
    """
    rng = random.Random(seed)
    out = {"bot_only": Enumerator.of([S.bot]), "empty": Enumerator.of([])}
    for c in range(count):
        chosen = sorted(rng.sample(list(probes), rng.randint(1, max(1, len(probes) // 2))))
        out[f"subset{c:02d}"] = Enumerator.of([S.bot, *(S.halting_point(p) for p in chosen)])
    return out


def cmd_friedberg(config: RunConfig, candidate: str = "none") -> dict:
    """Specialization facts; with ``candidate="seeded"`` also probes and seeded candidates."""
    if config.instance != "sierpinski":
        raise ConfigError("friedberg runs on the sierpinski instance")
    if candidate not in ("none", "seeded"):
        raise ConfigError("candidate must be 'none' or 'seeded'")
    S = make_sierpinski()
    yes, no = probe_battery(S)
    probes = yes + no
    records = list(friedberg_diagnostic(S, None, probes, config.fuel))
    if candidate == "none":
        return make_report("friedberg", config, records)
    base = len(records)
    for p in probes:
        _, top = classify_probe(S, p, config.fuel)
        expect = p in yes
        records.append(CheckRecord(f"classify(p={p})", "pass" if top.confirmed == expect else "fail",
                                   {"halts": expect, "top": top.confirmed}, top.steps))
    for label, cand in seeded_candidates(S, probes, config.samples, config.seed).items():
        for r in friedberg_diagnostic(S, cand, probes, config.fuel)[base:]:
            records.append(CheckRecord(f"{label}:{r.name}", r.status, r.witness, r.fuel_used))
    return make_report("friedberg", config, records)


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="effspace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance="reals"):
        sp.add_argument("--instance", choices=("reals", "sierpinski"), default=instance)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--fuel", type=int, default=10**5)
        sp.add_argument("--samples", type=int, default=20)
        sp.add_argument("--json", action="store_true", help="print the report as JSON")

    common(sub.add_parser("check-basis", help="strong-basis search on sampled triples"))
    common(sub.add_parser("regularity", help="effective pairwise regularity, both directions"))
    sp = sub.add_parser("modulus", help="modulus of continuity of a demo operator")
    common(sp)
    sp.add_argument("--operator", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("--target", required=True)
    sp = sub.add_parser("witness", help="witness for non-inclusion")
    common(sp)
    sp.add_argument("--operator", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("--n-ball", required=True)
    sp.add_argument("--m-ball", required=True)
    sp = sub.add_parser("friedberg", help="Friedberg diagnostic on Sierpinski space")
    common(sp, instance="sierpinski")
    sp.add_argument("--candidate", choices=("none", "seeded"), default="none",
                    help="claimed enumerations of bottom's indices to test")
    return p


def run_command(args: argparse.Namespace) -> dict:
    if args.samples < 0 or args.fuel < 0:
        raise ConfigError("samples and fuel must be non-negative")
    config = RunConfig(args.seed, args.fuel, args.samples, args.instance,
                       "json" if args.json else "text")
    if args.command == "check-basis":
        return cmd_check_basis(config)
    if args.command == "regularity":
        return cmd_regularity(config)
    if args.command == "modulus":
        return cmd_modulus(config, args.operator, args.point, args.target)
    if args.command == "witness":
        return cmd_witness(config, args.operator, args.point, args.n_ball, args.m_ball)
    return cmd_friedberg(config, args.candidate)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        report = run_command(args)
    except ConfigError as exc:
        print(f"effspace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(render_json(report) if args.json else render_text(report))
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())

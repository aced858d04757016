"""Command-line interface: rate tables, encoding, diversity checks and BER
sweeps.  Exit codes: 0 success, 2 configuration error, 3 decoder guard
violation."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import codes, diversity, sim
from .detect import SearchSpaceError
from .rotation import CyclotomicParams, cyclotomic_rotation

EXIT_CONFIG = 2
EXIT_GUARD = 3


def _parse_snr(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad snr range {text!r}; expected start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("snr step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    return tuple(float(p) for p in text.split(","))


def _parse_order(text: str, P: int) -> tuple[int, ...]:
    vals = tuple(int(v) for v in text.split(","))
    if sorted(vals) == list(range(1, P + 1)):
        return tuple(v - 1 for v in vals)
    if sorted(vals) == list(range(P)):
        return vals
    raise ValueError(f"order {text!r} is not a permutation of groups 1..{P}")


def _parse_rotation(text: str):
    vals = [int(v) for v in text.split(",")]
    if len(vals) < 3:
        raise ValueError("rotation override needs m,n,n2,...,nM")
    m, n, rest = vals[0], vals[1], vals[2:]
    return cyclotomic_rotation(CyclotomicParams(m=m, n=n, offsets=(0, *rest)))


def _resolve_code(args) -> codes.CodeSpec:
    rot = _parse_rotation(args.rotation) if getattr(args, "rotation", None) else None
    return codes.get_code(args.code, rot=rot)


def cmd_rates(_args) -> int:
    print("rate comparison (symbols per channel use)")
    print("M design1_p2 design2_3layer")
    for M in range(2, 9):
        print(f"{M} {codes.design1_rate(M, M + 1)} {codes.design2_rate(M)}")
    print("named codes")
    for name in codes.SHIPPED_CODES:
        print(f"{name} {codes.rate(codes.get_code(name))}")
    return 0


def cmd_encode(args) -> int:
    spec = _resolve_code(args)
    c = sim.parse_modulation(args.mod)
    rng = np.random.default_rng(args.seed)
    bits = rng.integers(0, 2, size=spec.L * c.bits_per_symbol)
    from .constellation import bits_to_symbols

    idx = bits_to_symbols(bits, c)
    cw = codes.encode(spec, c.points[idx])
    print(f"code {spec.name}  M={spec.M} T={spec.T} P={spec.P} L={spec.L} rate={codes.rate(spec)}")
    print("bits " + "".join(str(b) for b in bits))
    print("symbols " + " ".join(str(i) for i in idx))
    for row in cw:
        print("  ".join(f"{v.real:+.4f}{v.imag:+.4f}j" for v in row))
    return 0


def cmd_check_diversity(args) -> int:
    spec = _resolve_code(args)
    jsonl = []
    if args.mode == "pic":
        report = diversity.check_group_independence(spec, trials=args.trials, seed=args.seed)
    else:
        order = _parse_order(args.order, spec.P) if args.order else None
        report = diversity.check_sic_independence(spec, order=order, trials=args.trials, seed=args.seed)
    print(f"code {spec.name} mode {report.mode} channels {report.channels_tested}: {report.verdict()}")
    jsonl.append(
        {
            "check": "group-independence",
            "code": spec.name,
            "mode": report.mode,
            "verdict": report.verdict(),
            "channels": report.channels_tested,
            "order": None if report.order is None else [o + 1 for o in report.order],
        }
    )
    for w in report.witnesses[: args.max_witnesses]:
        print(
            f"  witness group={w.group + 1} column={w.column + 1} residual={w.residual:.3e} "
            f"h={np.array2string(w.h, precision=4)}"
        )
        jsonl.append(
            {
                "check": "witness",
                "code": spec.name,
                "group": w.group + 1,
                "column": w.column + 1,
                "residual": w.residual,
                "h_re": [float(x) for x in w.h.real],
                "h_im": [float(x) for x in w.h.imag],
            }
        )
    if len(report.witnesses) > args.max_witnesses:
        print(f"  ... {len(report.witnesses) - args.max_witnesses} more witnesses")
    if args.rank_check:
        c = sim.parse_modulation(args.mod)
        rk = diversity.check_difference_rank(spec, c, sample_pairs=args.rank_pairs, seed=args.seed)
        kind = "sampled" if rk.sampled else "exhaustive"
        print(
            f"difference rank ({kind}, {rk.pairs_checked} pairs): min rank {rk.min_rank} of {rk.full_rank}: "
            + ("PASS" if rk.passed else "FAIL")
        )
        jsonl.append(
            {
                "check": "difference-rank",
                "code": spec.name,
                "verdict": "PASS" if rk.passed else "FAIL",
                "pairs": rk.pairs_checked,
                "min_rank": rk.min_rank,
                "sampled": rk.sampled,
            }
        )
    if args.jsonl:
        with open(args.jsonl, "w") as f:
            for row in jsonl:
                f.write(json.dumps(row) + "\n")
    return 0


def cmd_simulate(args) -> int:
    spec = _resolve_code(args)
    order = _parse_order(args.order, spec.P) if args.order else None
    cfg = sim.SimConfig(
        code=args.code,
        n_rx=args.rx,
        modulation=args.mod,
        decoders=tuple(d.strip() for d in args.decoder.split(",")),
        snr_db=_parse_snr(args.snr),
        min_errors=args.min_errors,
        min_trials=args.min_trials,
        max_trials=args.max_trials,
        seed=args.seed,
        sic_order=order,
        chunk_trials=args.chunk_trials,
    )
    result = sim.run_ber(cfg)
    if args.out == "-":
        sim.write_csv(result.records, sys.stdout)
    else:
        with open(args.out, "w") as f:
            sim.write_csv(result.records, f)
    for d, why in result.guard_violations.items():
        print(f"decoder {d} skipped: {why}", file=sys.stderr)
    return EXIT_GUARD if result.guard_violations else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="picstbc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("rates", help="exact rate table for both designs").set_defaults(func=cmd_rates)

    enc = sub.add_parser("encode", help="encode random bits with a named code")
    enc.add_argument("--code", required=True)
    enc.add_argument("--mod", default="4qam")
    enc.add_argument("--seed", type=int, default=0)
    enc.add_argument("--rotation", help="expert override: m,n,n2,...,nM")
    enc.set_defaults(func=cmd_encode)

    chk = sub.add_parser("check-diversity", help="numerical full-diversity criteria")
    chk.add_argument("--code", required=True)
    chk.add_argument("--mode", choices=("pic", "pic-sic"), default="pic")
    chk.add_argument("--order", help="pic-sic group order, e.g. 1,2,3")
    chk.add_argument("--trials", type=int, default=1000, help="random dense channels")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--rank-check", action="store_true", help="also run the codeword difference rank test")
    chk.add_argument("--rank-pairs", type=int, default=100_000)
    chk.add_argument("--mod", default="4qam")
    chk.add_argument("--max-witnesses", type=int, default=3)
    chk.add_argument("--jsonl", help="write machine-readable report lines to this file")
    chk.add_argument("--rotation", help="expert override: m,n,n2,...,nM")
    chk.set_defaults(func=cmd_check_diversity)

    simp = sub.add_parser("simulate", help="Monte Carlo BER sweep, CSV output")
    simp.add_argument("--code", required=True)
    simp.add_argument("--rx", type=int, required=True)
    simp.add_argument("--mod", default="4qam")
    simp.add_argument("--snr", required=True, help="start:step:stop or comma list, in dB")
    simp.add_argument("--decoder", default="pic", help="comma-separated subset of ml,zf,pic,pic-sic,sic")
    simp.add_argument("--seed", type=int, default=0)
    simp.add_argument("--min-errors", type=int, default=200)
    simp.add_argument("--min-trials", type=int, default=1)
    simp.add_argument("--max-trials", type=int, default=1_000_000)
    simp.add_argument("--chunk-trials", type=int, default=512)
    simp.add_argument("--order", help="pic-sic group order, e.g. 1,2,3")
    simp.add_argument("--out", default="-", help="CSV path, - for stdout")
    simp.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SearchSpaceError as e:
        print(f"decoder guard violation: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

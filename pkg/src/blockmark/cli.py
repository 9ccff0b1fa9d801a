"""Command-line interface.

Subcommands: embed, sample-h0, attack, detect, bounds, params, campaign,
roc, ber, bench.  Sequences travel as JSON-lines files; metrics come out
as CSV, reports as JSON.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import seqio
from .attacks import AttackSpec, attack
from .bch import BchCode, int_to_bits
from .bounds import BoundParams, param_search, report as bounds_report
from .detector import DetectConfig, detect
from .generation import ControlledMassSource, EmbedConfig, UniformSource, \
    embed, sample_unwatermarked
from .harness import ExperimentSpec, ber_curve, latency_bench, roc_sweep, \
    run_campaign, write_metrics_csv


def _parse_code(text: str) -> BchCode:
    n, k, t = (int(x) for x in text.split(","))
    return BchCode.make(n, k, t)


def _add_common(p):
    p.add_argument("--key-file", required=True,
                   help="file holding 64 hex chars of key material")
    p.add_argument("--code", default="31,6,7", help="n,k,t")


def _source(vocab_size: int, mass):
    if mass is None:
        return UniformSource(vocab_size)
    return ControlledMassSource(vocab_size, mass)


def cmd_embed(args):
    code = _parse_code(args.code)
    key = seqio.read_key(args.key_file)
    payload = int_to_bits(args.payload, code.k)
    src = _source(args.vocab_size, args.mass)
    seqs = []
    for i in range(args.count):
        cfg = EmbedConfig(code=code, delta=args.delta, scheme=args.scheme,
                          token_count=args.tokens, rng_seed=args.seed + i)
        seqs.append(embed(src, key, payload, cfg))
    seqio.write_sequences(args.output, seqs)


def cmd_sample_h0(args):
    src = _source(args.vocab_size, None)
    seqs = [sample_unwatermarked(src, args.tokens, args.seed + i)
            for i in range(args.count)]
    seqio.write_sequences(args.output, seqs)


def cmd_attack(args):
    seqs = seqio.read_sequences(args.input)
    key = seqio.read_key(args.key_file) if args.key_file else None
    code = _parse_code(args.code) if args.code else None
    out = []
    for i, seq in enumerate(seqs):
        spec = AttackSpec(args.kind, args.rate, args.seed + i)
        out.append(attack(seq, spec, key=key,
                          n=code.n if code else None,
                          k=code.k if code else None))
    seqio.write_sequences(args.output, out)


def cmd_detect(args):
    code = _parse_code(args.code)
    key = seqio.read_key(args.key_file)
    cfg = DetectConfig(code=code, key=key, s_max=args.s_max, tau=args.tau,
                       mode=args.mode, diverse=args.diverse,
                       prompt_len=args.prompt_len)
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        for seq in seqio.read_sequences(args.input):
            rep = detect(seq, cfg)
            rec = {"format_version": seqio.FORMAT_VERSION,
                   "is_wm": rep.is_wm,
                   "payload": None if rep.payload is None
                   else int("".join(map(str, rep.payload)), 2),
                   "best_offset": rep.best_offset,
                   "matched": rep.matched,
                   "block_count": rep.block_count,
                   "score": rep.score,
                   "per_block": [{"matched": b.matched,
                                  "distance": b.distance,
                                  "offset": b.offset}
                                 for b in rep.per_block],
                   "diagnostic": rep.diagnostic}
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_bounds(args):
    n, k, t = (int(x) for x in args.code.split(","))
    params = BoundParams(q=args.q, n=n, k=k, t=t, s_max=args.s_max,
                         theta=args.theta, M=args.blocks, delta=args.delta,
                         mass=args.mass, p_att=args.p_att)
    json.dump(bounds_report(params), sys.stdout, indent=2, sort_keys=True)
    print()


def cmd_params(args):
    best = param_search(args.alpha, args.beta, args.p_att, mass=args.mass)
    if best is None:
        print(json.dumps({"found": False}))
        return
    out = {"found": True, "n": best.n, "k": best.k, "t": best.t,
           "M": best.M, "theta": best.theta, "delta": best.delta,
           "s_max": best.s_max}
    print(json.dumps(out, sort_keys=True))


def _load_spec(path) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return ExperimentSpec.from_dict(json.load(fh))


def cmd_campaign(args):
    spec = _load_spec(args.config)
    if args.output:
        spec.output_path = args.output
    rows = run_campaign(spec)
    if not spec.output_path:
        write_metrics_csv("/dev/stdout", rows)


def cmd_roc(args):
    spec = _load_spec(args.config)
    curves = roc_sweep(spec)
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        out.write("format_version,attack_kind,attack_rate,mode,s_max,"
                  "tau,fpr,tpr\n")
        for (kind, rate, mode, s_max), pts in sorted(curves.items()):
            for tau, fpr, tpr in pts:
                out.write(f"1,{kind},{rate:g},{mode},{s_max},{tau},"
                          f"{fpr:.6f},{tpr:.6f}\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_ber(args):
    code = _parse_code(args.code)
    deltas = [float(d) for d in args.deltas.split(",")]
    rows = ber_curve(deltas, args.mass, args.bits, code, args.vocab_size,
                     args.seed)
    print("format_version,delta,arm,ber")
    for r in rows:
        d = "" if r["delta"] is None else f"{r['delta']:g}"
        print(f"1,{d},{r['arm']},{r['ber']:.6f}")


def cmd_bench(args):
    codes = [tuple(int(x) for x in c.split(","))
             for c in args.codes.split(";")]
    rows = latency_bench([int(x) for x in args.text_lens.split(",")],
                         codes,
                         [int(x) for x in args.s_max_grid.split(",")],
                         repeats=args.repeats, vocab_size=args.vocab_size,
                         master_seed=args.seed)
    print("format_version,text_len,n,s_max,median_s")
    for r in rows:
        print(f"1,{r['text_len']},{r['n']},{r['s_max']},"
              f"{r['median_s']:.4f}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blockmark")
    sub = p.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("embed", help="generate watermarked sequences")
    _add_common(e)
    e.add_argument("--payload", type=int, required=True)
    e.add_argument("--tokens", type=int, default=200)
    e.add_argument("--count", type=int, default=1)
    e.add_argument("--vocab-size", type=int, default=1024)
    e.add_argument("--delta", type=float, default=2.5)
    e.add_argument("--scheme", choices=["soft", "hard"], default="soft")
    e.add_argument("--mass", type=float, default=None)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--output", required=True)
    e.set_defaults(func=cmd_embed)

    h = sub.add_parser("sample-h0", help="generate unwatermarked sequences")
    h.add_argument("--tokens", type=int, default=200)
    h.add_argument("--count", type=int, default=1)
    h.add_argument("--vocab-size", type=int, default=1024)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--output", required=True)
    h.set_defaults(func=cmd_sample_h0)

    a = sub.add_parser("attack", help="apply an attack channel")
    a.add_argument("--kind", required=True,
                   choices=["substitute", "delete", "insert", "bitflip"])
    a.add_argument("--rate", type=float, required=True)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--key-file", default=None)
    a.add_argument("--code", default=None, help="n,k,t (bitflip only)")
    a.add_argument("--input", required=True)
    a.add_argument("--output", required=True)
    a.set_defaults(func=cmd_attack)

    d = sub.add_parser("detect", help="run the detector")
    _add_common(d)
    d.add_argument("--s-max", type=int, default=5)
    d.add_argument("--tau", type=int, default=1)
    d.add_argument("--mode", default="both",
                   choices=["designated_only", "shift_only", "both", "naive"])
    d.add_argument("--diverse", action="store_true")
    d.add_argument("--prompt-len", type=int, default=0)
    d.add_argument("--input", required=True)
    d.add_argument("--output", default="-")
    d.set_defaults(func=cmd_detect)

    b = sub.add_parser("bounds", help="closed-form quantity report")
    b.add_argument("--code", default="31,6,7")
    b.add_argument("--q", type=int, default=2)
    b.add_argument("--s-max", type=int, default=5)
    b.add_argument("--theta", type=float, default=1 / 6)
    b.add_argument("--blocks", type=int, default=6)
    b.add_argument("--delta", type=float, default=2.5)
    b.add_argument("--mass", type=float, default=0.5)
    b.add_argument("--p-att", type=float, default=0.0)
    b.set_defaults(func=cmd_bounds)

    q = sub.add_parser("params", help="grid search for target error rates")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--beta", type=float, required=True)
    q.add_argument("--p-att", type=float, default=0.0)
    q.add_argument("--mass", type=float, default=0.5)
    q.set_defaults(func=cmd_params)

    c = sub.add_parser("campaign", help="Monte-Carlo metrics campaign")
    c.add_argument("--config", required=True, help="JSON ExperimentSpec")
    c.add_argument("--output", default=None)
    c.set_defaults(func=cmd_campaign)

    r = sub.add_parser("roc", help="ROC sweep over tau")
    r.add_argument("--config", required=True)
    r.add_argument("--output", default="-")
    r.set_defaults(func=cmd_roc)

    be = sub.add_parser("ber", help="bit error rate vs bias strength")
    be.add_argument("--code", default="31,6,7")
    be.add_argument("--deltas", default="0,1.5,2,2.5,3,6")
    be.add_argument("--mass", type=float, default=0.5)
    be.add_argument("--bits", type=int, default=20000)
    be.add_argument("--vocab-size", type=int, default=1024)
    be.add_argument("--seed", type=int, default=0)
    be.set_defaults(func=cmd_ber)

    bn = sub.add_parser("bench", help="detection latency table")
    bn.add_argument("--text-lens", default="200,500")
    bn.add_argument("--codes", default="15,5,3;31,6,7;63,7,15")
    bn.add_argument("--s-max-grid", default="0,1,3,5")
    bn.add_argument("--repeats", type=int, default=5)
    bn.add_argument("--vocab-size", type=int, default=512)
    bn.add_argument("--seed", type=int, default=0)
    bn.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()

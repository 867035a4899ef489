"""Command-line entry point: ``lks <subcommand> ...``.

Exit codes: 0 success or pass, 1 negative result or infeasible instance,
2 bad input, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import textio
from .catalog import random_tree
from .decomposition import check_decomposition, check_switched, decompose, switch
from .errors import EXIT_CODES, Infeasible, InputError, InvariantViolation
from .regularity import (CASE2_DENSITIES, desk_constants, equal_partition, gen_case2_host,
                         gen_planted_host)

__all__ = ["main", "build_parser", "batch"]


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _emit(args, data: dict) -> None:
    out = textio.dump_json(data)
    if args.out in (None, "-"):
        sys.stdout.write(out)
    else:
        Path(args.out).write_text(out)


def _config(args) -> dict:
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(vars(args).items())
            if k not in ("func", "out")}


def _constants(args, k: int):
    return desk_constants(args.eta, args.q, k, relaxed=args.relaxed)


def _host(args):
    g, part = textio.read_host(args.host)
    if part is None:
        part = equal_partition(g, args.clusters, seed=args.seed)
    return g, part


# -- subcommands ---------------------------------------------------------------

def cmd_gen_host(args) -> int:
    if args.case2:
        g, part = gen_case2_host(args.s, args.seed)
    else:
        dens = args.density
        if args.density_matrix:
            dens = np.array(json.loads(Path(args.density_matrix).read_text()), dtype=float)
        g, part = gen_planted_host(args.N, args.s, dens, args.v0, rng_seed=args.seed)
    data = textio.host_to_json(g, part)
    data["meta"] = textio.stamp(_config(args))
    _emit(args, data)
    return 0


def cmd_decompose(args) -> int:
    T = textio.read_tree(args.tree)
    k = args.k if args.k is not None else T.n - 1
    d = decompose(T, k, args.beta)
    out = {"decomposition": d.to_json(), "violated": check_decomposition(T, k, args.beta, d)}
    if args.switch:
        sd = switch(d, T)
        out["switched"] = sd.to_json()
        out["violated_switched"] = check_switched(T, k, args.beta, sd)
    out["meta"] = textio.stamp(_config(args))
    _emit(args, out)
    return 3 if out["violated"] or out.get("violated_switched") else 0


def cmd_structure(args) -> int:
    from .embedder import prepare
    if args.k is None:
        raise InputError("structure needs --k")
    g, part = _host(args)
    setup = prepare(g, part, _constants(args, args.k))
    _emit(args, {"setup": setup.to_json(), "meta": textio.stamp(_config(args))})
    return 0


def cmd_partition(args) -> int:
    from .embedder import prepare
    from .partition import partition_case1, partition_case2, split_TB
    g, part = _host(args)
    T = textio.read_tree(args.tree)
    k = args.k if args.k is not None else T.n - 1
    c = _constants(args, k)
    setup = prepare(g, part, c)
    st = setup.structure
    d = decompose(T, k, c.beta)
    out: dict = {"case": setup.case}
    if setup.case == 1:
        out["partition"] = partition_case1(st.M, setup.H, st.A, st.B, d, c).to_json()
    else:
        sd = switch(d, T)
        mp = partition_case2(st.M, st.Lprime, setup.H, st.A, st.B, sd, c)
        on_M, on_L = split_TB(mp, sd.trees_barB, setup.H, st.B, c)
        out["partition"] = mp.to_json()
        out["split"] = {"T_B^M": [f.seed for f in on_M], "T_B^L": [f.seed for f in on_L]}
    out["meta"] = textio.stamp(_config(args))
    _emit(args, out)
    return 0


def _certified(args, emb, pattern, g) -> int:
    from .verifier import verify_embedding
    cert = verify_embedding(pattern, g, emb.phi)
    _emit(args, {"certificate": cert.to_json(), "embedding": emb.to_json(),
                 "meta": textio.stamp(_config(args))})
    return 0 if cert else 3


def cmd_embed(args) -> int:
    from .embedder import embed_tree
    g, part = _host(args)
    T = textio.read_tree(args.tree)
    k = args.k if args.k is not None else T.n - 1
    emb = embed_tree(T, g, part, _constants(args, k), seed=args.seed)
    return _certified(args, emb, T.as_graph(), g)


def cmd_embed_bip(args) -> int:
    from .embedder import embed_bipartite
    g, part = _host(args)
    Q = textio.read_graph(args.pattern)
    k = args.k if args.k is not None else Q.n - 1
    emb = embed_bipartite(Q, None, g, part, _constants(args, k), seed=args.seed)
    return _certified(args, emb, Q, g)


def _read_phi(path: str) -> dict[int, int]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read phi from {path}: {e}") from None
    if isinstance(data, dict):
        data = data.get("phi") or data.get("embedding", {}).get("phi")
    if isinstance(data, list) and data and isinstance(data[0], list):
        return {int(v): int(h) for v, h in data}
    if isinstance(data, list):
        return {i: int(h) for i, h in enumerate(data)}
    raise InputError("phi must be a list of images or of [vertex, image] pairs")


def cmd_verify(args) -> int:
    from .verifier import verify_embedding
    pattern = textio.read_graph(args.pattern)
    g, _ = textio.read_host(args.host)
    cert = verify_embedding(pattern, g, _read_phi(args.phi))
    _emit(args, {"certificate": cert.to_json(), "meta": textio.stamp(_config(args))})
    return 0 if cert else 1


def cmd_lks_check(args) -> int:
    from .verifier import check_lks
    ks = [args.k] if args.k is not None else list(range(args.n))
    reports = [check_lks(args.n, k, "exhaustive" if args.exhaustive else "sampled", args.samples,
                         args.seed) for k in ks]
    _emit(args, {"reports": [r.to_json() for r in reports], "meta": textio.stamp(_config(args))})
    return 0 if all(r.passed for r in reports) else 1


def cmd_ramsey(args) -> int:
    from .verifier import ramsey_trees
    res = ramsey_trees(textio.read_tree(args.t1), textio.read_tree(args.t2), args.nmax,
                       seed=args.seed)
    _emit(args, {"ramsey": res.to_json(), "meta": textio.stamp(_config(args))})
    return 0 if res.value is not None else 1


# -- batch -----------------------------------------------------------------------

def _trial(cfg: dict, idx: int) -> dict:
    from .embedder import embed_tree
    seed = int(cfg.get("seed", 0))
    sub = int(np.random.SeedSequence([seed, idx]).generate_state(1)[0])
    rng = np.random.default_rng(sub)
    k = int(cfg["k"])
    T = random_tree(k + 1, rng, cfg.get("tree", "recursive"))
    row = {"trial": idx, "seed": sub}
    try:
        emb = embed_tree(T, cfg["_G"], cfg["_part"], cfg["_c"], seed=sub, setup=cfg.get("_setup"))
        row.update(status="ok", case=emb.case, steps=len(emb.steps))
    except Infeasible as e:
        row.update(status="infeasible", stage=e.stage)
    except InvariantViolation as e:
        row.update(status="violation", stage=e.stage)
    return row


def batch(configs: Sequence[dict]) -> list[dict]:
    """One summary row per configuration; trials use sub-seeds derived from (seed, trial index)."""
    from .embedder import prepare
    rows = []
    for cfg in configs:
        cfg = dict(cfg)
        trials = int(cfg.get("trials", 0))
        summary = {k: cfg.get(k) for k in ("N", "s", "density", "k", "relaxed", "trials", "seed", "host")}
        if trials <= 0:
            rows.append({**summary, "ok": 0, "infeasible": 0, "violation": 0, "rate": None})
            continue
        if cfg.get("host") == "case2":
            G, part = gen_case2_host(int(cfg.get("s", 200)), int(cfg.get("seed", 0)))
        else:
            G, part = gen_planted_host(int(cfg["N"]), int(cfg["s"]), float(cfg["density"]), 0,
                                       rng_seed=int(cfg.get("seed", 0)))
        c = desk_constants(Fraction(str(cfg.get("eta", "0.1"))), Fraction(str(cfg.get("q", "0.1"))),
                           int(cfg["k"]), relaxed=Fraction(str(cfg.get("relaxed", 20))))
        cfg.update(_G=G, _part=part, _c=c)
        try:
            cfg["_setup"] = prepare(G, part, c)
        except Infeasible as e:
            rows.append({**summary, "ok": 0, "infeasible": trials, "violation": 0, "rate": 0.0,
                         "setup": e.stage})
            continue
        res = [_trial(cfg, i) for i in range(trials)]
        counts = {s: sum(r["status"] == s for r in res) for s in ("ok", "infeasible", "violation")}
        steps = [r["steps"] for r in res if r["status"] == "ok"]
        rows.append({**summary, **counts, "rate": counts["ok"] / trials,
                     "mean_steps": float(np.mean(steps)) if steps else None,
                     "failed_stages": sorted({r["stage"] for r in res if "stage" in r})})
    return rows


def cmd_batch(args) -> int:
    if args.config:
        try:
            configs = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read batch config: {e}") from None
        if isinstance(configs, dict):
            configs = [configs]
    else:
        configs = [{"N": args.N, "s": args.s, "density": args.density, "k": args.k, "relaxed": args.relaxed,
                    "trials": args.trials, "seed": args.seed, "eta": str(args.eta), "q": str(args.q)}]
    rows = batch(configs)
    if args.format == "tsv":
        keys = sorted({k for r in rows for k in r})
        text = "\t".join(keys) + "\n" + "".join("\t".join(str(r.get(k, "")) for k in keys) + "\n" for r in rows)
        if args.out in (None, "-"):
            sys.stdout.write(text)
        else:
            Path(args.out).write_text(text)
    else:
        _emit(args, {"summary": rows, "meta": textio.stamp({"configs": configs})})
    return 0 if all(r.get("violation", 0) == 0 for r in rows) else 3


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lks", description="Constructive tree embedding in dense graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, host=True, consts=True):
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        sp.add_argument("--seed", type=int, default=0)
        if consts:
            sp.add_argument("--eta", type=_frac, default=Fraction(1, 10))
            sp.add_argument("--q", type=_frac, default=Fraction(1, 10))
            sp.add_argument("--relaxed", type=_frac, default=Fraction(20))
            sp.add_argument("--k", type=int, default=None, help="defaults to the pattern's edge count")
        if host:
            sp.add_argument("--host", required=True, help="host JSON (with partition) or graph text")
            sp.add_argument("--clusters", type=int, default=8,
                            help="cluster count when the host comes without a partition")

    sp = sub.add_parser("gen-host", help="planted clustered host")
    sp.add_argument("--N", type=int, default=8)
    sp.add_argument("--s", type=int, default=200)
    sp.add_argument("--density", type=float, default=0.8)
    sp.add_argument("--density-matrix", default=None, help="JSON N x N matrix")
    sp.add_argument("--v0", type=int, default=0)
    sp.add_argument("--case2", action="store_true", help=f"the {len(CASE2_DENSITIES)}-cluster case-2 template")
    common(sp, host=False, consts=False)
    sp.set_defaults(func=cmd_gen_host)

    sp = sub.add_parser("decompose", help="seeds and families of a tree")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--beta", type=_frac, default=Fraction(1, 50))
    sp.add_argument("--switch", action="store_true")
    common(sp, host=False, consts=False)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("structure", help="pruned host, matching structure and case")
    common(sp)
    sp.set_defaults(func=cmd_structure)

    sp = sub.add_parser("partition", help="matching partition for a tree")
    sp.add_argument("--tree", required=True)
    common(sp)
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("embed", help="embed a tree and certify it")
    sp.add_argument("--tree", required=True)
    common(sp)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("embed-bip", help="embed a bipartite pattern with few extra edges")
    sp.add_argument("--pattern", required=True)
    common(sp)
    sp.set_defaults(func=cmd_embed_bip)

    sp = sub.add_parser("verify", help="check a map is an embedding")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--host", required=True)
    sp.add_argument("--phi", required=True)
    common(sp, host=False, consts=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lks-check", help="the conjecture on tiny graphs")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=None, help="all k < n when omitted")
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--samples", type=int, default=1000)
    common(sp, host=False, consts=False)
    sp.set_defaults(func=cmd_lks_check)

    sp = sub.add_parser("ramsey", help="Ramsey number of two trees")
    sp.add_argument("--t1", required=True)
    sp.add_argument("--t2", required=True)
    sp.add_argument("--nmax", type=int, default=8)
    common(sp, host=False, consts=False)
    sp.set_defaults(func=cmd_ramsey)

    sp = sub.add_parser("batch", help="repeated seeded embedding trials")
    sp.add_argument("--config", default=None, help="JSON list of run configurations")
    sp.add_argument("--N", type=int, default=16)
    sp.add_argument("--s", type=int, default=100)
    sp.add_argument("--density", type=float, default=0.8)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--format", choices=("json", "tsv"), default="json")
    common(sp, host=False)
    sp.set_defaults(func=cmd_batch)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "batch" and args.config is None and args.k is None:
        parser.error("batch needs --k or --config")
    try:
        return args.func(args)
    except (Infeasible, InvariantViolation) as e:
        sys.stderr.write(str(e) + "\n")
        _emit(args, {"error": e.to_json(), "meta": textio.stamp(_config(args))})
        return EXIT_CODES[type(e)]
    except (InputError, ValueError) as e:
        sys.stderr.write(f"input error: {e}\n")
        return EXIT_CODES[InputError]


if __name__ == "__main__":
    raise SystemExit(main())

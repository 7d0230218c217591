"""Command-line entry point.

Exit codes: 0 success (every claim verified), 1 a claim failed or a
construction could not satisfy its preconditions, 2 I/O or schema errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .certs import CertBuilder, CertError, claims_for, frac, verify_file, write_cert
from .chain import core_chain
from .covering import approx_witness_from_wide, equivalence_refine, ruzsa_cover, wide_from_positive
from .errors import ApproxGroupsError, InvalidSpec, LocalOverflow, SearchFailed
from .instances import Instance, canonical_json
from .normality import normalize_refine
from .oracle import OracleBudget, exact_f, exact_min_cover, exact_P
from .sanders import DEFAULT_SEARCH_WIDTH, sanders_refine
from .sets import GroupSet, approx_constant, disjoint_translate_growth, generated, power, product_set

EXIT_OK, EXIT_CLAIM, EXIT_IO = 0, 1, 2


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


# -- instance handling ------------------------------------------------------------


def load_instance(path: str | Path) -> Instance:
    p = Path(path)
    if not p.exists():
        raise CliError(f"instance {p} not found", EXIT_IO)
    return Instance.load(p)


def _other_set(path: str, inst: Instance) -> GroupSet:
    """A second set from an instance file over the same group."""
    other = load_instance(path)
    if other.group != inst.group:
        raise CliError(f"{path} is over a different group", EXIT_IO)
    return other.build()[1]


def _instance_ref(instance_path: str, out: str | None) -> str:
    if out is None:
        return str(Path(instance_path).resolve())
    return os.path.relpath(Path(instance_path).resolve(), Path(out).resolve().parent)


# -- certificate builders ----------------------------------------------------------


def finish(b: CertBuilder, A: GroupSet) -> dict:
    """Attach the replayed claims; the stored outcomes are informational."""
    draft = b.to_dict([])
    results = claims_for(draft, A)
    return b.to_dict([{"name": c.name, "holds": c.holds} for c in results])


def ruzsa_certificate(b: CertBuilder, A: GroupSet, x_power: int = 2, y_power: int = 1) -> dict:
    X, Y = power(A, x_power), power(A, y_power)
    Z = ruzsa_cover(X, Y)
    b.data.update(X=b.ref(X), Y=b.ref(Y), Z=Z, x_power=x_power, y_power=y_power)
    return finish(b, A)


def wide_certificate(b: CertBuilder, A: GroupSet, B: GroupSet) -> dict:
    W, cover = wide_from_positive(B, A)
    E = approx_constant(A).E
    wit = approx_witness_from_wide(W, A, E, cover.translates)
    b.data.update(B=b.ref(B), BBinv=b.ref(W), Z=cover.translates, bound=cover.bound_claimed,
                  E=list(E), n=wit.n)
    return finish(b, A)


def equiv_certificate(b: CertBuilder, A: GroupSet, Astar: GroupSet) -> dict:
    res = equivalence_refine(A, Astar)
    b.data.update(
        Astar=b.ref(Astar), B=b.ref(res.B), X=res.X.translates, Xstar=res.Xstar.translates,
        cover_A=res.cover_A.translates, cover_Astar=res.cover_Astar.translates,
        n=res.n, core=b.ref(res.core), cover_core=res.cover_core.translates,
        L_core=res.cover_core.L, search=res.search,
    )
    return finish(b, A)


def sanders_data(b: CertBuilder, c) -> dict:
    return dict(
        m=c.m, K=c.K, E=list(c.E), epsilon=frac(c.epsilon), rho=frac(c.rho),
        t_values=[frac(t) for t in c.schedule.t_values], n_max=c.schedule.n_max,
        f_values=[frac(f) for f in c.f_values], saturated_tail=c.saturated_tail,
        plateau_index=c.plateau_index, chosen_t_index=c.chosen_t_index, t=frac(c.t),
        f_value=frac(c.f_value), B=b.ref(c.B), S=b.ref(c.S), translates=c.wideness.translates,
        L=c.L, L_bound=c.L_bound, cover_strategy=c.wideness.strategy,
        near_minimality=c.near_minimality,
    )


def sanders_certificate(b: CertBuilder, A: GroupSet, m: int, search_width: int, threads: int) -> dict:
    c = sanders_refine(A, m, search_width=search_width, threads=threads)
    b.data.update(sanders_data(b, c))
    return finish(b, A)


def normalize_certificate(b: CertBuilder, A: GroupSet, R: GroupSet, search_width: int, threads: int) -> dict:
    c = normalize_refine(A, R, search_width=search_width, threads=threads)
    b.data.update(
        R=b.ref(R), R_translates=c.R_cover.translates, N=c.N, K=c.K, T=b.ref(c.T),
        a_list=c.a_list, D=b.ref(c.D), S=b.ref(c.S), S_translates=c.wideness.translates,
        L=c.wideness.L, L_bound=c.wideness.bound_claimed, checks=c.checks,
    )
    return finish(b, A)


def chain_certificate(b: CertBuilder, A: GroupSet, steps: int, mode: str, search_width: int, threads: int):
    rep = core_chain(A, steps, mode, search_width=search_width, threads=threads)
    stages = []
    for st in rep.stages:
        rec = {"S": b.ref(st.S), "H": b.ref(st.H), "cover_A": st.cover_A.translates, "L": st.L}
        if st.cert is not None:
            rec["translates"] = st.cert.wideness.translates
            rec["wide_target"] = b.ref(st.cert.wideness.target)
        stages.append(rec)
    b.data.update(mode=mode, steps=steps, stages=stages, stabilized_at=rep.stabilized_at,
                  index_in_generated=rep.index_in_generated)
    return finish(b, A), rep


# -- commands ----------------------------------------------------------------------


def _emit(cert: dict, out: str | None) -> int:
    if out:
        write_cert(cert, out)
    else:
        sys.stdout.write(canonical_json(cert))
    failed = [c["name"] for c in cert["claims"] if not c["holds"]]
    if failed:
        print(f"FAILED: {failed[0]}", file=sys.stderr)
        return EXIT_CLAIM
    print(f"{cert['kind']}: {len(cert['claims'])} claims verified", file=sys.stderr)
    return EXIT_OK


def _pipeline(args, kind: str):
    inst = load_instance(args.instance)
    _, A = inst.build()
    params = {k: v for k, v in vars(args).items() if k not in ("func", "instance", "out", "threads")}
    b = CertBuilder(kind, _instance_ref(args.instance, args.out), inst, params)
    return inst, A, b


def cmd_gen(args) -> int:
    if args.group.lstrip().startswith("{"):
        group = json.loads(args.group)
    else:
        from .groups import parse_spec_string
        group = parse_spec_string(args.group)
    seed = None
    if args.set:
        set_spec = json.loads(args.set)
    elif args.interval is not None:
        set_spec = {"interval": {"lo": args.interval[0], "hi": args.interval[1]}}
    elif args.elements is not None:
        set_spec = {"elements": json.loads(args.elements)}
    elif args.coset_union is not None:
        gens, reps = (json.loads(x) for x in args.coset_union)
        set_spec = {"coset_union": {"subgroup_generators": gens, "coset_reps": reps}}
    elif args.random_symmetric is not None:
        seed = args.seed
        set_spec = {"random_symmetric": {"size": args.random_symmetric, "seed": seed}}
    elif args.ball is not None:
        set_spec = {"ball": {"radius": args.ball}}
    else:
        raise CliError("gen needs a set spec", EXIT_IO)
    inst = Instance(group=group, set=set_spec, seed=seed)
    _, A = inst.build()  # validate before writing
    if args.out:
        inst.save(args.out)
    else:
        sys.stdout.write(inst.dumps())
    print(f"|G| = {A.universe.order}, |A| = {len(A)}", file=sys.stderr)
    return EXIT_OK


def analyze(A: GroupSet, max_n: int = 8) -> dict:
    U = A.universe
    rep = {"order": U.order, "size": len(A), "symmetric": A.is_symmetric(), "growth": []}
    cur = A
    try:
        for n in range(1, max_n + 1):
            if n > 1:
                cur = product_set(cur, A)
            rep["growth"].append({"n": n, "size": len(cur)})
    except LocalOverflow as e:
        rep["growth_stopped"] = str(e)
    if rep["symmetric"]:
        ap = approx_constant(A)
        rep["K"] = ap.K
        rep["E"] = [U.label(e) for e in ap.E]
        rep["E_ids"] = list(ap.E)
        if not U.is_local:
            gen, n = generated(A)
            rep["generated"] = {"size": len(gen), "n": n, "is_whole_group": len(gen) == U.order}
            rep["growth_checks"] = [vars(c) for c in disjoint_translate_growth(A)]
    return rep


def cmd_analyze(args) -> int:
    inst = load_instance(args.instance)
    _, A = inst.build()
    rep = analyze(A)
    text = json.dumps(rep, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    bad = [c for c in rep.get("growth_checks", []) if not c["ok"]]
    return EXIT_CLAIM if bad else EXIT_OK


def cmd_ruzsa(args) -> int:
    _, A, b = _pipeline(args, "ruzsa")
    return _emit(ruzsa_certificate(b, A, args.x_power, args.y_power), args.out)


def cmd_wide(args) -> int:
    inst, A, b = _pipeline(args, "wide")
    B = _other_set(args.subset, inst) if args.subset else A
    return _emit(wide_certificate(b, A, B), args.out)


def cmd_equiv(args) -> int:
    inst, A, b = _pipeline(args, "equiv")
    return _emit(equiv_certificate(b, A, _other_set(args.other, inst)), args.out)


def cmd_sanders(args) -> int:
    _, A, b = _pipeline(args, "sanders")
    return _emit(sanders_certificate(b, A, args.m, args.search_width, args.threads), args.out)


def cmd_normalize(args) -> int:
    inst, A, b = _pipeline(args, "normalize")
    R = _other_set(args.R, inst) if args.R else A
    return _emit(normalize_certificate(b, A, R, args.search_width, args.threads), args.out)


def cmd_chain(args) -> int:
    _, A, b = _pipeline(args, "chain")
    cert, rep = chain_certificate(b, A, args.steps, args.mode, args.search_width, args.threads)
    if args.tsv:
        Path(args.tsv).write_text(rep.tsv())
    else:
        sys.stderr.write(rep.tsv())
    return _emit(cert, args.out)


def cmd_verify(args) -> int:
    res = verify_file(args.cert)
    if res.ok:
        print(f"OK: {len(res.claims)} claims verified ({res.kind})")
        return EXIT_OK
    print(f"FAILED: {res.first_failure}")
    return EXIT_CLAIM


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    _, A = inst.build()
    budget = OracleBudget(max_subsets=args.budget) if args.budget else OracleBudget()
    if args.op == "min-cover":
        target, tile = power(A, args.target_power), power(A, args.tile_power)
        out = {"op": "min-cover", "target_size": len(target), "tile_size": len(tile),
               "value": exact_min_cover(target, tile, budget=budget)}
    elif args.op == "f":
        t = Fraction(args.t)
        val, B = exact_f(t, A, budget=budget)
        out = {"op": "f", "t": frac(t), "value": frac(val), "witness": B.tolist()}
    else:
        t = Fraction(args.t)
        B = _other_set(args.subset, inst) if args.subset else A
        K = approx_constant(A).K
        out = {"op": "P", "n": args.n, "t": frac(t), "K": K, "B": B.tolist(),
               "value": exact_P(args.n, t, B, A, K, budget=budget)}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="approxgroups", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, pipeline=True):
        sp.add_argument("--instance", required=True)
        sp.add_argument("--out")
        if pipeline:
            sp.add_argument("--search-width", type=int, default=DEFAULT_SEARCH_WIDTH)
            sp.add_argument("--threads", type=int, default=1)

    g = sub.add_parser("gen", help="write an instance file")
    g.add_argument("--group", required=True, help="e.g. cyclic(256) or a JSON group spec")
    g.add_argument("--out")
    g.add_argument("--seed", type=int, default=0)
    kind = g.add_mutually_exclusive_group(required=True)
    kind.add_argument("--set", help="JSON set spec")
    kind.add_argument("--interval", nargs=2, type=int, metavar=("LO", "HI"))
    kind.add_argument("--elements", help="JSON list of element references")
    kind.add_argument("--coset-union", nargs=2, metavar=("GENS", "REPS"), help="two JSON lists")
    kind.add_argument("--random-symmetric", type=int, metavar="SIZE")
    kind.add_argument("--ball", type=int, metavar="RADIUS")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="K, E, growth table and generated subgroup")
    common(a, pipeline=False)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("ruzsa", help="Ruzsa cover of A^x by A^y")
    common(r)
    r.add_argument("--x-power", type=int, default=2)
    r.add_argument("--y-power", type=int, default=1)
    r.set_defaults(func=cmd_ruzsa)

    w = sub.add_parser("wide", help="B B^-1 wide in A")
    common(w)
    w.add_argument("--subset", help="instance file holding B (default B = A)")
    w.set_defaults(func=cmd_wide)

    e = sub.add_parser("equiv", help="equivalence of A and another set")
    common(e)
    e.add_argument("--other", required=True, help="instance file holding A*")
    e.set_defaults(func=cmd_equiv)

    s = sub.add_parser("sanders", help="S with S^m inside A^4")
    common(s)
    s.add_argument("--m", type=int, default=8)
    s.set_defaults(func=cmd_sanders)

    n = sub.add_parser("normalize", help="S with (S^8)^A inside R^4")
    common(n)
    n.add_argument("--R", help="instance file holding R (default R = A)")
    n.set_defaults(func=cmd_normalize)

    c = sub.add_parser("chain", help="descending chain and its core subgroup")
    common(c)
    c.add_argument("--steps", type=int, default=16)
    c.add_argument("--mode", choices=("plain", "normal"), default="plain")
    c.add_argument("--tsv", help="write the step table here (default: stderr)")
    c.set_defaults(func=cmd_chain)

    v = sub.add_parser("verify", aliases=["verify-cert"], help="replay a certificate")
    v.add_argument("cert")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force reference values on tiny instances")
    o.add_argument("op", choices=("min-cover", "f", "P"))
    o.add_argument("--instance", required=True)
    o.add_argument("--budget", type=int, help="maximum number of enumerated subsets")
    o.add_argument("--target-power", type=int, default=2)
    o.add_argument("--tile-power", type=int, default=1)
    o.add_argument("--t", default="1")
    o.add_argument("--n", type=int, default=1)
    o.add_argument("--subset")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (CertError, InvalidSpec, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except SearchFailed as e:
        print(f"FAILED: {e}", file=sys.stderr)
        return EXIT_CLAIM
    except ApproxGroupsError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CLAIM


if __name__ == "__main__":
    sys.exit(main())

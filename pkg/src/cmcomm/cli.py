"""Command-line front end.

Exit codes: 0 success, 1 a theorem check failed, 2 bad input (parse errors,
non-congruences, unknown files), 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import corpus, kernels, props
from .algebra import FiniteAlgebra, check_congruence, load_algebra, term_to_sexpr
from .commutator import CommutatorEngine
from .congruences import Partition, cg, congruence_lattice, is_modular_lattice
from .cubes import _generator_rows, cube_bits
from .dayterms import find_day_chain, generator_set, load_chain, save_chain, verify_day_chain
from .errors import AlgebraError, CapacityError, NotACongruenceError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path: str) -> FiniteAlgebra:
    p = Path(path)
    if p.is_file():
        return load_algebra(p)
    # fall back to a shipped fixture of the same name
    stem = p.name[: -len(".json")] if p.name.endswith(".json") else p.name
    if stem in corpus.BUILDERS:
        return corpus.load(stem)
    raise InputError(f"no algebra file {path!r} and no built-in fixture {stem!r}")


def _congruences(alg: FiniteAlgebra, tokens, close: bool, lattice=None) -> list[Partition]:
    out = []
    for tok in tokens:
        tok = tok.strip()
        if tok.lstrip("-").isdigit():
            lattice = lattice or congruence_lattice(alg)
            i = int(tok)
            if not 0 <= i < len(lattice):
                raise InputError(f"congruence index {i} outside 0..{len(lattice) - 1}")
            out.append(lattice.elements[i])
            continue
        p = Partition.parse(tok, alg.size)
        if close:
            p = cg(alg, p.pairs())
        else:
            check_congruence(alg, p.rep)
        out.append(p)
    return out


def _chain(alg: FiniteAlgebra, args):
    """(chain, note): a supplied chain is verified, otherwise one is searched for."""
    if getattr(args, "chain", None):
        chain = load_chain(args.chain)
        ok, bad = verify_day_chain(alg, chain)
        if not ok:
            raise InputError(f"chain in {args.chain} fails identity ({bad[0]}) at e={bad[1]} with values {bad[2]}")
        return chain, ""
    found = find_day_chain(alg, args.cap)
    if found.chain is None:
        if found.complete:
            return None, "no Day terms exist (variety not congruence modular)"
        return None, f"Day-term search truncated at {found.clone_size} term operations"
    return found.chain, ""


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


# --- subcommands -------------------------------------------------------------------


def cmd_con(args) -> int:
    alg = _load(args.algebra)
    lat = congruence_lattice(alg)
    modular, witness = is_modular_lattice(lat)
    payload = {
        "algebra": alg.name,
        "size": alg.size,
        "congruences": [str(p) for p in lat.elements],
        "modular_lattice": modular,
    }
    lines = [f"{i}: {p}" for i, p in enumerate(lat.elements)]
    lines.append(f"{len(lat)} congruences, lattice {'modular' if modular else 'not modular'}")
    if witness:
        x, y, z = witness
        lines.append(f"modular law fails at x={x}, y={y}, z={z}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_comm(args) -> int:
    alg = _load(args.algebra)
    T = _congruences(alg, args.congs, args.close)
    k = len(T)
    pivot = k - 1 if args.pivot is None else args.pivot
    eng = CommutatorEngine(alg)
    result = eng.commutator(T, pivot)
    chain, note = _chain(alg, args)
    payload = {"algebra": alg.name, "T": [str(t) for t in T], "pivot": pivot, "commutator": str(result), "modular": chain is not None}
    lines = [str(result)]
    if chain is None:
        per = [eng.commutator(T, j) for j in range(k)]
        payload["per_coordinate"] = [str(p) for p in per]
        payload["note"] = f"modularity not established: {note}"
        lines = [f"[T]_{j} = {p}" for j, p in enumerate(per)]
        lines.append(f"modularity not established: {note}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_ttcomm(args) -> int:
    alg = _load(args.algebra)
    T = _congruences(alg, args.congs, args.close)
    result = CommutatorEngine(alg).two_term(T)
    _emit(args, {"algebra": alg.name, "T": [str(t) for t in T], "commutator": str(result)}, [str(result)])
    return EXIT_OK


def cmd_dayterms(args) -> int:
    alg = _load(args.algebra)
    if args.verify:
        if not args.chain:
            raise InputError("--verify needs --chain PATH")
        chain = load_chain(args.chain)
        ok, bad = verify_day_chain(alg, chain)
        payload = {"algebra": alg.name, "verified": ok, "terms": json.loads(chain.to_json())}
        lines = ["verified" if ok else f"fails identity ({bad[0]}) at e={bad[1]} with values {bad[2]}"]
        if not ok:
            payload["failure"] = {"identity": bad[0], "e": bad[1], "values": list(bad[2])}
        _emit(args, payload, lines)
        return EXIT_OK if ok else EXIT_FAIL
    found = find_day_chain(alg, args.cap)
    payload = {"algebra": alg.name, "complete": found.complete, "clone_size": found.clone_size}
    if found.chain is None:
        payload["terms"] = None
        msg = "none (variety not congruence modular)" if found.complete else (
            f"none found (clone truncated at {found.clone_size}; inconclusive)"
        )
        _emit(args, payload, [msg])
        return EXIT_OK
    terms = [term_to_sexpr(t) for t in found.chain.terms]
    payload["terms"] = terms
    if args.chain:
        save_chain(found.chain, args.chain)
    _emit(args, payload, [f"m_{e} = {t}" for e, t in enumerate(terms)])
    return EXIT_OK


def cmd_gens(args) -> int:
    alg = _load(args.algebra)
    T = _congruences(alg, args.congs, args.close)
    chain, note = _chain(alg, args)
    if chain is None:
        raise InputError(f"X(T) needs a Day chain: {note}")
    eng = CommutatorEngine(alg)
    X = sorted(generator_set(alg, eng.matrices(T), chain))
    gen = cg(alg, X)
    payload = {
        "algebra": alg.name,
        "T": [str(t) for t in T],
        "pairs": [list(p) for p in X],
        "generated": str(gen),
        "commutator": str(eng.commutator(T)),
    }
    lines = [f"{len(X)} pairs, {sum(1 for a, b in X if a != b)} non-reflexive"]
    lines += [f"{a} {b}" for a, b in X if a != b]
    lines.append(f"Cg(X(T)) = {gen}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_check(args) -> int:
    alg = _load(args.algebra)
    chain = load_chain(args.chain) if args.chain else None
    reports = props.run_checks(alg, args.theorem or None, kmax=args.k, chain=chain, cap=args.cap)
    failed = any(r.applicable and r.failures for r in reports)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], sort_keys=True))
    else:
        for r in reports:
            print(r.summary())
            for f in r.failures[:5]:
                print(f"    T = {' '.join(f.T)}: {f.details}")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_matrices(args) -> int:
    alg = _load(args.algebra)
    T = _congruences(alg, args.congs, args.close)
    k = len(T)
    eng = CommutatorEngine(alg)
    M = eng.matrices(T)
    reps = np.array([t.rep for t in T], dtype=np.int64)
    payload = {
        "algebra": alg.name,
        "T": [str(t) for t in T],
        "k": k,
        "cubes": len(M),
        "generators": len(_generator_rows(T)),
        "edge_consistent": kernels.count_edge_consistent(reps, alg.size, k),
        "bits": cube_bits(alg.size, k),
        "backend": kernels.BACKEND,
    }
    lines = [f"{key}: {payload[key]}" for key in ("k", "cubes", "generators", "edge_consistent", "bits", "backend")]
    if args.list:
        payload["members"] = [c.to_text() for c in M]
        lines += payload["members"]
    _emit(args, payload, lines)
    return EXIT_OK


# --- argument parsing -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmcomm", description="Higher commutators of congruences of finite algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, congs=False):
        p.add_argument("--algebra", required=True, metavar="PATH", help="algebra JSON file or built-in fixture name")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--cap", type=int, default=1_000_000, help="term clone cap for the Day-term search")
        if congs:
            p.add_argument("--congs", nargs="+", required=True, metavar="BLOCKS",
                           help='congruences as "|0 2|1 3|" or lattice indices from `con`')
            p.add_argument("--close", action="store_true", help="replace each partition by the congruence it generates")

    p = sub.add_parser("con", help="list the congruence lattice")
    common(p)
    p.set_defaults(func=cmd_con)

    p = sub.add_parser("comm", help="higher commutator of a congruence sequence")
    common(p, congs=True)
    p.add_argument("--pivot", type=int, help="pivot coordinate (default k-1)")
    p.add_argument("--chain", metavar="PATH", help="Day chain file to use instead of searching")
    p.set_defaults(func=cmd_comm)

    p = sub.add_parser("ttcomm", help="two-term commutator")
    common(p, congs=True)
    p.set_defaults(func=cmd_ttcomm)

    p = sub.add_parser("dayterms", help="find or verify Day terms")
    common(p)
    p.add_argument("--chain", metavar="PATH", help="chain file: written after a search, read with --verify")
    p.add_argument("--verify", action="store_true", help="verify the chain in --chain")
    p.set_defaults(func=cmd_dayterms)

    p = sub.add_parser("gens", help="the generating pairs X(T)")
    common(p, congs=True)
    p.add_argument("--chain", metavar="PATH")
    p.set_defaults(func=cmd_gens)

    p = sub.add_parser("check", help="run the theorem harness")
    common(p)
    p.add_argument("--k", type=int, help="largest sequence length (default 3 if |Con| <= 5, else 2)")
    p.add_argument("--theorem", action="append", choices=sorted(props.CHECKS), help="restrict to these checks")
    p.add_argument("--chain", metavar="PATH")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("matrices", help="statistics of M(T)")
    common(p, congs=True)
    p.add_argument("--k", type=int, help="repeat a single congruence k times")
    p.add_argument("--list", action="store_true", help="also list every cube")
    p.set_defaults(func=cmd_matrices)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", None) is not None and getattr(args, "congs", None) and len(args.congs) == 1:
        args.congs = args.congs * args.k
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotACongruenceError as exc:
        print(f"error: operation {exc.symbol!r}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"capacity exceeded: {exc} (bound {exc.bound}, limit {exc.limit}; raise CMCOMM_CAP to allow more)",
              file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, AlgebraError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

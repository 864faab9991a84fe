"""Command-line interface: ``eqbirat <command> ...``.

Each command prints a human-readable result and one JSON report line (to
stdout with ``--json``, appended to ``--report FILE`` otherwise if given).

Exit codes: 0 success, 1 reproduction mismatch, 2 input error,
3 computation guard exceeded, 4 modular-rank disagreement.
"""

from __future__ import annotations

import argparse
import ast
import json
import logging
import os
import re
import sys
import time
from importlib import resources
from pathlib import Path

import sympy

from . import __version__
from .burnside import class_verdict, load_presentation, projection_functional
from .classes import ActionDescription, as_action, beta, beta_k, load_input
from .groups import dual_sequence, parse_group
from .linalg import SNF_GUARD, Cokernel, GuardExceeded, RankDisagreement, in_row_space, rank_mod_p, rank_rational
from .maps import comultiply, tensor_is_zero
from .symbols import SymbolBasis, enumerate_symbols, read_triples, relations

log = logging.getLogger("eqbirat")

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_GUARD, EXIT_RANK = 0, 1, 2, 3, 4
CACHE_ENV = "EQBIRAT_CACHE"
BYTES_PER_ENTRY = 400  # peak elimination memory per stored nonzero, measured on the C48 n=4 system


class InputError(ValueError):
    pass


# ------------------------------------------------------------------ helpers


def parse_coeff(s: str):
    """``Q``, ``Z`` or ``F<p>``; returns ``"Q"``, ``"Z"`` or the prime ``p``."""
    s = s.strip()
    if s.upper() in ("Q", "Z"):
        return s.upper()
    m = re.fullmatch(r"[Ff]_?(\d+)", s)
    if not m or not sympy.isprime(int(m.group(1))):
        raise InputError(f"coefficient must be Q, Z or F<prime>, got {s!r}")
    return int(m.group(1))


def coeff_name(c) -> str:
    return c if isinstance(c, str) else f"F{c}"


def parse_vector(text: str, basis: SymbolBasis) -> dict:
    """Parse ``"[0,1] + [0,3]"`` or ``"2*[1,2] - [(1,0),(0,1)]"`` into a basis vector."""
    terms = re.findall(r"([+-]?)\s*(\d*)\s*\*?\s*\[([^\[\]]*(?:\([^()]*\)[^\[\]]*)*)\]", text)
    if not terms:
        raise InputError(f"no symbols found in {text!r}")
    rest = re.sub(r"([+-]?)\s*(\d*)\s*\*?\s*\[([^\[\]]*(?:\([^()]*\)[^\[\]]*)*)\]", "", text).strip()
    if rest:
        raise InputError(f"could not parse {rest!r} in vector expression")
    g = basis.group
    v: dict[int, int] = {}
    for sign, k, body in terms:
        c = (-1 if sign == "-" else 1) * (int(k) if k else 1)
        try:
            entries = ast.literal_eval(f"[{body}]")
        except (SyntaxError, ValueError) as e:
            raise InputError(f"bad symbol [{body}]") from e
        chars = [g.char(e) for e in entries]
        if len(chars) != basis.n:
            raise InputError(f"symbol [{body}] has {len(chars)} entries, expected {basis.n}")
        try:
            i = basis.index(chars)
        except KeyError as e:
            raise InputError(f"[{body}] is not an admissible symbol for {g.spec}") from e
        v[i] = v.get(i, 0) + c
    return {i: c for i, c in v.items() if c}


def _cache_path(basis: SymbolBasis, minus: bool) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = f"{basis.group.spec}-n{basis.n}-{'minus' if minus else 'plain'}-{basis.size}"
    return Path(root) / f"{key}.triples"


def relation_matrix(basis: SymbolBasis, minus: bool = False):
    """Relations for ``basis``, read from / written to the cache directory if configured."""
    path = _cache_path(basis, minus)
    if path is not None and path.exists():
        M = read_triples(path)
        if M.ncols == basis.size:
            log.info("relations loaded from %s", path)
            return M
    M = relations(basis, minus=minus)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        M.write_triples(path)
        log.info("relations cached at %s", path)
    return M


def check_budget(M, budget_mb: float | None):
    if budget_mb is None:
        return
    need = len(M.indices) * BYTES_PER_ENTRY / 2**20
    if need > budget_mb:
        raise GuardExceeded(f"estimated {need:.0f} MB exceeds the memory budget of {budget_mb:.0f} MB")


def _emit(args, report: dict, text: str | None = None):
    if args.json:
        print(json.dumps(report, default=str))
    elif text is not None:
        print(text)
    if args.report:
        with open(args.report, "a") as fh:
            fh.write(json.dumps(report, default=str) + "\n")


def _ms(t0) -> int:
    return int(round((time.perf_counter() - t0) * 1000))


def _in_quotient_zero(M, v, coeff, seed, certify) -> tuple[bool, str]:
    """Vanishing of ``v`` in the quotient; ``"auto"`` means Z when the Smith guard allows, else Q."""
    if coeff == "auto":
        coeff = "Z" if M.ncols <= SNF_GUARD else "Q"
    if not v:
        return True, coeff_name(coeff)
    if coeff == "Z":
        return Cokernel(M).is_zero(v), "Z"
    return in_row_space(M, v, field=coeff, seed=seed, certify=certify), coeff_name(coeff)


# ---------------------------------------------------------------- commands


def dimension(group: str, n: int, coeff="Q", *, minus=False, seed=0, certify=False, memory_budget=None) -> dict:
    """Report dict for ``dim B_n(G) (x) coeff``."""
    t0 = time.perf_counter()
    g = parse_group(group)
    c = parse_coeff(coeff) if isinstance(coeff, str) else coeff
    if c == "Z":
        raise InputError("dim needs a field; use snf for integral structure")
    B = enumerate_symbols(g, n)
    M = relation_matrix(B, minus)
    check_budget(M, memory_budget)
    r = rank_rational(M, seed=seed, certify=certify) if c == "Q" else rank_mod_p(M, c)
    return {
        "command": "dim",
        "group": g.spec,
        "n": n,
        "coeff": coeff_name(c),
        "minus": minus,
        "symbols": B.size,
        "relations": M.nrows,
        "rank": r,
        "dim": B.size - r,
        "elapsed_ms": _ms(t0),
    }


def cmd_dim(args) -> int:
    rep = dimension(args.group, args.n, args.coeff, minus=args.minus, seed=args.seed, certify=args.certify, memory_budget=args.memory_budget)
    _emit(args, rep, str(rep["dim"]))
    return EXIT_OK


def class_report(spec: str, coeff="auto", *, minus=False, refined=False, seed=0, certify=False, memory_budget=None) -> dict:
    t0 = time.perf_counter()
    c = coeff if coeff == "auto" else parse_coeff(coeff) if isinstance(coeff, str) else coeff
    obj = load_input(spec)
    action: ActionDescription = as_action(obj)
    if refined:
        pieces = [(label, m, B, v) for (label, m), (B, v) in sorted(beta_k(action).items(), key=lambda kv: (kv[0][0], kv[0][1]))]
    else:
        B, v = beta(action)
        pieces = [(None, action.n - 1, B, v)]
    summands = []
    for label, m, B, v in pieces:
        M = relation_matrix(B, minus)
        check_budget(M, memory_budget)
        zero, used = _in_quotient_zero(M, v, c, seed, certify)
        summands.append({"label": label, "m": m, "group": B.group.spec, "n": B.n, "coeff": used, "class": B.format_vector(v), "zero": zero})
    return {
        "command": "class",
        "input": spec,
        "name": action.name,
        "coeff": c if c == "auto" else coeff_name(c),
        "minus": minus,
        "refined": refined,
        "summands": summands,
        "zero": all(s["zero"] for s in summands),
        "elapsed_ms": _ms(t0),
    }


def cmd_class(args) -> int:
    rep = class_report(args.input, args.coeff, minus=args.minus, refined=args.refined, seed=args.seed, certify=args.certify, memory_budget=args.memory_budget)
    lines = []
    for s in rep["summands"]:
        head = f"[{s['label']}, m={s['m']}] " if rep["refined"] else ""
        lines.append(f"{head}{s['class']}  in B_{s['n']}{'^-' if rep['minus'] else ''}({s['group']}) (x) {s['coeff']}: {'zero' if s['zero'] else 'nonzero'}")
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK


def snf_report(group: str, n: int, *, minus=False) -> dict:
    t0 = time.perf_counter()
    g = parse_group(group)
    B = enumerate_symbols(g, n)
    S = Cokernel(relation_matrix(B, minus)).smith
    return {
        "command": "snf",
        "group": g.spec,
        "n": n,
        "minus": minus,
        "symbols": B.size,
        "invariant_factors": list(S.invariant_factors),
        "torsion": list(S.torsion),
        "free_rank": S.free_rank,
        "structure": str(S),
        "elapsed_ms": _ms(t0),
    }


def cmd_snf(args) -> int:
    rep = snf_report(args.group, args.n, minus=args.minus)
    _emit(args, rep, f"{rep['structure']}  (invariant factors {tuple(rep['invariant_factors'])}, free rank {rep['free_rank']})")
    return EXIT_OK


def cmd_order(args) -> int:
    t0 = time.perf_counter()
    g = parse_group(args.group)
    B = enumerate_symbols(g, args.n)
    v = parse_vector(args.vector, B)
    o = Cokernel(relation_matrix(B, args.minus)).order(v)
    o = "inf" if o == float("inf") or o is None else int(o)
    rep = {"command": "order", "group": g.spec, "n": args.n, "minus": args.minus, "vector": B.format_vector(v), "order": o, "elapsed_ms": _ms(t0)}
    _emit(args, rep, str(o))
    return EXIT_OK


def _subgroup_gens(group, text: str):
    """``C3`` (cyclic groups only: the subgroup of that order) or a list of generators."""
    m = re.fullmatch(r"[Cc](\d+)", text.strip())
    if m:
        if not group.is_cyclic:
            raise InputError("--sub C<d> needs a cyclic group; give explicit generators instead")
        N, d = group.order, int(m.group(1))
        if N % d:
            raise InputError(f"{d} does not divide {N}")
        return [N // d]
    try:
        gens = ast.literal_eval(f"[{text}]")
    except (SyntaxError, ValueError) as e:
        raise InputError(f"bad subgroup generators {text!r}") from e
    return [tuple(x) if isinstance(x, (list, tuple)) else x for x in gens]


def comult_report(spec: str, sub: str, *, n_left=1, coeff="F2", minus=True, seed=0) -> dict:
    t0 = time.perf_counter()
    c = parse_coeff(coeff) if isinstance(coeff, str) else coeff
    if c == "Z":
        raise InputError("comult verdicts need a field coefficient")
    action = as_action(load_input(spec))
    B, v = beta(action)
    s = dual_sequence(B.group, _subgroup_gens(B.group, sub))
    T = comultiply(s, B, v, n_left)
    zero = tensor_is_zero(T, "Q" if c == "Q" else c, minus=minus, seed=seed)
    return {
        "command": "comult",
        "input": spec,
        "quotient": s.target.spec,
        "kernel": s.kernel.spec,
        "n_left": n_left,
        "n_right": B.n - n_left,
        "coeff": coeff_name(c),
        "minus": minus,
        "image": T.format(),
        "terms": T.triples(),
        "zero": zero,
        "elapsed_ms": _ms(t0),
    }


def cmd_comult(args) -> int:
    rep = comult_report(args.input, args.sub, n_left=args.n_left, coeff=args.coeff, minus=args.minus, seed=args.seed)
    m = "^-" if rep["minus"] else ""
    text = (
        f"image: {rep['image']}\n"
        f"in B_{rep['n_left']}{m}({rep['quotient']}) (x) B_{rep['n_right']}{m}({rep['kernel']}) (x) {rep['coeff']}: {'zero' if rep['zero'] else 'nonzero'}"
    )
    _emit(args, rep, text)
    return EXIT_OK


def burn_report(spec: str, *, project: str | None = None, noncyclic=False, target_y=None, names=None) -> dict:
    t0 = time.perf_counter()
    p = load_presentation(spec)
    S = p.quotient.smith
    classes = {k: c for k, c in p.classes.items() if not names or k in names}
    if names and set(names) - set(classes):
        raise InputError(f"unknown classes {sorted(set(names) - set(classes))}")
    rep = {
        "command": "burn",
        "presentation": spec,
        "group": p.group_name,
        "generators": p.ngens,
        "relations": len(p.relations),
        "structure": str(S),
        "classes": {k: class_verdict(p, c) for k, c in classes.items()},
    }
    if project:
        H = project.split("=", 1)[1] if "=" in project else project
        f = projection_functional(p, H, noncyclic_only=noncyclic, target_Y_label=target_y)
        values = {}
        for k, c in classes.items():
            img = f(c)
            values[k] = next(iter(img.values())) if len(img) == 1 else (0 if not img else {str(key): x for key, x in img.items()})
        rep["projection"] = {"H": p.subgroup(H), "noncyclic_only": noncyclic, "Y": target_y, "values": values}
    rep["elapsed_ms"] = _ms(t0)
    return rep


def cmd_burn(args) -> int:
    rep = burn_report(args.presentation, project=args.project, noncyclic=args.noncyclic, target_y=args.Y, names=args.classes)
    lines = [f"{rep['group']}: {rep['generators']} generators, {rep['relations']} relations, quotient {rep['structure']}"]
    lines += [f"{k}: {v}" for k, v in rep["classes"].items()]
    if "projection" in rep:
        lines.append("projection: " + ", ".join(f"{k}:{v}" for k, v in rep["projection"]["values"].items()))
    _emit(args, rep, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------- reproduce-paper


def _expectations(path=None) -> dict:
    if path:
        with open(path) as fh:
            return json.load(fh)
    with resources.files(__package__).joinpath("data/expectations.json").open() as fh:
        return json.load(fh)


def run_check(chk: dict, seed=0, memory_budget=None):
    kind = chk["check"]
    if kind == "dim":
        return dimension(chk["group"], chk["n"], chk.get("coeff", "Q"), minus=chk.get("minus", False), seed=seed, memory_budget=memory_budget)["dim"]
    if kind == "class":
        rep = class_report(chk["input"], chk.get("coeff", "auto"), minus=chk.get("minus", False), refined=chk.get("refined", False), seed=seed)
        if chk.get("refined"):
            return {s["label"]: ("zero" if s["zero"] else "nonzero") for s in rep["summands"]}
        return "zero" if rep["zero"] else "nonzero"
    if kind == "snf":
        return snf_report(chk["group"], chk["n"], minus=chk.get("minus", False))["structure"]
    if kind == "comult":
        rep = comult_report(chk["input"], chk["sub"], coeff=chk.get("coeff", "F2"), seed=seed)
        return "zero" if rep["zero"] else "nonzero"
    if kind == "burn":
        rep = burn_report(chk["presentation"], project=chk.get("project"), noncyclic=chk.get("noncyclic", False), target_y=chk.get("Y"))
        return rep["projection"]["values"] if chk.get("project") else rep["classes"]
    raise InputError(f"unknown check kind {kind!r}")


def cmd_reproduce(args) -> int:
    exp = _expectations(args.expectations)
    failed = 0
    for chk in exp["checks"]:
        if chk.get("slow") and not args.full:
            continue
        if args.only and not re.search(args.only, chk["id"]):
            continue
        t0 = time.perf_counter()
        got = run_check(chk, seed=args.seed, memory_budget=args.memory_budget)
        ok = got == chk["expect"]
        failed += not ok
        rep = {"command": "reproduce-paper", "id": chk["id"], "expect": chk["expect"], "got": got, "match": ok, "elapsed_ms": _ms(t0)}
        _emit(args, rep, f"{'ok  ' if ok else 'FAIL'} {chk['id']}: expected {chk['expect']}, got {got}")
    return EXIT_OK if not failed else EXIT_MISMATCH


def cmd_presets(args) -> int:
    from .burnside import presentation_names
    from .classes import preset_names

    rep = {"command": "presets", "actions": preset_names(), "presentations": presentation_names()}
    _emit(args, rep, "actions: " + ", ".join(rep["actions"]) + "\npresentations: " + ", ".join(rep["presentations"]))
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for the choice of random primes")
    common.add_argument("--threads", type=int, default=1, help="accepted for scripts; elimination runs in one thread")
    common.add_argument("--memory-budget", type=float, default=8192, metavar="MB", help="refuse systems whose estimated footprint exceeds this")
    common.add_argument("--certify", nargs="?", const="exact", default=False, choices=["exact", "prime"], help="exact rational elimination, or a third prime")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of plain text")
    common.add_argument("--report", metavar="FILE", help="append JSON-lines reports to FILE")
    common.add_argument("-v", "--verbose", action="count", default=0)

    ap = argparse.ArgumentParser(prog="eqbirat", description="Equivariant birational symbol groups and Burnside presentations.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", parents=[common], help="dimension of B_n(G) over Q or F_p")
    p.add_argument("group")
    p.add_argument("n", type=int)
    p.add_argument("coeff_pos", nargs="?", metavar="coeff")
    p.add_argument("--coeff", default=None)
    p.add_argument("--minus", action="store_true")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("class", parents=[common], help="evaluate the class of an action and test vanishing")
    p.add_argument("input", help="preset name or JSON file")
    p.add_argument("--coeff", default="auto", help="Q, Z, F<p>, or auto (Z up to the Smith-form guard, else Q)")
    p.add_argument("--minus", action="store_true")
    p.add_argument("--refined", action="store_true", help="split by fixed-locus labels")
    p.set_defaults(func=cmd_class)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form of B_n(G)")
    p.add_argument("group")
    p.add_argument("n", type=int)
    p.add_argument("--minus", action="store_true")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("order", parents=[common], help="order of an element of B_n(G)")
    p.add_argument("group")
    p.add_argument("n", type=int)
    p.add_argument("vector", help='e.g. "[0,1] + [0,6]"')
    p.add_argument("--minus", action="store_true")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("comult", parents=[common], help="comultiplication of a class along a subgroup")
    p.add_argument("input")
    p.add_argument("--sub", required=True, help="C<d> for cyclic groups, or subgroup generators")
    p.add_argument("--n-left", type=int, default=1)
    p.add_argument("--coeff", default="F2")
    p.add_argument("--minus", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_comult)

    p = sub.add_parser("burn", parents=[common], help="Burnside presentations: class verdicts and projections")
    p.add_argument("presentation", help="preset name or JSON file")
    p.add_argument("--project", metavar="H", help="project onto curves with stabilizer H (e.g. H=center)")
    p.add_argument("--noncyclic", action="store_true", help="only residual groups that are not cyclic")
    p.add_argument("--Y", help="only curves with this label")
    p.add_argument("--classes", nargs="*", help="restrict to these stored classes")
    p.set_defaults(func=cmd_burn)

    p = sub.add_parser("reproduce-paper", parents=[common], help="run the table suite against the expectations file")
    p.add_argument("--expectations", metavar="FILE")
    p.add_argument("--full", action="store_true", help="include the large n=4 systems")
    p.add_argument("--only", metavar="REGEX")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("presets", parents=[common], help="list stored actions and presentations")
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "command", None) == "dim":
        if args.coeff and args.coeff_pos:
            ap.error("give the coefficient once")
        args.coeff = args.coeff or args.coeff_pos or "Q"
    if args.threads != 1:
        log.info("--threads=%d ignored: elimination is single-threaded", args.threads)
    try:
        return args.func(args)
    except GuardExceeded as e:
        print(f"eqbirat: guard exceeded: {e}", file=sys.stderr)
        return EXIT_GUARD
    except RankDisagreement as e:
        print(f"eqbirat: rank disagreement: {e}", file=sys.stderr)
        return EXIT_RANK
    except (InputError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"eqbirat: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

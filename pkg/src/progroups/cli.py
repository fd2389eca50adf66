"""Command-line front end: build groups from family specs and run the checkers.

Every report is a JSON document with a fixed key order and all numbers
rendered as decimal strings, so identical invocations give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from . import checks, matrices, nottingham, presentations, tree
from .fields import field
from .errors import GroupError, PresentationSyntaxError
from .filtration import Filtration, SimilarityStructure, power_filtration, power_similarity
from .group import (
    DEFAULT_AUT_CAP,
    FiniteGroup,
    _extend_partial,
    abelian_group,
    abelian_invariants,
    as_automorphism,
    automorphism_from_images,
    conjugation_automorphism,
    default_table_cap,
    derived_length,
    derived_subgroup,
    derived_series,
    exponent,
    frattini_rank,
    group_dump,
    hom_from_images,
    inversion_automorphism,
    lower_central_series,
    nilpotency_class,
    quotient,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FAMILIES = ("nottingham", "tree", "sl2zp", "sl2lambda", "presentation", "cyclic", "abelian")
_PARAMS = {
    "nottingham": ("q", "m"),
    "tree": ("p", "d"),
    "sl2zp": ("p", "k"),
    "sl2lambda": ("p", "k"),
    "cyclic": ("n",),
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# family specs

def parse_family(text: str) -> tuple[str, dict]:
    """``kind:key=value,...``; ``presentation:<file>``; ``abelian:3x9``."""
    kind, sep, rest = text.partition(":")
    if not sep or kind not in FAMILIES:
        raise UsageError(f"unknown family spec {text!r}; expected one of {', '.join(FAMILIES)}")
    if kind == "presentation":
        if not rest:
            raise UsageError("presentation spec needs a file path")
        return kind, {"file": rest}
    if kind == "abelian":
        if not re.fullmatch(r"\d+(x\d+)*", rest):
            raise UsageError("abelian spec looks like abelian:3x9")
        return kind, {"orders": [int(n) for n in rest.split("x")]}
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq or not val.strip().isdigit():
            raise UsageError(f"bad parameter {item!r} in {text!r}")
        params[key.strip()] = int(val)
    want = set(_PARAMS[kind])
    if set(params) != want:
        raise UsageError(f"{kind} needs parameters {', '.join(_PARAMS[kind])}")
    return kind, params


def build_group(spec: str, seed: int = 0) -> tuple[FiniteGroup, str, dict]:
    kind, params = parse_family(spec)
    config = {"family": kind, "table_cap": str(default_table_cap())}
    kw = {"seed": seed}
    if kind == "nottingham":
        G = nottingham.quotient_group(params["q"], params["m"], **kw)
        config["field"] = field(params["q"]).describe()
    elif kind == "tree":
        G = tree.full_group(params["p"], params["d"], **kw)
    elif kind in ("sl2zp", "sl2lambda"):
        mk = matrices.ZP if kind == "sl2zp" else matrices.LAMBDA
        G = matrices.kernel_group(mk, params["p"], params["k"], **kw)
    elif kind == "presentation":
        P = presentations.parse_presentation(Path(params["file"]).read_text())
        G = presentations.regular_group(presentations.todd_coxeter(P), P, **kw)
        config["presentation"] = str(P)
    elif kind == "cyclic":
        G = abelian_group([params["n"]], **kw)
    else:
        G = abelian_group(params["orders"], **kw)
    for k, v in params.items():
        config[k] = v if isinstance(v, str) else (
            "x".join(map(str, v)) if isinstance(v, list) else str(v))
    return G, kind, config


def default_filtration(G: FiniteGroup, kind: str) -> Filtration:
    if kind == "nottingham":
        return nottingham.depth_filtration(G)
    if kind == "tree":
        return tree.level_stabilizer_filtration(G)
    if kind in ("sl2zp", "sl2lambda"):
        return matrices.congruence_filtration(G)
    if kind in ("cyclic", "abelian"):
        return power_filtration(G)
    return Filtration(G, lower_central_series(G))


def choose_filtration(G, kind, name):
    if name == "default":
        return default_filtration(G, kind)
    if name == "power":
        return power_filtration(G)
    if name == "lcs":
        return Filtration(G, lower_central_series(G))
    raise UsageError(f"unknown filtration {name!r}")


# ---------------------------------------------------------------------------
# automorphism and similarity specs

def _hex_index(G: FiniteGroup, text: str) -> int:
    try:
        data = bytes.fromhex(text.strip())
    except ValueError:
        raise UsageError(f"bad element encoding {text!r}") from None
    if data not in G.index:
        raise UsageError(f"{text!r} is not an element of the group")
    return G.index[data]


def _pairs_file(path: str) -> list[list[str]]:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.replace("->", " ").split())
    return rows


def parse_sigma(G: FiniteGroup, text: str):
    if text == "inv":
        if not G.is_abelian():
            raise UsageError("sigma 'inv' needs an abelian group")
        return inversion_automorphism(G)
    if text.startswith("conj:"):
        return conjugation_automorphism(G, _hex_index(G, text[5:]))
    if text.startswith("images:"):
        rows = _pairs_file(text[7:])
        if all(len(r) == 1 for r in rows):
            if len(rows) != len(G.generators):
                raise UsageError(f"need {len(G.generators)} generator images, got {len(rows)}")
            return automorphism_from_images(G, [_hex_index(G, r[0]) for r in rows])
        if all(len(r) == 2 for r in rows):
            src = [_hex_index(G, r[0]) for r in rows]
            dst = [_hex_index(G, r[1]) for r in rows]
            f = _extend_partial(G, src, dst)
            if f is None or len(f) != G.order:
                raise UsageError("images do not define an automorphism of the whole group")
            return as_automorphism(G, [f[i] for i in range(G.order)])
        raise UsageError("images file: one image per generator, or 'element image' pairs")
    raise UsageError(f"unknown automorphism spec {text!r}")


def _extend_between(S: FiniteGroup, T: FiniteGroup, xs, ys) -> dict | None:
    """Map on <xs> in S sending xs to ys in T, or None if inconsistent."""
    f = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for x, y in zip(xs, ys):
                b, fb = S.mul(a, x), T.mul(f[a], y)
                if b not in f:
                    f[b] = fb
                    nxt.append(b)
                elif f[b] != fb:
                    return None
        frontier = nxt
    return f


def similarity_from_file(filt: Filtration, path: str, strict: bool = True) -> SimilarityStructure:
    """Lines ``<level> <src> <dst>``: src in G_(level-1), dst in G_level; the
    classes of the sources must generate the factor G_(level-1)/G_level."""
    G = filt.group
    per_level: dict[int, list] = {}
    for row in _pairs_file(path):
        if len(row) != 3 or not row[0].isdigit():
            raise UsageError("phi file lines look like '<level> <src hex> <dst hex>'")
        per_level.setdefault(int(row[0]), []).append((_hex_index(G, row[1]), _hex_index(G, row[2])))
    maps = {}
    for i in range(2, filt.length):
        pairs = per_level.get(i)
        if not pairs:
            raise UsageError(f"phi file has no entries for level {i}")
        src, dst = filt.factor(i - 1), filt.factor(i)
        try:
            xs = [src.label[a] for a, _ in pairs]
            ys = [dst.label[b] for _, b in pairs]
        except KeyError:
            raise UsageError(f"level {i}: element outside the expected filtration term") from None
        f = _extend_between(src.group, dst.group, xs, ys)
        if f is None or len(f) != src.group.order:
            raise UsageError(f"level {i}: images do not define a map on the whole factor")
        hom = hom_from_images(src.group, dst.group, [f[g] for g in src.group.generators])
        maps[i] = hom
    return SimilarityStructure(filt, maps, name=f"file:{path}")


# ---------------------------------------------------------------------------
# commands

def _aut_dict(G, a):
    return {"order": str(a.order), "generator_images": [G.encode_hex(a.images[g]) for g in G.generators]}


def cmd_build(args):
    G, kind, config = build_group(args.spec, args.seed)
    return EXIT_OK, config, group_dump(G, with_table=args.table)


def abelianization_invariants(G: FiniteGroup) -> list[int]:
    return abelian_invariants(quotient(G, derived_subgroup(G))[0])


def cmd_report(args):
    G, kind, config = build_group(args.spec, args.seed)
    ds = derived_series(G)
    payload = {
        "order": str(G.order),
        "prime": str(G.prime),
        "mode": G.mode,
        "derived_length": str(derived_length(G)),
        "derived_series_orders": [str(H.order) for H in ds],
        "nilpotency_class": str(nilpotency_class(G)),
        "lower_central_orders": [str(H.order) for H in lower_central_series(G)],
        "exponent": str(exponent(G)),
        "abelian_invariants": [str(n) for n in abelianization_invariants(G)],
        "frattini_rank": str(frattini_rank(G)),
    }
    return EXIT_OK, config, payload


def cmd_selfsim(args):
    G, kind, config = build_group(args.spec, args.seed)
    filt = choose_filtration(G, kind, args.filtration)
    config["filtration"] = args.filtration
    config["phi"] = args.phi
    if args.phi == "ppower":
        sim = power_similarity(filt, strict=False)
    elif args.phi == "tmap":
        if kind != "sl2lambda":
            raise UsageError("--phi=tmap applies to sl2lambda groups")
        sim = matrices.t_map_similarity(G, strict=False)
    else:
        sim = similarity_from_file(filt, args.phi)
    auts = None
    if kind in ("sl2zp", "sl2lambda") and G.order > DEFAULT_AUT_CAP:
        auts = matrices.standard_conjugations(G)
    rep = checks.check_self_similarity(G, sim, auts)
    payload = {"filtration_orders": [str(n) for n in filt.orders()], **rep.as_dict()}
    return (EXIT_OK if rep.passed else EXIT_FAIL), config, payload


def cmd_theorem1(args):
    G, kind, config = build_group(args.spec, args.seed)
    filt = choose_filtration(G, kind, args.filtration)
    config["filtration"] = args.filtration
    config["sigma"] = args.sigma
    sigma = parse_sigma(G, args.sigma)
    if kind == "sl2lambda" and args.phi == "tmap":
        sim = matrices.t_map_similarity(G)
    else:
        sim = power_similarity(filt, strict=False)
    rep = checks.theorem1_engine(sim, sigma)
    return (EXIT_OK if rep.dichotomy_holds else EXIT_FAIL), config, rep.as_dict()


def cmd_fpf(args):
    G, kind, config = build_group(args.spec, args.seed)
    config["order"] = str(args.order)
    found = checks.fpf_search(G, args.order)
    payload = {"group_order": str(G.order), "count": str(len(found)),
               "verdict": checks.PASS if found else checks.FAIL,
               "automorphisms": [_aut_dict(G, a) for a in found]}
    return (EXIT_OK if found else EXIT_FAIL), config, payload


def cmd_transfer(args):
    G, kind, config = build_group(args.spec, args.seed)
    Q = G
    if args.metabelian:
        ds = derived_series(G)
        if len(ds) > 2:
            Q, _ = quotient(G, ds[2])
        config["quotient"] = "G/G''"
    reports = checks.property_V_check(Q)
    ok = all(r.passed for r in reports)
    payload = {"group_order": str(Q.order), "subgroups": str(len(reports)),
               "verdict": checks.PASS if ok else checks.FAIL,
               "table": [r.as_dict() for r in reports]}
    return (EXIT_OK if ok else EXIT_FAIL), config, payload


def cmd_prop4(args):
    G, kind, config = build_group(args.spec, args.seed)
    config["sigma"] = args.sigma
    if args.sigma == "search":
        found = checks.property_IV_automorphisms(G)
        payload = {"count": str(len(found)), "verdict": checks.PASS if found else checks.FAIL,
                   "automorphisms": [_aut_dict(G, a) for a in found]}
        return (EXIT_OK if found else EXIT_FAIL), config, payload
    sigma = parse_sigma(G, args.sigma)
    ok = checks.property_IV_check(G, sigma)
    payload = {"automorphism": _aut_dict(G, sigma), "verdict": checks.PASS if ok else checks.FAIL}
    return (EXIT_OK if ok else EXIT_FAIL), config, payload


def cmd_gs(args):
    if args.d < 0 or args.r < 0:
        raise UsageError("d and r must be nonnegative")
    payload = checks.gs_report(args.d, args.r)
    return (EXIT_OK if payload["verdict"] else EXIT_FAIL), {}, payload


def cmd_tc(args):
    P = presentations.parse_presentation(Path(args.file).read_text())
    words = [w for w in (args.subgroup or "").split(";") if w.strip()]
    H = [presentations.parse_word(w, P.generators) for w in words]
    T = presentations.todd_coxeter(P, H, max_cosets=args.max_cosets)
    config = {"presentation": str(P), "subgroup": [str(w) for w in H], "max_cosets": str(args.max_cosets)}
    payload = {"closed": True, "index": str(T.index),
               "cosets_defined": str(T.stats.get("defined", 0))}
    if args.permutations:
        payload["generator_permutations"] = {g: [str(v) for v in T.permutation(g)] for g in P.generators}
    return EXIT_OK, config, payload


def cmd_zdepth(args):
    P = presentations.parse_presentation(Path(args.file).read_text())
    config = {"presentation": str(P), "p": str(args.p), "max_degree": str(args.max_degree)}
    rows = []
    for w in P.relators:
        d = presentations.zassenhaus_depth(w, args.p, args.max_degree, symbols=P.generators)
        rows.append({"relator": str(w), "depth": str(d) if isinstance(d, int) else f">{args.max_degree}"})
    return EXIT_OK, config, {"relators": rows}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="progroups", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    sub = ap.add_subparsers(dest="command", required=True)

    def group_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("spec", help="family spec, e.g. sl2zp:p=3,k=2")
        p.set_defaults(fn=fn)
        return p

    p = group_cmd("build", cmd_build, "dump a group")
    p.add_argument("--table", action="store_true", help="include the multiplication table")
    group_cmd("report", cmd_report, "structural invariants")
    p = group_cmd("selfsim", cmd_selfsim, "self-similarity certificate")
    p.add_argument("--phi", default="ppower", help="ppower, tmap, or a file of factor maps")
    p.add_argument("--filtration", default="default", choices=["default", "power", "lcs"])
    p = group_cmd("theorem1", cmd_theorem1, "fixed-point propagation along the filtration")
    p.add_argument("--sigma", required=True, help="inv, conj:<hex>, images:<file>")
    p.add_argument("--phi", default="ppower", choices=["ppower", "tmap"])
    p.add_argument("--filtration", default="default", choices=["default", "power", "lcs"])
    p = group_cmd("fpf", cmd_fpf, "fixed-point-free automorphisms of a given order")
    p.add_argument("--order", type=int, required=True)
    p = group_cmd("transfer", cmd_transfer, "transfer kernels for subgroups with cyclic quotient")
    p.add_argument("--metabelian", action="store_true", help="work in G/G''")
    p = group_cmd("prop4", cmd_prop4, "involution acting without fixed points on G/G'")
    p.add_argument("--sigma", required=True, help="inv, conj:<hex>, images:<file>, or search")
    p = sub.add_parser("gs", help="Golod-Shafarevich inequality r > d^2/4")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.set_defaults(fn=cmd_gs)
    p = sub.add_parser("tc", help="coset enumeration")
    p.add_argument("file")
    p.add_argument("--subgroup", help="subgroup generators separated by ';'")
    p.add_argument("--max-cosets", type=int, default=100_000)
    p.add_argument("--permutations", action="store_true", help="include the coset action")
    p.set_defaults(fn=cmd_tc)
    p = sub.add_parser("zdepth", help="Zassenhaus depth of each relator")
    p.add_argument("file")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--max-degree", type=int, default=6)
    p.set_defaults(fn=cmd_zdepth)
    return ap


def render(argv, config, payload) -> str:
    doc = {"command": list(argv), "config": config, "payload": payload, "version": __version__}
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def run(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        code, config, payload = args.fn(args)
    except (UsageError, GroupError, PresentationSyntaxError, ValueError, OSError) as exc:
        err.write(f"progroups: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    config = {"seed": str(args.seed), **config}
    out.write(render(argv, config, payload))
    return code


def main():
    sys.exit(run())

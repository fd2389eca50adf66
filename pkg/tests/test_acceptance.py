"""End-to-end acceptance criteria, each with its runtime budget.

Every criterion returns a JSON-able report; the determinism criterion reruns
them all and compares bytes.
"""
import io
import json
import random
import time
from pathlib import Path

import pytest

import corpus
from progroups import checks
from progroups import matrices as mx
from progroups import nottingham as nt
from progroups import presentations as pr
from progroups import tree
from progroups.cli import run
from progroups.errors import CapExceeded
from progroups.filtration import power_filtration, power_similarity
from progroups.group import (
    abelian_group,
    abelian_invariants,
    as_group,
    cyclic_group,
    derived_length,
    derived_series,
    derived_subgroup,
    exponent,
    quotient,
    subgroup_generated,
    subgroup_search,
)

SEED = 20240601
ST_FILE = str(Path(__file__).resolve().parent / "data" / "scholz-taussky.pres")


def s(x):
    return str(x)


def scholz_taussky_suite(seed):
    P = pr.parse_presentation(pr.SCHOLZ_TAUSSKY)
    T = pr.todd_coxeter(P)
    G = pr.regular_group(T, P, seed=seed)
    perm_order = pr.permutation_closure_order(T)
    inv = abelian_invariants(quotient(G, derived_subgroup(G))[0])
    hits = []
    for H in subgroup_search(G, 27, abelian=False, exponent_=9):
        K = as_group(H)
        Kab = quotient(K, derived_subgroup(K))[0]
        hits.append({"exponent": s(exponent(K)), "abelianization": [s(n) for n in abelian_invariants(Kab)]})
    good = [h for h in hits if h["exponent"] == "9" and h["abelianization"] == ["3", "3"]]
    report = {"closed": True, "index": s(T.index), "order": s(G.order), "permutation_order": s(perm_order),
              "invariants": [s(n) for n in inv], "order27_exp9_subgroups": hits}
    ok = {
        "tc closes": T.index == G.order,
        "cross-check": perm_order == G.order,
        "invariants [3,3]": inv == [3, 3],
        "nonabelian order 27 exponent 9, abelianization C3xC3": bool(good),
    }
    return ok, report


def selfsim_suite(seed):
    ok, report = {}, {}
    for label, G, sim in [
        ("sl2zp k=2 ppower", mx.kernel_group_zp(3, 2), None),
        ("sl2zp k=3 ppower", mx.kernel_group_zp(3, 3), None),
        ("sl2lambda k=3 tmap", mx.kernel_group_lambda(3, 3), "tmap"),
    ]:
        sim = mx.t_map_similarity(G) if sim else mx.p_power_similarity(G)
        auts = mx.standard_conjugations(G) if G.order > 512 else None
        rep = checks.check_self_similarity(G, sim, auts)
        filt = sim.filtration
        index = [G.order // H.order for H in filt.chain]
        law = all(index[i - 1] == index[1] ** (i - 1) for i in range(2, filt.length + 1))
        ok[label] = rep.passed and law
        report[label] = rep.as_dict()
    G = abelian_group([3, 9])
    rep = checks.check_self_similarity(G, power_similarity(power_filtration(G), strict=False))
    growth = rep.checks["growth_law"]
    ok["C3xC9 negative control"] = not rep.passed and growth.status == checks.FAIL and bool(growth.witness)
    report["C3xC9"] = rep.as_dict()
    return ok, report


def propagation_suite(seed):
    triples = corpus.propagation_corpus()
    certified = {}
    rows = []
    failures = 0
    verified = True
    for label, sim, sigma, auts in triples:
        key = id(sim)
        if key not in certified:
            certified[key] = checks.check_self_similarity(sim.filtration.group, sim, auts).passed
        rep = checks.theorem1_engine(sim, sigma)
        if rep.outcome == "propagation-failure" and certified[key]:
            failures += 1
        if rep.outcome == "fixed-point-in-abelianized-top":
            G = sim.filtration.group
            x = G.index[bytes.fromhex(rep.fixed_element)]
            Q, proj = sim.filtration.quotient(2)
            verified &= proj(x) != 0 and proj(sigma(x)) == proj(x)
        rows.append({"label": label, **rep.as_dict()})
    ok = {
        ">= 20 triples": len(triples) >= 20,
        "all inputs certified": all(certified.values()),
        "dichotomy on every run": all(r["dichotomy_holds"] for r in rows),
        "fixed elements verified": verified,
        "zero propagation failures": failures == 0,
    }
    return ok, {"runs": rows}


def _first_fpf(n):
    def build(G):
        try:
            found = checks.fpf_search(G, n)
        except CapExceeded:
            return None
        return found[0] if found else None
    return build


def fpf_survey_suite(seed):
    groups = [G for G in corpus.survey_groups() if G.order <= 512]
    ok, report = {}, {}
    rows2 = [r for r in checks.derived_length_survey(((G, None) for G in groups), _first_fpf(2), 2) if r.fpf]
    ok["order-2 rows exist"] = bool(rows2)
    ok["order-2 rows derived length 1"] = all(r.max_derived_length == 1 for r in rows2)
    extra = [(corpus.unitriangular(q), q) for q in (4, 7)]
    rows3 = [r for r in checks.derived_length_survey(((G, None) for G in groups), _first_fpf(3), 3) if r.fpf]
    rows3 += [r for r in checks.derived_length_survey(
        ((G, None) for G, _ in extra), lambda G: corpus.diagonal_scaling(G, 4 if G.order == 64 else 7, 2), 3)
        if r.fpf]
    ok["order-3 rows include nonabelian"] = any(r.max_class == 2 for r in rows3)
    ok["order-3 rows class <= 2"] = all(r.max_class <= 2 for r in rows3)
    report["order2"] = [r.as_dict() for r in rows2]
    report["order3"] = [r.as_dict() for r in rows3]
    return ok, report


def nottingham_suite(seed):
    rng = random.Random(seed)
    ok, report = {}, {}
    orders_ok = True
    axioms_ok = True
    for q in (2, 3, 4):
        for m in range(2, 6):
            G = nt.quotient_group(q, m)
            orders_ok &= G.order == q ** (m - 1)
            e = nt.identity(q, m)

            def rand():
                return nt.TruncatedSeries(q, m, tuple(rng.randrange(q) for _ in range(m - 1)))

            for _ in range(1000):
                f, g, h = rand(), rand(), rand()
                axioms_ok &= nt.compose(nt.compose(f, g), h) == nt.compose(f, nt.compose(g, h))
                axioms_ok &= nt.compose(f, e) == f == nt.compose(e, f)
                axioms_ok &= nt.compose(f, nt.reverse(f)) == e == nt.compose(nt.reverse(f), f)
            report[f"q={q},m={m}"] = s(G.order)
    f = nt.series(2, 4, {2: 1})
    sq = nt.compose(f, f)
    rev = nt.reverse(f)
    ok["orders q^(m-1)"] = orders_ok
    ok["axioms on 1000 triples"] = axioms_ok
    ok["(T+T^2)o(T+T^2) = T+T^4"] = sq == nt.series(2, 4, {4: 1})
    ok["reverse(T+T^2) = T+T^2+T^4"] = rev == nt.series(2, 4, {2: 1, 4: 1})
    report["square"], report["reverse"] = str(sq), str(rev)
    return ok, report


def tree_suite(seed):
    ok, report = {}, {}
    for d in (1, 2, 3):
        G = tree.full_group(2, d)
        ok[f"order d={d}"] = G.order == 2 ** (2 ** d - 1)
        ok[f"derived length d={d}"] = derived_length(G) == d
        report[f"d={d}"] = {"order": s(G.order), "derived_length": s(derived_length(G))}
    G = tree.full_group(2, 2)
    ok["d=2 nonabelian"] = not G.is_abelian()
    ok["d=2 exponent 4"] = exponent(G) == 4
    ok["d=2 order 8, derived length 2"] = G.order == 8 and derived_length(G) == 2
    return ok, report


def transfer_suite(seed):
    ok, report = {}, {}
    reps = checks.property_V_check(cyclic_group(9))
    ok["C9 all pass"] = len(reps) == 2 and all(r.passed for r in reps)
    report["C9"] = [r.as_dict() for r in reps]
    Q = abelian_group([3, 3])
    t = checks.transfer_map(Q, subgroup_generated(Q, [Q.generators[0]]))
    ok["C3xC3 factor kernel 9"] = t.kernel_order == 9 and t.index == 3
    report["C3xC3"] = {"kernel": s(t.kernel_order), "index": s(t.index)}
    G = corpus.scholz_taussky()
    Q = quotient(G, derived_series(G)[2])[0]
    reps = checks.property_V_check(Q)
    ok["G/G'' all pass"] = bool(reps) and all(r.passed for r in reps)
    ok["representative independence"] = all(r.independent for r in reps)
    report["G/G''"] = {"order": s(Q.order), "table": [r.as_dict() for r in reps]}
    return ok, report


def zassenhaus_suite(seed):
    ok, report = {}, {}
    for p in (2, 3, 5):
        dep = pr.zassenhaus_depth(pr.parse_word(f"x^{p}"), p)
        ok[f"depth(x^{p}) = {p}"] = dep == p
        report[f"x^{p}"] = s(dep)
    c = pr.parse_word("(x,y)")
    cx = pr.parse_word("((x,y),x)")
    ok["depth((x,y)) = 2"] = pr.zassenhaus_depth(c, 3) == 2
    ok["depth(((x,y),x)) = 3"] = pr.zassenhaus_depth(cx, 3) == 3
    P = pr.parse_presentation(pr.SCHOLZ_TAUSSKY)
    depths = [pr.zassenhaus_depth(r, 3, symbols=P.generators) for r in P.relators]
    ok["relators depth >= 3"] = all(d >= 3 for d in depths)
    report["relators"] = [s(d) for d in depths]
    return ok, report


def gs_suite(seed):
    want = {(2, 2): True, (4, 4): False, (5, 5): False, (3, 3): True}
    got = {k: checks.gs_report(*k) for k in want}
    ok = {f"{d},{r} -> {v}": got[(d, r)]["verdict"] is v for (d, r), v in want.items()}
    ok["caveat recorded for d=r=3"] = "caveat" in got[(3, 3)]
    return ok, {f"{d},{r}": rep for (d, r), rep in got.items()}


CRITERIA = [
    (1, "Scholz-Taussky suite", scholz_taussky_suite, 10),
    (2, "self-similarity certificates", selfsim_suite, 30),
    (3, "fixed-point propagation dichotomy", propagation_suite, 60),
    (4, "fixed-point-free survey bounds", fpf_survey_suite, 120),
    (5, "Nottingham arithmetic", nottingham_suite, 10),
    (6, "tree automorphism groups", tree_suite, 10),
    (7, "transfer and property V", transfer_suite, 20),
    (8, "Zassenhaus depths", zassenhaus_suite, 5),
    (9, "Golod-Shafarevich checker", gs_suite, 1),
]

_reports: dict[int, str] = {}


def serialize(ok, report):
    return json.dumps({"checks": ok, "report": report}, indent=1, sort_keys=True, default=str)


@pytest.mark.parametrize("num,title,fn,budget", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, budget, verdict_log):
    start = time.perf_counter()
    ok, report = fn(SEED)
    elapsed = time.perf_counter() - start
    _reports[num] = serialize(ok, report)
    failed = [k for k, v in ok.items() if not v]
    in_time = elapsed < budget
    status = "PASS" if not failed and in_time else "FAIL"
    line = f"{status} criterion {num}: {title} ({elapsed:.2f}s, budget {budget}s)"
    if failed:
        line += " failed: " + "; ".join(failed)
    print(line)
    verdict_log.append(line)
    assert not failed, failed
    assert in_time, f"{elapsed:.2f}s over budget {budget}s"


def test_criterion10_determinism(verdict_log):
    mismatched = []
    for num, title, fn, _ in CRITERIA:
        first = _reports.get(num) or serialize(*fn(SEED))
        if serialize(*fn(SEED)) != first:
            mismatched.append(num)
    for argv in (["--seed=5", "report", f"presentation:{ST_FILE}"],
                 ["--seed=5", "selfsim", "sl2zp:p=3,k=3"],
                 ["theorem1", "cyclic:n=27", "--sigma=inv", "--filtration=power"],
                 ["--seed=5", "transfer", f"presentation:{ST_FILE}", "--metabelian"]):
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            run(argv, buf, io.StringIO())
            outs.append(buf.getvalue().encode())
        if outs[0] != outs[1] or not outs[0]:
            mismatched.append(" ".join(argv))
    status = "PASS" if not mismatched else "FAIL"
    line = f"{status} criterion 10: determinism (byte-identical reruns)"
    if mismatched:
        line += f" mismatched: {mismatched}"
    print(line)
    verdict_log.append(line)
    assert not mismatched

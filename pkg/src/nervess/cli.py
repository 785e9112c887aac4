"""Command line entry point: ``nervess <command> [options]``.

Exit codes: 0 when every check passes, 1 on a computational mismatch,
2 on usage or schema errors.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field as dc_field
from importlib import resources

import jsonschema
import numpy as np

from . import _backend
from .exactla import as_field

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    field: object = 0
    max_degree: int = 5
    top: int = None
    fmt: str = "text"
    seed: int = 0
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.max_degree is not None and self.max_degree < 1:
            raise UsageError("--max-degree must be >= 1")


def load_schema(name):
    with resources.files("nervess").joinpath("schemas", name).open() as fh:
        return json.load(fh)


def validate(obj, schema_name):
    """Validate against a bundled schema; raise UsageError with the failing path."""
    schema = load_schema(schema_name)
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            path = "/".join(str(x) for x in e.absolute_path) or "<root>"
            lines.append(f"{schema_name}: field {path}: {e.message}")
        raise UsageError("\n".join(lines))
    return obj


def read_json(path, schema_name):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    return validate(obj, schema_name)


def parse_field(text):
    try:
        return as_field(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc))


def _jsonable(x):
    if isinstance(x, dict):
        return {_key(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if hasattr(x, "denominator"):
        return int(x) if x.denominator == 1 else str(x)
    if hasattr(x, "item"):
        return x.item()
    return x


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return k if isinstance(k, (str, int)) else str(k)


def emit(command, verdict, result, args, fmt, series=None, table=None, out=None):
    """Print a report in the requested format and return the exit code."""
    out = out or sys.stdout
    report = {"schema_version": SCHEMA_VERSION, "command": command, "verdict": verdict,
              "backend": _backend.NAME, "args": _jsonable(args), "result": _jsonable(result)}
    if fmt == "json":
        validate(report, "report.json")
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if series is not None:
            cols = list(series)
            w.writerow(["degree"] + cols)
            n = max(len(v) for v in series.values())
            for d in range(n):
                w.writerow([d] + [series[c][d] if d < len(series[c]) else "" for c in cols])
        elif table is not None:
            w.writerow(list(table[0].keys()) if table else [])
            for row in table:
                w.writerow(list(row.values()))
        out.write(buf.getvalue())
    else:
        out.write(f"{command}  [{_backend.NAME} kernels]\n")
        if series is not None:
            cols = list(series)
            out.write("degree  " + "  ".join(f"{c:>12}" for c in cols) + "\n")
            n = max(len(v) for v in series.values())
            for d in range(n):
                vals = [series[c][d] if d < len(series[c]) else "" for c in cols]
                out.write(f"{d:>6}  " + "  ".join(f"{v!s:>12}" for v in vals) + "\n")
        if table is not None:
            for row in table:
                out.write("  ".join(f"{k}={v}" for k, v in row.items()) + "\n")
        for line in result.get("notes", []) if isinstance(result, dict) else []:
            out.write(line + "\n")
        out.write(f"{verdict}\n")
    return {"PASS": 0, "INFO": 0, "FAIL": 1}[verdict]


# ---------------------------------------------------------------------------
# commands


def cmd_freeloop_rp(a):
    from .hh import freeloop_rp
    F = parse_field(a.p)
    if F.p == 2:
        raise UsageError("freeloop-rp needs p an odd prime or 0; characteristic 2 is "
                         "outside the hypothesis of the computation (see borel-l0)")
    if a.n < 2:
        raise UsageError("--n must be >= 2")
    rep = freeloop_rp(a.n, F.p, a.max_degree, bar_check=a.bar_check, strict=False)
    notes = []
    for c in rep["components"]:
        gens = ", ".join(f"{g['label']}({g['degree']})" for g in c["generators"]) or "-"
        notes.append(f"component {c['component']}: invariant generators {gens}")
        if a.bar_check:
            notes.append(f"component {c['component']}: action routes agree = {c['action']['agree']}")
    ok = rep["pass"] and all(c["action"].get("agree", True) for c in rep["components"])
    result = {"series": rep["series"], "closed_form": rep["closed_form"],
              "components": [{k: v for k, v in c.items() if k != "action"}
                             for c in rep["components"]], "notes": notes}
    return emit("freeloop-rp", "PASS" if ok else "FAIL", result, vars_(a), a.format,
                series={"dim": rep["series"], "closed_form": rep["closed_form"]})


def _groupoid(group, space, top):
    from .simpl import (builtin_group, point, sphere_model, transformation_groupoid,
                        trivial_action)
    G = builtin_group(group)
    key = space.strip().lower()
    if key in ("point", "pt"):
        x = trivial_action(point(top), G)
    elif key.startswith("sphere") and key[6:].isdigit():
        n = int(key[6:])
        s = sphere_model(n, top)
        if G.order == 1:
            x = trivial_action(s.sset, G)
        elif G.name == "Z2":
            x = s
        else:
            raise UsageError("spheres carry the antipodal Z2 action (or the trivial group)")
    else:
        raise UsageError(f"unknown space {space!r}; use sphereN or point")
    return G, x, transformation_groupoid(G, x, top)


def _default_top(space):
    key = space.strip().lower()
    if key.startswith("sphere") and key[6:].isdigit():
        return int(key[6:]) + 3
    return 3


def _bisimplicial_from_json(obj):
    from .simpl import TableBisimplicialSet
    sizes, hf, hd, vf, vd = {}, {}, {}, {}, {}
    for c in obj["cells"]:
        key = (c["p"], c["q"])
        sizes[key] = c["size"]
        for name, store in (("hfaces", hf), ("hdegs", hd), ("vfaces", vf), ("vdegs", vd)):
            if name in c:
                store[key] = c[name]
    b = TableBisimplicialSet(obj["Nh"], obj["Nv"], sizes, hf, hd, vf, vd,
                             obj.get("vertical_dim"))
    try:
        b.check_identities(obj["Nh"], obj["Nv"])
    except (AssertionError, KeyError, ValueError) as exc:
        raise UsageError(f"bisimplicial tables are inconsistent: {exc}")
    return b


def cmd_ss(a):
    from .totss import DoubleComplex, SpectralSequence, compare_with_diagonal, ss_report
    products = a.products
    if a.input:
        obj = read_json(a.input, "ss_input.json")
        F = parse_field(obj.get("field", a.p if a.p is not None else 2))
        r_max = obj.get("pages", a.pages)
        products = obj.get("products", products)
        if obj["kind"] == "groupoid":
            top = obj.get("top") or _default_top(obj["space"])
            G, x, b = _groupoid(obj["group"], obj["space"], top)
        else:
            b = _bisimplicial_from_json(obj)
            top = obj.get("top")
    else:
        if not (a.group and a.space):
            raise UsageError("ss needs --input or both --group and --space")
        F = parse_field(a.p if a.p is not None else 2)
        r_max = a.pages
        top = a.top or _default_top(a.space)
        G, x, b = _groupoid(a.group, a.space, top)
    dc = DoubleComplex(b, F)
    ss = SpectralSequence(dc, top)
    rep = ss_report(ss, r_max, products=products)
    verdict = "PASS"
    notes = []
    try:
        diag = compare_with_diagonal(b, F, ss.top)
        rep["diagonal"] = diag
        notes.append(f"H(Tot) = H(diag) through degree {diag['certified_through']}: "
                     f"{diag['dims_match']}")
        if diag.get("ring_match") is False:
            verdict = "FAIL"
    except AssertionError as exc:
        rep["diagonal"] = {"error": str(exc)}
        verdict = "FAIL"
    except ValueError as exc:
        rep["diagonal"] = {"skipped": str(exc)}
        notes.append(f"diagonal comparison skipped: {exc}")
    tot = rep["e_infinity_totals"][:ss.top]
    rep["notes"] = notes
    return emit("ss", verdict, rep, vars_(a), a.format, series={"e_inf_total": tot})


def _rep(a):
    from .cotor import builtin_rep, rep_from_json
    from .simpl import builtin_group
    if a.input:
        obj = read_json(a.input, "representation.json")
        if "field" not in obj and a.p is not None:
            obj["field"] = a.p
        try:
            return rep_from_json(obj)
        except ValueError as exc:
            raise UsageError(str(exc))
    if not a.group:
        raise UsageError("need --group (and --rep) or --input")
    F = parse_field(a.p if a.p is not None else 0)
    try:
        return builtin_rep(builtin_group(a.group), a.rep, F)
    except ValueError as exc:
        raise UsageError(str(exc))


def _bigraded_rows(res, top=None):
    rows = []
    for (p, q), d in sorted(res.dims.items()):
        if top is not None and p > top:
            continue
        rows.append({"p": p, "q": q, "dim": d})
    return rows


def cmd_cotor(a):
    from .cotor import cobar_cotor, lemma51_check
    rep = _rep(a)
    res = cobar_cotor(rep, k_max=a.max_degree + 1)
    verdict = "PASS"
    try:
        check = lemma51_check(rep, a.max_degree)
    except AssertionError as exc:
        check = {"pass": False, "error": str(exc)}
        verdict = "FAIL"
    rows = [dict(r, representative_labels=[], products=[]) for r in _bigraded_rows(res)]
    result = {"cotor": rows, "group_cohomology_check": check,
              "notes": [f"dim Cotor^k (k <= {a.max_degree}) = group cohomology: {check['pass']}"]}
    return emit("cotor", verdict, result, vars_(a), a.format,
                series={"dim": res.series()}, table=None)


def cmd_group_cohomology(a):
    from .cotor import group_cohomology, group_cohomology_ring
    rep = _rep(a)
    if a.products and rep.name == "trivial" and rep.degrees() == [0] and rep.dim(0) == 1:
        res, table = group_cohomology_ring(rep.group, rep.field, a.max_degree)
        prods = [{"x": list(x), "y": list(y), "result": v} for (x, y), v in table.items()]
    else:
        res = group_cohomology(rep, a.max_degree)
        prods = []
    result = {"dims": _bigraded_rows(res), "products": prods}
    return emit("group-cohomology", "INFO", result, vars_(a), a.format,
                series={"dim": res.series()})


def cmd_lbg(a):
    from .cotor import lbg_cohomology
    from .simpl import builtin_group
    G = builtin_group(a.group)
    F = parse_field(a.p if a.p is not None else 0)
    verdict = "PASS"
    notes = []
    try:
        res = lbg_cohomology(G, F, a.max_degree)
        if G.is_abelian():
            notes.append(f"abelian shortcut |G| x H^*(G) holds through degree {a.max_degree}")
    except AssertionError as exc:
        verdict = "FAIL"
        notes.append(str(exc))
        res = lbg_cohomology(G, F, a.max_degree, check_abelian=False)
    result = {"dims": _bigraded_rows(res), "notes": notes}
    return emit("lbg", verdict, result, vars_(a), a.format, series={"dim": res.series()})


def cmd_inertia(a):
    from .cotor import inertia_e2
    F = parse_field(a.p if a.p is not None else 0)
    top = a.top or _default_top(a.space)
    G, x, _ = _groupoid(a.group, a.space, top)
    cot, per = inertia_e2(x, F, a.max_degree)
    rows = _bigraded_rows(cot, a.max_degree)
    notes = [f"H^*(X^{g}) = {d}" for g, d in per.items()]
    result = {"e2": rows, "components": per, "notes": notes}
    return emit("inertia", "INFO", result, vars_(a), a.format, table=rows)


def cmd_tor(a):
    from .hh import bar_tor_sphere, induced_action, sphere_tor
    F = parse_field(a.p)
    if a.n < 2:
        raise UsageError("--n must be >= 2")
    try:
        res = sphere_tor(a.n, a.twist, F, a.max_degree)
    except ValueError as exc:
        raise UsageError(str(exc))
    bar = bar_tor_sphere(a.n, a.twist, F, a.max_degree)
    act = induced_action(res, "tau")
    ok = bar.dims == res.dims and act["agree"]
    notes = ["generators: " + ", ".join(f"{g['label']}({g['degree']})" for g in res.generators),
             f"tau signs agree two ways: {act['agree']}"]
    result = {"small_resolution": res.dims, "bar": bar.dims, "generators": res.generators,
              "action": act, "report": res.to_json(), "notes": notes}
    return emit("tor", "PASS" if ok else "FAIL", result, vars_(a), a.format,
                series={"small_resolution": res.dims, "bar": bar.dims})


def cmd_borel(a):
    from .cotor import borel_collapse
    F = parse_field(a.p if a.p is not None else 3)
    top = a.top or _default_top(a.space) - 1
    G, x, _ = _groupoid(a.group, a.space, top + 1)
    try:
        rep = borel_collapse(G, x, F, cross_check=True, top=top)
    except ValueError as exc:
        raise UsageError(str(exc))
    except AssertionError as exc:
        return emit("borel", "FAIL", {"error": str(exc)}, vars_(a), a.format)
    return emit("borel", "PASS", rep, vars_(a), a.format,
                series={"invariants": rep["dims"], "e_inf_total": rep["e_infinity_totals"]})


def cmd_borel_l0(a):
    from .hh import borel_L0_E2
    rep = borel_L0_E2(a.n, a.max_degree)
    rows = [{"p": p, "q": q, "dim": d} for (p, q), d in sorted(rep["dims"].items())]
    result = {"dims": rows, "column0": rep["column0"], "row0": rep["row0"]}
    return emit("borel-l0", "INFO", result, vars_(a), a.format, table=rows)


def cmd_check_random(a):
    """Run the structural checks on seeded random bisimplicial sets."""
    from .checks import run_random_checks
    out = run_random_checks(a.seed, a.count, parse_field(a.p if a.p is not None else 2))
    verdict = "PASS" if out["failures"] == 0 else "FAIL"
    return emit("check-random", verdict, out, vars_(a), a.format)


def vars_(a):
    return {k: v for k, v in vars(a).items() if k not in ("func", "config")}


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="nervess", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, p_default=None, max_degree=5):
        sp.add_argument("--p", default=p_default,
                        help="field characteristic (prime) or 0 / Q for the rationals")
        sp.add_argument("--max-degree", type=int, default=max_degree)
        sp.add_argument("--format", choices=["text", "json", "csv"], default="text")
        return sp

    s = common(sub.add_parser("freeloop-rp", help="cohomology of the free loop space of RP^n"),
               "3", 12)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--bar-check", action="store_true",
                   help="also compute the involution through the bar complex")
    s.set_defaults(func=cmd_freeloop_rp)

    s = common(sub.add_parser("ss", help="spectral sequence pages of a bisimplicial set"))
    s.add_argument("--input", help="JSON job (ss_input schema)")
    s.add_argument("--group")
    s.add_argument("--space")
    s.add_argument("--pages", type=int, default=3)
    s.add_argument("--top", type=int, help="truncation level of the double complex")
    s.add_argument("--products", action="store_true")
    s.set_defaults(func=cmd_ss)

    for name, fn, help_ in (("cotor", cmd_cotor, "Cotor over K[G]^dual via the cobar complex"),
                            ("group-cohomology", cmd_group_cohomology,
                             "group cohomology via normalized bar cochains")):
        s = common(sub.add_parser(name, help=help_))
        s.add_argument("--group")
        s.add_argument("--rep", default="trivial")
        s.add_argument("--input", help="JSON representation (representation schema)")
        if name == "group-cohomology":
            s.add_argument("--products", action="store_true")
        s.set_defaults(func=fn)

    s = common(sub.add_parser("lbg", help="cohomology of the free loop space of BG"))
    s.add_argument("--group", required=True)
    s.set_defaults(func=cmd_lbg)

    s = common(sub.add_parser("inertia", help="E_2 of the inertia groupoid"), None, 3)
    s.add_argument("--group", required=True)
    s.add_argument("--space", required=True)
    s.add_argument("--top", type=int)
    s.set_defaults(func=cmd_inertia)

    s = common(sub.add_parser("tor", help="twisted Tor of H^*(S^n), two resolutions"), "3", 10)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--twist", type=int, choices=[1, -1], default=-1)
    s.set_defaults(func=cmd_tor)

    s = common(sub.add_parser("borel", help="invariants of H^*(X) when char does not divide |G|"))
    s.add_argument("--group", required=True)
    s.add_argument("--space", required=True)
    s.add_argument("--top", type=int)
    s.set_defaults(func=cmd_borel)

    s = common(sub.add_parser("borel-l0", help="bigraded E_2 over GF(2) for the Z2 line"),
               "2", 6)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_borel_l0)

    s = common(sub.add_parser("check-random", help="structural checks on random instances"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=20)
    s.set_defaults(func=cmd_check_random)
    return p


def main(argv=None, out=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _backend.threads()
        args.config = asdict(JobConfig(field=getattr(args, "p", None),
                                       max_degree=getattr(args, "max_degree", None),
                                       top=getattr(args, "top", None), fmt=args.format,
                                       seed=getattr(args, "seed", 0)))
        if out is not None:
            old, sys.stdout = sys.stdout, out
            try:
                return args.func(args)
            finally:
                sys.stdout = old
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"nervess {args.command}: error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"nervess {args.command}: error: {exc}\n")
        return 2


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()

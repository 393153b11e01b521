"""Command-line entry point: ``exchgraph <subcommand> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
Exact rationals are printed as "p/q"; floating results as decimals.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import densities, dissociated, exch_geometry, mobius, sampling_verify, tables
from .graph_core import LabeledGraph, build_catalog, class_name, core_key
from .graph_io import FormatError, frac_str, parse_frac, parse_graph, to_edgelist_text, to_graph6


class UsageError(Exception):
    pass


# -- input helpers -------------------------------------------------------------------

def _read_text(arg: str) -> str:
    if arg.lstrip().startswith(("{", "[")):
        return arg  # inline JSON
    p = Path(arg)
    if p.suffix in (".json", ".g6", ".txt") or os.sep in arg:
        if not p.exists():
            raise UsageError(f"file not found: {arg}")
        return p.read_text().strip()
    return arg


def _load_json(arg: str) -> Any:
    text = _read_text(arg)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed JSON in {arg}: {e}") from None


def graph_arg(arg: str, n: int | None = None) -> LabeledGraph:
    """A graph given as a file, graph6, edge-list text "n; 1-2,2-3", or a 4-node class name."""
    text = _read_text(arg)
    if text in sampling_verify.MOTIF_NAMES:
        from .graph_core import named_class_index
        g = build_catalog(4)[named_class_index(sampling_verify.MOTIF_NAMES[text])].canonical
    else:
        g = parse_graph(text)
    if n is not None and g.n != n:
        raise UsageError(f"expected a graph on {n} nodes, got {g.n}")
    return g


def _class_keyed(n: int, values: Any, what: str) -> list[Fraction]:
    """Catalog-order values from a list or from a map keyed by graph literals."""
    cat = build_catalog(n)
    if isinstance(values, list):
        if len(values) != len(cat):
            raise FormatError(f"{what}: expected {len(cat)} values for n={n}, got {len(values)}")
        return [parse_frac(v) for v in values]
    if isinstance(values, dict):
        out = [Fraction(0)] * len(cat)
        for key, v in values.items():
            g = graph_arg(key)
            idx = cat.class_of(g) if g.n == n else cat.index_of_core(core_key(g))
            out[idx] = parse_frac(v)
        return out
    raise FormatError(f"{what}: expected a list or an object")


def dist_arg(arg: str) -> mobius.ExchDist:
    obj = _load_json(arg)
    try:
        n = int(obj["n"])
        mass = _class_keyed(n, obj["mass"], "mass")
    except (KeyError, TypeError) as e:
        raise FormatError(f"distribution JSON needs 'n' and 'mass': {e!r}") from None
    _check_size(n)
    return mobius.ExchDist(n, tuple(mass))


def z_arg(arg: str) -> mobius.MobiusVector:
    obj = _load_json(arg)
    try:
        n = int(obj["n"])
        z = _class_keyed(n, obj["z"], "z")
    except (KeyError, TypeError) as e:
        raise FormatError(f"Möbius JSON needs 'n' and 'z': {e!r}") from None
    _check_size(n)
    return mobius.MobiusVector(n, tuple(z))


def graphon_arg(arg: str) -> sampling_verify.GraphonSpec:
    try:
        return sampling_verify.graphon_from_json(_load_json(arg))
    except ValueError as e:
        raise FormatError(str(e)) from None


def _check_size(n: int, hi: int = 6) -> None:
    if not 1 <= n <= hi:
        raise UsageError(f"n={n} is outside the supported range 1..{hi}")


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {s!r}") from None


# -- rendering ----------------------------------------------------------------------

def num(x) -> Any:
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return num(x)


def render(payload: dict, fmt: str, config: dict, out) -> None:
    payload = _jsonable(payload)
    if fmt == "json":
        json.dump({"config": config, **payload}, out, indent=1)
        out.write("\n")
        return
    print(f"# config: {json.dumps(config)}", file=sys.stderr)
    rows = payload.pop("rows", None)
    if fmt == "csv":
        w = csv.writer(out)
        if rows:
            w.writerow(list(rows[0]))
            for r in rows:
                w.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v for v in r.values()])
        for k, v in payload.items():
            w.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
        return
    for k, v in payload.items():
        print(f"{k}: {json.dumps(v) if isinstance(v, (list, dict)) else v}", file=out)
    if rows:
        cols = list(rows[0])
        cells = [[str(r[c]) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        print("  ".join(c.ljust(wd) for c, wd in zip(cols, widths)), file=out)
        for row in cells:
            print("  ".join(v.ljust(wd) for v, wd in zip(row, widths)), file=out)


def _class_rows(n: int, values, key: str) -> list[dict]:
    cat = build_catalog(n)
    return [{"class": class_name(c), "g6": to_graph6(c.canonical), key: num(v)}
            for c, v in zip(cat, values)]


# -- subcommands --------------------------------------------------------------------

def cmd_catalog(a):
    if not 1 <= a.nodes <= 7:
        raise UsageError("catalog supports 1 <= n <= 7")
    cat = build_catalog(a.nodes)
    rows = [{"index": c.index, "class": class_name(c), "g6": to_graph6(c.canonical),
             "edges": c.edge_count, "orbit_size": c.orbit_size, "aut_count": c.aut_count,
             "connected": c.connected} for c in cat]
    return {"n": a.nodes, "classes": len(cat), "connected_classes": len(cat.connected_indices),
            "rows": rows}, 0


def cmd_density(a):
    f, g = graph_arg(a.motif), graph_arg(a.graph)
    d = densities.density(a.kind, f, g)
    v = d.value
    return {"kind": a.kind, "motif": to_edgelist_text(f), "graph": to_edgelist_text(g),
            "density": f"{d} (= {float(v):.4f})", "value": v}, 0


def cmd_mobius(a):
    p = dist_arg(a.input).validate()
    z = mobius.mobius_transform(p)
    return {"n": p.n, "rows": _class_rows(p.n, z.z, "z")}, 0


def cmd_inverse_mobius(a):
    z = z_arg(a.input)
    try:
        p = mobius.inverse_mobius(z)
    except mobius.OutsideMobiusSimplex as e:
        return {"n": z.n, "inside": False, "failing_class": to_edgelist_text(e.graph),
                "value": e.value}, 1
    return {"n": z.n, "inside": True, "rows": _class_rows(z.n, p.mass, "mass")}, 0


def cmd_marginal(a):
    p = dist_arg(a.input).validate()
    if not 2 <= a.to < p.n:
        raise UsageError(f"--to must satisfy 2 <= m < {p.n}")
    q = mobius.marginal_map(p, a.to)
    return {"n": p.n, "m": a.to, "rows": _class_rows(a.to, q.mass, "mass")}, 0


def cmd_definetti_check(a):
    p = dist_arg(a.input).validate()
    if not 2 <= a.m <= p.n:
        raise UsageError(f"-m must satisfy 2 <= m <= {p.n}")
    d = mobius.finite_definetti_check(p, a.m, strict=False)
    tv = mobius.tv_distance_check(p, a.m, strict=False)
    ok = d.ok and tv.ok
    return {"n": p.n, "m": a.m, "identity_holds": d.identity_holds, "max_hom_gap": d.max_hom_gap,
            "bound": d.bound, "bound_holds": d.bound_holds, "tv_identity_holds": tv.identity_holds,
            "tv_distance": tv.distance, "tv_bound_holds": tv.bound_holds, "ok": ok}, 0 if ok else 1


def _certificate(c) -> dict:
    if c.member:
        return {"member": True, "weights": list(c.weights)}
    return {"member": False, "separating_functional": list(c.separating_functional),
            "separation_value": c.separation_value}


def cmd_extendable(a):
    p = dist_arg(a.input).validate()
    if a.from_ is not None and a.from_ != p.n:
        raise UsageError(f"--from {a.from_} but the distribution is on {p.n} nodes")
    if not p.n < a.to <= 7:
        raise UsageError(f"--to must satisfy {p.n} < n <= 7")
    c = exch_geometry.extendable(p, a.to)
    pts = [v.mass for v in exch_geometry.marginal_polytope_vertices(a.to, p.n)]
    return {"m": p.n, "n": a.to, **_certificate(c), "certificate_verified": c.verify(p.mass, pts)}, 0


def cmd_witness(a):
    try:
        w = exch_geometry.strict_inclusion_witness(a.m, a.n1, a.n2)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return {"m": a.m, "n1": a.n1, "n2": a.n2, "certified": w.certified,
            "witness_not_extendable": not w.not_extendable.member,
            "marginal_is_vertex": w.marginal_is_vertex,
            "marginal_outside": not w.marginal_outside.member,
            "rows": _class_rows(a.m, w.marginal.mass, "marginal_mass")}, 0 if w.certified else 1


def cmd_dissociated_check(a):
    z = z_arg(a.input)
    ok, worst = dissociated.is_dissociated(z, a.tol)
    return {"n": z.n, "dissociated": ok, "max_violation": worst}, 0 if ok else 1


def cmd_mle(a):
    g = graph_arg(a.graph)
    if g.n != 4 and not (g.n == 5 and a.allow_5):
        raise UsageError("the MLE is verified for 4-node graphs only (5 is experimental; use --allow-5)")
    r = dissociated.mle(g, starts=a.starts, seed=a.seed, tol=a.tol, threads=a.threads)
    model = dissociated.dissociated_model(g.n)
    cat = build_catalog(g.n)
    free_rows = [{"class": class_name(cat[i]), "z": float(v)} for i, v in zip(model.free, r.free_hat)]
    out = {"observed": class_name(cat[r.observed_class]), "likelihood": r.likelihood,
           "log_likelihood": r.log_likelihood, "face_dim": r.face_dim,
           "active_constraints": [class_name(cat[i]) for i in r.active_constraints],
           "starts_used": r.starts_used, "converged_fraction": r.converged_fraction,
           "p_mass": {class_name(c): float(m) for c, m in zip(cat, r.p_mass)},
           "rows": free_rows}
    if r.family is not None:
        out["family"] = {"direction": list(r.family.direction), "lo": r.family.lo, "hi": r.family.hi}
    if r.face_dim >= 2:
        out["face_vertices"] = [list(v) for v in r.face_vertices]
    return out, 0


def cmd_verify_tables(a):
    t1 = tables.verify_table1()
    t1_ok = all(ce is None or (ce == e and cd == d) for _, e, d, ce, cd in t1)
    f1_ok = tables.verify_figure1()
    rows = []
    for rc in tables.verify_mle_tables(starts=a.starts, seed=a.seed, threads=a.threads):
        rows.append({"observed": rc.observed, "kind": rc.kind, "ok": rc.ok,
                     "likelihood": rc.likelihood, "log_lik_err": rc.log_likelihood_error,
                     "cell_err": rc.max_cell_error, "notes": "; ".join(rc.notes)})
    ok = t1_ok and f1_ok and all(r["ok"] for r in rows)
    return {"table1": "PASS" if t1_ok else "FAIL", "figure1": "PASS" if f1_ok else "FAIL",
            "tables2_3": "PASS" if all(r["ok"] for r in rows) else "FAIL",
            "result": "PASS" if ok else "FAIL", "rows": rows}, 0 if ok else 1


def cmd_sample_graphon(a):
    w = graphon_arg(a.graphon)
    if a.nodes < 2:
        raise UsageError("--nodes must be >= 2")
    g = sampling_verify.sample_graphon(w, a.nodes, seed=a.seed)
    return {"n": g.n, "edges": g.edge_count, "graph6": to_graph6(g),
            "edge_list": to_edgelist_text(g)}, 0


def cmd_convergence_report(a):
    w = graphon_arg(a.graphon)
    r = sampling_verify.convergence_report(w, a.motifs.split(","), _int_list(a.n_grid), a.reps,
                                           seed=a.seed, samples=a.samples, threads=a.threads)
    rows = [{"motif": to_edgelist_text(x.motif), "n": x.n, "mean": x.mean, "se": x.se,
             "target": x.target, "bound": float(x.bound), "exact": x.exact, "ok": x.ok}
            for x in r.rows]
    return {"ok": r.ok, "rows": rows}, 0 if r.ok else 1


def cmd_psd_check(a):
    motifs = a.motifs.split(",")
    if a.z:
        zv = z_arg(a.z)
        z = {c.core: v for c, v in zip(zv.catalog, zv.z)}
    else:
        w = graphon_arg(a.graphon)
        z = sampling_verify.graphon_mobius(w, sampling_verify.union_closure(motifs))
    try:
        rep = sampling_verify.reflection_positivity_check(z, motifs, a.tol)
    except sampling_verify.MissingUnions as e:
        raise UsageError(str(e)) from None
    return {"ok": rep.ok, "min_eigenvalue": rep.min_eigenvalue,
            "matrix": rep.matrix.tolist()}, 0 if rep.ok else 1


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "pretty", "csv"], default="pretty")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--output", help="write results here instead of stdout")

    p = argparse.ArgumentParser(prog="exchgraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("catalog", cmd_catalog, "isomorphism classes on n nodes")
    sp.add_argument("--nodes", "-n", type=int, required=True)
    sp = add("density", cmd_density, "exact subgraph density")
    sp.add_argument("--kind", choices=[k.value for k in densities.DensityKind], required=True)
    sp.add_argument("--motif", required=True)
    sp.add_argument("--graph", required=True)
    sp = add("mobius", cmd_mobius, "Möbius parameters of an exchangeable distribution")
    sp.add_argument("--input", "--dist", "-i", dest="input", required=True)
    sp = add("inverse-mobius", cmd_inverse_mobius, "probabilities from Möbius parameters")
    sp.add_argument("--input", "--dist", "-i", dest="input", required=True)
    sp = add("marginal", cmd_marginal, "marginal on the first m nodes")
    sp.add_argument("--input", "--dist", "-i", dest="input", required=True)
    sp.add_argument("--to", "-m", type=int, required=True)
    sp = add("definetti-check", cmd_definetti_check, "finite de Finetti identity and bounds")
    sp.add_argument("--input", "--dist", "-i", dest="input", required=True)
    sp.add_argument("--to", "-m", dest="m", type=int, required=True)
    sp = add("extendable", cmd_extendable, "is a distribution the marginal of a larger one")
    sp.add_argument("--input", "--dist", "-i", dest="input", required=True)
    sp.add_argument("--from", dest="from_", type=int, help="size of the input distribution (checked)")
    sp.add_argument("--to", "-n", type=int, required=True)
    sp = add("witness", cmd_witness, "certify a strict inclusion of marginal polytopes")
    sp.add_argument("-m", type=int, default=4)
    sp.add_argument("--n1", type=int, default=5)
    sp.add_argument("--n2", type=int, default=6)
    sp = add("dissociated-check", cmd_dissociated_check, "test z(F1 F2) = z(F1) z(F2)")
    sp.add_argument("--input", "--dist", "-i", dest="input", required=True)
    sp.add_argument("--tol", type=float, default=0.0)
    sp = add("mle", cmd_mle, "maximum likelihood on the dissociated manifold")
    sp.add_argument("--graph", "--observed", "-g", dest="graph", required=True)
    sp.add_argument("--starts", type=int, default=256)
    sp.add_argument("--tol", type=float, default=1e-9, help="local solver tolerance")
    sp.add_argument("--allow-5", action="store_true")
    sp = add("verify-tables", cmd_verify_tables, "reproduce the golden tables")
    sp.add_argument("--starts", type=int, default=256)
    sp = add("sample-graphon", cmd_sample_graphon, "draw G[n] from a graphon")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--nodes", "-n", type=int, required=True)
    sp = add("convergence-report", cmd_convergence_report, "t_hom(F, G[n]) against z(F)")
    sp.add_argument("--graphon", required=True)
    sp.add_argument("--motifs", default="edge,triangle,2K2")
    sp.add_argument("--n-grid", default="10,50,200")
    sp.add_argument("--reps", type=int, default=200)
    sp.add_argument("--samples", type=int, default=100_000)
    sp = add("psd-check", cmd_psd_check, "reflection positivity of z(F_i + F_j)")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--graphon")
    src.add_argument("--z")
    sp.add_argument("--motifs", default="empty,edge,P3")
    sp.add_argument("--tol", type=float, default=1e-10)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    config = {k: v for k, v in vars(a).items() if k != "fn"}
    try:
        if a.threads < 1:
            raise UsageError("--threads must be >= 1")
        payload, code = a.fn(a)
    except (UsageError, FormatError, ValueError, MemoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if a.output:
        buf = io.StringIO()
        render(payload, a.format, config, buf)
        Path(a.output).write_text(buf.getvalue())
    else:
        render(payload, a.format, config, sys.stdout)
    return code


def main() -> None:
    sys.exit(run())

"""Command-line front end: ``tclab <subcommand> ...``.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 invalid input.
Rationals are printed as "p/q" strings; floats appear only in numeric
residuals and in CSV sample exports.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import json
import re
import sys
import time
from fractions import Fraction

from . import cohom1, curvature, hermitian, liealg, polytope, potential, torus4d
from .exactalg import q_str, to_q


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def _params(items) -> dict:
    out = {}
    for it in items or []:
        k, sep, v = it.partition("=")
        if not sep:
            raise InputError(f"--param expects key=value, got {it!r}")
        out[k.strip()] = to_q(v.strip())
    return out


def _interval(text: str) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise InputError("--interval expects lo,hi")
    return tuple(to_q(p.strip()) for p in parts)


def _points(text: str, n: int) -> list:
    pts = []
    for chunk in text.split(";"):
        if chunk.strip():
            p = tuple(to_q(v.strip()) for v in chunk.split(","))
            if len(p) != n:
                raise InputError(f"point {chunk!r} has wrong dimension")
            pts.append(p)
    return pts


def lattice_points(P: polytope.Polytope, k: int) -> list:
    """Interior points of the k x ... x k lattice on the bounding box."""
    verts = P.vertices()
    lo = [min(v[i] for v in verts) for i in range(P.n)]
    hi = [max(v[i] for v in verts) for i in range(P.n)]
    axes = [[lo[i] + (hi[i] - lo[i]) * Fraction(j + 1, k + 1) for j in range(k)] for i in range(P.n)]
    return [p for p in itertools.product(*axes) if P.is_interior(p)]


def _fiber_is_symbolic(text: str) -> bool:
    try:
        cohom1.FiberData.parse(text)
        return False
    except (ValueError, ZeroDivisionError, TypeError):
        return any(ch.isalpha() and ch not in "dba" for ch in text.replace("d=", "").replace("b=", "")
                   .replace("a=", ""))


def _symbolic_entries(text: str) -> list:
    entries = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        kv = dict(part.split("=", 1) for part in chunk.split(","))
        entries.append((int(kv["d"]), kv["b"].strip(), kv["a"].strip()))
    return entries


# ---------------------------------------------------------------------------
# sample export


def _fmt(v) -> str:
    return f"{float(v):.15g}"


def export_samples(solution, grid, path, fiber=None, interval=None) -> int:
    """Write CSV samples of a solution; returns the number of data rows.

    One-dimensional solutions give columns x, h, S, A_1, ...; a Potential
    gives x1..xn, S.  ``grid`` is a point count over the interval (or the
    polytope lattice size) or an explicit list of points.
    """
    rows = []
    if isinstance(solution, potential.Potential):
        P = solution.polytope
        pts = grid if isinstance(grid, list) else (lattice_points(P, grid) if grid else [])
        header = [f"x{i + 1}" for i in range(P.n)] + ["S"]
        if P.n == 2:
            header[:2] = ["x", "y"]
        for p in pts:
            rows.append([_fmt(v) for v in p] + [_fmt(curvature.abreu_scalar(solution, p))])
    else:
        h = solution.h
        if fiber is None:
            fiber = getattr(solution, "fiber", None) or getattr(solution, "profile", None)
        if interval is None:
            interval = getattr(solution, "interval", (Fraction(0), Fraction(1)))
        x0, x1 = interval
        if isinstance(grid, list):
            xs = [to_q(v) for v in grid]
        elif grid == 0:
            xs = []
        elif grid == 1:
            xs = [(x0 + x1) / 2]
        else:
            xs = [x0 + (x1 - x0) * Fraction(j, grid - 1) for j in range(grid)]
        if isinstance(fiber, cohom1.FiberData):
            S = cohom1.scalar_of_h(fiber, h)
            As = [fiber.A(j) for j in range(len(fiber.entries))]
        elif isinstance(fiber, hermitian.FiberProfile):
            S = hermitian.wang_scalar(fiber, h)
            As = [A for _, A, _ in fiber.entries]
        else:
            raise InputError("solution carries no fiber data")
        header = ["x", "h", "S"] + [f"A_{j + 1}" for j in range(len(As))]
        for x in xs:
            try:
                hv, sv = h(x), S(x)
            except ZeroDivisionError:
                hv = sv = float("nan")
            rows.append([_fmt(x), _fmt(hv), _fmt(sv)] + [_fmt(A(x)) for A in As])
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None
    return len(rows)


# ---------------------------------------------------------------------------
# subcommands; each returns (results, certificates, ok)


def _load_potential(args):
    if args.potential:
        try:
            with open(args.potential) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read potential: {exc}") from None
        return potential.Potential.from_json(data)
    if args.catalog:
        return potential.potential_catalog(args.catalog, **_params(args.param))
    raise InputError("give --potential FILE or --catalog NAME")


def cmd_curvature(args):
    pot = _load_potential(args)
    pts = _points(args.points, pot.n) if args.points else lattice_points(pot.polytope, args.grid)
    lam = to_q(args.einstein) if args.einstein is not None else None
    out = []
    ok = True
    for p in pts:
        m = potential.metric_at(pot, p)
        S = curvature.abreu_scalar(m)
        S2 = curvature.abreu_scalar_simplified(m)
        div = curvature.adjugate_divergence(m)
        res = {"S_minus_S_simplified": q_str(S - S2), "adjugate_div_max": q_str(curvature.max_abs(div))}
        good = S == S2 and all(v == 0 for v in div)
        if lam is not None:
            e = curvature.max_abs(curvature.einstein_residual(m, lam, None))
            res["einstein_max"] = q_str(e)
            good = good and e == 0
        ok = ok and good
        out.append({
            "point": [q_str(v) for v in p],
            "S": q_str(S),
            "S_simplified": q_str(S2),
            "adjugate_div": [q_str(v) for v in div],
            "residuals": res,
        })
    results = {"potential": pot.name, "n": pot.n, "samples": out}
    certs = {}
    if args.extremal:
        fit = curvature.extremal_fit(pot, pts)
        results["extremal_fit"] = {"alpha": [q_str(v) for v in fit.alpha], "beta": q_str(fit.beta),
                                   "max_residual": q_str(fit.max_residual), "exact": fit.exact}
        ok = ok and fit.exact
    if args.csv:
        certs["csv_rows"] = export_samples(pot, pts, args.csv)
    return results, certs, ok


def cmd_extremal(args):
    interval = _interval(args.interval)
    if _fiber_is_symbolic(args.fiber):
        if not args.csc:
            raise InputError("symbolic fiber data needs --csc")
        loc = cohom1.csc_locus(_symbolic_entries(args.fiber), interval)
        loc = {k: v for k, v in loc.items() if not k.endswith("_expr")}
        return {"csc_locus": loc}, {}, True
    w = cohom1.FiberData.parse(args.fiber)
    results = {"fiber": w.to_json()}
    certs = {}
    ok = True
    if args.einstein is not None:
        sol = cohom1.einstein_h(w, args.einstein, interval)
        results["einstein"] = sol.to_json()
        S = cohom1.scalar_of_h(w, sol.h)
        results["einstein"]["S"] = S.to_json()
        ok = sol.smooth_left and sol.smooth_right
    else:
        sol = cohom1.solve_compact_extremal(w, interval)
        results["solution"] = sol.to_json()
        results["alpha"] = q_str(sol.alpha)
        results["beta"] = q_str(sol.beta)
        if args.csc:
            results["csc"] = sol.alpha == 0
        certs["positivity"] = sol.positivity.to_json()
        ok = sol.positivity.ok and sol.smooth_left and sol.smooth_right
    if args.csv:
        certs["csv_rows"] = export_samples(sol, args.samples, args.csv, fiber=w, interval=interval)
    return results, certs, ok


def cmd_hermitian(args):
    certs = {}
    fiber, interval = None, (Fraction(0), Fraction(1))
    if args.family:
        if args.family != "hirzebruch":
            raise InputError(f"unknown family {args.family!r}")
        mem = hermitian.hirzebruch_hermitian_family(args.q, to_q(args.l))
        target = mem
        interval = (Fraction(-1), Fraction(1))
        fiber = hermitian.FiberProfile(((2, mem.A1, mem.b),))
        results = {"member": mem.to_json()}
        if mem.positivity is not None:
            certs["positivity"] = mem.positivity.to_json()
        ok = mem.valid
    elif args.compact_example is not None:
        c = to_q(args.compact_example)
        bracket = hermitian.compact_example_bracket(c)
        sol = hermitian.solve_compact_hermitian(hermitian.compact_example_profile(c), bracket)
        target = sol
        results = {"solution": sol.to_json()}
        certs["positivity"] = sol.positivity.to_json()
        ok = sol.positivity.ok and all(abs(float(v)) < 1e-9 for v in sol.residuals.values())
    elif args.profile:
        prof = hermitian.FiberProfile.parse(args.profile)
        results = {"profile": prof.to_json(), "mu_sum": hermitian.mu_sum(prof).to_json()}
        if args.beta is None:
            raise InputError("--profile needs --beta (noncompact solve)")
        sol = hermitian.noncompact_hermitian(prof, to_q(args.beta))
        fiber = prof
        target = sol
        results["noncompact"] = sol.to_json()
        ok = sol.accepted
    else:
        raise InputError("give --family, --compact-example or --profile")
    if args.csv:
        certs["csv_rows"] = export_samples(target, args.samples, args.csv, fiber=fiber, interval=interval)
    return results, certs, ok


def cmd_futaki(args):
    if args.fiber:
        w = cohom1.FiberData.parse(args.fiber)
        F = cohom1.futaki_fiberwise(w, _interval(args.interval))
        return {"fiber": w.to_json(), "futaki": q_str(F), "vanishes": F == 0}, {}, True
    if args.polytope_file:
        try:
            with open(args.polytope_file) as fh:
                P = polytope.Polytope.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise InputError(f"cannot read polytope: {exc}") from None
    elif args.polytope:
        P = polytope.catalog(args.polytope, **_params(args.param))
    else:
        raise InputError("give --polytope NAME, --polytope-file FILE or --fiber DATA")
    F = polytope.futaki_toric(P)
    vol = polytope.moment_integral(P, (0,) * P.n)
    return {
        "polytope": P.to_json(),
        "volume": q_str(vol),
        "futaki": [q_str(v) for v in F],
        "vanishes": all(v == 0 for v in F),
    }, {}, True


def cmd_diag(args):
    dec = liealg.parse_orbit(args.orbit)
    val = dec.validate()
    if not val["ok"]:
        raise InputError("invalid decomposition: " + "; ".join(val["issues"]))
    v = liealg.diagonalizability_verdict(dec)
    return {
        "orbit": args.orbit,
        "algebra": dec.algebra,
        "summand_dims": [s.dim for s in dec.summands],
        "summand_types": [s.type for s in dec.summands],
        "verdict": v.to_json(),
    }, {"decomposition": val}, True


def cmd_t2(args):
    if args.orbit:
        inv = torus4d.orbit_invariants(torus4d.parse_orbit_pairs(args.orbit))
        return {"orbit": args.orbit, "invariants": inv.to_json()}, {}, True
    if not args.example:
        raise InputError("give --example NAME or --orbit PAIRS")
    tm = torus4d.metric_catalog(args.example)
    check = args.check
    tol = args.tol
    res = {"example": tm.name, "check": check}
    if check == "einstein":
        r = torus4d.torus_einstein_residual(tm, args.grid)
        res.update(r.to_json())
        ok = r.max_residual < tol
    elif check == "rhoq":
        if not tm.is_isothermal():
            try:
                tm = torus4d.metric_catalog(args.example + "-iso")
            except torus4d.TorusError:
                raise InputError(f"{args.example} has no isothermal form in the catalog") from None
        r = torus4d.rhoQ_holomorphicity(tm, args.grid)
        res.update({"isothermal_example": tm.name, "grid": args.grid, "max_dbar_rhoQ": r})
        ok = r < tol
    elif check == "bolts":
        b = torus4d.bolt_area_identity(tm)
        res.update(b.to_json())
        ok = b.rel_error < tol
    elif check == "gravity":
        sides = []
        ok = True
        for coord, value, pair in tm.bolts:
            sg = torus4d.surface_gravity(tm, (coord, value), pair)
            sides.append({"coord": ["R", "theta"][coord], "value": value, "pair": list(pair),
                          "kappa2_mean": sg.mean, "spread": sg.spread, "constant": sg.constant})
            ok = ok and sg.constant
        res["bolts"] = sides
    else:
        raise InputError(f"unknown check {check!r}")
    return res, {}, ok


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tclab", description="Kaehler toric and cohomogeneity-one curvature toolkit")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.add_argument("--json", metavar="PATH", help="also write the JSON report to PATH")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("curvature", help="scalar curvature of a symplectic potential")
    c.add_argument("--potential", help="potential JSON file")
    c.add_argument("--catalog", help="catalog potential name")
    c.add_argument("--param", action="append", help="catalog parameter key=value")
    c.add_argument("--grid", type=int, default=3)
    c.add_argument("--points", help="explicit points 'x1,y1;x2,y2'")
    c.add_argument("--einstein", help="check the Einstein equation with this lambda")
    c.add_argument("--extremal", action="store_true", help="fit S to an affine function")
    c.add_argument("--csv", help="write x, S samples")
    c.set_defaults(func=cmd_curvature)

    e = sub.add_parser("extremal", help="cohomogeneity-one extremal / Einstein solutions")
    e.add_argument("--fiber", required=True)
    e.add_argument("--interval", default="-1,1")
    e.add_argument("--csc", action="store_true")
    e.add_argument("--einstein", help="Einstein constant lambda")
    e.add_argument("--csv")
    e.add_argument("--samples", type=int, default=101)
    e.set_defaults(func=cmd_extremal)

    h = sub.add_parser("hermitian", help="Hermitian (non-Kaehler) solutions")
    h.add_argument("--family", help="named family (hirzebruch)")
    h.add_argument("--q", type=int, default=0)
    h.add_argument("--l", default="0")
    h.add_argument("--profile", help="'d=2,quad(e,l,t),b=1;d=2,lin(b,a)'")
    h.add_argument("--beta")
    h.add_argument("--compact-example", help="solve the compact two-entry example for this c")
    h.add_argument("--csv")
    h.add_argument("--samples", type=int, default=101)
    h.set_defaults(func=cmd_hermitian)

    f = sub.add_parser("futaki", help="Futaki invariant")
    f.add_argument("--polytope")
    f.add_argument("--polytope-file")
    f.add_argument("--param", action="append")
    f.add_argument("--fiber")
    f.add_argument("--interval", default="-1,1")
    f.set_defaults(func=cmd_futaki)

    d = sub.add_parser("diag", help="diagonalizability span test")
    d.add_argument("--orbit", required=True, help="stiefel:N | flag:N1,N2 | su3u1 | su2 | t3")
    d.set_defaults(func=cmd_diag)

    t = sub.add_parser("t2", help="T^2-symmetric four-manifolds")
    t.add_argument("--example", help=", ".join(torus4d.METRIC_NAMES))
    t.add_argument("--grid", type=int, default=32)
    t.add_argument("--check", default="einstein", choices=["einstein", "rhoq", "bolts", "gravity"])
    t.add_argument("--tol", type=float, default=1e-6)
    t.add_argument("--orbit", help="'(1,0);(0,1)'")
    t.add_argument("--invariants", action="store_true")
    t.set_defaults(func=cmd_t2)
    return p


_VALUE_FLAGS = {"--interval", "--beta", "--l", "--einstein", "--compact-example", "--points", "--q", "--param"}


def _attach_negative_values(argv: list) -> list:
    """Turn '--interval -1,1' into '--interval=-1,1' so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and re.match(r"-[0-9.]", argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _digest(args) -> str:
    d = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "timing", "json")}
    return hashlib.sha256(json.dumps(d, sort_keys=True, default=str).encode()).hexdigest()


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        results, certs, ok = args.func(args)
    except (InputError, ValueError, ZeroDivisionError, KeyError) as exc:
        print(f"tclab {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": ["tclab"] + argv,
        "inputs_digest": _digest(args),
        "status": "pass" if ok else "fail",
        "results": results,
        "certificates": certs,
    }
    if args.timing:
        report["wall_time"] = round(time.perf_counter() - t0, 6)
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=True)
    print(text)
    if args.json:
        try:
            with open(args.json, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"tclab: cannot write {args.json}: {exc}", file=sys.stderr)
            return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver tying the modules together.

Subcommand groups:

  modular  gram | minima | measure | hecke | congruence
  poly     gram | minima | sweep | factor
  cheby    eval | verify | bound
  measure  serre | ks | equi

Mathematical inputs (disc centers, radii) are exact rationals parsed from
"p/q" strings; nothing numeric goes through float parsing.  Results are
cached on disk keyed by (operation, canonical parameters, code version)
and artifact payloads are byte-identical across reruns.

Exit codes: 0 success, 2 usage error, 3 budget exceeded (partial
artifacts are flagged), 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from mpmath import mp, mpf

from . import capacity, chebyshev, measures, petersson
from .cache import CacheKey, ResultCache, canonical_json
from .errors import (
    EnumerationBudgetError,
    FormulaMismatchError,
    PrecisionExhaustedError,
    SlopesError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4


@dataclass
class RunConfig:
    precision_bits: int = 256
    q_precision: str = "auto"      # "auto" or a fixed integer as string
    scheme: str = "A"
    enum_dim_cap: int = 64
    time_budget_s: float = 7200.0
    bkz_block: int = 20
    cache_dir: str = ""
    out_dir: str = "slopes-out"
    fmt: str = "json"

    def __post_init__(self):
        if self.precision_bits < 64:
            raise SlopesError("precision_bits must be >= 64")
        if self.time_budget_s <= 0:
            raise SlopesError("time budget must be positive")


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational 'p/q': {text!r}") from e


def _degree_list(text: str):
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(lo, hi + 1, step))
    return [int(x) for x in text.split(",")]


def _write_artifact(cfg: RunConfig, name: str, payload) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    if name.endswith(".json"):
        path.write_text(canonical_json({"schema": 1, **payload}) + "\n")
    else:
        path.write_text(payload)
    return path


def _cache(cfg: RunConfig) -> ResultCache:
    return ResultCache(cfg.cache_dir or None)


# ---------------------------------------------------------------------------
# modular subcommands
# ---------------------------------------------------------------------------


def _lattice_payload(k, cfg):
    cache = _cache(cfg)
    key = CacheKey("modular-gram", {
        "k": k, "prec_bits": cfg.precision_bits, "scheme": cfg.scheme,
        "q_precision": cfg.q_precision,
    })

    def compute():
        lat = petersson.gram_matrix(k, cfg.precision_bits, cfg.scheme)
        return petersson.lattice_to_payload(lat)

    return cache.get_or_compute(key, compute)


def _restore_lattice(payload, cfg):
    return petersson.lattice_from_payload(payload)


def cmd_modular(args, cfg: RunConfig) -> int:
    k = args.k
    if k < 1:
        print("weight index k must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.sub == "hecke":
        hd = petersson.hecke_operator(args.p, k)
        tr = sum(hd.matrix[i][i] for i in range(k))
        payload = {
            "p": args.p, "k": k, "matrix": hd.matrix,
            "charpoly_ascending": hd.charpoly, "trace": tr,
        }
        if k == 2:
            det = (hd.matrix[0][0] * hd.matrix[1][1]
                   - hd.matrix[0][1] * hd.matrix[1][0])
            payload["det"] = det
            payload["charpoly_discriminant"] = tr * tr - 4 * det
        path = _write_artifact(cfg, f"hecke-p{args.p}-k{k}.json", payload)
        print(f"T_{args.p} on S_{12*k}: trace {tr}; artifact {path}")
        return EXIT_OK

    payload = _lattice_payload(k, cfg)
    lat = _restore_lattice(payload, cfg)
    with mp.workprec(cfg.precision_bits + 64):
        if args.sub == "gram":
            path = _write_artifact(cfg, f"gram-k{k}-{cfg.scheme}.json", payload)
            print(f"Gram k={k} ({cfg.scheme}, {cfg.precision_bits} bits): "
                  f"error bound {payload['error_bound_rel']}; artifact {path}")
            return EXIT_OK
        spec = lat.spectrum()
        if args.sub == "minima":
            rows = []
            for lam, wit in zip(spec.values, spec.witnesses):
                ordv = min(i + 1 for i, c in enumerate(wit) if c)
                margin = (petersson.ell(mpf(ordv) / k) + mp.log(12 * k) / k
                          - lam / k)
                rows.append({
                    "lambda": mp.nstr(lam, 20),
                    "lambda_over_k": mp.nstr(lam / k, 20),
                    "witness": list(wit),
                    "ord": ordv,
                    "ell_bound_margin": mp.nstr(margin, 10),
                })
            path = _write_artifact(cfg, f"minima-k{k}.json",
                                   {"k": k, "slopes": rows})
            print(f"k={k}: {len(rows)} successive maxima; artifact {path}")
            for i, r in enumerate(rows):
                print(f"  lambda_{i+1}/k = {r['lambda_over_k']}  "
                      f"(ord {r['ord']}, ell-margin {r['ell_bound_margin']})")
            return EXIT_OK
        if args.sub == "measure":
            if args.L:
                em = measures.filtered_measure(lat, args.L)
                name = f"measure-k{k}-L{args.L}"
            else:
                em = measures.empirical_measure(spec)
                name = f"measure-k{k}"
            rows = [[mp.nstr(mpf(x), 20), str(m)] for x, m in em.atoms]
            path = _write_artifact(cfg, name + ".json", {"atoms": rows})
            print(f"{name}: {len(rows)} atoms, total mass "
                  f"{em.total_mass()}; artifact {path}")
            return EXIT_OK
        if args.sub == "congruence":
            if args.vector:
                vec = [int(x) for x in args.vector.split(",")]
            else:
                vec = list(spec.witnesses[0])
            res = petersson.congruence_test(vec, k)
            payload = {
                "k": k, "vector": vec, "verdict": res.verdict,
                "detail": res.detail,
                "eigencoord_poly": [str(c) for c in res.eigencoord_poly or []],
            }
            path = _write_artifact(cfg, f"congruence-k{k}.json", payload)
            print(f"k={k} vector {vec}: {res.verdict} ({res.detail}); "
                  f"artifact {path}")
            return EXIT_OK
    print(f"unknown modular subcommand {args.sub}", file=sys.stderr)
    return EXIT_USAGE


# ---------------------------------------------------------------------------
# poly subcommands
# ---------------------------------------------------------------------------


def _metric_from_args(args) -> capacity.DiscMetric:
    r = args.radius
    return capacity.DiscMetric(args.center, r * r, getattr(args, "norm", "l2-boundary"))


def cmd_poly(args, cfg: RunConfig) -> int:
    if args.sub == "gram":
        g = capacity.disc_gram(_metric_from_args(args), args.n)
        payload = {"center": str(args.center), "radius": str(args.radius),
                   "n": args.n,
                   "entries": [[str(x) for x in row] for row in g.entries]}
        path = _write_artifact(cfg, f"poly-gram-n{args.n}.json", payload)
        print(f"disc Gram n={args.n}: exact rational, artifact {path}")
        return EXIT_OK
    if args.sub == "minima":
        mode = "heuristic" if (args.n > 30 or args.heuristic) else "exact"
        try:
            res = capacity.min_poly(_metric_from_args(args), args.n, mode=mode)
        except EnumerationBudgetError as e:
            print(f"enumeration budget exhausted: {e}", file=sys.stderr)
            return EXIT_BUDGET
        with mp.workprec(cfg.precision_bits):
            lam = -mp.log(mpf(res.norm_sq.numerator) / res.norm_sq.denominator) / 2
            payload = {
                "degree": args.n, "mode": mode,
                "poly": list(res.poly.coeffs),
                "norm_sq": str(res.norm_sq),
                "lambda": mp.nstr(lam, 20),
                "lambda_over_n": mp.nstr(lam / args.n, 20),
                "certified": res.certified,
            }
        path = _write_artifact(cfg, f"poly-min-n{args.n}.json", payload)
        print(f"n={args.n} ({mode}): lambda/n = {payload['lambda_over_n']}; "
              f"artifact {path}")
        return EXIT_OK
    if args.sub == "sweep":
        degrees = args.degrees
        rows = []
        for entry in capacity.m_sequence(_metric_from_args(args), degrees,
                                         mode="heuristic"):
            rows.append({
                "degree": entry["degree"],
                "poly": list(entry["poly"].coeffs),
                "l2_norm_sq": str(entry["l2_norm_sq"]),
                "sup_lo": mp.nstr(entry["sup_lo"], 15),
                "sup_hi": mp.nstr(entry["sup_hi"], 15),
                "root_lo": mp.nstr(entry["root_lo"], 15),
                "root_hi": mp.nstr(entry["root_hi"], 15),
            })
        # Fekete check on the computed table
        payload = {"center": str(args.center), "radius": str(args.radius),
                   "rows": rows}
        path = _write_artifact(cfg, "poly-sweep.json", payload)
        print(f"{'n':>5} {'m(n)^(1/n) in':>35}")
        for r in rows:
            print(f"{r['degree']:>5} [{r['root_lo']}, {r['root_hi']}]")
        print(f"artifact {path}")
        return EXIT_OK
    if args.sub == "factor":
        coeffs = [int(x) for x in args.coeffs.split(",")]
        pool = []
        if args.pool and Path(args.pool).exists():
            pool = [capacity.IntPoly(c) for c in json.loads(Path(args.pool).read_text())]
        fd = capacity.factorize(capacity.IntPoly(coeffs), pool)
        payload = {
            "input": coeffs,
            "factors": [[list(q.coeffs), m] for q, m in fd.factors],
            "cofactor": list(fd.cofactor.coeffs) if fd.cofactor else None,
            "content": fd.content, "unit": fd.unit,
        }
        path = _write_artifact(cfg, "poly-factor.json", payload)
        if args.pool:
            newpool = sorted({tuple(q.coeffs) for q, _ in fd.factors}
                             | {tuple(p.coeffs) for p in pool})
            Path(args.pool).write_text(json.dumps([list(t) for t in newpool]))
        print(f"factors: {[(q.pretty(), m) for q, m in fd.factors]}"
              + (f" cofactor deg {fd.cofactor.degree}" if fd.cofactor else "")
              + f"; artifact {path}")
        return EXIT_OK
    return EXIT_USAGE


# ---------------------------------------------------------------------------
# cheby subcommands
# ---------------------------------------------------------------------------


def cmd_cheby(args, cfg: RunConfig) -> int:
    with mp.workprec(cfg.precision_bits):
        if args.sub == "eval":
            r = mpf(args.r.numerator) / args.r.denominator
            fam = args.family
            lines = ["alpha,value"]
            header = {"family": fam, "r": str(args.r), "grid": args.grid}
            for i in range(args.grid + 1):
                a = mpf(i) / args.grid
                if fam == "boundary":
                    v = chebyshev.cheb_boundary(a, r)
                elif fam == "centered":
                    v = chebyshev.cheb_centered(a, r)
                else:
                    print(f"unknown family {fam}", file=sys.stderr)
                    return EXIT_USAGE
                lines.append(f"{mp.nstr(a, 12)},{mp.nstr(v, 15)}")
            body = json.dumps(header) + "\n" + "\n".join(lines) + "\n"
            path = _write_artifact(cfg, f"cheby-{fam}.csv", body)
            vmax = max(mpf(l.split(",")[1]) for l in lines[1:])
            print(f"family {fam}, r={args.r}: max over grid {mp.nstr(vmax, 10)}; "
                  f"artifact {path}")
            return EXIT_OK
        if args.sub == "verify":
            bad = []
            for n in range(0, args.nmax + 1):
                for a in range(0, n + 1):
                    lhs = chebyshev.f_finite_sq_rational(n, a, args.r * args.r)
                    rhs = chebyshev.f_oracle_sq_rational(n, a, args.r * args.r)
                    if lhs != rhs:
                        bad.append((n, a))
            jac_ok = True
            try:
                for n in range(0, min(args.nmax, 12) + 1):
                    for a in range(0, n + 1):
                        chebyshev.jacobi_basis(n, a, verify=True)
            except FormulaMismatchError as e:
                jac_ok = False
                bad.append(("jacobi", str(e)))
            if bad:
                print(f"VERIFY FAILED: {bad}", file=sys.stderr)
                return EXIT_VERIFY
            print(f"F_finite == F_oracle exactly for n <= {args.nmax}; "
                  f"Jacobi value/norm identities exact for n <= {min(args.nmax, 12)}")
            return EXIT_OK
        if args.sub == "bound":
            r = mpf(args.r.numerator) / args.r.denominator
            if args.family == "boundary":
                loc = chebyshev.boundary_local(r)
            elif args.family == "centered":
                loc = chebyshev.centered_local(r)
            else:
                print(f"unknown family {args.family}", file=sys.stderr)
                return EXIT_USAGE
            gt = chebyshev.global_transform([(loc, 1)])
            hb = chebyshev.height_bound(gt, args.n)
            payload = {"family": args.family, "r": str(args.r), "n": args.n,
                       "bound": mp.nstr(hb, 20),
                       "bound_over_n": mp.nstr(hb / args.n, 20)}
            path = _write_artifact(cfg, "cheby-bound.json", payload)
            print(f"height bound: lambda(s) <= {payload['bound']} "
                  f"(per degree {payload['bound_over_n']}); artifact {path}")
            return EXIT_OK
    return EXIT_USAGE


# ---------------------------------------------------------------------------
# measure subcommands
# ---------------------------------------------------------------------------


def cmd_measure(args, cfg: RunConfig) -> int:
    if args.sub == "serre":
        data = json.loads(Path(args.infile).read_text())
        rows = []
        for row in data["rows"]:
            fd = capacity.FactoredDivisor(
                [(capacity.IntPoly(c), m) for c, m in row["factors"]],
                capacity.IntPoly(row["cofactor"]) if row.get("cofactor") else None)
            rows.append((row["degree"], fd))
        dec = measures.serre_decompose(rows, window=args.window)
        payload = {
            "window": dec.window,
            "atomic": [[q.pretty(), str(c)] for q, c in dec.atomic],
            "diffuse": str(dec.diffuse),
            "raw_fractions": dec.raw_fractions,
        }
        path = _write_artifact(cfg, "serre.json", payload)
        print("atomic coefficients (window =", dec.window, "):")
        for q, c in dec.atomic:
            print(f"  c[{q.pretty()}] = {c} ~= {float(c):.4f}")
        print(f"  diffuse c0 = {dec.diffuse} ~= {float(dec.diffuse):.4f}; "
              f"artifact {path}")
        return EXIT_OK
    if args.sub == "ks":
        a = _measure_from_json(args.a)
        b = _measure_from_json(args.b)
        d = measures.measure_distance(a, b)
        print(f"KS distance = {d} ~= {float(d):.6f}")
        return EXIT_OK
    if args.sub == "equi":
        angles = capacity.cyclotomic_angles(args.m)
        d = measures.equidistribution_test(angles)
        bound = 2.0 ** (-args.m + 2)
        print(f"star discrepancy of primitive 2^{args.m}-th roots: {d:.3e} "
              f"(<= 2^(-m+2) = {bound:.3e}: {d <= bound})")
        return EXIT_OK
    return EXIT_USAGE


def _measure_from_json(path):
    data = json.loads(Path(path).read_text())
    atoms = [(mpf(x), Fraction(m)) for x, m in data["atoms"]]
    return measures.EmpiricalMeasure(atoms)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="slopes",
        description="Heights of sections of metrized line bundles: "
                    "cusp-form and disc-polynomial lattices.")
    ap.add_argument("--prec", type=int, default=256,
                    help="working precision in bits (default 256)")
    ap.add_argument("--scheme", choices=["A", "B"], default="A",
                    help="Petersson quadrature scheme")
    ap.add_argument("--cache-dir", default="",
                    help="cache directory (default ~/.cache/slopes or "
                         "$SLOPES_CACHE_DIR)")
    ap.add_argument("--out", default="slopes-out", help="artifact directory")
    sub = ap.add_subparsers(dest="group", required=True)

    mod = sub.add_parser("modular", help="weight-12k cusp-form lattices")
    mod.add_argument("sub", choices=["gram", "minima", "measure", "hecke",
                                     "congruence"])
    mod.add_argument("--k", type=int, required=True,
                     help="weight index (weight = 12k)")
    mod.add_argument("--p", type=int, default=2, help="Hecke prime")
    mod.add_argument("--L", type=int, default=0,
                     help="filtration parameter for 'measure'")
    mod.add_argument("--vector", default="",
                     help="comma-separated coefficients for 'congruence'")

    pol = sub.add_parser("poly", help="integer-polynomial disc lattices")
    pol.add_argument("sub", choices=["gram", "minima", "sweep", "factor"])
    pol.add_argument("--center", type=_frac, default=Fraction(0))
    pol.add_argument("--radius", type=_frac, default=Fraction(1))
    pol.add_argument("--n", type=int, default=10)
    pol.add_argument("--degrees", type=_degree_list, default=[10, 20, 30])
    pol.add_argument("--heuristic", action="store_true")
    pol.add_argument("--coeffs", default="", help="ascending, comma-separated")
    pol.add_argument("--pool", default="", help="factor pool JSON path")

    che = sub.add_parser("cheby", help="Chebyshev transforms")
    che.add_argument("sub", choices=["eval", "verify", "bound"])
    che.add_argument("--family", choices=["boundary", "centered"],
                     default="boundary")
    che.add_argument("--r", type=_frac, default=Fraction(1, 4))
    che.add_argument("--grid", type=int, default=1000)
    che.add_argument("--n", type=int, default=50)
    che.add_argument("--nmax", type=int, default=12,
                     help="verify F identities up to this level")

    mea = sub.add_parser("measure", help="empirical measures and diagnostics")
    mea.add_argument("sub", choices=["serre", "ks", "equi"])
    mea.add_argument("--in", dest="infile", default="factors.json")
    mea.add_argument("--window", type=int, default=None)
    mea.add_argument("--a", default="")
    mea.add_argument("--b", default="")
    mea.add_argument("--m", type=int, default=10)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = RunConfig(precision_bits=args.prec, scheme=args.scheme,
                    cache_dir=args.cache_dir, out_dir=args.out)
    try:
        if args.group == "modular":
            return cmd_modular(args, cfg)
        if args.group == "poly":
            return cmd_poly(args, cfg)
        if args.group == "cheby":
            return cmd_cheby(args, cfg)
        if args.group == "measure":
            return cmd_measure(args, cfg)
    except (EnumerationBudgetError, PrecisionExhaustedError) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except FormulaMismatchError as e:
        print(f"verification failure: {e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

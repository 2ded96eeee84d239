"""Command-line surface: spectrum | bethe | count | evolve | verify.

Spins are parsed as exact rational strings ("1/2", "1", "3/2"); complex
numbers are serialized as [re, im] pairs; CSV output uses RFC-4180 line
endings with 12-significant-digit numbers.  Identical configurations
(including --seed) produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import bethe as bt
from . import dynamics as dyn
from . import linalg
from . import mode_decomposition as md
from . import oracle as orc
from . import sector_spectrum as spec
from .core import HalfInt, InhomModelParams, ModelParams, SectorKey, halfint

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3
EXIT_NO_SOLUTIONS = 4


def _fmt(x):
    return f"{x:.12g}"


@dataclass
class RunConfig:
    subcommand: str
    s: HalfInt = None
    N: int = None
    A: float = 1.0
    B: float = 1.0
    theta: float = None
    M: int = None
    t_max: float = 40.0
    t_steps: int = 4000
    sector: SectorKey = None
    epsilons: tuple = None
    output: str = None
    format: str = "csv"
    seed: int = 42
    method: str = "spectral"
    starts: int = 200
    observables: tuple = ()
    verify: bool = False
    tol_newton: float = linalg.TOL_NEWTON
    tol_bethe: float = bt.TOL_BETHE
    tol_eig: float = linalg.TOL_EIG
    tol_root: float = linalg.TOL_ROOT


def build_parser():
    ap = argparse.ArgumentParser(prog="centralspin", description=__doc__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(sp, need_n=True):
        sp.add_argument("--s", required=True, help="central spin as exact rational, e.g. 1 or 3/2")
        sp.add_argument("--N", type=int, required=need_n, help="bath size")
        sp.add_argument("--A", type=float, default=1.0, help="uniform coupling")
        sp.add_argument("--B", type=float, default=1.0, help="central-spin field")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--output", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--tol-newton", type=float, default=linalg.TOL_NEWTON)
        sp.add_argument("--tol-bethe", type=float, default=bt.TOL_BETHE)
        sp.add_argument("--tol-eig", type=float, default=linalg.TOL_EIG)
        sp.add_argument("--tol-root", type=float, default=linalg.TOL_ROOT)

    sp = sub.add_parser("spectrum", help="sector-resolved exact spectrum")
    common(sp)
    sp.add_argument("--sector", default=None, help="restrict to one block, e.g. --sector 1,0")

    sp = sub.add_parser("bethe", help="Bethe root sets and energies for one M")
    common(sp)
    sp.add_argument("--M", type=int, required=True, help="number of Bethe roots")
    sp.add_argument("--epsilons", default=None, help="file with eps_0 then eps_1..eps_N, one per line")
    sp.add_argument("--starts", type=int, default=200, help="random Newton starts")

    sp = sub.add_parser("count", help="expected solution counts per M with sum rule")
    common(sp)

    sp = sub.add_parser("evolve", help="observable time series for a coherent state")
    common(sp)
    sp.add_argument("--theta", type=float, default=None, help="bath tilt angle in radians (default pi/2)")
    sp.add_argument("--t-max", type=float, default=40.0)
    sp.add_argument("--t-steps", type=int, default=4000)
    sp.add_argument(
        "--observables",
        default="entropy,purity,sz,sminus2,loschmidt",
        help=f"comma list from {','.join(dyn.OBSERVABLES)}",
    )
    sp.add_argument("--method", choices=("spectral", "recipe"), default="spectral")
    sp.add_argument("--verify", action="store_true", help="compare columns against the dense oracle")

    sp = sub.add_parser("verify", help="run the cross-module invariant suite")
    common(sp)
    sp.add_argument("--theta", type=float, default=None)
    sp.add_argument("--method", choices=("spectral", "recipe"), default="spectral")
    return ap


def _config_from_args(args):
    cfg = RunConfig(subcommand=args.subcommand)
    cfg.s = halfint(args.s)
    cfg.N = args.N
    cfg.A, cfg.B = args.A, args.B
    cfg.seed = args.seed
    cfg.output = args.output
    cfg.format = args.format
    cfg.tol_newton = args.tol_newton
    cfg.tol_bethe = args.tol_bethe
    cfg.tol_eig = args.tol_eig
    cfg.tol_root = args.tol_root
    if getattr(args, "sector", None):
        j_text, m_text = args.sector.split(",")
        cfg.sector = SectorKey(halfint(j_text.strip()), halfint(m_text.strip()))
    if hasattr(args, "M"):
        cfg.M = args.M
    if getattr(args, "epsilons", None):
        with open(args.epsilons) as fh:
            vals = [float(line) for line in fh if line.strip()]
        if len(vals) < 2:
            raise ValueError("epsilons file needs eps_0 plus at least one eps_j")
        cfg.epsilons = tuple(vals)
        if cfg.N is not None and cfg.N != len(vals) - 1:
            raise ValueError(f"--N {cfg.N} disagrees with {len(vals) - 1} epsilons")
        cfg.N = len(vals) - 1
    if hasattr(args, "theta"):
        cfg.theta = args.theta if args.theta is not None else float(np.pi / 2)
    if hasattr(args, "t_max"):
        cfg.t_max = args.t_max
        cfg.t_steps = args.t_steps
    if hasattr(args, "observables"):
        cfg.observables = tuple(x.strip() for x in args.observables.split(",") if x.strip())
    if hasattr(args, "method"):
        cfg.method = args.method
    if hasattr(args, "starts"):
        cfg.starts = args.starts
    cfg.verify = getattr(args, "verify", False)
    return cfg


class _Output:
    def __init__(self, path):
        self.path = path
        self.buffer = io.StringIO(newline="")

    def __enter__(self):
        return self.buffer

    def __exit__(self, exc_type, *rest):
        if exc_type is None:
            text = self.buffer.getvalue()
            if self.path:
                with open(self.path, "w", newline="") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        return False


def _write_json(fh, obj):
    json.dump(obj, fh, indent=2)
    fh.write("\n")


def _params_dict(p):
    if isinstance(p, InhomModelParams):
        return {"s": str(p.s), "N": p.N, "B": p.B, "eps0": p.eps0, "eps": list(p.eps)}
    return {"s": str(p.s), "N": p.N, "A": p.A, "B": p.B}


def cmd_spectrum(cfg):
    p = ModelParams(s=cfg.s, N=cfg.N, A=cfg.A, B=cfg.B)
    levels = spec.full_spectrum(p)
    if cfg.sector is not None:
        levels = [lv for lv in levels if lv.j == cfg.sector.j and lv.m == cfg.sector.m]
    with _Output(cfg.output) as fh:
        if cfg.format == "json":
            _write_json(
                fh,
                {
                    "params": _params_dict(p),
                    "levels": [
                        {"j": float(lv.j), "m": float(lv.m), "E": lv.energy, "multiplicity": lv.multiplicity}
                        for lv in levels
                    ],
                },
            )
        else:
            w = csv.writer(fh)
            w.writerow(["j", "m", "E", "multiplicity"])
            for lv in levels:
                w.writerow([_fmt(float(lv.j)), _fmt(float(lv.m)), _fmt(lv.energy), lv.multiplicity])
    return EXIT_OK


def cmd_bethe(cfg):
    rng = np.random.default_rng(cfg.seed)
    if cfg.epsilons is not None:
        p = InhomModelParams(s=cfg.s, N=cfg.N, B=cfg.B, eps0=cfg.epsilons[0], eps=cfg.epsilons[1:])
        states = bt.solve_inhom_newton(p, cfg.M, starts=cfg.starts, rng=rng, tol=cfg.tol_bethe)
        singular = 0
    else:
        p = ModelParams(s=cfg.s, N=cfg.N, A=cfg.A, B=cfg.B)
        result = bt.solve_hom(p, cfg.M, starts=cfg.starts, rng=rng, tol=cfg.tol_bethe)
        states, singular = result.states, result.singular
    expected = bt.count_solutions(cfg.s, cfg.N, cfg.M)
    states = sorted(states, key=lambda st: st.energy)
    with _Output(cfg.output) as fh:
        if cfg.format == "json":
            _write_json(
                fh,
                {
                    "params": _params_dict(p),
                    "M": cfg.M,
                    "found": len(states),
                    "expected": expected,
                    "singular_candidates": singular,
                    "states": [
                        {
                            "roots": [[z.real, z.imag] for z in st.roots],
                            "energy": st.energy,
                            "residual": st.residual_inf,
                        }
                        for st in states
                    ],
                },
            )
        else:
            w = csv.writer(fh)
            w.writerow(["state", "root_re", "root_im", "energy", "residual"])
            for i, st in enumerate(states):
                if not st.roots:
                    w.writerow([i, "", "", _fmt(st.energy), _fmt(st.residual_inf)])
                for z in st.roots:
                    w.writerow([i, _fmt(z.real), _fmt(z.imag), _fmt(st.energy), _fmt(st.residual_inf)])
            print(f"found {len(states)} of {expected} expected states "
                  f"({singular} singular candidates quarantined)", file=sys.stderr)
    return EXIT_OK


def cmd_count(cfg):
    top = cfg.N + cfg.s.twice
    counts = [bt.count_solutions(cfg.s, cfg.N, M) for M in range(top + 1)]
    total = sum(counts)
    expected = (cfg.s.twice + 1) * 2**cfg.N
    ok = total == expected
    with _Output(cfg.output) as fh:
        if cfg.format == "json":
            _write_json(
                fh,
                {
                    "s": str(cfg.s),
                    "N": cfg.N,
                    "counts": counts,
                    "total": total,
                    "expected": expected,
                    "pass": ok,
                },
            )
        else:
            w = csv.writer(fh)
            w.writerow(["M", "count"])
            for M, cnt in enumerate(counts):
                w.writerow([M, cnt])
            print(f"total={total} expected={expected} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def cmd_evolve(cfg):
    p = ModelParams(s=cfg.s, N=cfg.N, A=cfg.A, B=cfg.B)
    if cfg.t_max < 0:
        raise ValueError("t-max must be >= 0")
    grid = np.array([0.0]) if cfg.t_max == 0 else np.linspace(0.0, cfg.t_max, cfg.t_steps)
    series = dyn.run_timeseries(p, cfg.theta, grid, cfg.observables, method=cfg.method)
    with _Output(cfg.output) as fh:
        if cfg.format == "json":
            _write_json(
                fh,
                {
                    "params": {**_params_dict(p), "theta": cfg.theta},
                    "times": [float(t) for t in series.times],
                    "values": {k: [float(x) for x in v] for k, v in series.values.items()},
                },
            )
        else:
            w = csv.writer(fh)
            w.writerow(["t", *cfg.observables])
            for i, t in enumerate(series.times):
                w.writerow([_fmt(t), *(_fmt(series.values[o][i]) for o in cfg.observables)])
    if cfg.verify:
        dm = orc.build_dense(p)
        ref = orc.observables_timeseries(dm, cfg.theta, grid, cfg.observables)
        deviations = {
            o: float(np.abs(series.values[o] - ref[o]).max()) for o in cfg.observables
        }
        ok = all(d < 1e-8 for d in deviations.values())
        print(json.dumps({"max_deviation": deviations, "pass": ok}), file=sys.stderr)
        if not ok:
            return EXIT_VERIFY_FAIL
    return EXIT_OK


def _verify_checks(cfg):
    p = ModelParams(s=cfg.s, N=cfg.N, A=cfg.A, B=cfg.B)
    theta = cfg.theta if cfg.theta is not None else float(np.pi / 2)
    checks = []

    def add(name, err, tol):
        checks.append({"name": name, "max_error": float(err), "tolerance": tol, "pass": bool(err <= tol)})

    # counting sum rule (exact integers)
    total = sum(bt.count_solutions(p.s, p.N, M) for M in range(p.N + p.s.twice + 1))
    add("count_sum_rule", abs(total - (p.s.twice + 1) * 2**p.N), 0)

    # appendix identities and route agreement, every sector
    id_err = route_err = rec_err = 0.0
    for n in range(p.N + 1):
        dec_s = md.decompose(p, n, method="spectral")
        dec_r = md.decompose(p, n, method="recipe")
        for dec in (dec_s, dec_r):
            dim = dec.dim
            id1 = np.abs(dec.c.sum(axis=1) - np.eye(dim)[0]).max()
            gram = dec.c.T @ dec.c - np.diag(dec.c[0])
            id_err = max(id_err, id1, np.abs(gram).max())
        route_err = max(
            route_err,
            np.abs(dec_s.omega - dec_r.omega).max(),
            np.abs(dec_s.c - dec_r.c).max(),
        )
        href = md.hamiltonian_power_coeffs(p, n, 12)
        hmod = md.power_coeffs_from_modes(dec_r, 12)
        scale = np.maximum(np.abs(href).max(axis=1), 1.0)
        rec_err = max(rec_err, (np.abs(hmod - href).max(axis=1) / scale).max())
    add("appendix_identities", id_err, 1e-10)
    add("recipe_vs_spectral", route_err, cfg.tol_eig * 1e3)
    add("power_recurrence", rec_err, 1e-8)

    dim = (p.s.twice + 1) * 2**p.N
    if dim <= 4096:
        dm = orc.build_dense(p)
        ora = np.sort(orc.exact_spectrum(dm))
        mine = spec.expanded_levels(spec.full_spectrum(p))
        add("spectrum_vs_oracle", np.abs(ora - mine).max(), 1e-9)
        defects = orc.commutant_defects(dm)
        add("commutants", max(defects.values()), 1e-12)

        grid = np.linspace(0.0, 10.0, 50)
        obs = list(dyn.OBSERVABLES)
        series = dyn.run_timeseries(p, theta, grid, obs, method=cfg.method)
        ref = orc.observables_timeseries(dm, theta, grid, obs)
        dyn_err = max(np.abs(series.values[o] - ref[o]).max() for o in obs)
        add("dynamics_vs_oracle", dyn_err, 1e-8)
        add("unitarity", np.abs(series.values["norm"] - 1.0).max(), 1e-10)

        cache = dyn.make_cache(p, method=cfg.method)
        prep = dyn.prepare(theta, p.N)
        rho_err = herm_err = tr_err = psd_err = 0.0
        for t in (0.0, grid[len(grid) // 2], grid[-1]):
            rho_a = dyn.reduced_density(prep, cache, t)
            rho_b = dyn.reduced_density_from_state(dyn.evolve(prep, cache, t), cache.dim0)
            rho_err = max(rho_err, np.abs(rho_a.rho - rho_b.rho).max())
            herm_err = max(herm_err, np.abs(rho_a.rho - rho_a.rho.conj().T).max())
            tr_err = max(tr_err, abs(np.trace(rho_a.rho).real - 1.0))
            psd_err = max(psd_err, max(0.0, -rho_a.eigenvalues().min()))
        add("rho_formula_vs_trace", rho_err, 1e-10)
        add("rho_hermitian", herm_err, 1e-12)
        add("rho_trace", tr_err, 1e-10)
        add("rho_positive", psd_err, 1e-10)

    if p.N <= 8 and p.A != 0.0:
        rng = np.random.default_rng(cfg.seed)
        member_err = 0.0
        for M in range(p.N + p.s.twice + 1):
            result = bt.solve_hom(p, M, starts=0, rng=rng, tol=cfg.tol_bethe)
            block = spec.build_sector(p, SectorKey(HalfInt(p.N), bt.magnetization(p.s, p.N, M)))
            for st in result.states:
                member_err = max(member_err, np.abs(block.energies - st.energy).min())
        add("bethe_energies_in_top_sector", member_err, 1e-7)

    return checks


def cmd_verify(cfg):
    checks = _verify_checks(cfg)
    ok = all(c["pass"] for c in checks)
    with _Output(cfg.output) as fh:
        _write_json(fh, {"s": str(cfg.s), "N": cfg.N, "A": cfg.A, "B": cfg.B, "checks": checks, "pass": ok})
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


_DISPATCH = {
    "spectrum": cmd_spectrum,
    "bethe": cmd_bethe,
    "count": cmd_count,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        cfg = _config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        return _DISPATCH[cfg.subcommand](cfg)
    except (ValueError, orc.DimensionGuard) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except bt.NoSolutionFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTIONS
    except (
        linalg.NonConvergence,
        linalg.SingularJacobian,
        bt.PoleCollision,
        bt.NonRealEnergy,
        md.ComplexFrequency,
        np.linalg.LinAlgError,
    ) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

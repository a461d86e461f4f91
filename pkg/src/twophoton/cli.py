"""Command-line scenario runner.

Subcommands::

    twophoton evolve --config run.cfg [--out traj.csv]
    twophoton fig1 --out-dir data/
    twophoton validate [--n-max 4] [--seed 0]
    twophoton transfer --scenario n2-photon-transfer --xi 50 [--k 0]

Exit status is 0 on success, 1 when a validation check fails and 2 for
usage or configuration errors.
"""

import argparse
from dataclasses import dataclass, field
import logging
import math
from pathlib import Path
import sys

import numpy as np

from . import analysis, dynamics, entanglement, model, oracle

log = logging.getLogger("twophoton")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FIG1_XI = (0.1, 0.5, 0.9, 2.0)
FIG1_DT = 0.01
FIG1_T_MAX = 10.0

NORM_EXACT_TOL = 1e-9
NORM_REPAIR_TOL = 1e-3


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    n: int
    xi: float
    tan_theta0: float = 1.0
    initial: list = field(default_factory=list)  # (site, kind, re, im)
    t_max: float = 10.0
    dt: float = 0.01
    observables: tuple = ("probabilities",)
    mode: str = "exact"
    output: str = None

    @property
    def params(self):
        return model.SystemParams(self.n, self.xi, self.tan_theta0)

    def initial_state(self):
        psi = np.zeros(2 * self.n, dtype=complex)
        for site, kind, re, im in self.initial:
            if not 0 <= site < self.n:
                raise ConfigError(f"initial site {site} out of range for n={self.n}")
            psi[model.basis_index(site, kind)] += complex(re, im)
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > NORM_REPAIR_TOL:
            raise ConfigError(f"initial state norm {norm:.6g} is not 1")
        if abs(norm - 1.0) > NORM_EXACT_TOL:
            log.warning("initial state norm %.12g renormalized to 1", norm)
            psi = psi / norm
        return psi

    def times(self):
        steps = int(math.floor(self.t_max / self.dt + 1e-9))
        return np.arange(steps + 1) * self.dt


_CONFIG_KEYS = {
    "n": int,
    "xi": float,
    "tan_theta0": float,
    "t_max": float,
    "dt": float,
    "mode": str,
    "output": str,
}


def parse_config(text):
    """Parse ``key = value`` lines; ``initial`` may repeat, ``#`` starts a comment."""
    values = {}
    initial = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "initial":
                site, kind, re, im = (s.strip() for s in value.split(","))
                if kind not in (model.PHOTONIC, model.ATOMIC):
                    raise ValueError(f"kind must be 'photonic' or 'atomic', got {kind!r}")
                initial.append((int(site), kind, float(re), float(im)))
            elif key == "observables":
                values[key] = tuple(value.split())
            elif key in _CONFIG_KEYS:
                if key in values:
                    raise ValueError("duplicate key")
                values[key] = _CONFIG_KEYS[key](value)
            else:
                raise ValueError("unknown key")
        except ValueError as exc:
            raise ConfigError(f"line {lineno} ({key}): {exc}") from None

    for key in ("n", "xi"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    if not initial:
        raise ConfigError("at least one 'initial = site,kind,re,im' line is required")
    cfg = ScenarioConfig(initial=initial, **values)
    if not (cfg.dt > 0 and cfg.t_max >= 0):
        raise ConfigError("need dt > 0 and t_max >= 0")
    if cfg.mode not in ("exact", "large-hopping", "small-hopping"):
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    try:
        cfg.params
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(x) for x in row) + "\n")


def _series_table(series):
    header = ["t"]
    cols = [series.times]
    for i in range(series.n):
        for label, k in (("C", 2 * i), ("A", 2 * i + 1)):
            header += [f"Re{label}_{i}", f"Im{label}_{i}"]
            cols += [series.states[:, k].real, series.states[:, k].imag]
    for name, values in series.columns.items():
        header.append(name)
        cols.append(values)
    return header, np.column_stack(cols)


def cmd_evolve(args):
    try:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
        initial = cfg.initial_state()
        series = analysis.time_series(cfg.params, initial, cfg.times(), cfg.observables, mode=cfg.mode)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    header, table = _series_table(series)
    out = args.out or cfg.output
    if out is None:
        write_csv(sys.stdout, header, table)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_csv(fh, header, table)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    log.info("wrote %d rows to %s", len(table), out)
    return EXIT_OK


def fig1_filename(xi):
    return f"fig1_xi_{xi:g}.csv"


def cmd_fig1(args):
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    grid = np.arange(int(round(FIG1_T_MAX / FIG1_DT)) + 1) * FIG1_DT
    initial = model.symmetric_photonic_state(2)
    for xi in FIG1_XI:
        params = model.SystemParams(2, xi)
        # refined peak times are merged into the grid so every maximum is sampled
        peaks = analysis.find_max_concurrence_times(params, initial, (0, 1), FIG1_T_MAX, count=1000, step=FIG1_DT)
        times = np.union1d(grid, [ev.time for ev in peaks])
        series = analysis.time_series(params, initial, times, ("concurrence:0,1",))
        conc = series.columns["concurrence_0_1"]
        path = out_dir / fig1_filename(xi)
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                write_csv(fh, ["t", "concurrence_0_1"], np.column_stack([times, conc]))
        except OSError as exc:
            print(f"error: cannot write {path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        k = int(np.argmax(conc))
        print(f"xi={xi:g}: max concurrence {conc[k]:.9f} at t={times[k]:.6f} "
              f"(1/(1+xi^2) = {1 / (1 + xi * xi):.6f}) -> {path}")
    return EXIT_OK


def _faulty_reduced(params):
    # hopping sign flipped: used to prove the validators can fail
    return model.build_reduced_hamiltonian(model.SystemParams(params.n, -params.xi, params.tan_theta0))


def run_validation(n_max=4, seed=0, cases=100, inject_fault=False, out=print):
    """Run the oracle suite; returns True iff every check passes."""
    rng = np.random.default_rng(seed)
    reduced = _faulty_reduced if inject_fault else model.build_reduced_hamiltonian
    ok = True

    worst = 0.0
    for n in range(1, min(n_max, 4) + 1):
        for xi, tan in ((0.0, 1.0), (rng.uniform(-2, 2), rng.uniform(0.5, 2))):
            params = model.SystemParams(n, xi, tan)
            rep = oracle.verify_reduction(params, reduced=reduced(params))
            worst = max(worst, rep.max_residual)
            if not rep.passed:
                ok = False
                out(str(rep))
    out(f"reduction (n <= {min(n_max, 4)}): worst residual {worst:.3e}")

    worst = 0.0
    for n in range(1, max(n_max, 6) + 1):
        params = model.SystemParams(n, rng.uniform(-2, 2), rng.uniform(0.5, 2))
        rep = oracle.verify_block_diagonalization(params, reduced=reduced(params))
        worst = max(worst, rep.max_residual)
        if not rep.passed:
            ok = False
            out(str(rep))
    out(f"block diagonalization (n <= {max(n_max, 6)}): worst residual {worst:.3e}")

    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 7))
        xi, tan, t = rng.uniform(-2, 2), rng.uniform(0.5, 2), rng.uniform(0, 10)
        psi = model.random_manifold_state(n, rng)
        for params in (model.SystemParams(n, xi, tan), model.SystemParams(n, xi)):
            dense = oracle.evolve_dense(reduced(params), psi, t)
            dev = np.max(np.abs(dynamics.evolve(params, psi, t) - dense))
            if params.tan_theta0 == 1.0:
                dev = max(dev, np.max(np.abs(dynamics.evolve_closed_form_tan1(params, psi, t) - dense)))
            worst = max(worst, dev)
    dyn_ok = worst < oracle.DYNAMICS_ATOL
    ok &= dyn_ok
    out(f"dynamics vs dense ({cases} cases): worst deviation {worst:.3e} [{'PASS' if dyn_ok else 'FAIL'}]")

    mismatches = 0
    for _ in range(cases):
        n = int(rng.integers(2, 6))
        i, j = rng.choice(n, size=2, replace=False)
        rho = entanglement.reduce_to_atom_pair(model.random_manifold_state(n, rng), int(i), int(j))
        entangled = entanglement.concurrence(rho) > 1e-10
        npt = entanglement.partial_transpose_eigenvalues(rho)[0] < -1e-10
        mismatches += entangled != npt
    out(f"PPT vs concurrence ({cases} states): {mismatches} mismatches [{'PASS' if not mismatches else 'FAIL'}]")
    ok &= mismatches == 0

    out("validation " + ("passed" if ok else "FAILED"))
    return ok


def cmd_validate(args):
    if args.n_max < 1:
        print("error: --n-max must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    ok = run_validation(args.n_max, args.seed, args.cases, args.inject_fault)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_transfer(args):
    try:
        params, events = analysis.run_transfer_scenario(args.scenario, xi=args.xi, k=args.k, l=args.l, count=args.count)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"scenario {args.scenario}: n={params.n} xi={params.xi:.17g} tan_theta0={params.tan_theta0:g}")
    for ev in events:
        what = "concurrence" if ev.kind == analysis.MAX_ENTANGLEMENT else f"P{ev.target}"
        print(f"  T={ev.time:.12g}  {ev.kind}  {ev.source} -> {ev.target}  {what}={ev.fidelity:.12f}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="twophoton", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve a configured initial state and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path (overrides 'output' in the config; default stdout)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("fig1", help="concurrence-vs-time series for two cavities")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("validate", help="run the brute-force oracle suite")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transfer", help="exact fidelities at the analytic transfer times")
    p.add_argument("--scenario", required=True, choices=analysis.SCENARIOS)
    p.add_argument("--xi", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--count", type=int, default=5)
    p.set_defaults(func=cmd_transfer)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line driver: simulate, sphere-check, threshold, decompose.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.  The environment
variable ``LANDAU_MAX_WORKERS`` caps the number of threads used by the
compiled pair kernels.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .errors import BlowUpError, GridMismatchError, InvalidGridError, ParameterError, DegenerateStateError
from .equilibrium import MacroState

__all__ = ["main", "CONFIG_SCHEMA", "load_config", "csv_header", "csv_row", "write_snapshot", "read_snapshot"]

WORKERS_ENV = "LANDAU_MAX_WORKERS"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

_number = {"type": "number"}
_vector = {"type": "array", "items": _number, "minItems": 2, "maxItems": 3}
_matrix = {"type": "array", "items": {"type": "array", "items": _number, "minItems": 1}, "minItems": 1}
_bump = {
    "type": "object",
    "properties": {"n": {"type": "number", "exclusiveMinimum": 0}, "u": _vector, "theta": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["n", "u", "theta"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "dim": {"enum": [2, 3]},
        "grid": {
            "type": "object",
            "properties": {
                "extent": {"type": "number", "exclusiveMinimum": 0},
                "points_per_axis": {"type": "integer", "minimum": 8},
            },
            "required": ["points_per_axis"],
            "additionalProperties": False,
        },
        "species": {
            "type": "object",
            "properties": {
                "masses": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                "couplings": _matrix,
                "exponents": _matrix,
            },
            "required": ["masses", "couplings", "exponents"],
            "additionalProperties": False,
        },
        "initial": {
            "oneOf": [
                {"type": "array", "items": {"type": "array", "items": _bump, "minItems": 1}, "minItems": 1},
                {
                    "type": "object",
                    "properties": {
                        "random": {
                            "type": "object",
                            "properties": {"bumps_per_species": {"type": "integer", "minimum": 1}},
                            "additionalProperties": False,
                        }
                    },
                    "required": ["random"],
                    "additionalProperties": False,
                },
            ]
        },
        "run": {
            "type": "object",
            "properties": {
                "flow": {"enum": ["landau", "fokker_planck"]},
                "scheme": {"enum": ["euler", "rk4"]},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_end": {"type": "number", "minimum": 0},
                "diagnostics_every": {"type": "integer", "minimum": 1},
                "floor": {"type": "number", "exclusiveMinimum": 0},
                "deterministic_reduction": {"type": "boolean"},
                "dissipation": {"type": "boolean"},
                "equilibrium": {
                    "type": "object",
                    "properties": {"u": _vector, "theta": {"type": "number", "exclusiveMinimum": 0}},
                    "required": ["u", "theta"],
                    "additionalProperties": False,
                },
            },
            "required": ["dt", "t_end"],
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "directory": {"type": "string"},
                "snapshot_every": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["dim", "grid", "species", "initial", "run"],
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is a JSON pointer to the offending value."""

    def __init__(self, path, message):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


def _pointer(parts):
    return "".join(f"/{p}" for p in parts)


def _check_semantics(cfg):
    d = cfg["dim"]
    sp = cfg["species"]
    S = len(sp["masses"])
    for key in ("couplings", "exponents"):
        mat = sp[key]
        if len(mat) != S:
            raise ConfigError(f"/species/{key}", f"expected {S} rows, got {len(mat)}")
        for r, row in enumerate(mat):
            if len(row) != S:
                raise ConfigError(f"/species/{key}/{r}", f"expected {S} entries, got {len(row)}")
    lo = -d - 2.0
    for a in range(S):
        for b in range(S):
            g = sp["exponents"][a][b]
            if not lo < g <= 1.0:
                raise ConfigError(f"/species/exponents/{a}/{b}", f"exponent outside ({lo:g}, 1] for dim {d}: {g:g}")
    init = cfg["initial"]
    if isinstance(init, list):
        if len(init) != S:
            raise ConfigError("/initial", f"expected bumps for {S} species, got {len(init)}")
        for s, bumps in enumerate(init):
            for k, bump in enumerate(bumps):
                if len(bump["u"]) != d:
                    raise ConfigError(f"/initial/{s}/{k}/u", f"expected {d} components")
    eq = cfg["run"].get("equilibrium")
    if eq is not None and len(eq["u"]) != d:
        raise ConfigError("/run/equilibrium/u", f"expected {d} components")
    n = cfg["grid"]["points_per_axis"]
    if n % 2:
        raise ConfigError("/grid/points_per_axis", f"must be even, got {n}")


def validate_config(cfg):
    """Schema plus cross-reference checks; raises :class:`ConfigError`."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_pointer(err.absolute_path), err.message)
    _check_semantics(cfg)
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"not valid JSON ({exc})") from exc
    return validate_config(cfg)


def build_problem(cfg):
    """``(species, grid, initial_state, run_config)`` from a validated config."""
    from .dynamics import RunConfig
    from .landau import mixture_from_bumps, random_mixture
    from .species import make_species_set
    from .state import DEFAULT_FLOOR
    from .vgrid import make_grid

    d = cfg["dim"]
    g = cfg["grid"]
    grid = make_grid(d, g.get("extent", 6.0), g["points_per_axis"])
    sp = cfg["species"]
    species = make_species_set(sp["masses"], sp["couplings"], sp["exponents"], d)
    run = dict(cfg["run"])
    floor = run.get("floor", DEFAULT_FLOOR)
    eq = run.pop("equilibrium", None)
    init = cfg["initial"]
    if isinstance(init, list):
        bumps = [[(b["n"], b["u"], b["theta"]) for b in s] for s in init]
        state = mixture_from_bumps(species, grid, bumps, floor=floor)
    else:
        rng = np.random.default_rng(cfg.get("seed", 0))
        state = random_mixture(species, grid, rng, init["random"].get("bumps_per_species", 2), floor=floor)
    macro = None
    if eq is not None:
        macro = MacroState(tuple(float(x) for x in np.ones(species.count)), np.asarray(eq["u"], float), eq["theta"])
    config = RunConfig(equilibrium=macro, **run)
    return species, grid, state, config


def csv_header(species_count, dim):
    pairs = [(i, j) for i in range(1, species_count + 1) for j in range(i, species_count + 1)]
    cols = ["t"]
    cols += [f"n_{i}" for i in range(1, species_count + 1)]
    cols += [f"P_{a}" for a in range(1, dim + 1)]
    cols += ["E", "rho"]
    cols += [f"u_{a}" for a in range(1, dim + 1)]
    cols += ["theta", "H", "I", "dH_formula", "dI_formula", "dI_xi", "dI_decomp_total"]
    for name in ("D_par", "D_rad", "D_sph", "R_sph"):
        cols += [f"{name}_{i}{j}" for i, j in pairs]
    cols.append("clamped_mass")
    return cols


def _fmt(x):
    return format(float(x), ".17g")


def csv_row(record, species_count):
    n_pairs = species_count * (species_count + 1) // 2
    values = [record.time, *record.densities, *record.momentum, record.energy, record.rho, *record.u, record.theta]
    values += [record.entropy, record.fisher, -record.entropy_dissipation]
    values += [record.fisher_dissipation, record.fisher_dissipation_xi]
    b = record.breakdown
    if b is None:
        values += [math.nan] * (1 + 4 * n_pairs)
    else:
        values += [b.total, *b.parallel, *b.radial, *b.spherical, *b.remainder]
    values.append(record.clamped_mass)
    return ",".join(_fmt(v) for v in values)


def write_snapshot(path, state, step=None):
    """Raw little-endian float64 row-major fields plus a ``.json`` sidecar."""
    path = Path(path)
    data = np.ascontiguousarray(state.fields, dtype="<f8")
    path.write_bytes(data.tobytes(order="C"))
    sp = state.species
    meta = {
        "dtype": "float64",
        "byte_order": "little",
        "order": "C",
        "shape": list(data.shape),
        "time": state.time,
        "step": step,
        "floor": state.floor,
        "grid": {"dim": state.grid.dim, "extent": state.grid.extent, "points_per_axis": state.grid.points_per_axis},
        "species": {
            "masses": sp.masses.tolist(),
            "couplings": sp.couplings.tolist(),
            "exponents": sp.exponents.tolist(),
        },
    }
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def read_snapshot(path, species, grid):
    """Load a snapshot written by :func:`write_snapshot` and check it against ``species`` and ``grid``."""
    from .state import MixtureState

    path = Path(path)
    if path.suffix == ".json":
        path = path.with_suffix(".bin")
    meta = json.loads(path.with_suffix(".json").read_text())
    g = meta["grid"]
    if (g["dim"], g["points_per_axis"]) != (grid.dim, grid.points_per_axis) or not np.isclose(g["extent"], grid.extent):
        raise GridMismatchError(f"snapshot grid {g} does not match the configured grid")
    for key in ("masses", "couplings", "exponents"):
        if not np.allclose(meta["species"][key], getattr(species, key)):
            raise GridMismatchError(f"snapshot species {key} differ from the configuration")
    shape = tuple(meta["shape"])
    data = np.frombuffer(path.read_bytes(), dtype="<f8")
    if data.size != int(np.prod(shape)):
        raise GridMismatchError(f"snapshot holds {data.size} values, sidecar says {shape}")
    return MixtureState(species, grid, data.reshape(shape).astype(float), meta["time"], meta["floor"])


def _apply_worker_cap():
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError("", f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ConfigError("", f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    import numba

    numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


def cmd_simulate(args):
    from .dynamics import run

    cfg = load_config(args.config)
    species, grid, state, config = build_problem(cfg)
    out_cfg = cfg.get("output", {})
    base = Path(args.config).resolve().parent
    outdir = Path(args.output or out_cfg.get("directory", "output"))
    if not outdir.is_absolute() and args.output is None:
        outdir = base / outdir
    outdir.mkdir(parents=True, exist_ok=True)
    snap_every = out_cfg.get("snapshot_every", 0)
    S, d = species.count, grid.dim
    csv_path = outdir / "diagnostics.csv"
    n_steps = int(round(config.t_end / config.dt))
    emitted = [0]

    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(csv_header(S, d)) + "\n")

        def on_record(rec, st):
            fh.write(csv_row(rec, S) + "\n")
            fh.flush()
            step = int(round(st.time / config.dt))
            if step == 0 or step == n_steps or (snap_every and emitted[0] % snap_every == 0):
                write_snapshot(outdir / f"snapshot_{step:08d}.bin", st, step)
            emitted[0] += 1

        try:
            run(state, config, on_record=on_record)
        except BlowUpError as exc:
            err = {"error": "blow-up", "message": str(exc), "species": exc.species, "node": exc.node}
            (outdir / "error.json").write_text(json.dumps(err, indent=2) + "\n")
            raise
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_sphere_check(args):
    from .sphere import check_inequality, random_field

    if args.dim not in (2, 3):
        raise ConfigError("", f"--dim must be 2 or 3, got {args.dim}")
    if args.samples < 1:
        raise ConfigError("", "--samples must be positive")
    rng = np.random.default_rng(args.seed)
    lines = ["sample_id,symmetric,gamma_integral,gamma2_integral,ratio,margin"]
    failed = 0
    for k in range(args.samples):
        field = random_field(args.dim, rng, symmetric=args.symmetric, lmax=args.lmax, scale=args.scale)
        v = check_inequality(field, symmetric=args.symmetric, tolerance=args.tolerance)
        failed += not v.passed
        lines.append(",".join([str(k), str(int(args.symmetric)), _fmt(v.gamma_integral), _fmt(v.gamma2_integral), _fmt(v.ratio), _fmt(v.margin)]))
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if failed:
        print(f"{failed} of {args.samples} margins below -{args.tolerance:g}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_threshold(args):
    from .species import admissible_threshold

    try:
        cross = admissible_threshold(args.dim, same_species=False)
        same = admissible_threshold(args.dim, same_species=True)
    except ParameterError as exc:
        raise ConfigError("", str(exc)) from None
    print(f"dim {args.dim}")
    print(f"cross-species threshold |gamma| <= {cross:.15g}")
    print(f"same-species threshold  |gamma| <= {same:.15g}")
    if args.dim == 3:
        g = -3.0
        for label, thr in (("same-species", same), ("cross-species", cross)):
            verdict = "admissible" if abs(g) <= thr else "inadmissible"
            print(f"Coulomb gamma = -3, {label}: {verdict}")
    return EXIT_OK


def cmd_decompose(args):
    from .functionals import dissipation_breakdown, fisher_dissipation, fisher_dissipation_xi

    cfg = load_config(args.config)
    species, grid, _, _ = build_problem(cfg)
    state = read_snapshot(args.snapshot, species, grid)
    b = dissipation_breakdown(state)
    print("pair,D_par,D_rad,D_sph,R_sph,prefactor")
    for (i, j), p, r, s, q, c in zip(b.pairs, b.parallel, b.radial, b.spherical, b.remainder, b.prefactor):
        print(f"{i + 1}{j + 1},{_fmt(p)},{_fmt(r)},{_fmt(s)},{_fmt(q)},{_fmt(c)}")
    print(f"dI_formula,{_fmt(fisher_dissipation(state))}")
    print(f"dI_xi,{_fmt(fisher_dissipation_xi(state))}")
    print(f"dI_decomp_total,{_fmt(b.total)}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="mslandau", description="Multi-species Landau relaxation and Fisher information checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a configured relaxation and write diagnostics.csv")
    s.add_argument("config")
    s.add_argument("--output", help="output directory (overrides the config)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sphere-check", help="random battery for the sphere inequalities")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--symmetric", action="store_true")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lmax", type=int, default=6)
    s.add_argument("--scale", type=float, default=0.5)
    s.add_argument("--tolerance", type=float, default=1e-8)
    s.add_argument("--output")
    s.set_defaults(func=cmd_sphere_check)

    s = sub.add_parser("threshold", help="admissible exponent thresholds")
    s.add_argument("--dim", type=int, required=True)
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("decompose", help="dissipation breakdown of a stored snapshot")
    s.add_argument("config")
    s.add_argument("snapshot")
    s.set_defaults(func=cmd_decompose)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        _apply_worker_cap()
        return args.func(args)
    except (ConfigError, ParameterError, InvalidGridError, GridMismatchError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (BlowUpError, DegenerateStateError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: spectrum | oracle | resources | validate | gen-fixtures.

Configuration comes from an optional JSON document plus flags of the same
name; flags win.  Every run writes a manifest with parameters, seeds, input
hashes, and package versions so it can be reproduced bit-exactly.  Failures
emit a machine-readable error JSON on stderr (exit code 2 for missing
inputs, 1 otherwise).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, ci as ci_mod, emulator, fixtures, oracle, validate
from . import spectrum as sp
from .operators import (QVector, jordan_wigner, load_dipole_json,
                        read_fcidump_file)
from .pauli import expectation, pauli_sum_dense
from .resources import (DEFAULT_MODEL, algorithm_cost, reference_plan,
                        report_to_json, resource_table, table_to_csv)
from .spectrum import HARTREE_TO_EV

EXIT_INPUT_NOT_FOUND = 2


class CliError(Exception):
    def __init__(self, kind: str, message: str, exit_code: int = 1):
        super().__init__(message)
        self.kind = kind
        self.exit_code = exit_code


@dataclass
class RunConfig:
    hamiltonian: str = ""
    dipoles: str = ""
    ground_state: str = "solve"
    mode: str = "exact"               # sampled | exact | oracle
    eta: str = "0.06"                 # Hartree by default; accepts "1.63eV"
    delta: float | None = None        # spectral window, Hartree
    epsilon_trunc: float = math.exp(-5.0)
    trotter_k: int = 4
    shots: int = 10000
    seed: int = 0
    q: list = field(default_factory=lambda: [[1.0, 1.0, 1.0]])
    cvs: list = field(default_factory=list)
    out: str = "out"
    shift_ev: float = 0.0
    n_alpha: int | None = None
    n_beta: int | None = None

    @property
    def eta_hartree(self) -> float:
        return parse_energy(self.eta)

    @property
    def q_vectors(self) -> list[QVector]:
        return [QVector(*map(float, triple)) for triple in self.q]


def parse_energy(text) -> float:
    """Energy literal: plain Hartree, or with a 'Ha'/'eV' suffix."""
    if isinstance(text, (int, float)):
        return float(text)
    raw = str(text).strip()
    lowered = raw.lower()
    if lowered.endswith("ev"):
        return float(raw[:-2]) / HARTREE_TO_EV
    if lowered.endswith("ha"):
        return float(raw[:-2])
    return float(raw)


def parse_q(text: str) -> list[float]:
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 3:
        raise CliError("invalid_config", f"q must have three components: {text!r}")
    return parts


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise CliError("input_not_found", f"config file {path} does not exist",
                           EXIT_INPUT_NOT_FOUND)
        doc = json.loads(path.read_text())
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(doc) - known
        if unknown:
            raise CliError("invalid_config", f"unknown config fields: {sorted(unknown)}")
        for key, value in doc.items():
            setattr(cfg, key, value)
    overrides = {
        "hamiltonian": getattr(args, "hamiltonian", None),
        "dipoles": getattr(args, "dipoles", None),
        "ground_state": getattr(args, "ground_state", None),
        "mode": getattr(args, "mode", None),
        "eta": getattr(args, "eta", None),
        "delta": getattr(args, "delta", None),
        "epsilon_trunc": getattr(args, "epsilon_trunc", None),
        "trotter_k": getattr(args, "k", None),
        "shots": getattr(args, "shots", None),
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "shift_ev": getattr(args, "shift_ev", None),
        "n_alpha": getattr(args, "n_alpha", None),
        "n_beta": getattr(args, "n_beta", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "q", None):
        cfg.q = [parse_q(t) for t in args.q]
    if getattr(args, "cvs", None) is not None:
        cfg.cvs = [int(t) for t in args.cvs.split(",")] if args.cvs else []
    return cfg


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _require_file(path_str: str, what: str) -> Path:
    if not path_str:
        raise CliError("invalid_config", f"no {what} path configured")
    path = Path(path_str)
    if not path.exists():
        raise CliError("input_not_found", f"{what} file {path} does not exist",
                       EXIT_INPUT_NOT_FOUND)
    return path


def _load_ground_state(cfg: RunConfig, h, header):
    """Returns (psi0, E0_or_None, eigensystem_or_None)."""
    if cfg.ground_state == "solve":
        n_alpha = cfg.n_alpha
        n_beta = cfg.n_beta
        if n_alpha is None or n_beta is None:
            nelec = header.get("NELEC", 0)
            ms2 = header.get("MS2", 0)
            if nelec <= 0:
                raise CliError("invalid_config",
                               "cannot solve: electron count unknown "
                               "(set NELEC in FCIDUMP or n_alpha/n_beta)")
            n_alpha = (nelec + ms2) // 2
            n_beta = nelec - n_alpha
        eig = oracle.solve_sector(h, n_alpha, n_beta)
        return eig.eigenvector(0), eig.ground_energy, eig
    path = _require_file(cfg.ground_state, "ground state")
    text = path.read_text()
    if path.suffix == ".jsonl":
        return ci_mod.read_civector_jsonl(text), None, None
    doc_eig = oracle.eigensystem_from_json(text)
    return doc_eig.eigenvector(0), doc_eig.ground_energy, doc_eig


def _resolve_window(cfg: RunConfig, eig, eta: float) -> float:
    if cfg.delta is not None:
        if cfg.delta <= 0:
            raise CliError("invalid_config", "delta must be positive")
        return float(cfg.delta)
    if eig is None:
        raise CliError("invalid_config",
                       "delta is required when the ground state is supplied "
                       "as a file")
    span = float(np.max(eig.energies) - eig.ground_energy)
    return 1.05 * span + 5.0 * eta


def _manifest(cfg: RunConfig, extra: dict, inputs: dict[str, Path]) -> dict:
    return {
        "parameters": dataclasses.asdict(cfg),
        "inputs": {k: {"path": str(p), "sha256": _sha256(p)}
                   for k, p in inputs.items()},
        "versions": {"dsfsim": __version__, "numpy": np.__version__},
        **extra,
    }


def _write(outdir: Path, name: str, text: str) -> None:
    (outdir / name).write_text(text)


def _shifted(spec: sp.Spectrum, shift_ha: float) -> sp.Spectrum:
    if shift_ha == 0.0:
        return spec
    return sp.Spectrum(spec.omega + shift_ha, spec.values, spec.eta,
                       kind=spec.kind, label=spec.label)


def cmd_spectrum(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    if cfg.mode == "oracle":
        return cmd_oracle(args)
    if cfg.mode not in ("sampled", "exact"):
        raise CliError("invalid_config", f"unknown mode {cfg.mode!r}")
    ham_path = _require_file(cfg.hamiltonian, "hamiltonian")
    dip_path = _require_file(cfg.dipoles, "dipole")
    h, header = read_fcidump_file(ham_path)
    dip = load_dipole_json(dip_path.read_text())
    if dip.n_orbitals != h.n_orbitals:
        raise CliError("invalid_config", "dipole and Hamiltonian orbital counts differ")
    psi0, e0, eig = _load_ground_state(cfg, h, header)
    psum = jordan_wigner(h)
    if e0 is None:
        e0 = expectation(psum, ci_mod.ci_to_statevector(psi0)) \
            / max(psi0.norm() ** 2, 1e-300)
    eta = cfg.eta_hartree
    delta = _resolve_window(cfg, eig, eta)
    core = cfg.cvs if cfg.cvs else None
    states = sp.prepare_dipole_states(psi0, dip, core_orbitals=core)
    try:
        plan = sp.plan_run(eta, delta, cfg.epsilon_trunc, cfg.shots,
                           states.moments, cfg.q_vectors, k=cfg.trotter_k)
    except ValueError as exc:
        raise CliError("no_dipole_intensity", str(exc)) from None
    prog = emulator.build_trotter(psum.shifted_identity(-e0), plan.tau, plan.k)
    threads = int(os.environ.get("DSF_SIM_THREADS", "0")) or None
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pair: pool.submit(sp.measure_series, pair, plan, states, prog,
                                     cfg.mode, cfg.seed)
                   for pair in sp.PAIR_KEYS}
        series = {pair: fut.result() for pair, fut in futures.items()}
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = sp.default_omega_grid(plan.tau, eta)
    shift_ha = cfg.shift_ev / HARTREE_TO_EV
    contribs = {}
    for pair, ser in series.items():
        _write(outdir, f"greens_{pair}.json", sp.series_to_json(ser) + "\n")
        contribs[pair] = sp.reconstruct_intensity(ser, grid)
        _write(outdir, f"intensity_{pair}.csv",
               sp.spectrum_to_csv(_shifted(contribs[pair], shift_ha)))
    for i, q in enumerate(cfg.q_vectors):
        dsf = sp.assemble_dsf(q, contribs)
        _write(outdir, f"dsf_q{i}.csv", sp.spectrum_to_csv(_shifted(dsf, shift_ha)))
    manifest = _manifest(cfg, {
        "derived": {
            "tau": plan.tau, "n_max": plan.n_max, "delta": delta,
            "ground_energy": e0, "budgets": plan.budgets,
            "dipole_norms": states.norms,
            "q_list": [[q.qx, q.qy, q.qz] for q in cfg.q_vectors],
        },
    }, {"hamiltonian": ham_path, "dipoles": dip_path})
    _write(outdir, "manifest.json", json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    ham_path = _require_file(cfg.hamiltonian, "hamiltonian")
    dip_path = _require_file(cfg.dipoles, "dipole")
    h, header = read_fcidump_file(ham_path)
    dip = load_dipole_json(dip_path.read_text())
    cfg_solve = dataclasses.replace(cfg, ground_state="solve")
    psi0, e0, eig = _load_ground_state(cfg_solve, h, header)
    trans = oracle.transition_table(eig, dip)
    eta = cfg.eta_hartree
    delta = _resolve_window(cfg, eig, eta)
    tau = math.pi / delta
    grid = np.arange(0.0, math.pi / tau, eta / 5.0)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    shift_ha = cfg.shift_ev / HARTREE_TO_EV
    _write(outdir, "eigensystem.json", oracle.eigensystem_to_json(eig) + "\n")
    _write(outdir, "ground_state.jsonl", ci_mod.write_civector_jsonl(psi0))
    for pair in sp.PAIR_KEYS:
        spec = oracle.exact_intensity(eig, trans, pair, eta, grid)
        _write(outdir, f"oracle_intensity_{pair}.csv",
               sp.spectrum_to_csv(_shifted(spec, shift_ha)))
    for i, q in enumerate(cfg.q_vectors):
        spec = oracle.exact_spectrum(eig, trans, q, eta, grid)
        _write(outdir, f"oracle_dsf_q{i}.csv",
               sp.spectrum_to_csv(_shifted(spec, shift_ha)))
    manifest = _manifest(cfg, {
        "derived": {"ground_energy": e0, "delta": delta,
                    "n_states": eig.n_states},
    }, {"hamiltonian": ham_path, "dipoles": dip_path})
    _write(outdir, "manifest.json", json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return 0


def _parse_orbital_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1, 2))
    return [int(t) for t in text.split(",")]


def cmd_resources(args: argparse.Namespace) -> int:
    model = DEFAULT_MODEL
    if args.table:
        reports = resource_table(_parse_orbital_range(args.table), model)
        text = table_to_csv(reports)
    elif args.n_orbitals:
        plan = reference_plan(model, total_shots=args.shots) \
            if args.shots is not None else reference_plan(model)
        report = algorithm_cost(plan, model, args.n_orbitals)
        text = report_to_json(report) + "\n"
    else:
        raise CliError("invalid_config", "give --table RANGE or --n-orbitals N")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        name = "resources_table.csv" if args.table else "resources.json"
        _write(outdir, name, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    results = validate.run_all()
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_gen_fixtures(args: argparse.Namespace) -> int:
    spec = fixtures.ModelSpec(n_orbitals=args.n_orbitals,
                              n_electrons=args.n_electrons,
                              seed=args.seed, kind=args.kind,
                              core_gap=args.core_gap)
    paths = fixtures.write_fixture(spec, args.out)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsfsim",
        description="Momentum-resolved spectra from emulated time-domain "
                    "Green's-function measurements")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--hamiltonian", help="FCIDUMP path")
        p.add_argument("--dipoles", help="dipole JSON path")
        p.add_argument("--ground-state", dest="ground_state",
                       help="CI-vector .jsonl, eigensystem .json, or 'solve'")
        p.add_argument("--mode", choices=["sampled", "exact", "oracle"])
        p.add_argument("--eta", help="broadening, Hartree (or e.g. '1.63eV')")
        p.add_argument("--delta", type=float, help="spectral window, Hartree")
        p.add_argument("--epsilon-trunc", dest="epsilon_trunc", type=float)
        p.add_argument("--k", type=int, help="Trotter substeps per tau")
        p.add_argument("--shots", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--q", action="append", help="momentum 'qx,qy,qz' (repeatable)")
        p.add_argument("--cvs", help="comma-separated core orbitals")
        p.add_argument("--shift-ev", dest="shift_ev", type=float,
                       help="additive display shift for omega, eV")
        p.add_argument("--n-alpha", dest="n_alpha", type=int)
        p.add_argument("--n-beta", dest="n_beta", type=int)
        p.add_argument("--out", help="output directory")

    p_spec = sub.add_parser("spectrum", help="measure and reconstruct spectra")
    add_common(p_spec)
    p_spec.set_defaults(fn=cmd_spectrum)

    p_oracle = sub.add_parser("oracle", help="exact-diagonalization reference")
    add_common(p_oracle)
    p_oracle.set_defaults(fn=cmd_oracle)

    p_res = sub.add_parser("resources", help="logical resource estimates")
    p_res.add_argument("--table", help="orbital range, e.g. '14..30' or '14,18'")
    p_res.add_argument("--n-orbitals", dest="n_orbitals", type=int)
    p_res.add_argument("--shots", type=int, help="total shot budget")
    p_res.add_argument("--out", help="output directory")
    p_res.set_defaults(fn=cmd_resources)

    p_val = sub.add_parser("validate", help="run the invariant suite")
    p_val.set_defaults(fn=cmd_validate)

    p_gen = sub.add_parser("gen-fixtures", help="write a deterministic model system")
    p_gen.add_argument("--kind", choices=list(fixtures.KINDS),
                       default=fixtures.RANDOM_TWO_BODY)
    p_gen.add_argument("--n-orbitals", dest="n_orbitals", type=int, default=2)
    p_gen.add_argument("--n-electrons", dest="n_electrons", type=int, default=2)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--core-gap", dest="core_gap", type=float, default=20.0)
    p_gen.add_argument("--out", default="fixtures_out")
    p_gen.set_defaults(fn=cmd_gen_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        sys.stderr.write(json.dumps(
            {"error": {"kind": exc.kind, "message": str(exc)}}) + "\n")
        return exc.exit_code
    except FileNotFoundError as exc:
        sys.stderr.write(json.dumps(
            {"error": {"kind": "input_not_found", "message": str(exc)}}) + "\n")
        return EXIT_INPUT_NOT_FOUND
    except Exception as exc:  # pragma: no cover - defensive envelope
        sys.stderr.write(json.dumps(
            {"error": {"kind": "internal_error",
                       "message": f"{type(exc).__name__}: {exc}"}}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

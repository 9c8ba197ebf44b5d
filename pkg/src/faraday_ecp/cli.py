"""Command line front end.

Subcommands:

* ``cavity``: closed-form reflection report, or a probe-frequency sweep.
* ``round``: one seeded protocol round on a fresh register.
* ``protocol``: Monte Carlo estimate of the success ledger, compared
  against the closed form.
* ``figure``: comparison tables over an ``|alpha|^2`` grid.

Every run is deterministic given its inputs.  The master seed resolves
in precedence order: explicit ``--seed``, config file, the
``FARADAY_ECP_SEED`` environment variable, then 0.  A config file
(``--config``) holds ``key = value`` lines whose keys match the long
flag names (``-`` and ``_`` interchangeable); explicit flags win.

CSV output uses fixed six-decimal floats; JSON output is unrounded.
Exit status is 0 exactly when no error occurred.
"""

from __future__ import annotations

import argparse
import json
import sys
import os

import numpy as np

from .analytics import (
    DetectionEfficiency,
    default_alpha2_grid,
    figure4_table,
    figure5_table,
    total_probability,
)
from .cavity import (
    CavityParams,
    SingularParameterError,
    empty_cavity_reflection,
    faraday_angles,
    gate_phase_error,
    ideal_operating_point,
    phase_pair,
    reflection_coefficient,
)
from .engine import CoefficientPair, ghz_target, prepare_initial, run_round
from .montecarlo import (
    LossModel,
    SimulationConfig,
    agreement,
    estimate,
    kernel_available,
)
from .rng import trial_stream
from .states import fidelity

ENV_SEED = "FARADAY_ECP_SEED"


def _alpha2_type(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha2 must lie strictly between 0 and 1")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _atoms_type(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("the register needs at least two atoms")
    return value


def _efficiency_type(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("efficiencies lie in [0, 1]")
    return value


def _load_config(path: str) -> dict:
    table = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            table[key.strip().replace("-", "_")] = value.strip()
    return table


def _resolve(args, config: dict, name: str, fallback, cast):
    """Flag value if given, else config value, else the fallback."""
    value = getattr(args, name)
    if value is not None:
        return value
    if name in config:
        return cast(config[name])
    return fallback


def _resolve_flag(args, config: dict, name: str) -> bool:
    if getattr(args, name):
        return True
    return config.get(name, "").lower() in ("1", "true", "yes", "on")


def _resolve_seed(args, config: dict) -> int:
    value = _resolve(args, config, "seed", None, int)
    if value is not None:
        return value
    env = os.environ.get(ENV_SEED)
    if env is not None:
        return int(env)
    return 0


def _require(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required (flag or config file)")
    return value


def _format_complex(z: complex) -> str:
    # +0.0 folds negative zero so reports read -1.000000+0.000000i
    return f"{z.real + 0.0:.6f}{z.imag + 0.0:+.6f}i"


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_lines(path, lines: list[str]) -> None:
    handle, owned = _open_out(path)
    try:
        handle.write("\n".join(lines) + "\n")
    finally:
        if owned:
            handle.close()


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6f}"


def _write_csv(path, header: list[str], rows: list[dict]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(row[key]) for key in header))
    _write_lines(path, lines)


def _write_json(path, payload) -> None:
    handle, owned = _open_out(path)
    try:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    finally:
        if owned:
            handle.close()


def _cmd_cavity(args) -> int:
    config = _load_config(args.config) if args.config else {}
    kappa = _resolve(args, config, "kappa", 1.0, float)
    if _resolve_flag(args, config, "ideal"):
        params = ideal_operating_point(kappa)
    else:
        gamma = _resolve(args, config, "gamma", 0.0, float)
        g = _resolve(args, config, "g", kappa / 2.0, float)
        detuning_c = _resolve(args, config, "detuning_c", kappa / 2.0, float)
        detuning_0 = _resolve(args, config, "detuning_0", 0.0, float)
        params = CavityParams(
            omega_c=1.0,
            omega_0=1.0 + detuning_0,
            omega_p=1.0 - detuning_c,
            kappa=kappa,
            gamma=gamma,
            g=g,
        )
    sweep = _resolve(args, config, "sweep", None, str)
    if sweep is None:
        r = reflection_coefficient(params)
        r0 = empty_cavity_reflection(params)
        phases = phase_pair(params)
        theta_minus, theta_plus = faraday_angles(phases)
        _write_lines(
            None,
            [
                f"r = {_format_complex(r)}",
                f"r0 = {_format_complex(r0)}",
                f"phi = {phases.phi:.6f}",
                f"phi0 = {phases.phi_0:.6f}",
                f"theta_minus = {theta_minus:.6f}",
                f"theta_plus = {theta_plus:.6f}",
                f"gate_phase_error = {gate_phase_error(params):.6f}",
            ],
        )
        return 0
    variable, low, high, steps = _parse_sweep(sweep)
    header = [
        "omega_p", "r_re", "r_im", "r0_re", "r0_im",
        "phi", "phi0", "theta_minus", "theta_plus", "gate_error",
    ]
    rows = []
    for omega_p in np.linspace(low, high, steps):
        point = CavityParams(
            omega_c=params.omega_c,
            omega_0=params.omega_0,
            omega_p=float(omega_p),
            kappa=params.kappa,
            gamma=params.gamma,
            g=params.g,
        )
        r = reflection_coefficient(point)
        r0 = empty_cavity_reflection(point)
        phases = phase_pair(point)
        theta_minus, theta_plus = faraday_angles(phases)
        rows.append(
            {
                "omega_p": float(omega_p),
                "r_re": r.real, "r_im": r.imag,
                "r0_re": r0.real, "r0_im": r0.imag,
                "phi": phases.phi, "phi0": phases.phi_0,
                "theta_minus": theta_minus, "theta_plus": theta_plus,
                "gate_error": gate_phase_error(point),
            }
        )
    _write_csv(args.out, header, rows)
    return 0


def _parse_sweep(spec: str):
    parts = spec.split(":")
    if len(parts) != 4 or parts[0] != "wp":
        raise ValueError("sweep spec must look like wp:MIN:MAX:STEPS")
    low, high = float(parts[1]), float(parts[2])
    steps = int(parts[3])
    if steps < 2:
        raise ValueError("a sweep needs at least two steps")
    return parts[0], low, high, steps


def _cmd_round(args) -> int:
    config = _load_config(args.config) if args.config else {}
    alpha2 = _require(_resolve(args, config, "alpha2", None, _alpha2_type), "--alpha2")
    n_atoms = _resolve(args, config, "n", 2, _atoms_type)
    seed = _resolve_seed(args, config)
    pair = CoefficientPair.from_alpha2(alpha2)
    state = prepare_initial(pair, n_atoms)
    result = run_round(state, pair, trial_stream(seed, 0))
    if result.classification.is_success:
        target = ghz_target(n_atoms)
    else:
        target = prepare_initial(result.next_coefficients, n_atoms)
    _write_lines(
        None,
        [
            f"outcome={result.outcome.photon},{result.outcome.aux_atom}",
            f"classification={result.classification.value}",
            f"probability={result.probability:.6f}",
            f"fidelity={fidelity(result.corrected_state, target):.9f}",
        ],
    )
    return 0


def _cmd_protocol(args) -> int:
    config = _load_config(args.config) if args.config else {}
    alpha2 = _require(_resolve(args, config, "alpha2", None, _alpha2_type), "--alpha2")
    n_atoms = _resolve(args, config, "n", 2, _atoms_type)
    max_rounds = _resolve(args, config, "max_rounds", 5, _positive_int)
    trials = _resolve(args, config, "trials", 100_000, _positive_int)
    seed = _resolve_seed(args, config)
    loss_name = _resolve(args, config, "loss_model", "none", str)
    eta_p = _resolve(args, config, "eta_p", None, _efficiency_type)
    eta_a = _resolve(args, config, "eta_a", None, _efficiency_type)
    backend = _resolve(args, config, "backend", "auto", str)

    loss_model = LossModel(loss_name)
    efficiency = None
    if loss_model is not LossModel.NONE:
        if eta_p is None or eta_a is None:
            raise ValueError(f"loss model {loss_name!r} needs --eta-p and --eta-a")
        efficiency = DetectionEfficiency(eta_p=eta_p, eta_a=eta_a)
    elif eta_p is not None or eta_a is not None:
        raise ValueError("--eta-p/--eta-a are only meaningful with a loss model")

    pair = CoefficientPair.from_alpha2(alpha2)
    sim = SimulationConfig(
        coefficients=pair,
        n_atoms=n_atoms,
        max_rounds=max_rounds,
        trials=trials,
        master_seed=seed,
        loss_model=loss_model,
        efficiency=efficiency,
    )
    if backend == "auto":
        backend = "compiled" if kernel_available() else "python"
    ledger = estimate(sim, backend=backend)
    rows = agreement(ledger, pair)
    for row, stderr in zip(rows, ledger.stderr_k):
        row["stderr"] = stderr
    payload = {
        "alpha2": alpha2,
        "n_atoms": n_atoms,
        "max_rounds": max_rounds,
        "trials": trials,
        "master_seed": seed,
        "loss_model": loss_model.value,
        "eta_p": eta_p,
        "eta_a": eta_a,
        "backend": backend,
        "rounds": rows,
        "empirical_total": ledger.empirical_total,
        "analytic_total": total_probability(pair, max_rounds),
    }
    if args.format == "csv":
        header = ["round", "successes", "empirical_p", "stderr", "analytic_p", "z"]
        _write_csv(args.out, header, rows)
    else:
        _write_json(args.out, payload)
    return 0


def _cmd_figure(args) -> int:
    config = _load_config(args.config) if args.config else {}
    which = _require(_resolve(args, config, "which", None, str), "--which")
    grid_points = _resolve(args, config, "grid", 199, _positive_int)
    max_rounds = _resolve(args, config, "k", 5, _positive_int)
    grid = default_alpha2_grid(grid_points)
    if which == "4":
        rows = figure4_table(grid, max_rounds=max_rounds)
        header = ["alpha", "alpha2", "p_total_ours", "p_reference"]
    elif which == "5":
        rows = figure5_table(grid, max_rounds=max_rounds)
        header = ["alpha", "alpha2", "p_total_ours", "p_ref_n5", "p_ref_n10"]
    else:
        raise ValueError("--which must be 4 or 5")
    if args.format == "json":
        _write_json(args.out, rows)
    else:
        _write_csv(args.out, header, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faraday-ecp",
        description="Cavity-assisted entanglement concentration: simulation and analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cavity = sub.add_parser("cavity", help="reflection phases and rotation angles")
    cavity.add_argument("--kappa", type=float, default=None, help="cavity linewidth (default 1)")
    cavity.add_argument("--gamma", type=float, default=None, help="atomic linewidth (default 0)")
    cavity.add_argument("--g", type=float, default=None, help="coupling (default kappa/2)")
    cavity.add_argument(
        "--detuning-c", type=float, default=None, dest="detuning_c",
        help="probe detuning omega_c - omega_p (default kappa/2)",
    )
    cavity.add_argument(
        "--detuning-0", type=float, default=None, dest="detuning_0",
        help="atomic detuning omega_0 - omega_c (default 0)",
    )
    cavity.add_argument("--ideal", action="store_true", help="use the ideal operating point")
    cavity.add_argument("--sweep", default=None, help="probe sweep wp:MIN:MAX:STEPS (CSV output)")
    cavity.add_argument("--out", default=None, help="sweep output path, - for stdout")
    cavity.add_argument("--config", default=None, help="key=value defaults file")
    cavity.set_defaults(func=_cmd_cavity)

    round_cmd = sub.add_parser("round", help="run one seeded protocol round")
    round_cmd.add_argument("--alpha2", type=_alpha2_type, default=None, help="|alpha|^2 in (0,1)")
    round_cmd.add_argument("--n", type=_atoms_type, default=None, help="register size (default 2)")
    round_cmd.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    round_cmd.add_argument("--config", default=None, help="key=value defaults file")
    round_cmd.set_defaults(func=_cmd_round)

    protocol = sub.add_parser("protocol", help="Monte Carlo success ledger")
    protocol.add_argument("--alpha2", type=_alpha2_type, default=None, help="|alpha|^2 in (0,1)")
    protocol.add_argument("--n", type=_atoms_type, default=None, help="register size (default 2)")
    protocol.add_argument(
        "--max-rounds", type=_positive_int, default=None, dest="max_rounds",
        help="recycling budget (default 5)",
    )
    protocol.add_argument("--trials", type=_positive_int, default=None, help="trial count (default 100000)")
    protocol.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    protocol.add_argument(
        "--loss-model", default=None, dest="loss_model",
        choices=[m.value for m in LossModel],
        help="detector loss accounting (default none)",
    )
    protocol.add_argument("--eta-p", type=_efficiency_type, default=None, dest="eta_p",
                          help="photon detector efficiency")
    protocol.add_argument("--eta-a", type=_efficiency_type, default=None, dest="eta_a",
                          help="atom detector efficiency")
    protocol.add_argument("--backend", default=None, choices=["auto", "compiled", "python"],
                          help="trial loop implementation (default auto)")
    protocol.add_argument("--format", default="json", choices=["json", "csv"], help="output format")
    protocol.add_argument("--out", default=None, help="output path, - for stdout")
    protocol.add_argument("--config", default=None, help="key=value defaults file")
    protocol.set_defaults(func=_cmd_protocol)

    figure = sub.add_parser("figure", help="comparison tables over an |alpha|^2 grid")
    figure.add_argument("--which", default=None, choices=["4", "5"], help="table to emit")
    figure.add_argument("--grid", type=_positive_int, default=None, help="grid points (default 199)")
    figure.add_argument("--k", type=_positive_int, default=None, help="recycling budget (default 5)")
    figure.add_argument("--format", default="csv", choices=["csv", "json"], help="output format")
    figure.add_argument("--out", default=None, help="output path, - for stdout")
    figure.add_argument("--config", default=None, help="key=value defaults file")
    figure.set_defaults(func=_cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SingularParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

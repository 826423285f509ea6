"""Command line front end.

Subcommands::

    simulate   sample a synthetic dataset from a protocol and analyse it
    bounds     classical and qutrit maxima of the witness
    leakage    leakage amplitude, maximal leak, global phase, ODE comparison
    analyze    witness reports for a dataset file
    report     results-table row (JSON and aligned text) for a dataset file

Exit status: 0 on success, 2 when the null test fails (``|W| > threshold * sigma``),
1 on usage or validation errors.  Every JSON artifact carries the tool
version, the resolved configuration and the seed, and contains nothing
time-dependent, so identical invocations give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import QUTRIT_OPTIMUM, enumerate_classical, maximize_qutrit
from .models import NoiseConfig, NoiseKind, ideal_protocol, noisy_protocol, protocol_table
from .pulse import (
    PulseParams,
    global_phase_theta,
    leak_amplitude_forms,
    leak_amplitude_z,
    leak_probability,
    maximizing_state,
    simulate_three_level,
)
from .stats_io import DatasetError, dataset_from_dict, dataset_to_dict, report, sample_counts
from .witness import DegenerateProtocolError

EXIT_OK, EXIT_USAGE, EXIT_FAULTY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="write the JSON artifact here (default: stdout)")


def _dataset_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", type=Path, required=True, help="dataset JSON file")
    p.add_argument("--threshold-sigma", type=float, default=5.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dimwitness", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="sample and analyse a synthetic dataset")
    _common(sim)
    sim.add_argument("--noise", choices=["none"] + [k.value for k in NoiseKind], default="none")
    sim.add_argument("--strength", type=float, default=0.0)
    sim.add_argument("--shots", type=int, default=10000)
    sim.add_argument("--jobs", type=int, default=10)
    sim.add_argument("--reps", type=int, default=10)
    sim.add_argument("--threshold-sigma", type=float, default=5.0)
    sim.add_argument("--dataset-out", type=Path, help="also write the bare dataset JSON here")

    b = sub.add_parser("bounds", help="classical and qutrit maxima")
    _common(b)
    b.add_argument("--restarts", type=int, default=64)

    lk = sub.add_parser("leakage", help="pulse leakage estimates")
    _common(lk)
    defaults = PulseParams()
    lk.add_argument("--pulse-nT", type=int, default=defaults.n_T)
    lk.add_argument("--pulse-nsigma", type=int, default=defaults.n_sigma)
    lk.add_argument("--pulse-dt", type=float, default=defaults.delta_t, help="sampling time [ns]")
    lk.add_argument("--pulse-nu", type=float, default=defaults.nu, help="anharmonicity [GHz]")
    lk.add_argument("--pulse-lambda", type=float, default=defaults.lam)
    lk.add_argument("--no-ode", action="store_true", help="skip the three-level integration")

    for name, text in (("analyze", "witness reports for a dataset"), ("report", "results-table row")):
        a = sub.add_parser(name, help=text)
        _common(a)
        _dataset_opts(a)
    return parser


def _artifact(command: str, config: dict, seed: int, result: dict) -> dict:
    return {"tool": "dimwitness", "version": __version__, "command": command,
            "config": config, "seed": seed, "result": result}


def _write(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _config(args: argparse.Namespace) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())}


def _run_simulate(args) -> int:
    if args.noise == "none":
        spec = ideal_protocol()
    else:
        spec = noisy_protocol(NoiseConfig(NoiseKind(args.noise), args.strength))
    table = protocol_table(spec)
    data = sample_counts(table, args.shots, args.jobs, args.reps, args.seed,
                         device=f"synthetic:{args.noise}", qubit=0)
    row = report(data, args.threshold_sigma)
    if args.dataset_out is not None:
        args.dataset_out.write_text(json.dumps(dataset_to_dict(data), indent=2) + "\n", encoding="utf-8")
    result = {"exact_table": table.as_dict(), "dataset": dataset_to_dict(data), "report": row.to_dict()}
    _write(_artifact("simulate", _config(args), args.seed, result), args.out)
    return EXIT_FAULTY if row.faulty else EXIT_OK


def _run_bounds(args) -> int:
    if args.restarts < 1:
        raise ValueError("--restarts must be >= 1")
    tables, values = enumerate_classical()
    best = np.flatnonzero(values == values.max())
    params, value = maximize_qutrit(args.seed, args.restarts)
    result = {
        "classical_max": float(values.max()),
        "classical_min": float(values.min()),
        "classical_argmax": [tables[k].astype(int).tolist() for k in best],
        "qutrit_max": value,
        "qutrit_reference": QUTRIT_OPTIMUM,
        "qutrit_params": {"phi": params.phi, "alpha1": params.alpha1,
                          "alpha2": params.alpha2, "alpha3": params.alpha3},
    }
    _write(_artifact("bounds", _config(args), args.seed, result), args.out)
    return EXIT_OK


def _run_leakage(args) -> int:
    p = PulseParams(args.pulse_nT, args.pulse_nsigma, args.pulse_dt, args.pulse_nu, args.pulse_lambda)
    z = leak_amplitude_z(p)
    direct, by_parts = leak_amplitude_forms(p)
    result = {
        "params": {"n_T": p.n_T, "n_sigma": p.n_sigma, "delta_t_ns": p.delta_t, "nu_GHz": p.nu,
                   "lambda": p.lam, "T_ns": p.T, "sigma_ns": p.sigma, "Delta_rad_per_ns": p.Delta},
        "z": [z.real, z.imag],
        "z_by_parts": [by_parts.real, by_parts.imag],
        "z_forms_rel_diff": abs(direct - by_parts) / abs(direct),
        "max_leak_4z2": 4 * abs(z) ** 2,
        "theta": global_phase_theta(p),
    }
    if not args.no_ode:
        psi0, psi1 = maximizing_state(z)
        start = np.array([psi0, psi1, 0])
        plain = simulate_three_level(p, start, drag=False)
        drag = simulate_three_level(p, start, drag=True)
        result["ode"] = {
            "perturbative": leak_probability(psi0, psi1, z),
            "leak_no_drag": abs(plain[2]) ** 2,
            "leak_drag": abs(drag[2]) ** 2,
        }
    _write(_artifact("leakage", _config(args), args.seed, result), args.out)
    return EXIT_OK


def _load_dataset(path: Path):
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: malformed JSON: {exc}") from None
    return dataset_from_dict(doc)


def _run_dataset(args) -> int:
    row = report(_load_dataset(args.input), args.threshold_sigma)
    if args.command == "analyze":
        result = {"mode_i": row.mode_i.to_dict(), "mode_ii": row.mode_ii.to_dict(),
                  "sanity": row.sanity.to_dict(), "faulty": row.faulty}
        _write(_artifact("analyze", _config(args), args.seed, result), args.out)
    else:
        _write(_artifact("report", _config(args), args.seed, row.to_dict()), args.out)
        sys.stderr.write(row.to_text() + "\n")
    return EXIT_FAULTY if row.faulty else EXIT_OK


_COMMANDS = {
    "simulate": _run_simulate,
    "bounds": _run_bounds,
    "leakage": _run_leakage,
    "analyze": _run_dataset,
    "report": _run_dataset,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DatasetError, DegenerateProtocolError, ValueError) as exc:
        sys.stderr.write(f"dimwitness {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

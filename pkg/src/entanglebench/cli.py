"""Batch front door: config ingestion, experiment dispatch, report emission.

Usage: ``entangle-bench <experiment> --config <path> [--seed N] [--out <path>]``

The config file is a single JSON object; command-line flags override its
fields and every omitted field falls back to a documented default.  Each run
writes one CSV report (schema fixed per experiment, versioned in a header
comment) plus a JSON sidecar echoing the fully resolved configuration, so a
result file always carries enough provenance to be regenerated bit for bit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from .experiments import (
    run_convergence,
    run_emulate,
    run_estimate,
    run_evolution,
    run_kak_verify,
    run_moments_table,
)
from .hardware import CouplingGraph, NoiseModel, noise_preset, preset_graph

EXPERIMENTS = ("converge", "moments", "estimate", "emulate", "evolve", "kak-verify")

_COLUMNS = {
    "converge": ("method", "m", "N_e", "delta_mu", "delta_sigma2"),
    "moments": ("n", "n_a", "mean_exact", "var_exact"),
    "estimate": ("n", "n_a", "purity_est", "std_err", "purity_exact"),
    "emulate": ("n", "n_a", "purity_est", "std_err", "purity_exact"),
    "evolve": ("step", "n_a", "purity"),
    "kak-verify": ("index", "reconstruction_error", "cnot_count", "rotation_count"),
}

_METHOD_NAMES = {"direct": "Direct", "kak": "KAK"}

_CONFIG_KEYS = frozenset(
    {
        "experiment",
        "n_qubits",
        "method",
        "layers",
        "ensemble",
        "settings",
        "shots",
        "topology",
        "noise",
        "seed",
        "out",
    }
)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameters of one experiment run.

    ``layers`` doubles as the step count for the evolve experiment and
    ``ensemble`` as the sample count for kak-verify; experiments ignore the
    fields they have no use for (they are still echoed in the sidecar).
    """

    experiment: str
    n_qubits: int
    method: str
    layers: int
    ensemble: int
    settings: int
    shots: int
    topology: str
    noise: Union[str, dict]
    seed: int
    out: str


def _require_int(name: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _canonical_method(value: Any) -> str:
    if not isinstance(value, str) or value.lower() not in _METHOD_NAMES:
        raise ConfigError(f"method must be one of Direct/KAK, got {value!r}")
    return _METHOD_NAMES[value.lower()]


def resolve_noise(noise: Union[str, dict]) -> NoiseModel:
    """Turn a preset name or an explicit {p1, p2, p_spam} object into a model."""
    try:
        if isinstance(noise, str):
            return noise_preset(noise)
        if isinstance(noise, dict):
            if set(noise) != {"p1", "p2", "p_spam"}:
                raise ValueError(
                    "explicit noise needs exactly the keys p1, p2, p_spam"
                )
            return NoiseModel(
                p1=float(noise["p1"]),
                p2=float(noise["p2"]),
                p_spam=float(noise["p_spam"]),
            )
        raise ValueError(f"noise must be a preset name or an object, got {noise!r}")
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad noise field: {exc}") from exc


def resolve_graph(topology: str) -> CouplingGraph:
    """Look up a topology preset name, mapping failures to config errors."""
    try:
        return preset_graph(topology)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad topology field: {exc}") from exc


def load_config(path: Union[str, Path]) -> dict:
    """Read a JSON config file into a plain dict of raw fields."""
    try:
        with open(path, encoding="utf-8") as fh:
            fields = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(fields, dict):
        raise ConfigError("config file must contain a single JSON object")
    return fields


def build_config(
    experiment: str,
    file_fields: dict,
    seed: Union[int, None] = None,
    out: Union[str, None] = None,
) -> ExperimentConfig:
    """Merge file fields, flag overrides, and defaults into a validated config."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}"
        )
    unknown = sorted(set(file_fields) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")

    fields = dict(file_fields)
    fields["experiment"] = experiment
    if seed is not None:
        fields["seed"] = seed
    if out is not None:
        fields["out"] = str(out)

    n_qubits = _require_int("n_qubits", fields.get("n_qubits", 4), 2)
    # estimate defaults to a single state so its purity_exact column refers
    # to that exact state; converge needs >= 2 members for sample variances.
    default_ensemble = 1 if experiment == "estimate" else 10
    min_ensemble = 2 if experiment == "converge" else 1
    config = ExperimentConfig(
        experiment=experiment,
        n_qubits=n_qubits,
        method=_canonical_method(fields.get("method", "Direct")),
        layers=_require_int("layers", fields.get("layers", 20), 1),
        ensemble=_require_int(
            "ensemble", fields.get("ensemble", default_ensemble), min_ensemble
        ),
        settings=_require_int("settings", fields.get("settings", 20), 2),
        shots=_require_int("shots", fields.get("shots", 1000), 1),
        topology=fields.get("topology", f"all_to_all:{n_qubits}"),
        noise=fields.get("noise", "noiseless"),
        seed=_require_int("seed", fields.get("seed", 0), 0),
        out=fields.get("out", f"{experiment}.csv"),
    )
    if not isinstance(config.topology, str):
        raise ConfigError(f"topology must be a string, got {config.topology!r}")
    if not isinstance(config.out, str) or not config.out:
        raise ConfigError(f"out must be a non-empty path, got {config.out!r}")
    resolve_noise(config.noise)
    graph = resolve_graph(config.topology)
    if config.experiment in ("emulate", "evolve") and graph.n_qubits < n_qubits:
        raise ConfigError(
            f"topology {config.topology} has {graph.n_qubits} qubits, "
            f"fewer than n_qubits={n_qubits}"
        )
    return config


def run(config: ExperimentConfig) -> tuple[tuple[str, ...], list[tuple]]:
    """Execute the configured experiment and return (columns, rows)."""
    rng = np.random.default_rng(config.seed)
    if config.experiment == "converge":
        rows = run_convergence(
            config.n_qubits,
            (config.method,),
            config.layers,
            config.ensemble,
            config.seed,
            rng,
        )
    elif config.experiment == "moments":
        rows = run_moments_table(config.n_qubits)
    elif config.experiment == "estimate":
        rows = run_estimate(
            config.n_qubits,
            config.method,
            config.layers,
            config.settings,
            config.shots,
            rng,
        )
    elif config.experiment == "emulate":
        rows = run_emulate(
            config.n_qubits,
            config.method,
            resolve_graph(config.topology),
            resolve_noise(config.noise),
            config.ensemble,
            config.settings,
            config.shots,
            rng,
        )
    elif config.experiment == "evolve":
        rows = run_evolution(
            config.n_qubits,
            config.method,
            resolve_graph(config.topology),
            resolve_noise(config.noise),
            config.layers,
            rng,
        )
    else:
        rows = run_kak_verify(config.ensemble, rng)
    return _COLUMNS[config.experiment], rows


def write_reports(
    config: ExperimentConfig, columns: Sequence[str], rows: Sequence[tuple]
) -> tuple[Path, Path]:
    """Write the CSV report and its JSON config sidecar; return both paths."""
    csv_path = Path(config.out)
    sidecar_path = csv_path.with_suffix(".json")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# entangle-bench {config.experiment} csv v1\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
    sidecar = {"columns": list(columns), "config": asdict(config)}
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, sidecar_path


def _emit_error(kind: str, message: str) -> None:
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")


def main(argv: Union[Sequence[str], None] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="entangle-bench",
        description="Pseudo-random state generation and purity benchmarks",
    )
    parser.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="master seed (overrides config)")
    parser.add_argument("--out", help="CSV output path (overrides config)")
    args = parser.parse_args(argv)

    try:
        file_fields = load_config(args.config) if args.config else {}
        config = build_config(args.experiment, file_fields, args.seed, args.out)
        if args.config:
            config_file = Path(args.config).resolve()
            csv_path = Path(config.out)
            for target in (csv_path, csv_path.with_suffix(".json")):
                if target.resolve() == config_file:
                    raise ConfigError(
                        f"output {target} would overwrite the config file; "
                        "choose a different --out"
                    )
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return 2

    try:
        columns, rows = run(config)
        csv_path, sidecar_path = write_reports(config, columns, rows)
    except Exception as exc:  # noqa: BLE001 - report verbatim, exit nonzero
        _emit_error("runtime", str(exc))
        return 1

    print(f"wrote {csv_path} and {sidecar_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

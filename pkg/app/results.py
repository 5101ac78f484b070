"""
Result Files
Writes throughput curves as CSV with a JSON sidecar of the experiment
configuration that produced them.
"""

import csv
from pathlib import Path
from typing import Iterable

from app.data_models import ExperimentConfig
from app.netsim import CurvePoint

CSV_HEADER = ["snr_db", "scheme", "trials", "success_rate", "throughput_bits_per_dim", "ci95"]


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def write_curves_csv(points: Iterable[CurvePoint], path) -> Path:
    """One row per (SNR, scheme); fixed formatting keeps reruns byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        for p in points:
            writer.writerow(
                {
                    "snr_db": _fmt(p.snr_db),
                    "scheme": p.scheme,
                    "trials": p.trials,
                    "success_rate": _fmt(p.success_rate),
                    "throughput_bits_per_dim": _fmt(p.throughput),
                    "ci95": _fmt(p.ci95),
                }
            )
    return path


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def save_config_sidecar(config: ExperimentConfig, csv_path) -> Path:
    """Saves a sidecar JSON file with the full experiment configuration."""
    path = sidecar_path(csv_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(config.model_dump_json(indent=2))
    return path


def load_config_sidecar(csv_path) -> ExperimentConfig:
    return ExperimentConfig.load(sidecar_path(csv_path))

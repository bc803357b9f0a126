"""Run the same embed / attack / extract pipeline over several transform domains.

Only the carrier changes between runs (see :mod:`wavestego.carriers`); block
ranking, scrambling, modulation, fusion and metrics are shared. Results go
to a CSV with one row per (transform, attack, severity, logo, metric),
averaged over the attack seeds.

Config file: ``key = value`` lines, ``#`` starts a comment. Keys::

    cover       PGM path, or "synthetic" (default)
    logo        PGM path, or "synthetic"
    audio       WAV path, or "synthetic"
    text        text file path, or "synthetic"
    master_key  hex, up to 16 digits (default 0)
    alpha       modulation index (default 0.1)
    mode        nonadaptive | adaptive
    gain        enhancement gain (default 1.2)
    transforms  comma-separated subset of dwt, dct, wht, dft
    attacks     comma-separated attack strings, e.g. none, gaussian:4, jpeg:75
    seeds       seeds per stochastic attack point (default 1)
    seed        first seed (default 0)
    lossless    true | false (default false); when true the "none" attack
                extracts from the real-valued stego instead of the 8-bit one

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .attacks import AttackSpec, apply_attack, parse_attack
from .carriers import CARRIERS
from .imagecore import load_gray, load_wav
from .payload import derive_slot_keys, parse_master_key
from .report import imperceptibility, recovery
from .samples import SAMPLE_TEXT, synthetic_audio, synthetic_cover, synthetic_logo
from .stego import embed, extract, make_payloads

__all__ = [
    "ComparisonConfig",
    "load_config",
    "parse_config",
    "run_comparison",
    "comparison_csv",
    "mean_ber_curve",
    "COMPARE_COLUMNS",
]

COMPARE_COLUMNS = ("schema", "config_hash", "transform", "attack", "severity", "logo", "metric", "value", "runs")
COMPARE_SCHEMA = 1
STOCHASTIC = {"gaussian", "saltpepper"}
LOGO_METRICS = ("ber", "ber_tolerant", "mi", "ssim")


@dataclass
class ComparisonConfig:
    cover: str = "synthetic"
    logo: str = "synthetic"
    audio: str = "synthetic"
    text: str = "synthetic"
    master_key: str = "0"
    alpha: float = 0.1
    mode: str = "nonadaptive"
    gain: float = 1.2
    transforms: list = field(default_factory=lambda: ["dwt", "dct", "wht", "dft"])
    attacks: list = field(default_factory=lambda: ["none"])
    seeds: int = 1
    seed: int = 0
    lossless: bool = False


def parse_config(text: str, base_dir: str | os.PathLike = ".") -> ComparisonConfig:
    cfg = ComparisonConfig()
    known = set(asdict(cfg))
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in known:
            raise ValueError(f"config line {n}: unrecognised entry {raw.strip()!r}")
        if key in ("cover", "logo", "audio", "text"):
            if value != "synthetic":
                value = str(Path(base_dir, value))
            setattr(cfg, key, value)
        elif key in ("alpha", "gain"):
            setattr(cfg, key, float(value))
        elif key in ("seeds", "seed"):
            setattr(cfg, key, int(value))
        elif key == "lossless":
            if value.lower() not in ("true", "false"):
                raise ValueError(f"config line {n}: lossless must be true or false")
            cfg.lossless = value.lower() == "true"
        elif key in ("transforms", "attacks"):
            setattr(cfg, key, [v.strip().lower() for v in value.split(",") if v.strip()])
        else:
            setattr(cfg, key, value)
    for t in cfg.transforms:
        if t not in CARRIERS:
            raise ValueError(f"unimplemented transform {t!r}; choose from {sorted(CARRIERS)}")
    for a in cfg.attacks:
        parse_attack(a)
    if cfg.seeds < 1:
        raise ValueError("seeds must be >= 1")
    parse_master_key(cfg.master_key)
    return cfg


def load_config(path: str | os.PathLike) -> ComparisonConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), Path(path).parent)


def _inputs(cfg: ComparisonConfig):
    cover = synthetic_cover() if cfg.cover == "synthetic" else load_gray(cfg.cover)
    logo = synthetic_logo() if cfg.logo == "synthetic" else load_gray(cfg.logo)
    audio = synthetic_audio() if cfg.audio == "synthetic" else load_wav(cfg.audio)
    if cfg.text == "synthetic":
        text = SAMPLE_TEXT
    else:
        with open(cfg.text, "rb") as fh:
            text = fh.read().decode("latin-1")
    return cover, text, logo, audio


def _config_hash(cfg: ComparisonConfig, cover, payloads) -> str:
    h = hashlib.sha256()
    params = {k: v for k, v in asdict(cfg).items() if k not in ("cover", "logo", "audio", "text")}
    h.update(json.dumps(params, sort_keys=True).encode())
    h.update(cover.pixels.tobytes())
    for kind in sorted(payloads, key=lambda k: k.value):
        h.update(payloads[kind].canvas.pixels.tobytes())
        h.update(json.dumps(payloads[kind].meta, sort_keys=True).encode())
    return h.hexdigest()[:16]


def run_comparison(cfg: ComparisonConfig) -> list[dict]:
    """Return result rows (dicts keyed by COMPARE_COLUMNS)."""
    cover, text, logo, audio = _inputs(cfg)
    payloads = make_payloads(text, logo, audio, min(cover.width, cover.height))
    keys = derive_slot_keys(parse_master_key(cfg.master_key))
    digest = _config_hash(cfg, cover, payloads)
    rows = []

    def row(transform, attack, severity, logo_name, metric, value, runs):
        rows.append(
            {
                "schema": COMPARE_SCHEMA,
                "config_hash": digest,
                "transform": transform,
                "attack": attack,
                "severity": severity,
                "logo": logo_name,
                "metric": metric,
                "value": value,
                "runs": runs,
            }
        )

    for transform in cfg.transforms:
        result = embed(cover, payloads, keys, cfg.alpha, cfg.mode, cfg.gain, transform=transform)
        quality = imperceptibility(cover, result.stego)
        for layer in ("R", "G", "B"):
            row(transform, "none", "", f"cover_{layer}", "psnr", quality.psnr[layer], 1)
            row(transform, "none", "", f"cover_{layer}", "ssim", quality.ssim[layer], 1)
            row(transform, "none", "", f"cover_{layer}", "epsilon", quality.epsilon[layer], 1)
        for attack in cfg.attacks:
            template = parse_attack(attack)
            runs = cfg.seeds if template.kind in STOCHASTIC else 1
            sums: dict = {}
            for i in range(runs):
                spec = AttackSpec(template.kind, template.value, cfg.seed + i)
                if template.kind == "none" and cfg.lossless:
                    received = result.planes
                else:
                    received = apply_attack(result.stego, spec)
                rep = recovery(payloads, extract(received, cover, result.sidecar, keys))
                for kind_name in ("text", "image", "audio"):
                    values = {
                        "ber": rep.ber[kind_name],
                        "ber_tolerant": rep.ber_tolerant[kind_name],
                        "mi": rep.mi[kind_name],
                        "ssim": rep.recovery_ssim[(kind_name, "fused")],
                    }
                    for metric, v in values.items():
                        sums[(kind_name, metric)] = sums.get((kind_name, metric), 0.0) + v
            severity = "" if template.value is None else f"{template.value:g}"
            for kind_name in ("text", "image", "audio"):
                for metric in LOGO_METRICS:
                    row(transform, template.kind, severity, kind_name, metric,
                        sums[(kind_name, metric)] / runs, runs)
    return rows


def comparison_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        out = dict(r)
        out["value"] = repr(float(r["value"]))
        writer.writerow(out)
    return buf.getvalue()


def mean_ber_curve(rows: list[dict], transform: str, attack: str, metric: str = "ber") -> list[tuple[float, float]]:
    """(severity, mean over logos of ``metric``) points for one transform and attack."""
    points: dict = {}
    for r in rows:
        if r["transform"] == transform and r["attack"] == attack and r["metric"] == metric:
            sev = float(r["severity"]) if r["severity"] else 0.0
            points.setdefault(sev, []).append(r["value"])
    return [(s, float(np.mean(v))) for s, v in sorted(points.items())]

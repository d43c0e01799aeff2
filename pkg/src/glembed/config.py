"""Declarative run configuration: a flat key = value file.

Repeatable keys describe networks; list values are comma separated. Example:

    network = cora data/cora.edges
    labels = cora data/cora.labels single
    lcc = citeseer
    representations = adjacency(G0), line, deepwalk, gpmi(G2)
    dimension = 128
    walk_length = 10
    tasks = homophily, separability
    output = runs/demo
    seed = 0
    sweep_p_in = 0.1, 0.3, 0.5
    sweep_p_out = 0.0, 0.15
    sweep_n = 300
    sweep_communities = 5
    sweep_dimension = 32

`validate_config` aggregates every problem it can find into one ConfigError
instead of stopping at the first.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field, replace

__all__ = [
    "ConfigError",
    "NetworkSpec",
    "SweepSettings",
    "RunConfig",
    "parse_representation",
    "validate_config",
    "KNOWN_TASKS",
]

KNOWN_TASKS = ("homophily", "separability", "auroc", "modules", "sweep")

_PLAIN_TOKENS = {"line", "deepwalk", "gdv-ppmi", "adjacency"}
_GRAPHLET_TOKEN = re.compile(r"^(adjacency|gpmi|deepgraphlet)\(\s*G_?(\d+)\s*\)$")


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def parse_representation(token: str) -> tuple[str, int | None]:
    """Token -> (family, graphlet id or None). Raises on unknown tokens."""
    t = token.strip()
    if t in _PLAIN_TOKENS:
        return (t, 0 if t == "adjacency" else None)
    m = _GRAPHLET_TOKEN.match(t)
    if m:
        k = int(m.group(2))
        if not 0 <= k <= 8:
            raise ValueError(f"unknown graphlet id G_{k} in {token!r}")
        return (m.group(1), k)
    raise ValueError(f"unknown representation token {token!r}")


@dataclass(frozen=True)
class NetworkSpec:
    name: str
    edges_path: str
    labels_path: str | None = None
    label_kind: str = "single"
    annotations_path: str | None = None
    use_lcc: bool = False


@dataclass(frozen=True)
class SweepSettings:
    p_in: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    p_out: tuple[float, ...] = (0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9)
    n: int = 300
    communities: int = 5
    dimension: int = 32


@dataclass(frozen=True)
class RunConfig:
    networks: tuple[NetworkSpec, ...] = ()
    representations: tuple[str, ...] = ("adjacency(G0)",)
    dimension: int | None = None  # None: pick by graph size
    walk_length: int = 10
    tasks: tuple[str, ...] = ("homophily", "separability")
    output: str = "runs/out"
    seed: int = 0
    sweep: SweepSettings = field(default_factory=SweepSettings)

    def config_hash(self) -> str:
        """Hash of everything that affects results; the output path does not."""
        payload = {
            "networks": [
                {
                    "name": nw.name,
                    "edges": nw.edges_path,
                    "labels": nw.labels_path,
                    "label_kind": nw.label_kind,
                    "annotations": nw.annotations_path,
                    "lcc": nw.use_lcc,
                }
                for nw in self.networks
            ],
            "representations": list(self.representations),
            "dimension": self.dimension,
            "walk_length": self.walk_length,
            "tasks": sorted(self.tasks),
            "seed": self.seed,
            "sweep": {
                "p_in": list(self.sweep.p_in),
                "p_out": list(self.sweep.p_out),
                "n": self.sweep.n,
                "communities": self.sweep.communities,
                "dimension": self.sweep.dimension,
            },
        }
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


def _parse_lines(path: str) -> list[tuple[int, str, str]]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError([f"line {lineno}: expected 'key = value'"])
            key, value = line.split("=", 1)
            entries.append((lineno, key.strip().lower(), value.strip()))
    return entries


def _split_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def validate_config(path: str) -> RunConfig:
    """Parse and fully validate; raises ConfigError carrying all problems."""
    errors: list[str] = []
    try:
        entries = _parse_lines(path)
    except FileNotFoundError:
        raise ConfigError([f"config file not found: {path}"]) from None

    networks: dict[str, NetworkSpec] = {}
    order: list[str] = []
    scalars: dict[str, str] = {}
    lcc_names: list[str] = []

    for lineno, key, value in entries:
        where = f"line {lineno}"
        if key == "network":
            parts = value.split()
            if len(parts) != 2:
                errors.append(f"{where}: network wants '<name> <edges-path>'")
                continue
            name, epath = parts
            if name in networks:
                errors.append(f"{where}: duplicate network {name!r}")
                continue
            networks[name] = NetworkSpec(name=name, edges_path=epath)
            order.append(name)
        elif key == "labels":
            parts = value.split()
            if len(parts) not in (2, 3):
                errors.append(f"{where}: labels wants '<name> <path> [single|multi]'")
                continue
            name, lpath = parts[0], parts[1]
            kind = parts[2] if len(parts) == 3 else "single"
            if kind not in ("single", "multi"):
                errors.append(f"{where}: label kind must be single or multi")
                continue
            if name not in networks:
                errors.append(f"{where}: labels for unknown network {name!r}")
                continue
            networks[name] = replace(
                networks[name], labels_path=lpath, label_kind=kind
            )
        elif key == "annotations":
            parts = value.split()
            if len(parts) != 2:
                errors.append(f"{where}: annotations wants '<name> <path>'")
                continue
            name, apath = parts
            if name not in networks:
                errors.append(f"{where}: annotations for unknown network {name!r}")
                continue
            networks[name] = replace(networks[name], annotations_path=apath)
        elif key == "lcc":
            lcc_names.extend(_split_list(value))
        else:
            scalars[key] = value

    for name in lcc_names:
        if name in networks:
            networks[name] = replace(networks[name], use_lcc=True)
        else:
            errors.append(f"lcc references unknown network {name!r}")

    reps = tuple(_split_list(scalars.pop("representations", "adjacency(G0)")))
    for tok in reps:
        try:
            parse_representation(tok)
        except ValueError as exc:
            errors.append(str(exc))

    def _int_scalar(key: str, default: int | None) -> int | None:
        raw = scalars.pop(key, None)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            errors.append(f"{key} must be an integer, got {raw!r}")
            return default

    def _float_list(key: str, default: tuple[float, ...]) -> tuple[float, ...]:
        raw = scalars.pop(key, None)
        if raw is None:
            return default
        try:
            return tuple(float(v) for v in _split_list(raw))
        except ValueError:
            errors.append(f"{key} must be a comma-separated list of numbers")
            return default

    dimension = _int_scalar("dimension", None)
    if dimension is not None and dimension <= 0:
        errors.append("dimension must be positive")
    walk_length = _int_scalar("walk_length", 10)
    if walk_length is not None and walk_length < 1:
        errors.append("walk_length must be >= 1")
    seed = _int_scalar("seed", 0) or 0

    tasks = tuple(_split_list(scalars.pop("tasks", "homophily, separability")))
    for t in tasks:
        if t not in KNOWN_TASKS:
            errors.append(f"unknown task {t!r} (known: {', '.join(KNOWN_TASKS)})")

    defaults = SweepSettings()
    sweep = SweepSettings(
        p_in=_float_list("sweep_p_in", defaults.p_in),
        p_out=_float_list("sweep_p_out", defaults.p_out),
        n=_int_scalar("sweep_n", defaults.n) or defaults.n,
        communities=_int_scalar("sweep_communities", defaults.communities)
        or defaults.communities,
        dimension=_int_scalar("sweep_dimension", defaults.dimension)
        or defaults.dimension,
    )
    for vals, key in ((sweep.p_in, "sweep_p_in"), (sweep.p_out, "sweep_p_out")):
        if any(not 0.0 <= v <= 1.0 for v in vals):
            errors.append(f"{key} values must lie in [0, 1]")

    output = scalars.pop("output", "runs/out")
    output = os.environ.get("GLEMBED_OUTPUT", output)

    for key in scalars:
        errors.append(f"unknown config key {key!r}")

    non_sweep = [t for t in tasks if t != "sweep"]
    if non_sweep and not networks:
        errors.append("no networks configured but non-sweep tasks requested")

    for name in order:
        nw = networks[name]
        if not os.path.exists(nw.edges_path):
            errors.append(f"network {name!r}: missing edge file {nw.edges_path}")
        if nw.labels_path is None:
            if any(t in non_sweep for t in ("homophily", "separability", "auroc")):
                errors.append(f"network {name!r}: tasks need a labels file")
        elif not os.path.exists(nw.labels_path):
            errors.append(f"network {name!r}: missing labels file {nw.labels_path}")
        if nw.annotations_path is not None and not os.path.exists(nw.annotations_path):
            errors.append(
                f"network {name!r}: missing annotations file {nw.annotations_path}"
            )

    if errors:
        raise ConfigError(errors)
    return RunConfig(
        networks=tuple(networks[name] for name in order),
        representations=reps,
        dimension=dimension,
        walk_length=walk_length,
        tasks=tasks,
        output=output,
        seed=seed,
        sweep=sweep,
    )

"""Batch orchestration over (network x representation) pairs.

Each pair gets its own directory under the output root with every report it
produced plus a `pair.json` completion marker carrying the config hash, so
`--resume` can skip pairs whose inputs have not changed. Failures are
recorded per pair and never abort the batch; the exit status reflects them
at the end. All outputs are deterministic: rerunning an unchanged config
rewrites byte-identical files.
"""
from __future__ import annotations

import json
import os
import sys
import traceback
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, NetworkSpec, parse_representation
from .downstream import cosine_auroc, module_discovery
from .factorization import factorize, save_embedding_space
from .graph import (
    Graph,
    LabelSet,
    largest_connected_component,
    load_edge_list,
    load_labels,
)
from .graphlets import (
    count_orbits,
    dump_gdv_tsv,
    dump_graphlet_adjacency_tsv,
    gdv_similarity_matrix,
    graphlet_adjacency,
)
from .homophily import homophily_report
from .representations import (
    MatrixRepresentation,
    adjacency_representation,
    deepwalk_matrix,
    export_representation_tsv,
    gdv_ppmi_matrix,
    gpmi_matrix,
    deepgraphlet_matrix,
    line_matrix,
)
from .separability import classify_separability, kfold_f1
from .synth import correlate_sweep, sweep as run_sweep

__all__ = [
    "build_representation",
    "PairOutcome",
    "PipelineReport",
    "run_pipeline",
    "STAGES",
]

STAGES = ("census", "represent", "embed", "evaluate", "sweep")
_CLASSIFIERS = ("linear", "nonlinear-rff", "knn")


def build_representation(
    g: Graph, token: str, walk_length: int = 10
) -> MatrixRepresentation:
    """Instantiate a representation matrix from its config token."""
    family, k = parse_representation(token)
    if family == "adjacency":
        if k == 0:
            return adjacency_representation(g, 0)
        return adjacency_representation(graphlet_adjacency(g, k))
    if family == "line":
        return line_matrix(g)
    if family == "deepwalk":
        return deepwalk_matrix(g, walk_length=walk_length)
    if family == "gpmi":
        return gpmi_matrix(graphlet_adjacency(g, k))
    if family == "deepgraphlet":
        return deepgraphlet_matrix(graphlet_adjacency(g, k), walk_length=walk_length)
    if family == "gdv-ppmi":
        return gdv_ppmi_matrix(gdv_similarity_matrix(count_orbits(g)), walk_length)
    raise ValueError(f"unknown representation token {token!r}")


@dataclass(frozen=True)
class PairOutcome:
    network: str
    representation: str
    status: str  # "ok" | "resumed" | "failed"
    error: str = ""
    leaderboard_rows: tuple = ()


@dataclass
class PipelineReport:
    outcomes: list[PairOutcome] = field(default_factory=list)
    sweep_status: str = "not-run"

    @property
    def failed(self) -> list[PairOutcome]:
        return [o for o in self.outcomes if o.status == "failed"]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed or self.sweep_status == "failed" else 0


def _slug(token: str) -> str:
    return token.replace("(", "_").replace(")", "").replace("-", "_").lower()


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_network(nw: NetworkSpec):
    g = load_edge_list(nw.edges_path)
    labels = ann = None
    if nw.labels_path:
        labels = load_labels(nw.labels_path, kind=nw.label_kind)
    if nw.use_lcc:
        g, labels = largest_connected_component(g, labels)
    if labels is not None:
        labels = labels.aligned_to(g)
    if nw.annotations_path:
        ann = load_labels(nw.annotations_path, kind="multi").aligned_to(g)
    elif nw.labels_path and nw.label_kind == "multi":
        ann = labels
    return g, labels, ann


def _pair_dir(cfg: RunConfig, network: str, token: str) -> str:
    return os.path.join(cfg.output, network, _slug(token))


def _run_pair(
    cfg: RunConfig,
    nw: NetworkSpec,
    g: Graph,
    labels: LabelSet | None,
    ann: LabelSet | None,
    token: str,
    stages: frozenset,
) -> PairOutcome:
    pair_dir = _pair_dir(cfg, nw.name, token)
    os.makedirs(pair_dir, exist_ok=True)
    chash = cfg.config_hash()
    rows: list[tuple] = []
    completed: list[str] = []

    rep = build_representation(g, token, walk_length=cfg.walk_length)

    if "represent" in stages:
        export_representation_tsv(
            rep, os.path.join(pair_dir, "representation.tsv"), names=g.names
        )
        completed.append("represent")

    if "evaluate" in stages and "homophily" in cfg.tasks and labels is not None:
        report = homophily_report(rep, labels)
        payload = report.to_dict()
        payload.update(
            {"config_hash": chash, "network": nw.name, "representation": token}
        )
        _write_json(os.path.join(pair_dir, "homophily.json"), payload)
        completed.append("homophily")

    space = None
    if "embed" in stages or "evaluate" in stages:
        space = factorize(rep, d=cfg.dimension)

    if "embed" in stages and space is not None:
        save_embedding_space(
            space,
            pair_dir,
            manifest_extra={
                "config_hash": chash,
                "network": nw.name,
                "representation": token,
            },
            node_names=g.names,
        )
        completed.append("embed")

    if "evaluate" in stages and space is not None:
        emb = space.embedding()
        if "separability" in cfg.tasks and labels is not None:
            results = {
                c: kfold_f1(emb, labels, g.names, classifier=c)
                for c in _CLASSIFIERS
            }
            verdict = classify_separability(
                results["linear"], *(results[c] for c in _CLASSIFIERS[1:])
            )
            _write_json(
                os.path.join(pair_dir, "evaluation.json"),
                {
                    "config_hash": chash,
                    "network": nw.name,
                    "representation": token,
                    "folds": {c: list(r.fold_f1) for c, r in results.items()},
                    "mean_f1": {c: r.mean_f1 for c, r in results.items()},
                    "p_values": verdict.p_values,
                    "verdict": verdict.verdict,
                },
            )
            for c, r in results.items():
                rows.append((nw.name, token, c, r.mean_f1))
            completed.append("separability")
        if "auroc" in cfg.tasks and labels is not None and labels.kind == "single":
            auroc = cosine_auroc(emb, labels)
            rows.append((nw.name, token, "cosine-auroc", auroc))
            completed.append("auroc")
        if "modules" in cfg.tasks:
            if ann is None:
                raise ValueError(
                    f"network {nw.name!r}: modules task needs multi-label annotations"
                )
            enrich = module_discovery(emb, ann)
            payload = enrich.to_dict()
            payload.update(
                {"config_hash": chash, "network": nw.name, "representation": token}
            )
            _write_json(os.path.join(pair_dir, "modules.json"), payload)
            with open(
                os.path.join(pair_dir, "modules_summary.tsv"), "w", encoding="utf-8"
            ) as fh:
                fh.write("network\trepresentation\tgene_coverage\tfunctional_coverage\n")
                fh.write(
                    f"{nw.name}\t{token}\t{enrich.gene_coverage:.6f}"
                    f"\t{enrich.functional_coverage:.6f}\n"
                )
            rows.append((nw.name, token, "gene-coverage", enrich.gene_coverage))
            rows.append(
                (nw.name, token, "functional-coverage", enrich.functional_coverage)
            )
            completed.append("modules")

    _write_json(
        os.path.join(pair_dir, "pair.json"),
        {
            "config_hash": chash,
            "network": nw.name,
            "representation": token,
            "stages": sorted(stages),
            "completed": completed,
            "leaderboard_rows": [list(r) for r in rows],
        },
    )
    return PairOutcome(nw.name, token, "ok", leaderboard_rows=tuple(rows))


def _resume_pair(cfg: RunConfig, nw: NetworkSpec, token: str, stages) -> PairOutcome | None:
    """Return the stored outcome when the pair marker matches, else None."""
    marker = os.path.join(_pair_dir(cfg, nw.name, token), "pair.json")
    if not os.path.exists(marker):
        return None
    try:
        with open(marker, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if payload.get("config_hash") != cfg.config_hash():
        return None
    if not set(stages) <= set(payload.get("stages", [])):
        return None
    rows = tuple(tuple(r) for r in payload.get("leaderboard_rows", []))
    return PairOutcome(nw.name, token, "resumed", leaderboard_rows=rows)


def _run_sweep_stage(cfg: RunConfig, resume: bool) -> str:
    sweep_dir = os.path.join(cfg.output, "sweep")
    os.makedirs(sweep_dir, exist_ok=True)
    manifest = os.path.join(sweep_dir, "sweep_manifest.json")
    chash = cfg.config_hash()
    if resume and os.path.exists(manifest):
        try:
            with open(manifest, encoding="utf-8") as fh:
                if json.load(fh).get("config_hash") == chash:
                    _log("sweep: resumed (manifest hash matches)")
                    return "resumed"
        except (OSError, json.JSONDecodeError):
            pass
    try:
        result = run_sweep(
            list(cfg.sweep.p_in),
            list(cfg.sweep.p_out),
            n=cfg.sweep.n,
            communities=cfg.sweep.communities,
            d=cfg.sweep.dimension,
            walk_length=cfg.walk_length,
            seed=cfg.seed,
        )
        with open(os.path.join(sweep_dir, "sweep.tsv"), "w", encoding="utf-8") as fh:
            fh.write(result.to_tsv())
        report = correlate_sweep(result)
        with open(
            os.path.join(sweep_dir, "correlations.json"), "w", encoding="utf-8"
        ) as fh:
            fh.write(report.to_json())
        _write_json(
            manifest,
            {
                "config_hash": chash,
                "rows": len(result.rows),
                "skipped": [list(s) for s in result.skipped],
            },
        )
        return "ok"
    except Exception:
        _log("sweep failed:\n" + traceback.format_exc())
        return "failed"


def _write_leaderboard(cfg: RunConfig, outcomes) -> None:
    rows = sorted(r for o in outcomes for r in o.leaderboard_rows)
    if not rows:
        return
    path = os.path.join(cfg.output, "leaderboard.tsv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("network\trepresentation\tclassifier\tscore\n")
        for network, token, classifier, score in rows:
            fh.write(f"{network}\t{token}\t{classifier}\t{score:.6f}\n")


def _dump_census(cfg: RunConfig, nw: NetworkSpec, g: Graph) -> None:
    out = os.path.join(cfg.output, nw.name, "graphlets")
    os.makedirs(out, exist_ok=True)
    gdv = count_orbits(g)
    dump_gdv_tsv(gdv, g, os.path.join(out, "gdv.tsv"))
    ks = sorted(
        {
            k
            for tok in cfg.representations
            for fam, k in [parse_representation(tok)]
            if fam in ("adjacency", "gpmi", "deepgraphlet") and k is not None and k > 0
        }
    )
    for k in ks:
        dump_graphlet_adjacency_tsv(
            graphlet_adjacency(g, k), g, os.path.join(out, f"adjacency_G{k}.tsv")
        )


def run_pipeline(
    cfg: RunConfig,
    stages=("represent", "embed", "evaluate", "sweep"),
    resume: bool = False,
    jobs: int = 1,
) -> PipelineReport:
    """Execute the configured batch; returns outcomes plus an exit code."""
    stages = frozenset(stages)
    unknown = stages - set(STAGES)
    if unknown:
        raise ValueError(f"unknown stages {sorted(unknown)}")
    os.makedirs(cfg.output, exist_ok=True)
    report = PipelineReport()

    pair_stages = stages - {"sweep", "census"}
    per_network = bool(pair_stages) or "census" in stages
    if per_network:
        for nw in cfg.networks:
            try:
                g, labels, ann = _load_network(nw)
            except Exception:
                err = traceback.format_exc()
                _log(f"network {nw.name} failed to load:\n{err}")
                for token in cfg.representations:
                    report.outcomes.append(
                        PairOutcome(nw.name, token, "failed", error=err)
                    )
                continue
            _log(f"network {nw.name}: n={g.n} m={g.m}")
            if "census" in stages:
                _dump_census(cfg, nw, g)
            if not pair_stages:
                continue

            def _one(token: str, _g=g, _l=labels, _a=ann, _nw=nw) -> PairOutcome:
                if resume:
                    prior = _resume_pair(cfg, _nw, token, pair_stages)
                    if prior is not None:
                        return prior
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        return _run_pair(cfg, _nw, _g, _l, _a, token, pair_stages)
                except Exception:
                    return PairOutcome(
                        _nw.name, token, "failed", error=traceback.format_exc()
                    )

            if jobs > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    outs = list(pool.map(_one, cfg.representations))
            else:
                outs = [_one(t) for t in cfg.representations]
            for o in outs:
                tag = o.status if o.status != "failed" else f"FAILED\n{o.error}"
                _log(f"  {nw.name} x {o.representation}: {tag}")
            report.outcomes.extend(outs)

    if "sweep" in stages and "sweep" in cfg.tasks:
        report.sweep_status = _run_sweep_stage(cfg, resume)

    if pair_stages:
        _write_leaderboard(cfg, report.outcomes)
    return report

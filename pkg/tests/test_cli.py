import json
import os

import pytest

from glembed import cli
from glembed.config import (
    ConfigError,
    RunConfig,
    SweepSettings,
    parse_representation,
    validate_config,
)
from glembed.graph import save_edge_list
from glembed.synth import PartitionSpec, random_partition_graph


def test_parse_representation_tokens():
    assert parse_representation("line") == ("line", None)
    assert parse_representation("deepwalk") == ("deepwalk", None)
    assert parse_representation("gdv-ppmi") == ("gdv-ppmi", None)
    assert parse_representation("adjacency") == ("adjacency", 0)
    assert parse_representation("adjacency(G0)") == ("adjacency", 0)
    assert parse_representation(" gpmi( G2 ) ") == ("gpmi", 2)
    assert parse_representation("deepgraphlet(G_4)") == ("deepgraphlet", 4)


def test_parse_representation_rejects():
    with pytest.raises(ValueError, match="unknown graphlet id G_9"):
        parse_representation("gpmi(G9)")
    with pytest.raises(ValueError, match="unknown representation token"):
        parse_representation("wavelet")
    with pytest.raises(ValueError, match="unknown representation token"):
        parse_representation("line(G1)")


def write_toy(tmp_path, n_per=20, p_in=0.5, p_out=0.05, seed=9):
    g, _ = random_partition_graph(
        PartitionSpec(community_sizes=(n_per, n_per), p_in=p_in, p_out=p_out, seed=seed)
    )
    edges = tmp_path / "toy.edges"
    save_edge_list(g, str(edges))
    labels = tmp_path / "toy.labels"
    labels.write_text(
        "".join(f"{i}\t{'A' if i < n_per else 'B'}\n" for i in range(2 * n_per))
    )
    return edges, labels


def write_config(tmp_path, out, tasks="homophily, separability, auroc, modules"):
    edges, labels = write_toy(tmp_path)
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"""
# toy run
network = toy {edges}
labels = toy {labels} single
annotations = toy {labels}
representations = adjacency(G0), line
dimension = 8
walk_length = 4
tasks = {tasks}
output = {out}
seed = 0
sweep_p_in = 0.3, 0.9
sweep_p_out = 0.05, 0.4
sweep_n = 40
sweep_communities = 2
sweep_dimension = 4
"""
    )
    return cfg


def test_validate_config_good(tmp_path):
    cfgfile = write_config(tmp_path, tmp_path / "out")
    cfg = validate_config(str(cfgfile))
    assert [nw.name for nw in cfg.networks] == ["toy"]
    assert cfg.networks[0].label_kind == "single"
    assert cfg.networks[0].annotations_path is not None
    assert cfg.representations == ("adjacency(G0)", "line")
    assert cfg.dimension == 8 and cfg.walk_length == 4
    assert cfg.tasks == ("homophily", "separability", "auroc", "modules")
    assert cfg.sweep.p_in == (0.3, 0.9) and cfg.sweep.n == 40


def test_validate_config_aggregates_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(
        """
network = toy /nonexistent/path.edges
labels = ghost some.labels
representations = line, gpmi(G9), wavelet
dimension = -3
tasks = homophily, flying
lcc = other
typo_key = 1
"""
    )
    with pytest.raises(ConfigError) as err:
        validate_config(str(cfg))
    msgs = err.value.errors
    assert len(msgs) >= 6
    joined = "\n".join(msgs)
    assert "missing edge file" in joined
    assert "unknown network 'ghost'" in joined
    assert "unknown graphlet id G_9" in joined
    assert "unknown representation token 'wavelet'" in joined
    assert "dimension must be positive" in joined
    assert "unknown task 'flying'" in joined
    assert "lcc references unknown network 'other'" in joined
    assert "unknown config key 'typo_key'" in joined


def test_validate_config_labels_required_for_eval(tmp_path):
    edges, _ = write_toy(tmp_path)
    cfg = tmp_path / "nolabels.cfg"
    cfg.write_text(f"network = toy {edges}\ntasks = separability\n")
    with pytest.raises(ConfigError, match="need a labels file"):
        validate_config(str(cfg))


def test_validate_config_not_found(tmp_path):
    with pytest.raises(ConfigError, match="config file not found"):
        validate_config(str(tmp_path / "missing.cfg"))


def test_config_hash_scope(tmp_path):
    a = validate_config(str(write_config(tmp_path, tmp_path / "out1")))
    sub = tmp_path / "again"
    sub.mkdir()
    b = validate_config(str(write_config(sub, sub / "somewhere-else")))
    # same inputs, different output dir and file location of inputs differ:
    # hash covers input paths, so compare via explicit construction instead
    assert a.config_hash() == a.config_hash()
    from dataclasses import replace

    assert replace(a, output="elsewhere").config_hash() == a.config_hash()
    assert replace(a, seed=1).config_hash() != a.config_hash()
    assert b.config_hash() != ""


def test_env_output_override(tmp_path, monkeypatch):
    cfgfile = write_config(tmp_path, tmp_path / "out")
    monkeypatch.setenv("GLEMBED_OUTPUT", str(tmp_path / "forced"))
    cfg = validate_config(str(cfgfile))
    assert cfg.output == str(tmp_path / "forced")


def test_sweep_defaults():
    s = SweepSettings()
    assert s.p_in == (0.1, 0.3, 0.5, 0.7, 0.9)
    assert s.p_out == (0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9)
    assert s.n == 300 and s.communities == 5 and s.dimension == 32
    assert RunConfig().tasks == ("homophily", "separability")


def read_tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            p = os.path.join(dirpath, f)
            out[os.path.relpath(p, root)] = open(p, "rb").read()
    return out


def test_cli_end_to_end(tmp_path):
    out1 = tmp_path / "out1"
    cfgfile = write_config(tmp_path, out1)
    assert cli.main(["all", "--config", str(cfgfile)]) == 0

    pair = out1 / "toy" / "adjacency_g0"
    for fname in (
        "representation.tsv",
        "homophily.json",
        "E.npy",
        "S.npy",
        "P.npy",
        "manifest.json",
        "embedding.tsv",
        "evaluation.json",
        "modules.json",
        "modules_summary.tsv",
        "pair.json",
    ):
        assert (pair / fname).exists(), fname
    assert (out1 / "toy" / "line" / "evaluation.json").exists()

    lb = (out1 / "leaderboard.tsv").read_text().splitlines()
    assert lb[0] == "network\trepresentation\tclassifier\tscore"
    body = [ln.split("\t") for ln in lb[1:]]
    # homophily task adds no rows; separability adds 3, auroc 1, modules 2 per pair
    assert len(body) == 12
    assert body == sorted(body)

    ev = json.loads((pair / "evaluation.json").read_text())
    assert set(ev["folds"]) == {"linear", "nonlinear-rff", "knn"}
    assert all(len(v) == 10 for v in ev["folds"].values())
    assert ev["verdict"] in ("fully-linear", "sufficiently-linear", "non-linear")

    # rerun into a fresh directory: byte-identical outputs
    out2 = tmp_path / "out2"
    assert cli.main(["all", "--config", str(cfgfile), "--output", str(out2)]) == 0
    assert read_tree(out1) == read_tree(out2)

    # resume leaves everything in place
    marker_before = (pair / "pair.json").read_bytes()
    assert cli.main(["all", "--config", str(cfgfile), "--resume"]) == 0
    assert (pair / "pair.json").read_bytes() == marker_before

    # parallel jobs produce the same bytes
    out3 = tmp_path / "out3"
    assert (
        cli.main(["all", "--config", str(cfgfile), "--output", str(out3), "--jobs", "2"])
        == 0
    )
    assert read_tree(out1) == read_tree(out3)


def test_cli_graphlets_stage(tmp_path):
    edges, labels = write_toy(tmp_path, n_per=8)
    out = tmp_path / "gout"
    cfgfile = tmp_path / "g.cfg"
    cfgfile.write_text(
        f"network = toy {edges}\nlabels = toy {labels} single\n"
        f"representations = adjacency(G0), gpmi(G2)\noutput = {out}\n"
    )
    assert cli.main(["graphlets", "--config", str(cfgfile)]) == 0
    gdir = out / "toy" / "graphlets"
    assert (gdir / "gdv.tsv").exists()
    assert (gdir / "adjacency_G2.tsv").exists()
    header = (gdir / "gdv.tsv").read_text().splitlines()[0]
    assert header.startswith("node\torbit0")


def test_cli_sweep_stage(tmp_path):
    out = tmp_path / "sout"
    cfgfile = write_config(tmp_path, out, tasks="homophily")
    assert cli.main(["sweep", "--config", str(cfgfile)]) == 0
    sdir = out / "sweep"
    assert (sdir / "sweep.tsv").exists()
    corr = json.loads((sdir / "correlations.json").read_text())
    assert set(corr["correlations"]) == {"h_node", "h_edge", "gsi"}
    man = json.loads((sdir / "sweep_manifest.json").read_text())
    assert man["rows"] == corr["n_rows"]

    # resumed sweep leaves the files untouched
    before = (sdir / "sweep.tsv").read_bytes()
    assert cli.main(["sweep", "--config", str(cfgfile), "--resume"]) == 0
    assert (sdir / "sweep.tsv").read_bytes() == before


def test_cli_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("network = toy /nonexistent.edges\ntasks = flying\n")
    assert cli.main(["all", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "config error:" in err
    assert "unknown task" in err

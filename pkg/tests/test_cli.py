"""Command line front end: exit codes, determinism, corpus wiring."""

import json

import pytest

from corrkit.cli import WorkspaceConfig, main, run
from corrkit.corpus import SUITE_ORDER, corpus, instance
from corrkit.fincat import check_category
from corrkit.report import MalformedInputError
from corrkit import serialization as ser


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- corpus ----------------------------------------------------------------


def test_corpus_size_and_stable_listing(capsys):
    insts = corpus()
    assert len(insts) >= 10
    names = [i.name for i in insts]
    assert len(set(names)) == len(names)
    code1, out1, _ = invoke(capsys, "corpus", "list", "--format", "json")
    code2, out2, _ = invoke(capsys, "corpus", "list", "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2
    assert [row["name"] for row in json.loads(out1)] == names


def test_every_bundled_carrier_passes_category_check():
    # instances that do not declare the category suite sit on carriers where
    # the exhaustive associativity scan is deliberately out of scope
    for inst in corpus():
        if "category" not in inst.suites:
            continue
        built = inst.build()
        c = built.category if inst.kind == "category" else built.setup.category
        assert check_category(c).passed, inst.name


def test_every_instance_builds():
    for inst in corpus():
        assert inst.build() is not None
        for suite in inst.expect_fail:
            assert suite in inst.suites


def test_unknown_instance_is_input_error(capsys):
    code, _, err = invoke(capsys, "run", "--instance", "no-such-thing")
    assert code == 2
    assert "no-such-thing" in err


# -- run: exit codes -------------------------------------------------------


def test_missing_input_file_is_exit_2(capsys):
    code, _, err = invoke(capsys, "run", "--input", "/no/such/file.json")
    assert code == 2
    assert "file.json" in err


def test_unparseable_input_is_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    code, _, err = invoke(capsys, "run", "--input", str(bad))
    assert code == 2
    assert "line 1" in err


def test_clean_instance_run_is_exit_0(capsys):
    code, out, _ = invoke(capsys, "run", "--instance", "finset-1", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "corrkit-run/1"
    assert payload["mode"] == "raw"
    assert all(payload["verdicts"].values())


def test_designed_negative_instance_is_exit_1_at_documented_check(capsys):
    # explicit selection runs raw: the documented failure makes the exit 1,
    # and the theorem suite locates it at the cancellation axiom
    code, out, _ = invoke(
        capsys, "run", "--instance", "nagata-inj-surj", "--suite", "theorem", "--format", "json"
    )
    assert code == 1
    payload = json.loads(out)
    (rep,) = payload["reports"]
    failed = [c for c in rep["checks"] if c["status"] == "fail"]
    assert [c["name"] for c in failed] == ["axioms:cancellation-p"]
    assert failed[0]["witness"]["pair"]


def test_input_file_runs_applicable_suites(tmp_path, capsys):
    path = tmp_path / "pentagon.json"
    path.write_text(ser.dumps(ser.lattice_to_dict(instance("pentagon-join").build())))
    code, out, _ = invoke(capsys, "run", "--input", str(path), "--format", "json")
    assert code == 1
    payload = json.loads(out)
    (rep,) = payload["reports"]
    assert rep["suite"].endswith(":model")
    failed = {c["name"] for c in rep["checks"] if c["status"] == "fail"}
    assert failed == {"projection-sharp", "projection-star", "external-product"}


# -- config validation -----------------------------------------------------


def test_config_rejects_unknown_key():
    with pytest.raises(MalformedInputError, match="nope"):
        WorkspaceConfig.from_dict({"nope": 1})


def test_config_rejects_out_of_range_bounds():
    with pytest.raises(MalformedInputError, match="max-dim"):
        WorkspaceConfig(max_dim=7)
    with pytest.raises(MalformedInputError, match="max-apex"):
        WorkspaceConfig(max_apex=0)
    with pytest.raises(MalformedInputError, match="suite"):
        WorkspaceConfig(suites=("algebra",))
    with pytest.raises(MalformedInputError, match="format"):
        WorkspaceConfig(fmt="xml")


def test_run_api_mirrors_cli(capsys):
    code, payload = run(WorkspaceConfig(instances=("localization-interval",)))
    assert code == 0
    assert list(payload["verdicts"]) == ["localization-interval:theorem"]


# -- subcommands -----------------------------------------------------------


def test_model_check_kunneth_located(capsys):
    code, _, _ = invoke(capsys, "model", "check", "--law", "kunneth", "--instance", "frame-2chain")
    assert code == 0
    code, out, _ = invoke(
        capsys, "model", "check", "--law", "kunneth", "--instance", "pentagon-join", "--format", "json"
    )
    assert code == 1
    rep = json.loads(out)
    assert [c["name"] for c in rep["checks"] if c["status"] == "fail"] == ["kunneth-identity"]


def test_model_check_adjointable(capsys):
    code, _, _ = invoke(capsys, "model", "check", "--law", "adjointable", "--instance", "frame-2chain")
    assert code == 0


def test_shriek_build_emits_join_tables(capsys):
    code, out, _ = invoke(capsys, "shriek", "build", "--instance", "nagata-open")
    assert code == 0
    tables = json.loads(out)["tables"]
    # collapsing both points pushes forward by the join of the pair
    assert tables["2>1:0.0"]["(1,0)"] == "(1)"
    assert tables["2>1:0.0"]["(0,0)"] == "(0)"


def test_search_nagata_catalog(capsys):
    code, out, _ = invoke(capsys, "search", "nagata")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 16
    good = {(r["i"], r["p"]) for r in rows if r["axioms"] and r["hypotheses"]}
    assert ("all", "isos") in good and ("isos", "all") in good


def test_corr_coproduct(capsys):
    code, _, _ = invoke(capsys, "corr", "coproduct", "1", "1")
    assert code == 0


def test_grid_enumerate_json(capsys):
    code, out, _ = invoke(capsys, "grid", "enumerate", "--k", "2", "--n", "1")
    assert code == 0
    rows = json.loads(out)
    assert rows and all("objects" in r and "edges" in r for r in rows)


def test_corr_enumerate_counts_cells(capsys):
    code, out, _ = invoke(capsys, "corr", "enumerate", "--dim", "0")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 3  # one 0-cell per object of the carrier


def test_localize_check(capsys):
    code, _, _ = invoke(capsys, "localize", "check", "--instance", "localization-interval")
    assert code == 0


def test_descend_extend_c_on_degenerate_pair(capsys):
    code, out, _ = invoke(
        capsys, "descend", "extend-c", "--instance", "nice-pair-identity", "--format", "json"
    )
    assert code == 0
    rep = json.loads(out)
    names = [c["name"] for c in rep["checks"]]
    assert "extension-functorial" in names


def test_descend_extend_e_requires_exceptional_kind(capsys):
    code, _, err = invoke(capsys, "descend", "extend-e", "--instance", "nice-pair-identity")
    assert code == 2
    assert "exceptional" in err


def test_suite_order_is_dependency_order():
    assert SUITE_ORDER == ("category", "setup", "model", "theorem")

import json

from typer.testing import CliRunner

from scpkit.cli import app

REPEATED_WAIT = "x:1, y:bot |- wait y. wait y. close x\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_check_prints_the_derivation(tmp_path):
    source = write(tmp_path, "example.scp", REPEATED_WAIT)

    result = CliRunner().invoke(app, ["check", source])

    assert result.exit_code == 0
    assert "derivable" in result.output
    assert "S⊥" in result.output


def test_check_reports_missing_linearity(tmp_path):
    source = write(tmp_path, "example.scp", REPEATED_WAIT)

    result = CliRunner().invoke(app, ["check", source, "--lin", "y"])
    every = CliRunner().invoke(app, ["check", source, "--lin-all"])

    assert result.exit_code == 1
    assert "no linearity derivation for y" in result.output
    assert every.exit_code == 1


def test_check_uses_the_extension_for_the_calculus(tmp_path):
    source = write(tmp_path, "example.cp", REPEATED_WAIT)

    result = CliRunner().invoke(app, ["check", source])
    forced = CliRunner().invoke(app, ["check", source, "--calculus", "scp"])

    assert result.exit_code == 1
    assert "not derivable" in result.output
    assert forced.exit_code == 0


def test_check_json(tmp_path):
    source = write(tmp_path, "example.scp", REPEATED_WAIT)

    result = CliRunner().invoke(app, ["check", source, "--json", "--lin", "x"])

    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["derivable"] is True
    assert data["derivation"]["rule"] == "S⊥"
    assert data["lin"]["x"]["rule"] == "Lwait2"


def test_check_reads_stdin():
    result = CliRunner().invoke(app, ["check", "-"], input="x:1 |- close x")

    assert result.exit_code == 0
    assert "derivable" in result.output


def test_check_rejects_bad_input(tmp_path):
    broken = write(tmp_path, "broken.scp", "x:1 |- wait x close x")
    bare = write(tmp_path, "bare.scp", "close x")

    assert CliRunner().invoke(app, ["check", broken]).exit_code == 2
    assert CliRunner().invoke(app, ["check", bare]).exit_code == 2
    assert CliRunner().invoke(app, ["check", str(tmp_path / "missing.scp")]).exit_code == 2


def test_lin_command(tmp_path):
    source = write(tmp_path, "example.scp", REPEATED_WAIT)

    assert CliRunner().invoke(app, ["lin", source, "-x", "x"]).exit_code == 0
    assert CliRunner().invoke(app, ["lin", source, "-x", "y"]).exit_code == 1


def test_step_and_list(tmp_path):
    source = write(tmp_path, "cut.scp", "nu x:1 (close x | wait x. close z)")

    result = CliRunner().invoke(app, ["step", source, "--json"])
    listed = CliRunner().invoke(app, ["step", source, "--list", "--json"])
    out_of_range = CliRunner().invoke(app, ["step", source, "--index", "4"])

    assert result.exit_code == 0
    assert json.loads(result.output)["target"] == "close z"
    assert [s["rule"] for s in json.loads(listed.output)] == ["β1⊥"]
    assert out_of_range.exit_code == 2


def test_step_without_redex(tmp_path):
    source = write(tmp_path, "done.scp", "close z")

    result = CliRunner().invoke(app, ["step", source])
    listed = CliRunner().invoke(app, ["step", source, "--list", "--json"])

    assert result.exit_code == 1
    assert "no redex" in result.output
    assert listed.exit_code == 1
    assert json.loads(listed.output) == []


def test_normalize(tmp_path):
    source = write(tmp_path, "cut.scp", "nu a:1 (nu x:1 (close x | wait x. close a) | wait a. close z)")
    stuck = write(tmp_path, "stuck.scp", "nu x:1 (close x | close x)")

    result = CliRunner().invoke(app, ["normalize", source, "--json"])
    blocked = CliRunner().invoke(app, ["normalize", stuck])

    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["result"] == "close z"
    assert len(data["steps"]) == 2
    assert data["stuck"] is False
    assert blocked.exit_code == 1
    assert "stopped with a cut on x" in blocked.output


def test_equiv(tmp_path):
    left = write(tmp_path, "left.scp", "nu x:1 (close x | wait x. close z)")
    right = write(tmp_path, "right.scp", "nu x:bot (wait x. close z | close x)")
    other = write(tmp_path, "other.scp", "close z")

    result = CliRunner().invoke(app, ["equiv", left, right, "--json"])

    assert result.exit_code == 0
    assert json.loads(result.output)["equivalent"] is True
    assert CliRunner().invoke(app, ["equiv", left, other]).exit_code == 1


def test_translate_both_ways(tmp_path):
    cp = write(tmp_path, "send.cp", "x:1 * bot, z:1 |- x[y](close y | wait x. close z)")
    scp = write(tmp_path, "example.scp", REPEATED_WAIT)

    encoded = CliRunner().invoke(app, ["translate", cp, "--to", "scp", "--json"])
    derived = CliRunner().invoke(app, ["translate", cp, "--to", "scp", "--with-derivation", "--json"])
    rejected = CliRunner().invoke(app, ["translate", scp, "--to", "cp", "--with-derivation"])

    assert encoded.exit_code == 0
    assert json.loads(encoded.output)["process"] == "x[y>x_1](close y | wait x_1. close z)"
    assert derived.exit_code == 0
    assert set(json.loads(derived.output)["lin"]) == {"x", "z"}
    assert rejected.exit_code == 1
    assert "no linearity derivation for y" in rejected.output


def test_translate_drops_unused_context_names(tmp_path):
    scp = write(tmp_path, "unused.scp", "x:1, z:bot |- close x")

    result = CliRunner().invoke(app, ["translate", scp, "--to", "cp", "--with-derivation", "--json"])

    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["process"] == "close x"
    assert data["derivation"]["rule"] == "C1"
    assert data["derivation"]["context"] == [["x", "1"]]


def test_enumerate(tmp_path):
    result = CliRunner().invoke(app, ["enumerate", "--size", "1"])

    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert len(lines) == 9
    assert "x:1 |- close x" in lines


def test_properties_with_config(tmp_path):
    config = write(
        tmp_path,
        "suite.json",
        json.dumps({"version": 1, "suite": "duality", "count": 2, "max_depth": 2, "size": 1}),
    )

    result = CliRunner().invoke(app, ["properties", "--config", config])

    assert result.exit_code == 0
    assert "no violations" in result.output


def test_properties_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SCPKIT_SEED", "5")

    result = CliRunner().invoke(app, ["properties", "--suite", "duality", "--count", "1", "--json"])

    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["config"]["seed"] == 5
    assert data["ok"] is True


def test_properties_rejects_bad_config(tmp_path):
    unknown = write(tmp_path, "unknown.json", json.dumps({"sizes": 1}))
    broken = write(tmp_path, "broken.json", "{")

    assert CliRunner().invoke(app, ["properties", "--config", unknown]).exit_code == 2
    assert CliRunner().invoke(app, ["properties", "--config", broken]).exit_code == 2
    assert CliRunner().invoke(app, ["properties", "--count", "-1"]).exit_code == 2

import json
import subprocess
import sys

import pytest

from effspace.cli import (ConfigError, RunConfig, cmd_check_basis, cmd_friedberg, cmd_regularity,
                          exit_code, main, parse_ball, parse_dyadic, render_json)
from effspace.instances import Interval
from effspace.kernel import Enumerator, pair
from effspace.numbering import LacombeSet


def test_parse_dyadic():
    assert parse_dyadic("3*2^-2") == parse_dyadic("3/4") == parse_dyadic(" 3 * 2^(-2) ")
    assert parse_dyadic("-5") == -5
    for bad in ("1/3", "0.5", "x", "1/0"):
        with pytest.raises(ConfigError):
            parse_dyadic(bad)


def test_parse_ball():
    assert parse_ball("(7/8,inf)") == Interval(parse_dyadic("7/8"), None)
    assert parse_ball("(-inf, 1*2^1)") == Interval(None, parse_dyadic("2"))
    with pytest.raises(ConfigError):
        parse_ball("[0,1]")


def test_check_basis_defaults(capsys):
    assert main(["check-basis", "--samples", "5"]) == 0
    out = capsys.readouterr().out
    assert "10 pass, 0 fail" in out


def test_check_basis_sierpinski_table():
    report = cmd_check_basis(RunConfig(instance="sierpinski", samples=3))
    assert report["strong_inclusion"] == {"<0,1> < <0,1>": False, "<0,1> < <1,1>": False,
                                          "<1,1> < <0,1>": True, "<1,1> < <1,1>": False}
    assert report["delta"]["d(top,bot)"] == "1"
    assert exit_code(report) == 0


def test_check_basis_no_samples():
    report = cmd_check_basis(RunConfig(samples=0))
    assert report["records"] == [] and exit_code(report) == 0


def test_regularity_sierpinski_passes():
    report = cmd_regularity(RunConfig(instance="sierpinski", samples=3))
    assert report["summary"]["fail"] == 0 and report["summary"]["pass"] > 0


def test_regularity_faulty_t():
    # a cover by the whole space cannot be disjoint from anything
    whole = lambda W: (lambda i, m: LacombeSet(Enumerator.of([pair(0, 0)])))
    report = cmd_regularity(RunConfig(instance="sierpinski", samples=2, fuel=2000), t_override=whole)
    fails = [r for r in report["records"] if r["status"] == "fail"]
    assert fails and all(r["witness"] for r in fails)
    assert exit_code(report) == 1


def test_modulus_add_const(capsys):
    assert main(["modulus", "--operator", "add_const", "--point", "0", "--target", "(7/8,inf)",
                 "--json"]) == 0
    rec = json.loads(capsys.readouterr().out)["records"][0]
    assert rec["status"] == "pass" and rec["witness"]["ball"] == "(-1/8,inf)"


def test_modulus_errors(capsys):
    assert main(["modulus", "--operator", "add_const", "--point", "0", "--target", "(2,inf)"]) == 2
    assert "not in" in capsys.readouterr().err
    assert main(["modulus", "--operator", "sqrt", "--point", "0", "--target", "(2,inf)"]) == 2
    assert main(["no-such-command"]) == 2


def test_modulus_out_of_fuel():
    assert main(["modulus", "--operator", "add_const", "--point", "0", "--target", "(7/8,inf)",
                 "--fuel", "1"]) == 3


def test_witness_scale2(capsys):
    assert main(["witness", "--operator", "scale2", "--point", "0", "--n-ball", "(-3,inf)",
                 "--m-ball", "(-1/2,inf)", "--json"]) == 0
    w = json.loads(capsys.readouterr().out)["records"][0]["witness"]
    assert w["value"] == "-1/2" and w["in_n"] and w["in_cover"] and w["outside_s"]


def test_friedberg_without_candidate():
    report = cmd_friedberg(RunConfig(instance="sierpinski"))
    assert [r["name"] for r in report["records"]] == ["specialization(bot<=top)",
                                                      "specialization(top<=bot)"]


def test_friedberg_seeded_shows_unsound():
    report = cmd_friedberg(RunConfig(instance="sierpinski", samples=3, fuel=10**4), "seeded")
    names = [r["name"] for r in report["records"] if r["status"] == "fail"]
    assert any(":unsound(" in n for n in names)
    assert any(n == "bot_only:upward_closure" for n in names)


def test_friedberg_needs_sierpinski():
    with pytest.raises(ConfigError):
        cmd_friedberg(RunConfig(instance="reals"))


def test_json_byte_identical():
    cfg = RunConfig(instance="sierpinski", samples=4, output="json")
    assert render_json(cmd_check_basis(cfg)) == render_json(cmd_check_basis(cfg))


def test_module_entry_point():
    cmd = [sys.executable, "-m", "effspace", "friedberg", "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == subprocess.run(cmd, capture_output=True, check=True).stdout
    assert json.loads(first)["summary"]["pass"] == 2

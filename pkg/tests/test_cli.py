#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: test_cli.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

import json

import numpy as np
import pytest
from jsonschema import validate

from distmet.__main__ import distmet


def invoke(runner, args):
    return runner.invoke(distmet, args, catch_exceptions=False)


def test_twin_fock(runner, schema):
    result = invoke(runner, ["protocol", "twin-fock", "--d", "2", "--N", "4"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["delta_q"] == pytest.approx(0.2887, abs=1e-3)
    assert data["metadata"]["protocol"] == "twin-fock"
    validate(data, schema("protocol_result"))


def test_twin_fock_odd_photons(runner):
    result = invoke(runner, ["protocol", "twin-fock", "--d", "2", "--N", "3"])

    assert result.exit_code == 2
    assert "N must be even" in result.output


def test_twin_fock_shots_and_table(runner, tmp_path):
    table = tmp_path / "scaling.csv"
    args = ["protocol", "twin-fock", "--shots", "100", "--scaling", "2,4"]
    result = invoke(runner, args + ["--table", str(table)])

    assert result.exit_code == 0
    assert json.loads(result.output)["metadata"]["shot_noise"]["shots"] == 100

    lines = table.read_bytes().split(b"\r\n")
    assert lines[0].startswith(b"d,N,")
    assert len([line for line in lines if line]) == 3


def test_output_is_reproducible(runner, tmp_path):
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"

    for path in (first, second):
        args = ["protocol", "twin-fock", "--shots", "50", "--seed", "3"]
        result = invoke(runner, args + ["--out", str(path)])
        assert result.exit_code == 0
        assert result.output == ""

    assert first.read_bytes() == second.read_bytes()


def test_fig2(runner, schema):
    result = invoke(runner, ["protocol", "fig2", "--n", "1"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["delta_q"] == pytest.approx(0.5, rel=0.01)
    validate(data, schema("protocol_result"))


def test_classical(runner, schema):
    result = invoke(runner, ["protocol", "classical", "--n", "2"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["delta_q"] == pytest.approx(1 / np.sqrt(8))
    validate(data, schema("protocol_result"))


def test_config_defaults(runner, config_file):
    result = invoke(runner, ["-c", config_file, "protocol", "twin-fock"])

    assert result.exit_code == 0
    metadata = json.loads(result.output)["metadata"]

    assert metadata["d"] == 3
    assert metadata["N"] == 2


def test_qfi(runner, schema):
    args = ["qfi", "--state", "fock:1", "--state", "fock:1"]
    result = invoke(runner, args + ["--unitary", "random:3", "--weights", "1"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["fw_direct"] == pytest.approx(data["fw_moments"], abs=1e-10)
    assert data["metadata"]["discarded_norm"] == 0.0
    validate(data["qfi_matrix"], schema("qfi_matrix"))


def test_qfi_insensitive(runner):
    args = ["qfi", "--state", "fock:1", "--state", "vacuum", "--weights", "1"]
    result = invoke(runner, args)

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["crb_delta_q"] is None
    assert "estimation_error" in data


def test_qfi_no_states(runner):
    result = invoke(runner, ["qfi", "--weights", "1"])

    assert result.exit_code == 2


def test_bound_fock(runner):
    args = ["bound", "fock", "--photons", "2,2,0,0", "--weights", "0.5,0.5"]
    result = invoke(runner, args + ["--unitary", "hoarding"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["delta_q_bound"] == pytest.approx(1 / (4 * np.sqrt(2)))
    assert data["fw"] <= data["trace_bound"] + 1e-9


def test_bound_separable(runner):
    args = ["bound", "separable", "--state", "amps:1,0,1", "--state", "fock:1"]
    result = invoke(runner, args + ["--weights", "1", "--unitary", "random:1"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["terms"]["passed"] is True
    assert data["delta_q_bound"] > 0


def test_verify(runner, tmp_path):
    out = tmp_path / "campaign.csv"
    args = ["verify", "--family", "routes", "--instances", "3", "--seed", "1"]
    result = invoke(runner, args + ["--out", str(out)])

    assert result.exit_code == 0
    assert "0 violations" in result.output
    assert out.read_bytes().startswith(b"index,seed,")


@pytest.mark.parametrize(
    "family,instances",
    [("fock", 500), ("separable", 500), ("routes", 200)],
)
def test_verify_full_campaign(runner, family, instances):
    args = ["verify", "--family", family, "--instances", str(instances)]
    result = invoke(runner, args + ["--seed", "7"])

    assert result.exit_code == 0
    assert f"{family}: {instances} instances, 0 violations." in result.output


def test_verify_reproducible(runner, tmp_path):
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"

    for path in (first, second):
        args = ["verify", "--family", "separable", "--instances", "20", "--seed", "7"]
        result = invoke(runner, args + ["--out", str(path)])
        assert result.exit_code == 0

    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_bytes().split(b"\r\n")) == 22


def test_verify_violation(runner, mocker):
    mocker.patch(
        "distmet.campaigns.run_instance",
        side_effect=lambda family, index, seed: {
            "index": index,
            "seed": seed,
            "pass": index != 1,
        },
    )

    result = invoke(runner, ["verify", "--instances", "3", "--seed", "1"])

    assert result.exit_code == 3
    assert "fock: 3 instances, 1 violations." in result.output
    assert "instances [1]" in result.output


def test_verify_no_instances(runner):
    result = invoke(runner, ["verify", "--instances", "0"])

    assert result.exit_code == 2


def test_verify_config(runner, config_file):
    result = invoke(runner, ["-c", config_file, "verify", "--family", "fock"])

    assert result.exit_code == 0
    assert "fock: 4 instances" in result.output


def test_optimize_vacuum(runner, schema):
    args = ["optimize", "--state", "vacuum", "--state", "vacuum", "--weights", "1"]
    result = invoke(runner, args + ["--budget", "20", "--restarts", "2"])

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["best_fw"] == 0.0
    assert data["gap"] == 0.0
    validate(data, schema("optimization_report"))


def test_optimize_hoarded(runner, schema):
    states = ["fock:2", "fock:2", "vacuum", "vacuum"]
    args = ["optimize", "--weights", "0.5,0.5", "--witness", "hoarding"]
    args += ["--budget", "50", "--restarts", "2"]
    for state in states:
        args += ["--state", state]

    result = invoke(runner, args)

    assert result.exit_code == 0
    data = json.loads(result.output)

    assert data["best_fw"] >= data["witness_fw"] - 1e-9
    assert data["states"] == states
    validate(data, schema("optimization_report"))


def test_sweep(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    args = ["sweep", "--family", "hoarded", "--d", "1,2", "--budget", "30"]
    result = invoke(runner, args + ["--restarts", "1", "--out", str(out)])

    assert result.exit_code == 0
    assert result.output.count("best_fw=") == 2
    assert out.read_bytes().startswith(b"d,family,photons,")

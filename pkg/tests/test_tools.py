#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: test_tools.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from distmet.exceptions import ValidationError
from distmet.fock import SingleModeState
from distmet.network import ModeUnitary
from distmet.tools import (
    derive_seeds,
    parse_list,
    parse_state_spec,
    parse_unitary_spec,
    parse_weights,
    run_in_workers,
    worker_count,
    write_csv,
    write_json,
)


def test_derive_seeds():
    seeds = derive_seeds(42, 5)

    assert len(set(seeds)) == 5
    assert derive_seeds(42, 5) == seeds
    assert derive_seeds(42, 3) == seeds[:3]
    assert all(0 <= seed < 2**64 for seed in seeds)

    with pytest.raises(ValidationError):
        derive_seeds(42, -1)


def test_worker_count(monkeypatch):
    monkeypatch.delenv("DISTMET_THREADS", raising=False)
    assert worker_count() is None

    monkeypatch.setenv("DISTMET_THREADS", "3")
    assert worker_count() == 3

    monkeypatch.setenv("DISTMET_THREADS", "0")
    with pytest.raises(ValidationError):
        worker_count()

    monkeypatch.setenv("DISTMET_THREADS", "many")
    with pytest.raises(ValidationError):
        worker_count()


@pytest.mark.asyncio
async def test_run_in_workers_order(monkeypatch):
    monkeypatch.setenv("DISTMET_THREADS", "2")

    results = await run_in_workers(pow, [(2, n) for n in range(8)])

    assert results == [2**n for n in range(8)]


@pytest.mark.asyncio
async def test_run_in_workers_cap(monkeypatch, mocker):
    monkeypatch.setenv("DISTMET_THREADS", "3")
    executor = mocker.patch(
        "distmet.tools.ThreadPoolExecutor",
        wraps=ThreadPoolExecutor,
    )

    assert await run_in_workers(abs, [(-1,), (2,)]) == [1, 2]
    executor.assert_called_once_with(max_workers=3)


def test_parse_list():
    assert parse_list(" a, b,,c ") == ["a", "b", "c"]
    assert parse_list([1, 2]) == ["1", "2"]


def test_parse_weights():
    assert parse_weights("0.5,-0.25").tolist() == [0.5, -0.25]

    with pytest.raises(ValidationError):
        parse_weights("")

    with pytest.raises(ValidationError):
        parse_weights("0.5,x")


def test_parse_state_spec():
    assert parse_state_spec("vacuum").photon_number == 0
    assert parse_state_spec("fock:3").photon_number == 3

    superposition = parse_state_spec("amps:1,0,1")
    assert np.allclose(superposition.amplitudes, [2**-0.5, 0, 2**-0.5])

    coherent = parse_state_spec("coherent:0.3,0.4:10")
    expected = SingleModeState.coherent(0.3 + 0.4j, 10)
    assert np.allclose(coherent.amplitudes, expected.amplitudes)

    for spec in ["squeezed:1", "fock:x", "coherent:1,2,3:5", "vacuum:1"]:
        with pytest.raises(ValidationError):
            parse_state_spec(spec)


def test_parse_unitary_spec(tmp_path):
    assert parse_unitary_spec("identity", 3).isclose(ModeUnitary.identity(3))

    random = parse_unitary_spec("random:7", 3)
    assert random.isclose(ModeUnitary.random(3, np.random.default_rng(7)))

    hoarding = parse_unitary_spec("hoarding", 4, [0.5, 0.5])
    assert hoarding.dim == 4

    path = tmp_path / "unitary.json"
    path.write_text(json.dumps(random.to_dict()))
    assert parse_unitary_spec(str(path), 3).isclose(random, atol=0.0)

    with pytest.raises(ValidationError):
        parse_unitary_spec(str(path), 4)

    with pytest.raises(ValidationError):
        parse_unitary_spec("hoarding", 3, [0.5, 0.5])

    with pytest.raises(ValidationError):
        parse_unitary_spec("random:x", 3)

    with pytest.raises(ValidationError):
        parse_unitary_spec("does-not-exist", 3)


def test_write_json(tmp_path):
    path = tmp_path / "out.json"
    text = write_json(path, {"b": 1, "a": [0.5]})

    assert path.read_text() == text
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")

    with pytest.raises(ValueError):
        write_json(None, {"a": float("nan")})


def test_write_csv(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, [{"a": 1, "b": None}, {"a": 2, "b": "x"}], ["a", "b"])

    assert path.read_bytes() == b"a,b\r\n1,\r\n2,x\r\n"


def test_write_csv_missing_values(tmp_path):
    path = tmp_path / "out.csv"
    rows = [{"n": 3, "ok": True, "x": 0.25}, {"n": None, "ok": False}, {"n": 4}]
    write_csv(path, rows, ["n", "x", "ok"])

    expected = b"n,x,ok\r\n3,0.25,True\r\n,,False\r\n4,,\r\n"
    assert path.read_bytes() == expected


def test_write_csv_quoting(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, [{"a": "1,2", "b": 'say "hi"'}], ["a", "b"])

    assert path.read_bytes() == b'a,b\r\n"1,2","say ""hi"""\r\n'


def test_write_csv_no_rows(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, [], ["index", "seed"])

    assert path.read_bytes() == b"index,seed\r\n"

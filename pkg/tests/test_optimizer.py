#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: test_optimizer.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

import numpy as np
import pytest

from distmet.exceptions import ValidationError
from distmet.fock import SingleModeState
from distmet.network import ModeUnitary, decompose, hoarding_unitary, triangular_layout
from distmet.optimizer import (
    MeshParameters,
    angles_from_sequence,
    hoarded_family,
    maximize_fw,
    mesh_unitary,
    scaling_study,
    well_distributed_family,
)
from distmet.qfi import WeightVector


pytestmark = [pytest.mark.asyncio]


TWIN = [SingleModeState.fock(1), SingleModeState.fock(1)]
HOARDED = [SingleModeState.fock(2)] * 2 + [SingleModeState.vacuum()] * 2


async def test_twin_photons_reach_maximum():
    report = await maximize_fw(TWIN, WeightVector([1.0]), budget=400, restarts=4)

    assert report.best_fw >= 4.0 - 1e-6
    assert report.best_fw <= 4.0 + 1e-9
    assert report.bound_kind == "fock_eigenvalue"
    assert report.bound_value == pytest.approx(8.0)
    assert report.gap == pytest.approx(report.bound_value - report.best_fw)
    assert report.violations == 0

    unitary = mesh_unitary(report.best_params)
    assert unitary.dim == 2


async def test_vacuum():
    inputs = [SingleModeState.vacuum()] * 2
    report = await maximize_fw(inputs, WeightVector([1.0]), budget=50, restarts=2)

    assert report.best_fw == 0.0
    assert report.bound_value == 0.0
    assert report.gap == 0.0


async def test_witness_dominance():
    w = WeightVector.uniform(2)
    witness = hoarding_unitary(w)

    report = await maximize_fw(
        HOARDED,
        w,
        budget=100,
        restarts=2,
        witness=witness,
    )

    assert report.witness_fw is not None
    assert report.best_fw >= report.witness_fw - 1e-9
    assert report.best_fw <= report.bound_value + 1e-9


async def test_determinism():
    w = WeightVector.uniform(2)

    first = await maximize_fw(HOARDED, w, budget=60, restarts=3, seed=7)
    second = await maximize_fw(HOARDED, w, budget=60, restarts=3, seed=7)

    assert first.to_dict() == second.to_dict()


async def test_budget_monotone():
    w = WeightVector.uniform(2)

    small = await maximize_fw(HOARDED, w, budget=30, restarts=2, seed=3)
    large = await maximize_fw(HOARDED, w, budget=300, restarts=2, seed=3)

    assert large.best_fw >= small.best_fw


async def test_separable_inputs():
    inputs = [SingleModeState.from_amplitudes([1, 0, 1]), SingleModeState.fock(1)]
    report = await maximize_fw(inputs, WeightVector([1.0]), budget=100, restarts=2)

    assert report.bound_kind == "separable"
    assert report.best_fw > 0


async def test_invalid_arguments():
    w = WeightVector([1.0])

    with pytest.raises(ValidationError):
        await maximize_fw(TWIN, w, budget=0)

    with pytest.raises(ValidationError):
        await maximize_fw(TWIN, w, restarts=0)

    with pytest.raises(ValidationError):
        await maximize_fw(TWIN, w, layout=triangular_layout(3))


def test_mesh_round_trip(rng):
    unitary = ModeUnitary.random(3, rng)
    layout = triangular_layout(3)

    angles = angles_from_sequence(decompose(unitary, prune=False), layout)
    params = MeshParameters(angles, layout)

    assert mesh_unitary(params).isclose(unitary, atol=1e-8)
    assert np.all(params.angles >= 0)


def test_mesh_wrong_size():
    with pytest.raises(ValidationError):
        MeshParameters(np.zeros(2), triangular_layout(3))


def test_families():
    well = well_distributed_family(3)

    assert well.occupation == [1, 1, 1, 0, 0, 0]
    assert well.witness is None

    hoarded = hoarded_family(3)

    assert hoarded.occupation == [3, 3, 0, 0, 0, 0]
    assert hoarded.witness is not None

    with pytest.raises(ValidationError):
        hoarded_family(1, photons=1)


async def test_well_distributed_scaling():
    rows = await scaling_study(
        "well-distributed",
        [1, 2, 3],
        budget=300,
        restarts=2,
        seed=1,
    )

    assert [row["d"] for row in rows] == [1, 2, 3]
    for row in rows:
        # The generator spectrum spans photons / d.
        assert row["best_fw"] <= (row["photons"] / row["d"]) ** 2 + 1e-9
        assert row["gap"] >= -1e-9


async def test_hoarded_scaling():
    rows = await scaling_study("hoarded", [1, 2, 3], budget=300, restarts=2, seed=1)

    for row in rows:
        assert row["photons"] == 2 * row["d"]
        assert row["ratio"] is not None
        assert row["ratio"] <= 2.1
        assert row["gap"] >= -1e-9


async def test_unknown_family():
    with pytest.raises(ValidationError):
        await scaling_study("nonsense", [1])

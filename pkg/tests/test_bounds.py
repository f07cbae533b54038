#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: test_bounds.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmet.bounds import (
    SMatrix,
    fock_delta_q_bound,
    fock_eigenvalue_bound,
    fock_trace_bound,
    separable_bound_constants,
    separable_fw_bound,
    simplified_delta_q_bound,
    verify_term_bounds,
)
from distmet.exceptions import DistmetUserWarning, NoPhotonsError, ValidationError
from distmet.fock import (
    FockState,
    MomentSet,
    SingleModeState,
    beam_splitter_matrix,
    product_state,
    single_mode_moments,
)
from distmet.network import ModeUnitary, apply_mode_unitary
from distmet.qfi import WeightVector, qfi_direct, qfi_from_moments


BALANCED = ModeUnitary(beam_splitter_matrix(0.5, 0.0))


def test_s_matrix_spectrum(rng):
    unitary = ModeUnitary.random(4, rng)
    S = SMatrix.build(unitary, [0.5, 0.2])

    assert S.dim == 4
    assert np.allclose(S.entries, S.entries.conj().T)

    with pytest.raises(ValidationError):
        SMatrix(np.diag([0.5, 0.1, 0.0]), [0.5, 0.2])


def test_trace_bound_no_photons():
    assert fock_trace_bound(BALANCED, [1.0], [0, 0]) == 0.0


def test_trace_bound_twin_fock():
    trace = fock_trace_bound(BALANCED, [1.0], [1, 1])
    F = qfi_direct(apply_mode_unitary(FockState.from_occupation((1, 1)), BALANCED), [0])

    assert F.fw([1.0]) == pytest.approx(4.0)
    assert trace == pytest.approx(8.0)
    assert trace >= F.fw([1.0])


def test_trace_bound_length_mismatch():
    with pytest.raises(ValidationError):
        fock_trace_bound(BALANCED, [1.0], [1, 1, 0])


def test_eigenvalue_bound_hoarded():
    bound = fock_eigenvalue_bound([2, 2, 0, 0], [0.5, 0.5])

    assert bound.closed_form == pytest.approx(8.0)
    assert bound.pairing == pytest.approx(12.0)
    assert bound.certified
    assert bound.value == pytest.approx(8.0)


def test_eigenvalue_bound_no_photons():
    bound = fock_eigenvalue_bound([0, 0, 0, 0], [0.5, 0.5])

    assert bound.value == 0.0


def test_eigenvalue_bound_mixed_signs():
    # Two photons through a balanced splitter beat the closed form here.
    w = [0.5, -0.5]
    unitary = ModeUnitary.random(2, np.random.default_rng(0))
    bound = fock_eigenvalue_bound([1, 1], w)

    assert not bound.certified
    assert bound.closed_form == pytest.approx(2.0)
    assert bound.value == bound.pairing == pytest.approx(4.0)

    psi_u = apply_mode_unitary(FockState.from_occupation((1, 1)), BALANCED)
    assert qfi_direct(psi_u, [0, 1]).fw(w) == pytest.approx(4.0)

    assert fock_trace_bound(unitary, w, [1, 1]) <= bound.pairing + 1e-12


def test_delta_q_bound_examples():
    assert fock_delta_q_bound([2, 2, 0, 0], [0.5, 0.5]) == pytest.approx(
        1 / (4 * np.sqrt(2))
    )
    assert fock_delta_q_bound([1, 1], [1.0]) == pytest.approx(1 / (2 * np.sqrt(2)))


def test_delta_q_bound_no_photons():
    with pytest.raises(NoPhotonsError):
        fock_delta_q_bound([0, 0], [1.0])


def test_delta_q_bound_uncertified_warns():
    with pytest.warns(DistmetUserWarning):
        value = fock_delta_q_bound([1, 1], [0.5, -0.5])

    assert value == pytest.approx(0.5 / np.sqrt(4.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fock_bound_chain(seed):
    rng = np.random.default_rng(seed)

    d = int(rng.integers(1, 3))
    occupation = rng.multinomial(int(rng.integers(1, 4)), np.full(2 * d, 0.5 / d))
    unitary = ModeUnitary.random(2 * d, rng)
    w = WeightVector.random(rng, d)

    psi_u = apply_mode_unitary(FockState.from_occupation(occupation), unitary)
    fw = qfi_direct(psi_u, range(d)).fw(w)

    trace = fock_trace_bound(unitary, w, occupation)
    bound = fock_eigenvalue_bound(occupation, w)

    assert fw <= trace + 1e-9
    assert trace <= bound.pairing + 1e-9
    assert fw <= bound.value + 1e-9


def test_constants_fock():
    moments = [MomentSet.fock(n) for n in (2, 1, 0, 3)]
    constants = separable_bound_constants(moments)

    assert constants.alpha_max == 0
    assert constants.xi_max == 0
    assert constants.beta_max == 0
    assert constants.v_max == 0
    assert constants.Xi_max == 0
    assert constants.A == 0
    assert constants.M_max == pytest.approx(3 * 3)
    assert constants.B == pytest.approx(4 * constants.M_max)


def test_constants_vacuum():
    constants = separable_bound_constants([MomentSet.fock(0)] * 4)

    assert constants.A == 0
    assert constants.B == 0
    assert separable_fw_bound(constants, 2, [0.5, 0.5]) == 0


def test_constants_superposition():
    state = SingleModeState.from_amplitudes([1, 0, 1])
    constants = separable_bound_constants([single_mode_moments(state)] * 2)

    assert constants.n_max == pytest.approx(1.5)
    assert constants.xi_max == pytest.approx(1 / np.sqrt(2))
    assert constants.v_max == pytest.approx(1.0)
    assert constants.M_max == pytest.approx(2.0)
    assert constants.Xi_max == pytest.approx(0.5)
    assert constants.A == 0
    assert constants.B == pytest.approx(14.0)
    assert constants.ceiling_failures() == []


def test_constants_invalid_moments():
    with pytest.raises(ValidationError):
        separable_bound_constants([MomentSet(2.0 + 0j, 1.0, 0j, 0j, 1.0)])


def test_separable_bound_fock():
    moments = [MomentSet.fock(n) for n in (2, 2, 0, 0)]
    constants = separable_bound_constants(moments)

    value = separable_fw_bound(constants, 2, [0.5, 0.5])
    assert value == pytest.approx(2 * constants.M_max)


def test_separable_bound_too_many_modes():
    constants = separable_bound_constants([MomentSet.fock(1)] * 3)

    with pytest.raises(ValidationError):
        separable_fw_bound(constants, 1, [1.0])


def test_simplified_bound():
    moments = [MomentSet.fock(2)] + [MomentSet.fock(0)] * 7

    assert simplified_delta_q_bound(moments, 4) == pytest.approx(0.0125)

    with pytest.raises(NoPhotonsError):
        simplified_delta_q_bound([MomentSet.fock(0)] * 2, 1)


def test_term_bounds_fock(rng):
    moments = [MomentSet.fock(n) for n in (2, 1, 1, 0)]
    unitary = ModeUnitary.random(4, rng)
    w = [0.5, 0.3]

    report = verify_term_bounds(unitary, moments, w)

    assert report.passed
    assert [check.name for check in report.checks] == [f"F{i}" for i in range(1, 7)]
    for check in report.checks:
        if check.name != "F2":
            assert check.value == 0
            assert check.bound == 0

    assert report.checks[1].bound == pytest.approx(
        separable_bound_constants(moments).M_max * 0.34
    )
    assert set(report.intermediates) == {"K1", "K2", "K3", "K4", "K5", "K6"}


def test_term_bounds_vacuum(rng):
    unitary = ModeUnitary.random(2, rng)
    report = verify_term_bounds(unitary, [MomentSet.fock(0)] * 2, [1.0])

    assert report.passed
    assert all(check.value == 0 for check in report.checks)


@pytest.mark.parametrize("seed", [5, 11, 42, 99])
def test_term_bounds_random(seed):
    rng = np.random.default_rng(seed)

    d = 2
    factors = [SingleModeState.random(rng, int(rng.integers(0, 4))) for _ in range(4)]
    unitary = ModeUnitary.random(4, rng)
    w = WeightVector.random(rng, d)

    moments = [single_mode_moments(factor) for factor in factors]
    report = verify_term_bounds(unitary, moments, w)

    assert report.passed, report.failures

    constants = separable_bound_constants(moments)
    fw = qfi_from_moments(unitary, moments, None, w)

    assert fw <= separable_fw_bound(constants, d, w) + 1e-9
    assert constants.ceiling_failures() == []

    F = qfi_direct(apply_mode_unitary(product_state(factors), unitary), [0, 1])
    assert F.fw(w) == pytest.approx(fw, abs=1e-10)

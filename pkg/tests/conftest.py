#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: conftest.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

import itertools
import json
import os

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.linalg import expm, logm

from distmet.fock import FockState


SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "../distmet/etc/schema")


def to_dense(state: FockState, cutoff: int) -> np.ndarray:
    """Expands a sparse state into the ``(cutoff + 1)^M`` tensor-product basis."""

    vector = np.zeros((cutoff + 1) ** state.modes, dtype=complex)
    for occupation, amplitude in state.items():
        index = np.ravel_multi_index(occupation, (cutoff + 1,) * state.modes)
        vector[index] = amplitude

    return vector


def from_dense(vector: np.ndarray, modes: int, cutoff: int) -> FockState:
    amplitudes = {}
    for occupation in itertools.product(range(cutoff + 1), repeat=modes):
        if sum(occupation) > cutoff:
            continue
        index = np.ravel_multi_index(occupation, (cutoff + 1,) * modes)
        if abs(vector[index]) > 1e-13:
            amplitudes[occupation] = vector[index]

    return FockState(modes, cutoff, amplitudes)


def dense_network(unitary: np.ndarray, cutoff: int) -> np.ndarray:
    """The Fock-space operator of a mode unitary, via the matrix exponential.

    With ``U = exp(-i h)`` the network is ``exp(-i sum_jk h_jk a_j^dag a_k)``.
    Number conservation makes the per-mode truncation exact up to ``cutoff``
    total photons.
    """

    modes = unitary.shape[0]

    h = 1j * logm(unitary)
    h = (h + h.conj().T) / 2.0

    a = np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(complex)
    eye = np.eye(cutoff + 1)

    def lowering(j):
        factors = [a if k == j else eye for k in range(modes)]
        result = factors[0]
        for factor in factors[1:]:
            result = np.kron(result, factor)
        return result

    lowerings = [lowering(j) for j in range(modes)]

    generator = sum(
        h[j, k] * lowerings[j].conj().T @ lowerings[k]
        for j in range(modes)
        for k in range(modes)
    )

    return expm(-1j * generator)


@pytest.fixture
def rng():
    yield np.random.default_rng(20261018)


@pytest.fixture
def oracle():
    """Applies a mode unitary to a sparse state through the dense exponential."""

    def _apply(state: FockState, unitary: np.ndarray) -> FockState:
        cutoff = state.cap
        operator = dense_network(np.asarray(unitary), cutoff)
        vector = operator @ to_dense(state, cutoff)
        return from_dense(vector, state.modes, cutoff)

    yield _apply


@pytest.fixture
def schema():
    def _load(name: str):
        with open(os.path.join(SCHEMA_DIR, f"{name}.json")) as fd:
            return json.load(fd)

    yield _load


@pytest.fixture
def runner():
    yield CliRunner()


@pytest.fixture
def config_file():
    yield os.path.join(os.path.dirname(__file__), "distmet.yaml")

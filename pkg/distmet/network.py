#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: network.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, cos, pi, sin

from typing import Any, Dict, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import unitary_group

from . import config, log
from .exceptions import DistmetError, ValidationError
from .fock import (
    FockState,
    SingleModeState,
    apply_beam_splitter,
    apply_phase_shift,
    beam_splitter_matrix,
    product_state,
)


__all__ = [
    "ModeUnitary",
    "BeamSplitter",
    "PhaseShift",
    "Gate",
    "GateSequence",
    "triangular_layout",
    "decompose",
    "apply_gates",
    "apply_mode_unitary",
    "hoarding_unitary",
    "fig2_unitary",
    "fig2_network",
    "FIG2_PHASE_MODES",
    "FIG2_REFERENCE_MODE",
]


UNITARITY_TOLERANCE: float = config["tolerances"]["unitarity"]
RECOMPOSITION_TOLERANCE: float = config["tolerances"]["recomposition"]
IDENTITY_GATE_TOLERANCE: float = config["tolerances"]["identity_gate"]

#: Modes carrying the two phases in the single-reference-port circuit.
FIG2_PHASE_MODES: Tuple[int, int] = (0, 2)
FIG2_REFERENCE_MODE: int = 1


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """An ``M x M`` unitary acting on the mode creation operators.

    Column ``k`` is the image of input mode ``k``, i.e.
    ``a_k^dagger -> sum_j U[j, k] a_j^dagger``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)

        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
            raise ValidationError(f"A mode unitary must be square, got {matrix.shape}.")

        deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))
        if deviation > UNITARITY_TOLERANCE:
            raise ValidationError(f"Matrix is not unitary (deviation {deviation:.3g}).")

        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __repr__(self):
        return f"<ModeUnitary (dim={self.dim})>"

    def __matmul__(self, other: ModeUnitary) -> ModeUnitary:
        if not isinstance(other, ModeUnitary):
            return NotImplemented

        if other.dim != self.dim:
            raise ValidationError("Cannot multiply unitaries of different dimension.")

        return ModeUnitary(self.matrix @ other.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> ModeUnitary:
        """Returns the inverse (conjugate transpose)."""

        return ModeUnitary(self.matrix.conj().T)

    def isclose(self, other: ModeUnitary, atol: float = RECOMPOSITION_TOLERANCE):
        return self.dim == other.dim and bool(
            np.max(np.abs(self.matrix - other.matrix)) <= atol
        )

    @classmethod
    def identity(cls, dim: int) -> ModeUnitary:
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> ModeUnitary:
        """Draws a Haar-random unitary."""

        if dim < 1:
            raise ValidationError("Dimension must be positive.")

        if dim == 1:
            return cls(np.array([[np.exp(2j * pi * rng.random())]]))

        return cls(unitary_group.rvs(dim, random_state=rng))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ModeUnitary:
        try:
            matrix = np.array(data["re"], dtype=float) + 1j * np.array(data["im"])
            dim = int(data["dim"])
        except (KeyError, TypeError, ValueError) as err:
            raise ValidationError(f"Invalid serialised unitary: {err}") from err

        if matrix.shape != (dim, dim):
            raise ValidationError(f"Serialised unitary is not {dim}x{dim}.")

        return cls(matrix)


@dataclass(frozen=True)
class BeamSplitter:
    """A beam splitter on an ordered pair of modes.

    See `.beam_splitter_matrix` for the convention.
    """

    modes: Tuple[int, int]
    transmissivity: float
    phase: float = 0.0

    def matrix(self) -> np.ndarray:
        return beam_splitter_matrix(self.transmissivity, self.phase)

    def embed(self, dim: int) -> np.ndarray:
        i, j = self.modes
        full = np.eye(dim, dtype=complex)
        full[np.ix_([i, j], [i, j])] = self.matrix()
        return full

    def inverse(self) -> BeamSplitter:
        return BeamSplitter(self.modes, self.transmissivity, self.phase + pi)

    def is_identity(self, tolerance: float = IDENTITY_GATE_TOLERANCE) -> bool:
        return 1.0 - self.transmissivity <= tolerance**2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "beam_splitter",
            "modes": list(self.modes),
            "transmissivity": self.transmissivity,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class PhaseShift:
    """A phase ``exp(-i theta)`` on one mode."""

    mode: int
    theta: float

    def embed(self, dim: int) -> np.ndarray:
        full = np.eye(dim, dtype=complex)
        full[self.mode, self.mode] = np.exp(-1j * self.theta)
        return full

    def inverse(self) -> PhaseShift:
        return PhaseShift(self.mode, -self.theta)

    def is_identity(self, tolerance: float = IDENTITY_GATE_TOLERANCE) -> bool:
        wrapped = (self.theta + pi) % (2 * pi) - pi
        return abs(wrapped) <= tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "phase", "mode": self.mode, "theta": self.theta}


Gate = Union[BeamSplitter, PhaseShift]


def _gate_from_dict(data: Mapping[str, Any]) -> Gate:
    kind = data.get("type")

    try:
        if kind == "beam_splitter":
            i, j = data["modes"]
            return BeamSplitter(
                (int(i), int(j)),
                float(data["transmissivity"]),
                float(data.get("phase", 0.0)),
            )
        elif kind == "phase":
            return PhaseShift(int(data["mode"]), float(data["theta"]))
    except (KeyError, TypeError, ValueError) as err:
        raise ValidationError(f"Invalid gate record {data!r}: {err}") from err

    raise ValidationError(f"Unknown gate type {kind!r}.")


@dataclass(frozen=True)
class GateSequence:
    """An ordered list of elementary gates, applied first to last.

    Parameters
    ----------
    dim
        The number of modes the sequence acts on.
    gates
        The gates. The recomposed unitary is ``G_last @ ... @ G_first``.
    """

    dim: int
    gates: Tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gates = tuple(self.gates)

        for gate in gates:
            if isinstance(gate, BeamSplitter):
                i, j = gate.modes
                if i == j or not (0 <= i < self.dim and 0 <= j < self.dim):
                    raise ValidationError(f"Invalid beam splitter modes {gate.modes}.")
                if not 0.0 <= gate.transmissivity <= 1.0:
                    raise ValidationError("Transmissivity must be in [0, 1].")
            elif isinstance(gate, PhaseShift):
                if not 0 <= gate.mode < self.dim:
                    raise ValidationError(f"Invalid phase-shift mode {gate.mode}.")
            else:
                raise ValidationError(f"Unknown gate {gate!r}.")

        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    @property
    def beam_splitters(self) -> List[BeamSplitter]:
        return [gate for gate in self.gates if isinstance(gate, BeamSplitter)]

    @property
    def phase_shifts(self) -> List[PhaseShift]:
        return [gate for gate in self.gates if isinstance(gate, PhaseShift)]

    def unitary(self) -> ModeUnitary:
        """Recomposes the mode unitary."""

        matrix = np.eye(self.dim, dtype=complex)
        for gate in self.gates:
            matrix = gate.embed(self.dim) @ matrix

        return ModeUnitary(matrix)

    def inverse(self) -> GateSequence:
        gates = tuple(gate.inverse() for gate in reversed(self.gates))
        return GateSequence(self.dim, gates)

    def to_list(self) -> List[Dict[str, Any]]:
        return [gate.to_dict() for gate in self.gates]

    @classmethod
    def from_list(cls, dim: int, records: Sequence[Mapping[str, Any]]) -> GateSequence:
        return cls(dim, tuple(_gate_from_dict(record) for record in records))


def triangular_layout(dim: int) -> GateSequence:
    """Returns the triangular skeleton with all gates set to the identity.

    The skeleton has ``dim (dim - 1) / 2`` beam splitters on adjacent modes,
    in the order produced by `.decompose`, followed by one phase per mode.
    """

    if dim < 1:
        raise ValidationError("Dimension must be positive.")

    pairs = [(c, c + 1) for r in range(dim - 1, 0, -1) for c in range(r)]
    gates: List[Gate] = [BeamSplitter(pair, 1.0, 0.0) for pair in pairs]
    gates += [PhaseShift(j, 0.0) for j in range(dim)]

    return GateSequence(dim, tuple(gates))


def decompose(
    unitary: Union[ModeUnitary, ArrayLike],
    prune: bool = True,
) -> GateSequence:
    """Decomposes a mode unitary into a triangular mesh.

    Entries below the diagonal are nulled row by row, from the last row up,
    by right-multiplying with inverse beam splitters on adjacent columns. The
    remaining diagonal becomes the output phases.

    Parameters
    ----------
    unitary
        The `.ModeUnitary` (or a raw matrix, which is validated).
    prune
        If `True`, gates equal to the identity are dropped. Otherwise the
        full `.triangular_layout` skeleton is returned with its values filled.

    Returns
    -------
    :
        A `.GateSequence` whose recomposition matches ``unitary`` within the
        recomposition tolerance.
    """

    if not isinstance(unitary, ModeUnitary):
        unitary = ModeUnitary(np.asarray(unitary))

    dim = unitary.dim
    work = np.array(unitary.matrix, dtype=complex)
    gates: List[Gate] = []

    for r in range(dim - 1, 0, -1):
        for c in range(r):
            x = work[r, c]
            y = work[r, c + 1]

            if x == 0:
                theta, phi = 0.0, 0.0
            elif y == 0:
                theta, phi = pi / 2.0, float(np.angle(-x))
            else:
                theta = atan2(abs(x), abs(y))
                phi = float(np.angle(-x / y))

            gate = BeamSplitter((c, c + 1), cos(theta) ** 2, phi)
            gates.append(gate)

            # Right-multiply the two columns by the inverse gate.
            t, s = cos(theta), sin(theta)
            col_c = work[:, c].copy()
            col_d = work[:, c + 1].copy()
            work[:, c] = col_c * t + col_d * np.exp(1j * phi) * s
            work[:, c + 1] = -col_c * np.exp(-1j * phi) * s + col_d * t
            work[r, c] = 0.0

    gates += [PhaseShift(j, -float(np.angle(work[j, j]))) for j in range(dim)]

    if prune:
        gates = [gate for gate in gates if not gate.is_identity()]

    sequence = GateSequence(dim, tuple(gates))

    error = np.max(np.abs(sequence.unitary().matrix - unitary.matrix))
    if error > RECOMPOSITION_TOLERANCE:
        raise DistmetError(f"Decomposition did not converge (error {error:.3g}).")

    log.debug(
        f"Decomposed {dim}x{dim} unitary into {len(sequence.beam_splitters)} "
        f"beam splitters (recomposition error {error:.3g})."
    )

    return sequence


def apply_gates(state: FockState, sequence: GateSequence) -> FockState:
    """Applies a gate sequence to a Fock state, first gate first."""

    if sequence.dim != state.modes:
        raise ValidationError(
            f"Sequence acts on {sequence.dim} modes but the state has {state.modes}."
        )

    for gate in sequence:
        if isinstance(gate, BeamSplitter):
            if gate.is_identity():
                continue
            state = apply_beam_splitter(
                state, gate.modes, gate.transmissivity, gate.phase
            )
        else:
            if gate.is_identity():
                continue
            state = apply_phase_shift(state, gate.mode, gate.theta)

    return state


def apply_mode_unitary(state: FockState, unitary: ModeUnitary) -> FockState:
    """Evolves ``state`` through the network described by ``unitary``."""

    if unitary.dim != state.modes:
        raise ValidationError(
            f"Unitary has dimension {unitary.dim} but the state has "
            f"{state.modes} modes."
        )

    return apply_gates(state, decompose(unitary))


def _complete_basis(columns: List[np.ndarray], dim: int) -> np.ndarray:
    """Completes orthonormal columns with the standard basis, in order."""

    basis = list(columns)

    for k in range(dim):
        if len(basis) == dim:
            break

        vector = np.zeros(dim, dtype=complex)
        vector[k] = 1.0

        # Two passes of Gram-Schmidt.
        for _ in range(2):
            for column in basis:
                vector = vector - np.vdot(column, vector) * column

        norm = np.linalg.norm(vector)
        if norm > 1e-6:
            basis.append(vector / norm)

    return np.column_stack(basis)


def hoarding_unitary(weights: ArrayLike) -> ModeUnitary:
    """Builds the weight-encoding unitary for ``2d`` modes.

    The first two columns carry the two input ports that hold all photons:
    ``U[i, 0] = U[i + d, 0] = sqrt(|w_i| / 2)`` and
    ``U[i, 1] = -U[i + d, 1] = w_i / sqrt(2 |w_i|)`` (zero when ``w_i = 0``),
    both divided by ``sqrt(sum |w_i|)``. The other columns complete an
    orthonormal basis deterministically. Phases act on modes ``0 .. d-1``.
    """

    w = np.asarray(weights, dtype=float).ravel()
    d = w.size

    if d == 0 or not np.any(w != 0):
        raise ValidationError("Weights cannot all be zero.")

    absw = np.abs(w)
    signed = np.divide(w, np.sqrt(2 * absw), out=np.zeros(d), where=absw > 0)

    first = np.concatenate([np.sqrt(absw / 2), np.sqrt(absw / 2)])
    second = np.concatenate([signed, -signed])

    scale = np.sqrt(absw.sum())
    columns = [first.astype(complex) / scale, second.astype(complex) / scale]

    return ModeUnitary(_complete_basis(columns, 2 * d))


def fig2_unitary(w1: float, w2: float) -> ModeUnitary:
    """The three-mode single-reference-port network as a mode unitary."""

    return _fig2_sequence(w1, w2).unitary()


def _fig2_sequence(w1: float, w2: float) -> GateSequence:
    if w1 <= 0 or w2 <= 0:
        raise ValidationError("Both weights must be positive.")

    if abs(max(w1, w2) - 0.5) > 1e-12:
        raise ValidationError("Weights must be normalized so that max(w1, w2) = 1/2.")

    return GateSequence(
        3,
        (
            BeamSplitter((0, 1), 0.5, 0.0),
            BeamSplitter((0, 2), w1 / (w1 + w2), 0.0),
        ),
    )


def fig2_network(n: int, w1: float, w2: float) -> Tuple[GateSequence, FockState]:
    """Returns the single-reference-port circuit and its input ``|n, n, 0>``.

    The phases act on `.FIG2_PHASE_MODES`; mode `.FIG2_REFERENCE_MODE` is the
    reference port.
    """

    if n < 1:
        raise ValidationError("The circuit needs at least one photon per input.")

    sequence = _fig2_sequence(w1, w2)
    state = product_state(
        [SingleModeState.fock(n), SingleModeState.fock(n), SingleModeState.vacuum()]
    )

    return sequence, state

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: optimizer.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import config, log
from .bounds import (
    fock_delta_q_bound,
    fock_eigenvalue_bound,
    separable_bound_constants,
    separable_fw_bound,
)
from .exceptions import ValidationError
from .fock import SingleModeState, single_mode_moments
from .network import (
    BeamSplitter,
    Gate,
    GateSequence,
    ModeUnitary,
    PhaseShift,
    decompose,
    hoarding_unitary,
    triangular_layout,
)
from .qfi import WeightVector, qfi_from_moments
from .tools import derive_seeds, run_in_workers


__all__ = [
    "MeshParameters",
    "OptimizationReport",
    "ScalingInstance",
    "mesh_unitary",
    "angles_from_sequence",
    "maximize_fw",
    "well_distributed_family",
    "hoarded_family",
    "FAMILIES",
    "scaling_study",
    "SCALING_STUDY_COLUMNS",
]


RESTARTS: int = config["optimizer"]["restarts"]
BUDGET: int = config["optimizer"]["budget"]
SIMPLEX_TOLERANCE: float = config["optimizer"]["simplex_tolerance"]
BOUND_SLACK: float = config["tolerances"]["bound_slack"]

SCALING_STUDY_COLUMNS = [
    "d",
    "family",
    "photons",
    "best_fw",
    "bound",
    "gap",
    "implied_delta_q",
    "delta_q_bound",
    "ratio",
]


def _periods(layout: GateSequence) -> np.ndarray:
    """Period of each angle: ``pi`` for splitting angles, ``2 pi`` for phases."""

    periods: List[float] = []
    for gate in layout:
        if isinstance(gate, BeamSplitter):
            periods += [pi, 2 * pi]
        else:
            periods.append(2 * pi)

    return np.array(periods)


@dataclass(frozen=True, eq=False)
class MeshParameters:
    """Angles for every gate of a layout.

    Each beam splitter takes a splitting angle ``theta`` (``T = cos^2 theta``)
    and a phase; each phase shift takes one angle. Angles are wrapped to
    ``[0, pi)`` and ``[0, 2 pi)`` respectively.
    """

    angles: np.ndarray
    layout: GateSequence

    def __post_init__(self):
        angles = np.array(self.angles, dtype=float).ravel()
        periods = _periods(self.layout)

        if angles.size != periods.size:
            raise ValidationError(
                f"Layout needs {periods.size} angles, got {angles.size}."
            )

        if not np.all(np.isfinite(angles)):
            raise ValidationError("Mesh angles must be finite.")

        angles = np.mod(angles, periods)
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    def sequence(self) -> GateSequence:
        """Returns the layout with the angles filled in."""

        gates: List[Gate] = []
        index = 0

        for gate in self.layout:
            if isinstance(gate, BeamSplitter):
                theta, phi = self.angles[index : index + 2]
                transmissivity = float(np.cos(theta) ** 2)
                gates.append(BeamSplitter(gate.modes, transmissivity, float(phi)))
                index += 2
            else:
                gates.append(PhaseShift(gate.mode, float(self.angles[index])))
                index += 1

        return GateSequence(self.layout.dim, tuple(gates))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "angles": self.angles.tolist(),
            "layout": self.layout.to_list(),
            "dim": self.layout.dim,
        }


def mesh_unitary(params: MeshParameters) -> ModeUnitary:
    """Recomposes the mode unitary of a parameterised mesh."""

    return params.sequence().unitary()


def angles_from_sequence(sequence: GateSequence, layout: GateSequence) -> np.ndarray:
    """Reads the angles of ``sequence``, which must follow ``layout`` gate by gate."""

    if len(sequence) != len(layout) or sequence.dim != layout.dim:
        raise ValidationError("Sequence does not match the layout.")

    angles: List[float] = []
    for gate, slot in zip(sequence, layout):
        if isinstance(gate, BeamSplitter) and isinstance(slot, BeamSplitter):
            if gate.modes != slot.modes:
                raise ValidationError("Sequence does not match the layout.")
            angles += [float(np.arccos(np.sqrt(gate.transmissivity))), gate.phase]
        elif isinstance(gate, PhaseShift) and isinstance(slot, PhaseShift):
            if gate.mode != slot.mode:
                raise ValidationError("Sequence does not match the layout.")
            angles.append(gate.theta)
        else:
            raise ValidationError("Sequence does not match the layout.")

    return np.array(angles)


@dataclass
class OptimizationReport:
    """Result of a multi-start maximisation of ``F_w``.

    Attributes
    ----------
    best_fw
        The largest ``F_w`` found.
    best_params
        The `.MeshParameters` that reach it.
    bound_value
        The applicable analytic bound.
    gap
        ``bound_value - best_fw``.
    iterations
        Total number of objective evaluations.
    seed
        The seed the restarts were derived from.
    """

    best_fw: float
    best_params: MeshParameters
    bound_value: float
    gap: float
    iterations: int
    seed: int
    bound_kind: str = ""
    restarts: int = 0
    best_restart: int = 0
    restart_values: List[float] = field(default_factory=list)
    max_evaluated: float = 0.0
    violations: int = 0
    witness_fw: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_fw": self.best_fw,
            "best_params": self.best_params.to_dict(),
            "bound_value": self.bound_value,
            "bound_kind": self.bound_kind,
            "gap": self.gap,
            "iterations": self.iterations,
            "seed": self.seed,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "restart_values": list(self.restart_values),
            "max_evaluated": self.max_evaluated,
            "violations": self.violations,
            "witness_fw": self.witness_fw,
        }


class _Objective:
    """Negative ``F_w`` of a mesh, tracking the best evaluation and violations."""

    def __init__(self, layout, moments, w, phase_modes, bound: float):
        self.layout = layout
        self.moments = moments
        self.w = w
        self.phase_modes = phase_modes
        self.bound = bound

        self.evaluations = 0
        self.violations = 0
        self.best_value = -np.inf
        self.best_angles: Optional[np.ndarray] = None

    def fw(self, angles: np.ndarray) -> float:
        unitary = mesh_unitary(MeshParameters(angles, self.layout))
        return qfi_from_moments(unitary, self.moments, self.phase_modes, self.w)

    def __call__(self, angles: np.ndarray) -> float:
        value = self.fw(angles)
        self.evaluations += 1

        if value > self.bound + BOUND_SLACK:
            self.violations += 1
            log.warning(f"F_w={value:.12g} exceeds the bound {self.bound:.12g}.")

        if value > self.best_value:
            self.best_value = value
            self.best_angles = np.array(angles)

        return -value


def _run_restart(
    start: np.ndarray,
    layout: GateSequence,
    moments,
    w: WeightVector,
    phase_modes: List[int],
    bound: float,
    budget: int,
) -> _Objective:
    objective = _Objective(layout, moments, w, phase_modes, bound)

    if start.size == 0:
        objective(start)
        return objective

    minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "maxfev": budget,
            "maxiter": budget,
            "xatol": SIMPLEX_TOLERANCE,
            "fatol": np.inf,
            "adaptive": start.size > 10,
        },
    )

    return objective


def _applicable_bound(factors, moments, w: WeightVector):
    numbers = [factor.photon_number for factor in factors]

    if all(number is not None for number in numbers):
        return fock_eigenvalue_bound(numbers, w).value, "fock_eigenvalue"

    constants = separable_bound_constants(moments)
    return separable_fw_bound(constants, w.d, w), "separable"


async def maximize_fw(
    inputs: Sequence[SingleModeState],
    w: WeightVector,
    layout: Optional[GateSequence] = None,
    budget: int = BUDGET,
    seed: int = 0,
    restarts: int = RESTARTS,
    witness: Optional[ModeUnitary] = None,
    phase_modes: Optional[Sequence[int]] = None,
) -> OptimizationReport:
    """Maximises ``F_w`` over the angles of a mesh for a fixed product input.

    Each restart is a Nelder-Mead search seeded from ``seed`` by the campaign
    splitting rule. If a ``witness`` unitary is given, restart 0 starts from
    its triangular decomposition, so the result is at least the witness value.

    Parameters
    ----------
    inputs
        One `.SingleModeState` per input mode.
    w
        The weights.
    layout
        The mesh skeleton. Defaults to `.triangular_layout`.
    budget
        Maximum number of objective evaluations per restart.
    seed
        The master seed.
    restarts
        Number of independent starts.
    witness
        Optional unitary used as the first start point.
    phase_modes
        Output modes carrying the phases. Defaults to ``0 .. d-1``.

    Returns
    -------
    :
        An `.OptimizationReport`. Restarts are merged by best value with ties
        going to the lower restart index.
    """

    if budget < 1:
        raise ValidationError("The budget must be at least one evaluation.")

    if restarts < 1:
        raise ValidationError("Need at least one restart.")

    dim = len(inputs)
    layout = triangular_layout(dim) if layout is None else layout

    if layout.dim != dim:
        raise ValidationError(
            f"Layout has {layout.dim} modes but there are {dim} inputs."
        )

    phase_modes = list(range(w.d)) if phase_modes is None else list(phase_modes)

    moments = [single_mode_moments(state) for state in inputs]
    bound, bound_kind = _applicable_bound(inputs, moments, w)

    periods = _periods(layout)
    seeds = derive_seeds(seed, restarts)

    starts = [
        np.random.default_rng(sub).random(periods.size) * periods for sub in seeds
    ]

    witness_fw = None
    if witness is not None:
        witness_angles = angles_from_sequence(decompose(witness, prune=False), layout)
        starts[0] = np.mod(witness_angles, periods)
        witness_fw = qfi_from_moments(witness, moments, phase_modes, w)

    log.debug(f"Maximising F_w over {periods.size} angles with {restarts} restarts.")

    results = await run_in_workers(
        _run_restart,
        [(start, layout, moments, w, phase_modes, bound, budget) for start in starts],
    )

    values = [result.best_value for result in results]
    best_index = int(np.argmax(values))
    best = results[best_index]

    best_fw = float(best.best_value)
    best_params = MeshParameters(best.best_angles, layout)

    return OptimizationReport(
        best_fw=best_fw,
        best_params=best_params,
        bound_value=float(bound),
        gap=float(bound - best_fw),
        iterations=sum(result.evaluations for result in results),
        seed=seed,
        bound_kind=bound_kind,
        restarts=restarts,
        best_restart=best_index,
        restart_values=[float(value) for value in values],
        max_evaluated=best_fw,
        violations=sum(result.violations for result in results),
        witness_fw=witness_fw,
    )


@dataclass
class ScalingInstance:
    """One instance of a scaling family."""

    d: int
    family: str
    occupation: List[int]
    w: WeightVector
    witness: Optional[ModeUnitary] = None

    @property
    def inputs(self) -> List[SingleModeState]:
        return [SingleModeState.fock(n) for n in self.occupation]


def well_distributed_family(d: int, photons: int = 1) -> ScalingInstance:
    """``photons`` in each of the ``d`` signal modes of ``2d``, uniform weights."""

    if photons < 1:
        raise ValidationError("Need at least one photon per node.")

    occupation = [photons] * d + [0] * d
    return ScalingInstance(d, "well-distributed", occupation, WeightVector.uniform(d))


def hoarded_family(d: int, photons: int = 2) -> ScalingInstance:
    """``photons * d`` photons split evenly over input modes 0 and 1, with the
    hoarding unitary as witness."""

    total = photons * d
    if total < 2 or total % 2 != 0:
        raise ValidationError("The hoarded family needs an even total photon number.")

    w = WeightVector.uniform(d)
    occupation = [total // 2, total // 2] + [0] * (2 * d - 2)

    return ScalingInstance(d, "hoarded", occupation, w, hoarding_unitary(w))


FAMILIES: Dict[str, Callable[..., ScalingInstance]] = {
    "well-distributed": well_distributed_family,
    "hoarded": hoarded_family,
}


async def scaling_study(
    family: str,
    d_values: Sequence[int],
    photons: Optional[int] = None,
    budget: int = BUDGET,
    seed: int = 0,
    restarts: int = RESTARTS,
) -> List[Dict[str, Any]]:
    """Maximises ``F_w`` for a family of instances over a range of ``d``.

    Each row carries the best ``F_w``, the Fock eigenvalue bound, the implied
    sensitivity ``|w|^2 / sqrt(best_fw)``, the Fock-input sensitivity bound and
    their ratio.
    """

    if family not in FAMILIES:
        raise ValidationError(f"Unknown family {family!r}.")

    generator = FAMILIES[family]
    seeds = derive_seeds(seed, len(d_values))

    rows: List[Dict[str, Any]] = []

    for d, sub_seed in zip(d_values, seeds):
        instance = generator(d) if photons is None else generator(d, photons)

        report = await maximize_fw(
            instance.inputs,
            instance.w,
            budget=budget,
            seed=sub_seed,
            restarts=restarts,
            witness=instance.witness,
        )

        w = instance.w
        implied = w.norm2 / np.sqrt(report.best_fw) if report.best_fw > 0 else None
        delta_q_bound = fock_delta_q_bound(instance.occupation, w)

        rows.append(
            {
                "d": d,
                "family": instance.family,
                "photons": sum(instance.occupation),
                "best_fw": report.best_fw,
                "bound": report.bound_value,
                "gap": report.gap,
                "implied_delta_q": implied,
                "delta_q_bound": delta_q_bound,
                "ratio": None if implied is None else implied / delta_q_bound,
            }
        )

        log.debug(f"Scaling study {family} d={d}: best F_w={report.best_fw:.6g}.")

    return rows

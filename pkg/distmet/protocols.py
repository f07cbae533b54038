#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: protocols.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from dataclasses import dataclass, field

from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from . import config, log
from .bounds import fock_delta_q_bound
from .exceptions import (
    DimensionError,
    EstimationError,
    InsensitivePointError,
    ValidationError,
)
from .fock import (
    FockState,
    SingleModeState,
    apply_phases,
    fidelity_projector,
    product_state,
)
from .network import (
    FIG2_PHASE_MODES,
    GateSequence,
    apply_gates,
    decompose,
    fig2_network,
    hoarding_unitary,
)
from .qfi import PhaseVector, WeightVector, crb_delta_q, phase_allocation, qfi_direct
from .tools import run_in_workers


__all__ = [
    "ProtocolResult",
    "ShotNoiseEstimate",
    "error_propagation",
    "interferometer_expectation",
    "twin_fock_protocol",
    "fig2_protocol",
    "classical_baseline",
    "expectation_curvature",
    "shot_noise_estimate",
    "protocol_scaling_table",
    "SCALING_COLUMNS",
]


Q_PROBE: float = config["protocols"]["q_probe"]
STEP: float = config["protocols"]["step"]
DERIVATIVE_FLOOR: float = config["protocols"]["derivative_floor"]
CURVATURE_POINTS: List[float] = config["protocols"]["curvature_points"]
MAX_PHOTONS: int = config["fock"]["max_photons"]

SCALING_COLUMNS = [
    "d",
    "N",
    "delta_q_simulated",
    "delta_q_formula",
    "classical_baseline",
    "fock_bound",
]

Expectation = Callable[[float], Union[float, Tuple[float, float]]]


@dataclass
class ProtocolResult:
    """Outcome of an estimation protocol at one evaluation point.

    Attributes
    ----------
    expected_O
        The expectation of the measured observable at ``q_eval``.
    delta_q
        The error-propagation sensitivity.
    q_eval
        The evaluation point.
    derivative_estimate
        The central-difference derivative of the expectation at ``q_eval``.
    metadata
        A description of the instance.
    """

    expected_O: float
    delta_q: float
    q_eval: float
    derivative_estimate: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "expected_O": self.expected_O,
            "delta_q": self.delta_q if np.isfinite(self.delta_q) else None,
            "q_eval": self.q_eval,
            "derivative_estimate": self.derivative_estimate,
            "metadata": dict(self.metadata),
        }


def _moments_of(value: Union[float, Tuple[float, float]]) -> Tuple[float, float]:
    if isinstance(value, tuple):
        return float(value[0]), float(value[1])

    # Projector: <O^2> = <O>.
    return float(value), float(value)


def error_propagation(
    expectation_fn: Expectation,
    q_eval: float,
    step: float = STEP,
) -> Tuple[float, float]:
    """Propagates the measurement noise of an observable into ``q``.

    Parameters
    ----------
    expectation_fn
        A callable returning ``(<O>, <O^2>)`` at a given ``q``, or just ``<O>``
        for a projector.
    q_eval
        The point at which the sensitivity is evaluated.
    step
        The central-difference step.

    Returns
    -------
    :
        A tuple ``(delta_q, derivative)`` with
        ``delta_q = sqrt(<O^2> - <O>^2) / |d<O>/dq|``.

    Raises
    ------
    InsensitivePointError
        If the derivative is below the configured floor.
    """

    if step <= 0:
        raise ValidationError("The finite-difference step must be positive.")

    mean, second = _moments_of(expectation_fn(q_eval))
    plus, _ = _moments_of(expectation_fn(q_eval + step))
    minus, _ = _moments_of(expectation_fn(q_eval - step))

    derivative = (plus - minus) / (2.0 * step)

    if abs(derivative) < DERIVATIVE_FLOOR:
        raise InsensitivePointError(
            f"The expectation value does not depend on q at q={q_eval}."
        )

    variance = max(0.0, second - mean**2)

    return float(np.sqrt(variance) / abs(derivative)), float(derivative)


def interferometer_expectation(
    state: FockState,
    sequence: GateSequence,
    phase_modes: Sequence[int],
    w: ArrayLike,
    theta: Optional[ArrayLike] = None,
) -> Callable[[float], float]:
    """Builds ``q -> <Psi| U^dagger Phi(q)^dagger ... |Psi>`` for a projector.

    The returned callable evolves ``state`` through ``sequence``, applies the
    phases for ``q`` (see `.phase_allocation`), undoes the network and returns
    the fidelity with the input.
    """

    evolved = apply_gates(state, sequence)
    undo = sequence.inverse()

    def expectation(q: float) -> float:
        phases = phase_allocation(q, w, direction=theta)
        shifted = apply_phases(evolved, phase_modes, phases.theta)
        return fidelity_projector(apply_gates(shifted, undo), state)

    return expectation


def _crb(state: FockState, phase_modes: Sequence[int], w: ArrayLike) -> Optional[float]:
    try:
        return crb_delta_q(qfi_direct(state, phase_modes), w)
    except EstimationError as err:
        log.debug(f"CRB undefined for this instance: {err}")
        return None


def twin_fock_protocol(
    d: int,
    N: int,
    w: Optional[WeightVector] = None,
    theta: Optional[PhaseVector] = None,
    q_probe: float = Q_PROBE,
    step: float = STEP,
) -> ProtocolResult:
    """Simulates the hoarded twin-Fock protocol.

    ``|N/2, N/2, 0, ..., 0>`` is sent through the hoarding unitary for ``w``,
    the phases are imprinted on modes ``0 .. d-1``, the network is undone and
    the projector onto the input is measured.

    Parameters
    ----------
    d
        Number of phases. The network has ``2d`` modes.
    N
        Total photon number. Must be even.
    w
        The weights. Defaults to uniform weights.
    theta
        Optional phase direction, rescaled so that ``sum_j w_j theta_j = q``.
        Defaults to ``theta = q w / |w|^2``.
    q_probe
        The evaluation point.
    step
        The central-difference step.

    Returns
    -------
    :
        A `.ProtocolResult`. ``metadata`` includes the closed-form sensitivity
        ``2 sum|w| / sqrt(2 N (N + 2))`` and the Cramér-Rao value.
    """

    if d < 1:
        raise ValidationError("d must be at least 1.")

    if N < 2 or N % 2 != 0:
        raise ValidationError("N must be even.")

    if N > MAX_PHOTONS:
        raise DimensionError("Photon number exceeds the configured cap.", N)

    w = WeightVector.uniform(d) if w is None else w
    if len(w) != d:
        raise ValidationError(f"Got {len(w)} weights for d = {d}.")

    phase_modes = list(range(d))
    vacuum = [SingleModeState.vacuum()] * (2 * d - 2)
    factors = [SingleModeState.fock(N // 2)] * 2 + vacuum
    state = product_state(factors)

    sequence = decompose(hoarding_unitary(w))
    direction = None if theta is None else np.asarray(theta, dtype=float)
    expectation = interferometer_expectation(state, sequence, phase_modes, w, direction)

    if q_probe == 0:
        return ProtocolResult(
            expected_O=expectation(0.0),
            delta_q=float("inf"),
            q_eval=0.0,
            derivative_estimate=0.0,
            metadata={"protocol": "twin-fock", "d": d, "N": N, "insensitive": True},
        )

    delta_q, derivative = error_propagation(expectation, q_probe, step)

    l1 = float(np.abs(np.asarray(w)).sum())
    numbers = [N // 2, N // 2] + [0] * (2 * d - 2)

    metadata = {
        "protocol": "twin-fock",
        "d": d,
        "N": N,
        "weights": np.asarray(w).tolist(),
        "theta": phase_allocation(q_probe, w, direction).theta.tolist(),
        "delta_q_formula": 2.0 * l1 / np.sqrt(2.0 * N * (N + 2)),
        "crb_delta_q": _crb(apply_gates(state, sequence), phase_modes, w),
        "fock_bound": fock_delta_q_bound(numbers, w),
        "discarded_norm": state.discarded_norm,
    }

    return ProtocolResult(expectation(q_probe), delta_q, q_probe, derivative, metadata)


def fig2_protocol(
    n: int,
    w1: float = 0.5,
    w2: float = 0.5,
    q_probe: float = Q_PROBE,
    step: float = STEP,
) -> ProtocolResult:
    """Simulates the three-mode single-reference-port circuit.

    The input is ``|n, n, 0>``. For ``w1 = w2 = 1/2`` the sensitivity is
    ``1 / sqrt(2 n (n + 1))``.
    """

    if n < 1:
        raise ValidationError("n must be at least 1.")

    if 2 * n > MAX_PHOTONS:
        raise DimensionError("Photon number exceeds the configured cap.", 2 * n)

    sequence, state = fig2_network(n, w1, w2)
    w = np.array([w1, w2])
    expectation = interferometer_expectation(state, sequence, FIG2_PHASE_MODES, w)

    metadata: Dict[str, Any] = {
        "protocol": "fig2",
        "n": n,
        "weights": w.tolist(),
        "phase_modes": list(FIG2_PHASE_MODES),
        "delta_q_formula": (w1 + w2) / np.sqrt(2.0 * n * (n + 1)) if w1 == w2 else None,
        "crb_delta_q": _crb(apply_gates(state, sequence), FIG2_PHASE_MODES, w),
        "discarded_norm": state.discarded_norm,
    }

    if q_probe == 0:
        metadata["insensitive"] = True
        return ProtocolResult(expectation(0.0), float("inf"), 0.0, 0.0, metadata)

    delta_q, derivative = error_propagation(expectation, q_probe, step)

    return ProtocolResult(expectation(q_probe), delta_q, q_probe, derivative, metadata)


def classical_baseline(n: int, d: int, w: ArrayLike) -> float:
    """Sensitivity of independent per-node twin-Fock interferometers.

    Each node uses ``n`` photons (``n/2`` in each arm) and reaches
    ``1 / sqrt(2 (n/2) (n/2 + 1))``; the errors add in quadrature weighted by
    ``w``.
    """

    if n < 2 or n % 2 != 0:
        raise ValidationError("n must be even.")

    w = np.asarray(w, dtype=float).ravel()
    if w.size != d:
        raise ValidationError(f"Got {w.size} weights for d = {d}.")

    half = n // 2
    delta_theta = 1.0 / np.sqrt(2.0 * half * (half + 1))

    return float(np.sqrt(np.sum(w**2)) * delta_theta)


def expectation_curvature(
    expectation_fn: Callable[[float], float],
    points: Optional[Sequence[float]] = None,
) -> float:
    """Fits ``<O>(q)`` with a quadratic and returns its second derivative."""

    points = CURVATURE_POINTS if points is None else points
    if len(points) < 3:
        raise ValidationError("Need at least three points to fit a quadratic.")

    qs = np.asarray(points, dtype=float)
    values = np.array([expectation_fn(q) for q in qs])

    coefficients = np.polyfit(qs, values, 2)

    return float(2.0 * coefficients[0])


@dataclass
class ShotNoiseEstimate:
    shots: int
    successes: int
    frequency: float
    delta_q: float


def shot_noise_estimate(
    result: ProtocolResult,
    shots: int,
    rng: np.random.Generator,
) -> ShotNoiseEstimate:
    """Samples ``shots`` projector outcomes at the evaluation point.

    The sensitivity is re-estimated from the observed frequency,
    ``sqrt(f (1 - f) / shots) / |d<O>/dq|``.
    """

    if shots < 1:
        raise ValidationError("Need at least one shot.")

    if result.derivative_estimate == 0:
        raise InsensitivePointError("Cannot estimate noise at an insensitive point.")

    probability = min(1.0, max(0.0, result.expected_O))
    successes = int(rng.binomial(shots, probability))
    frequency = successes / shots

    noise = np.sqrt(frequency * (1 - frequency) / shots)
    delta_q = noise / abs(result.derivative_estimate)

    return ShotNoiseEstimate(shots, successes, frequency, float(delta_q))


def _scaling_row(d: int, N: int, q_probe: float, step: float) -> Dict[str, Any]:
    w = WeightVector.uniform(d)
    result = twin_fock_protocol(d, N, w, q_probe=q_probe, step=step)

    per_node, remainder = divmod(N, d)
    classical = None
    if remainder == 0 and per_node >= 2 and per_node % 2 == 0:
        classical = classical_baseline(per_node, d, w)

    return {
        "d": d,
        "N": N,
        "delta_q_simulated": result.delta_q,
        "delta_q_formula": result.metadata["delta_q_formula"],
        "classical_baseline": classical,
        "fock_bound": result.metadata["fock_bound"],
    }


async def protocol_scaling_table(
    d_values: Sequence[int],
    N_values: Sequence[int],
    q_probe: float = Q_PROBE,
    step: float = STEP,
) -> List[Dict[str, Any]]:
    """Runs the twin-Fock protocol over a ``(d, N)`` grid with uniform weights.

    The classical baseline uses ``N/d`` photons per node and is left empty when
    that is not an even integer.
    """

    grid = [(d, N, q_probe, step) for d in d_values for N in N_values]
    return await run_in_workers(_scaling_row, grid)

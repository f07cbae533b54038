#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: campaigns.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from dataclasses import dataclass, field

from typing import Any, Callable, Dict, List

import numpy as np

from . import config, log
from .bounds import (
    C_CONSTANT,
    fock_delta_q_bound,
    fock_eigenvalue_bound,
    fock_trace_bound,
    separable_bound_constants,
    separable_fw_bound,
    simplified_delta_q_bound,
    verify_term_bounds,
)
from .exceptions import BoundViolationError, EstimationError, ValidationError
from .fock import SingleModeState, product_state, single_mode_moments
from .network import ModeUnitary, apply_mode_unitary
from .qfi import (
    WeightVector,
    crb_cauchy_schwarz,
    crb_delta_q,
    qfi_direct,
    qfi_from_moments,
)
from .tools import derive_seeds, run_in_workers


__all__ = ["CampaignResult", "CAMPAIGN_COLUMNS", "run_campaign", "run_instance"]


BOUND_SLACK: float = config["tolerances"]["bound_slack"]
ROUTE_TOLERANCE: float = 1e-10

MAX_D: int = config["campaigns"]["max_d"]
MAX_TOTAL_PHOTONS: int = config["campaigns"]["max_total_photons"]
MAX_CUTOFF: int = config["campaigns"]["max_cutoff"]
ROUTES_MAX_CAP: int = config["campaigns"]["routes_max_cap"]


CAMPAIGN_COLUMNS: Dict[str, List[str]] = {
    "fock": [
        "index",
        "seed",
        "d",
        "modes",
        "photons",
        "fw",
        "fw_moments",
        "trace_bound",
        "pairing_bound",
        "closed_form",
        "certified",
        "crb_delta_q",
        "delta_q_bound",
        "margin",
        "pass",
    ],
    "separable": [
        "index",
        "seed",
        "d",
        "modes",
        "cutoffs",
        "fw",
        "A",
        "B",
        "separable_bound",
        "moment_ceiling",
        "term_failures",
        "ceiling_failures",
        "delta_q_uniform",
        "simplified_delta_q",
        "margin",
        "pass",
    ],
    "routes": [
        "index",
        "seed",
        "d",
        "modes",
        "cutoffs",
        "fw_direct",
        "fw_moments",
        "difference",
        "pass",
    ],
}


def _join(values) -> str:
    return ";".join(str(int(value)) for value in values)


def _fock_instance(rng: np.random.Generator) -> Dict[str, Any]:
    d = int(rng.integers(1, MAX_D + 1))
    modes = 2 * d
    total = int(rng.integers(1, MAX_TOTAL_PHOTONS + 1))

    occupation = rng.multinomial(total, np.full(modes, 1.0 / modes)).tolist()
    unitary = ModeUnitary.random(modes, rng)
    w = WeightVector.random(rng, d, nonnegative=True)

    factors = [SingleModeState.fock(n) for n in occupation]
    psi_u = apply_mode_unitary(product_state(factors), unitary)

    F = qfi_direct(psi_u, range(d))
    fw = F.fw(w)
    fw_moments = qfi_from_moments(
        unitary,
        [single_mode_moments(factor) for factor in factors],
        None,
        w,
    )

    trace = fock_trace_bound(unitary, w, occupation)
    eigen = fock_eigenvalue_bound(occupation, w)
    delta_q_bound = fock_delta_q_bound(occupation, w)

    try:
        crb = crb_delta_q(F, w)
    except EstimationError:
        crb = None

    passed = (
        fw <= trace + BOUND_SLACK
        and trace <= eigen.pairing + BOUND_SLACK
        and fw <= eigen.value + BOUND_SLACK
        and (crb is None or crb >= delta_q_bound - BOUND_SLACK)
        and abs(fw - fw_moments) <= ROUTE_TOLERANCE
    )

    return {
        "d": d,
        "modes": modes,
        "photons": _join(occupation),
        "fw": fw,
        "fw_moments": fw_moments,
        "trace_bound": trace,
        "pairing_bound": eigen.pairing,
        "closed_form": eigen.closed_form,
        "certified": eigen.certified,
        "crb_delta_q": crb,
        "delta_q_bound": delta_q_bound,
        "margin": eigen.value - fw,
        "pass": passed,
    }


def _random_states(rng: np.random.Generator, modes: int, cap: int | None = None):
    cutoffs = rng.integers(0, MAX_CUTOFF + 1, modes)

    if cap is not None:
        while cutoffs.sum() > cap:
            cutoffs[int(np.argmax(cutoffs))] -= 1

    return [SingleModeState.random(rng, int(cutoff)) for cutoff in cutoffs], cutoffs


def _separable_instance(rng: np.random.Generator) -> Dict[str, Any]:
    d = int(rng.integers(1, MAX_D + 1))
    modes = 2 * d

    states, cutoffs = _random_states(rng, modes)
    unitary = ModeUnitary.random(modes, rng)
    w = WeightVector.random(rng, d, nonnegative=True)

    moments = [single_mode_moments(state) for state in states]
    fw = qfi_from_moments(unitary, moments, None, w)

    constants = separable_bound_constants(moments)
    separable = separable_fw_bound(constants, d, w)
    ceiling = C_CONSTANT**2 * constants.m_max / d

    report = verify_term_bounds(unitary, moments, w)
    ceiling_failures = constants.ceiling_failures()

    # The simplified bound assumes |w|^2 = 1/d.
    uniform = WeightVector.uniform(d)
    fw_uniform = qfi_from_moments(unitary, moments, None, uniform)
    delta_q_uniform = (
        crb_cauchy_schwarz(fw_uniform, uniform) if fw_uniform > 0 else None
    )
    simplified = simplified_delta_q_bound(moments, d) if constants.m_max > 0 else None

    simplified_ok = (
        delta_q_uniform is None
        or simplified is None
        or delta_q_uniform >= simplified - BOUND_SLACK
    )

    passed = (
        fw <= separable + BOUND_SLACK
        and (constants.m_max == 0 or separable < ceiling)
        and report.passed
        and len(ceiling_failures) == 0
        and simplified_ok
    )

    return {
        "d": d,
        "modes": modes,
        "cutoffs": _join(cutoffs),
        "fw": fw,
        "A": constants.A,
        "B": constants.B,
        "separable_bound": separable,
        "moment_ceiling": ceiling,
        "term_failures": len(report.failures),
        "ceiling_failures": ";".join(ceiling_failures),
        "delta_q_uniform": delta_q_uniform,
        "simplified_delta_q": simplified,
        "margin": separable - fw,
        "pass": passed,
    }


def _routes_instance(rng: np.random.Generator) -> Dict[str, Any]:
    d = int(rng.integers(1, MAX_D + 1))
    modes = 2 * d

    states, cutoffs = _random_states(rng, modes, cap=ROUTES_MAX_CAP)
    unitary = ModeUnitary.random(modes, rng)
    w = WeightVector.random(rng, d, nonnegative=bool(rng.integers(0, 2)))

    psi_u = apply_mode_unitary(product_state(states), unitary)
    fw_direct = qfi_direct(psi_u, range(d)).fw(w)

    moments = [single_mode_moments(state) for state in states]
    fw_moments = qfi_from_moments(unitary, moments, None, w)

    difference = abs(fw_direct - fw_moments)

    return {
        "d": d,
        "modes": modes,
        "cutoffs": _join(cutoffs),
        "fw_direct": fw_direct,
        "fw_moments": fw_moments,
        "difference": difference,
        "pass": difference <= ROUTE_TOLERANCE,
    }


FAMILIES: Dict[str, Callable[[np.random.Generator], Dict[str, Any]]] = {
    "fock": _fock_instance,
    "separable": _separable_instance,
    "routes": _routes_instance,
}


def run_instance(family: str, index: int, seed: int) -> Dict[str, Any]:
    """Runs one campaign instance from its own 64-bit seed."""

    if family not in FAMILIES:
        raise ValidationError(f"Unknown campaign family {family!r}.")

    row = FAMILIES[family](np.random.default_rng(seed))
    row.update({"index": index, "seed": seed})

    for key, value in row.items():
        if isinstance(value, (np.floating, np.integer, np.bool_)):
            row[key] = value.item()

    if not row["pass"]:
        log.warning(f"Campaign {family!r} instance {index} (seed {seed}) failed.")

    return row


@dataclass
class CampaignResult:
    family: str
    seed: int
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(1 for row in self.rows if not row["pass"])

    @property
    def columns(self) -> List[str]:
        return CAMPAIGN_COLUMNS[self.family]

    def check(self):
        """Raises `.BoundViolationError` if any instance failed."""

        if self.violations > 0:
            failed = [row["index"] for row in self.rows if not row["pass"]]
            raise BoundViolationError(
                f"{self.violations} bound violations found in {self.family!r} "
                f"(instances {failed})."
            )


async def run_campaign(family: str, instances: int, seed: int) -> CampaignResult:
    """Runs a seeded campaign. Rows are returned in instance order.

    Parameters
    ----------
    family
        ``fock``, ``separable`` or ``routes``.
    instances
        Number of instances. Must be positive.
    seed
        The master seed; instance ``i`` uses the ``i``-th derived seed.
    """

    if family not in FAMILIES:
        raise ValidationError(f"Unknown campaign family {family!r}.")

    if instances < 1:
        raise ValidationError("The number of instances must be positive.")

    seeds = derive_seeds(seed, instances)
    rows = await run_in_workers(
        run_instance,
        [(family, index, sub) for index, sub in enumerate(seeds)],
    )

    result = CampaignResult(family, seed, rows)
    log.debug(
        f"Campaign {family!r}: {instances} instances, {result.violations} failed."
    )

    return result

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: __main__.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import functools
import logging
import pathlib
from dataclasses import asdict

from typing import Any, Dict, List, Optional, Sequence

import click
import numpy as np
from click_default_group import DefaultGroup

from sdsstools.configuration import read_yaml_file
from sdsstools.daemonizer import cli_coro

from distmet import log
from distmet.bounds import (
    fock_delta_q_bound,
    fock_eigenvalue_bound,
    fock_trace_bound,
    separable_bound_constants,
    separable_fw_bound,
    simplified_delta_q_bound,
    verify_term_bounds,
)
from distmet.campaigns import run_campaign
from distmet.exceptions import (
    BoundViolationError,
    DistmetError,
    EstimationError,
    ValidationError,
)
from distmet.fock import SingleModeState, product_state, single_mode_moments
from distmet.network import GateSequence, apply_mode_unitary, triangular_layout
from distmet.optimizer import SCALING_STUDY_COLUMNS, maximize_fw, scaling_study
from distmet.protocols import (
    SCALING_COLUMNS,
    classical_baseline,
    fig2_protocol,
    protocol_scaling_table,
    shot_noise_estimate,
    twin_fock_protocol,
)
from distmet.qfi import (
    WeightVector,
    crb_cauchy_schwarz,
    crb_delta_q,
    fw_terms,
    qfi_direct,
)
from distmet.tools import (
    parse_list,
    parse_state_spec,
    parse_unitary_spec,
    parse_weights,
    write_csv,
    write_json,
)


FIG2_COLUMNS = [
    "n",
    "delta_q_simulated",
    "delta_q_formula",
    "classical_baseline",
    "ratio",
]


class BoundViolation(click.ClickException):
    """Exit status 3: a campaign found a bound violation."""

    exit_code = 3


def handle_errors(fn):
    """Maps library errors to click exceptions and exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as err:
            raise click.UsageError(str(err))
        except BoundViolationError as err:
            raise BoundViolation(str(err))
        except DistmetError as err:
            raise click.ClickException(str(err))

    return wrapper


def emit(data: Dict[str, Any], out: Optional[str]):
    """Writes JSON to ``out`` or to standard output."""

    text = write_json(out, data)
    if out is None:
        click.echo(text, nl=False)


def get_weights(value: str) -> WeightVector:
    return WeightVector.normalized(parse_weights(value))


def get_states(specs: Sequence[str]) -> List[SingleModeState]:
    if len(specs) == 0:
        raise ValidationError("At least one --state is required.")

    return [parse_state_spec(spec) for spec in specs]


def get_ints(value: str) -> List[int]:
    try:
        return [int(item) for item in parse_list(value)]
    except ValueError as err:
        raise ValidationError(f"Invalid integer list {value!r}.") from err


def truncation_metadata(states: Sequence[SingleModeState]) -> Dict[str, Any]:
    discarded = [state.discarded_norm for state in states]
    return {
        "discarded_norm": float(1.0 - np.prod([1.0 - value for value in discarded])),
        "per_mode_discarded_norm": discarded,
    }


@click.group(cls=DefaultGroup, default="protocol", default_if_no_args=False)
@click.option(
    "-c",
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="Path to a JSON or YAML file with option defaults.",
)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging to the console.")
@click.pass_context
def distmet(ctx, config=None, verbose=False):
    """Distributed phase metrology through linear-optical networks."""

    if verbose:
        log.sh.setLevel(logging.DEBUG)

    if config is not None:
        ctx.default_map = read_yaml_file(config)


@distmet.group()
def protocol():
    """Simulates an estimation protocol."""

    pass


@protocol.command(name="twin-fock")
@click.option("--d", "d", type=int, default=2, show_default=True, help="Phases.")
@click.option("--N", "N", type=int, default=4, show_default=True, help="Photons.")
@click.option("--weights", type=str, help="Comma-separated weights.")
@click.option("--q-probe", type=float, default=1e-3, show_default=True)
@click.option("--step", type=float, default=1e-4, show_default=True)
@click.option("--shots", type=int, help="Add a binomial shot-noise estimate.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scaling", type=str, default="2,4,6", show_default=True)
@click.option("--table", type=click.Path(dir_okay=False), help="Scaling CSV path.")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
@cli_coro()
async def twin_fock(
    d: int,
    N: int,
    weights: str | None,
    q_probe: float,
    step: float,
    shots: int | None,
    seed: int,
    scaling: str,
    table: str | None,
    out: str | None,
):
    """The hoarded twin-Fock protocol."""

    w = get_weights(weights) if weights else WeightVector.uniform(d)
    N_values = get_ints(scaling)

    result = twin_fock_protocol(d, N, w, q_probe=q_probe, step=step)
    data = result.to_dict()

    if shots is not None:
        estimate = shot_noise_estimate(result, shots, np.random.default_rng(seed))
        data["metadata"]["shot_noise"] = asdict(estimate)

    if table is not None:
        rows = await protocol_scaling_table([d], N_values, q_probe, step)
        write_csv(table, rows, SCALING_COLUMNS)

    emit(data, out)


def _fig2_row(n: int, q_probe: float, step: float) -> Dict[str, Any]:
    quantum = fig2_protocol(n, q_probe=q_probe, step=step)
    classical = classical_baseline(n, 2, [0.5, 0.5]) if n % 2 == 0 else None

    return {
        "n": n,
        "delta_q_simulated": quantum.delta_q,
        "delta_q_formula": quantum.metadata["delta_q_formula"],
        "classical_baseline": classical,
        "ratio": None if classical is None else classical / quantum.delta_q,
    }


@protocol.command()
@click.option("--n", "n", type=int, default=1, show_default=True)
@click.option("--w1", type=float, default=0.5, show_default=True)
@click.option("--w2", type=float, default=0.5, show_default=True)
@click.option("--q-probe", type=float, default=1e-3, show_default=True)
@click.option("--step", type=float, default=1e-4, show_default=True)
@click.option("--scaling", type=str, default="1,2,3,4", show_default=True)
@click.option("--table", type=click.Path(dir_okay=False), help="Scaling CSV path.")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
def fig2(
    n: int,
    w1: float,
    w2: float,
    q_probe: float,
    step: float,
    scaling: str,
    table: str | None,
    out: str | None,
):
    """The three-mode single-reference-port circuit."""

    n_values = get_ints(scaling)
    result = fig2_protocol(n, w1, w2, q_probe=q_probe, step=step)

    if table is not None:
        rows = [_fig2_row(value, q_probe, step) for value in n_values]
        write_csv(table, rows, FIG2_COLUMNS)

    emit(result.to_dict(), out)


@protocol.command()
@click.option("--n", "n", type=int, default=2, show_default=True)
@click.option("--d", "d", type=int, default=2, show_default=True)
@click.option("--weights", type=str, help="Comma-separated weights.")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
def classical(n: int, d: int, weights: str | None, out: str | None):
    """Independent per-node twin-Fock interferometers."""

    w = get_weights(weights) if weights else WeightVector.uniform(d)
    delta_q = classical_baseline(n, d, w)

    emit(
        {
            "delta_q": delta_q,
            "metadata": {
                "protocol": "classical",
                "n": n,
                "d": d,
                "weights": w.to_list(),
            },
        },
        out,
    )


@distmet.command()
@click.option("--state", "states", multiple=True, help="Single-mode state, per mode.")
@click.option("--unitary", type=str, default="identity", show_default=True)
@click.option("--weights", type=str, required=True, help="Comma-separated weights.")
@click.option("--phase-modes", type=str, help="Comma-separated phase modes.")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
def qfi(
    states: Sequence[str],
    unitary: str,
    weights: str,
    phase_modes: str | None,
    out: str | None,
):
    """QFI matrix, F_w by both routes and Cramér-Rao sensitivities."""

    factors = get_states(states)
    w = get_weights(weights)
    modes = get_ints(phase_modes) if phase_modes else list(range(w.d))

    U = parse_unitary_spec(unitary, len(factors), w.to_list())
    psi_u = apply_mode_unitary(product_state(factors), U)

    F = qfi_direct(psi_u, modes)
    terms = fw_terms(U, [single_mode_moments(factor) for factor in factors], w, modes)

    data: Dict[str, Any] = {
        "qfi_matrix": F.to_dict(),
        "weights": w.to_list(),
        "phase_modes": modes,
        "fw_direct": F.fw(w),
        "fw_moments": terms.fw,
        "terms": list(terms.as_tuple()),
        "crb_delta_q": None,
        "crb_cauchy_schwarz": None,
        "metadata": truncation_metadata(factors),
    }

    try:
        data["crb_delta_q"] = crb_delta_q(F, w)
        data["crb_cauchy_schwarz"] = crb_cauchy_schwarz(F.fw(w), w)
    except EstimationError as err:
        data["estimation_error"] = str(err)

    emit(data, out)


@distmet.group()
def bound():
    """Evaluates the analytic bounds."""

    pass


@bound.command(name="fock")
@click.option("--photons", type=str, required=True, help="Photons per input mode.")
@click.option("--weights", type=str, required=True, help="Comma-separated weights.")
@click.option("--unitary", type=str, help="Also evaluate the trace bound and F_w.")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
def bound_fock(photons: str, weights: str, unitary: str | None, out: str | None):
    """Bounds for Fock inputs."""

    numbers = get_ints(photons)
    w = get_weights(weights)

    data: Dict[str, Any] = {
        "photons": numbers,
        "weights": w.to_list(),
        "eigenvalue_bound": fock_eigenvalue_bound(numbers, w).to_dict(),
        "delta_q_bound": fock_delta_q_bound(numbers, w),
    }

    if unitary is not None:
        U = parse_unitary_spec(unitary, len(numbers), w.to_list())
        factors = [SingleModeState.fock(n) for n in numbers]
        psi_u = apply_mode_unitary(product_state(factors), U)
        data["trace_bound"] = fock_trace_bound(U, w, numbers)
        data["fw"] = qfi_direct(psi_u, range(w.d)).fw(w)

    emit(data, out)


@bound.command(name="separable")
@click.option("--state", "states", multiple=True, help="Single-mode state, per mode.")
@click.option("--weights", type=str, required=True, help="Comma-separated weights.")
@click.option("--unitary", type=str, help="Also check the six terms for a network.")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
def bound_separable(
    states: Sequence[str],
    weights: str,
    unitary: str | None,
    out: str | None,
):
    """Bounds for separable inputs."""

    factors = get_states(states)
    w = get_weights(weights)
    moments = [single_mode_moments(factor) for factor in factors]

    constants = separable_bound_constants(moments)

    data: Dict[str, Any] = {
        "weights": w.to_list(),
        "moments": [moment.to_dict() for moment in moments],
        "constants": constants.to_dict(),
        "ceilings": constants.ceilings(),
        "fw_bound": separable_fw_bound(constants, w.d, w),
        "metadata": truncation_metadata(factors),
    }

    if constants.m_max > 0:
        data["delta_q_bound"] = simplified_delta_q_bound(moments, w.d)

    if unitary is not None:
        U = parse_unitary_spec(unitary, len(factors), w.to_list())
        data["terms"] = verify_term_bounds(U, moments, w).to_dict()

    emit(data, out)


@distmet.command()
@click.option(
    "--family",
    type=click.Choice(["fock", "separable", "routes"]),
    default="fock",
    show_default=True,
)
@click.option("--instances", type=int, default=500, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="CSV report path.")
@handle_errors
@cli_coro()
async def verify(family: str, instances: int, seed: int, out: str | None):
    """Runs a seeded bound-verification campaign."""

    result = await run_campaign(family, instances, seed)

    if out is not None:
        write_csv(out, result.rows, result.columns)

    click.echo(f"{family}: {instances} instances, {result.violations} violations.")

    result.check()


def load_layout(value: str, dim: int) -> GateSequence:
    if value == "triangular":
        return triangular_layout(dim)

    path = pathlib.Path(value)
    if not path.is_file():
        raise ValidationError(f"Layout file {value!r} does not exist.")

    data = read_yaml_file(str(path))
    return GateSequence.from_list(int(data["dim"]), data["gates"])


@distmet.command()
@click.option("--state", "states", multiple=True, help="Single-mode state, per mode.")
@click.option("--weights", type=str, required=True, help="Comma-separated weights.")
@click.option("--budget", type=int, default=4000, show_default=True)
@click.option("--restarts", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--layout", type=str, default="triangular", show_default=True)
@click.option(
    "--witness",
    type=click.Choice(["none", "hoarding"]),
    default="none",
    show_default=True,
)
@click.option("--out", type=click.Path(dir_okay=False), help="JSON output path.")
@handle_errors
@cli_coro()
async def optimize(
    states: Sequence[str],
    weights: str,
    budget: int,
    restarts: int,
    seed: int,
    layout: str,
    witness: str,
    out: str | None,
):
    """Maximises F_w over a mesh for a fixed input."""

    factors = get_states(states)
    w = get_weights(weights)
    mesh = load_layout(layout, len(factors))

    witness_unitary = None
    if witness == "hoarding":
        witness_unitary = parse_unitary_spec("hoarding", len(factors), w.to_list())

    report = await maximize_fw(
        factors,
        w,
        layout=mesh,
        budget=budget,
        seed=seed,
        restarts=restarts,
        witness=witness_unitary,
    )

    data = report.to_dict()
    data["weights"] = w.to_list()
    data["states"] = list(states)
    data["metadata"] = truncation_metadata(factors)

    emit(data, out)


@distmet.command()
@click.option(
    "--family",
    type=click.Choice(["well-distributed", "hoarded"]),
    default="well-distributed",
    show_default=True,
)
@click.option("--d", "d_values", type=str, default="1,2,3", show_default=True)
@click.option("--photons", type=int, help="Photons per node.")
@click.option("--budget", type=int, default=4000, show_default=True)
@click.option("--restarts", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="CSV output path.")
@handle_errors
@cli_coro()
async def sweep(
    family: str,
    d_values: str,
    photons: int | None,
    budget: int,
    restarts: int,
    seed: int,
    out: str | None,
):
    """Optimiser scaling study over d."""

    rows = await scaling_study(
        family,
        get_ints(d_values),
        photons=photons,
        budget=budget,
        seed=seed,
        restarts=restarts,
    )

    if out is not None:
        write_csv(out, rows, SCALING_STUDY_COLUMNS)

    for row in rows:
        click.echo(
            f"d={row['d']} best_fw={row['best_fw']:.6g} bound={row['bound']:.6g} "
            f"ratio={row['ratio']}"
        )


def main():
    distmet(obj={})


if __name__ == "__main__":
    main()

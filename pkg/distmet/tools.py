#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: tools.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import asyncio
import json
import os
import pathlib
from concurrent.futures import ThreadPoolExecutor
from functools import partial

from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
import pandas

from sdsstools.configuration import read_yaml_file

from .exceptions import ValidationError
from .fock import SingleModeState
from .network import ModeUnitary, hoarding_unitary


__all__ = [
    "derive_seeds",
    "worker_count",
    "run_in_workers",
    "parse_list",
    "parse_weights",
    "parse_state_spec",
    "parse_unitary_spec",
    "write_json",
    "write_csv",
]


T = TypeVar("T")


def derive_seeds(seed: int, count: int) -> List[int]:
    """Splits a 64-bit seed into ``count`` independent 64-bit seeds.

    Instance ``i`` uses ``SeedSequence(seed).spawn(count)[i]`` reduced to a
    single 64-bit word, so any instance can be replayed on its own with
    ``numpy.random.default_rng(seeds[i])``.
    """

    if count < 0:
        raise ValidationError("Count cannot be negative.")

    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, np.uint64)[0]) for child in children]


def worker_count() -> Optional[int]:
    """Returns the worker cap from ``$DISTMET_THREADS``, or `None` if unset."""

    value = os.environ.get("DISTMET_THREADS", "").strip()
    if value == "":
        return None

    try:
        workers = int(value)
    except ValueError:
        raise ValidationError(f"Invalid DISTMET_THREADS value {value!r}.")

    if workers < 1:
        raise ValidationError("DISTMET_THREADS must be at least 1.")

    return workers


async def run_in_workers(
    fn: Callable[..., T],
    arguments: Iterable[Sequence[Any]],
    **kwargs,
) -> List[T]:
    """Runs ``fn(*args, **kwargs)`` for each ``args`` in a thread pool.

    Results are returned in the order of ``arguments`` regardless of which
    call finishes first.
    """

    loop = asyncio.get_running_loop()

    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        jobs = [
            loop.run_in_executor(executor, partial(fn, *args, **kwargs))
            for args in arguments
        ]
        return list(await asyncio.gather(*jobs))


def parse_list(value: str | Sequence[Any]) -> List[str]:
    """Splits a comma-separated string into stripped items."""

    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip() != ""]

    return [str(item).strip() for item in value]


def parse_weights(value: str | Sequence[float]) -> np.ndarray:
    """Parses comma-separated weights."""

    try:
        weights = np.array([float(item) for item in parse_list(value)])
    except ValueError as err:
        raise ValidationError(f"Invalid weights {value!r}: {err}") from err

    if weights.size == 0:
        raise ValidationError("No weights given.")

    return weights


def parse_state_spec(spec: str) -> SingleModeState:
    """Parses a single-mode state specification.

    Accepted forms are ``vacuum``, ``fock:N``, ``coherent:RE[,IM]:CUTOFF`` and
    ``amps:c0,c1,...`` (real amplitudes, renormalised).
    """

    kind, _, rest = spec.strip().partition(":")
    kind = kind.lower()

    try:
        if kind == "vacuum" and rest == "":
            return SingleModeState.vacuum()

        elif kind == "fock":
            return SingleModeState.fock(int(rest))

        elif kind == "coherent":
            value, _, cutoff = rest.rpartition(":")
            parts = [float(item) for item in parse_list(value)]
            if len(parts) not in (1, 2):
                raise ValueError("expected RE or RE,IM")
            alpha = complex(parts[0], parts[1] if len(parts) == 2 else 0.0)
            return SingleModeState.coherent(alpha, int(cutoff))

        elif kind == "amps":
            amplitudes = [float(item) for item in parse_list(rest)]
            return SingleModeState.from_amplitudes(amplitudes)

    except ValueError as err:
        raise ValidationError(f"Invalid state specification {spec!r}: {err}") from err

    raise ValidationError(f"Unknown state specification {spec!r}.")


def parse_unitary_spec(
    spec: str,
    dim: int,
    weights: Optional[Sequence[float]] = None,
) -> ModeUnitary:
    """Parses a network specification.

    Accepted forms are ``identity``, ``hoarding`` (needs ``weights`` and
    ``dim = 2d``), ``random:SEED`` (Haar random) or the path to a JSON file with
    a serialised `.ModeUnitary`.
    """

    kind, _, rest = spec.strip().partition(":")

    if kind == "identity":
        return ModeUnitary.identity(dim)

    elif kind == "hoarding":
        if weights is None or 2 * len(weights) != dim:
            raise ValidationError("The hoarding network needs 2d modes for d weights.")
        return hoarding_unitary(weights)

    elif kind == "random" and rest != "":
        try:
            seed = int(rest)
        except ValueError:
            raise ValidationError(f"Invalid seed in {spec!r}.")
        return ModeUnitary.random(dim, np.random.default_rng(seed))

    path = pathlib.Path(spec)
    if not path.is_file():
        raise ValidationError(f"Unknown network specification {spec!r}.")

    unitary = ModeUnitary.from_dict(read_yaml_file(str(path)))
    if unitary.dim != dim:
        raise ValidationError(f"Network in {spec} has {unitary.dim} modes, not {dim}.")

    return unitary


def write_json(path: Optional[str | pathlib.Path], data: Dict[str, Any]) -> str:
    """Serialises ``data`` as UTF-8 JSON. Writes to ``path`` if given.

    Returns the serialised text.
    """

    text = json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"

    if path is not None:
        pathlib.Path(path).write_text(text, encoding="utf-8")

    return text


def write_csv(
    path: str | pathlib.Path,
    rows: Sequence[Dict[str, Any]],
    columns: Sequence[str],
):
    """Writes ``rows`` as an RFC 4180 CSV file with a header line.

    Missing and `None` values are written as empty fields.
    """

    # Object dtype keeps integer columns with missing values from becoming floats.
    df = pandas.DataFrame(list(rows), columns=list(columns), dtype=object)
    df.to_csv(path, index=False, lineterminator="\r\n", encoding="utf-8")

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: exceptions.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from typing import Optional, Sequence


__all__ = [
    "DistmetError",
    "ValidationError",
    "DimensionError",
    "NoPhotonsError",
    "EstimationError",
    "InsensitivePointError",
    "BoundViolationError",
    "DistmetUserWarning",
]


class DistmetError(Exception):
    """Base class for all distmet errors."""


class ValidationError(DistmetError, ValueError):
    """An input does not satisfy the preconditions of an operation."""


class DimensionError(ValidationError):
    """A state does not fit in the requested Fock space.

    Parameters
    ----------
    message
        The error message.
    required_cap
        The smallest total-photon cap that would hold the state.
    """

    def __init__(self, message: str, required_cap: Optional[int] = None):
        self.required_cap = required_cap

        if required_cap is not None:
            message = f"{message} (required cap: {required_cap})"

        super().__init__(message)


class NoPhotonsError(ValidationError):
    """The input carries no photons, so no sensitivity can be defined."""


class EstimationError(DistmetError):
    """The weights overlap the kernel of the QFI matrix.

    Parameters
    ----------
    message
        The error message.
    direction
        The null eigenvector with the largest overlap with the weights.
    """

    def __init__(self, message: str, direction: Optional[Sequence[float]] = None):
        self.direction = None if direction is None else list(direction)

        if self.direction is not None:
            pretty = ", ".join(f"{value:.6g}" for value in self.direction)
            message = f"{message} (null direction: [{pretty}])"

        super().__init__(message)


class InsensitivePointError(DistmetError):
    """The expectation value does not depend on q at the evaluation point."""


class BoundViolationError(DistmetError):
    """A computed quantity exceeds one of its analytic bounds."""


class DistmetUserWarning(UserWarning):
    """Base warning for distmet."""

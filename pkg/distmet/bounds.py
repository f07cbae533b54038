#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: bounds.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import config
from .exceptions import DistmetUserWarning, NoPhotonsError, ValidationError
from .fock import MomentSet
from .network import ModeUnitary
from .qfi import Weights, _weights, fw_terms, s_matrix


__all__ = [
    "C_CONSTANT",
    "SMatrix",
    "FockEigenvalueBound",
    "BoundConstants",
    "TermCheck",
    "TermBoundReport",
    "fock_trace_bound",
    "fock_eigenvalue_bound",
    "fock_delta_q_bound",
    "separable_bound_constants",
    "separable_fw_bound",
    "simplified_delta_q_bound",
    "verify_term_bounds",
]


SYMMETRY_TOLERANCE: float = config["tolerances"]["symmetry"]
BOUND_SLACK: float = config["tolerances"]["bound_slack"]

#: The smallest integer C with A + B < C^2 max m.
C_CONSTANT: int = 20


@dataclass(frozen=True, eq=False)
class SMatrix:
    """The Hermitian matrix ``S = U^dagger W U`` of a weighted network.

    Its eigenvalues are the weights padded with zeros; this is checked on
    construction.
    """

    entries: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        weights = np.array(self.weights, dtype=float).ravel()

        if np.max(np.abs(entries - entries.conj().T)) > SYMMETRY_TOLERANCE:
            raise ValidationError("S matrix is not Hermitian.")

        padding = np.zeros(entries.shape[0] - weights.size)
        padded = np.sort(np.concatenate([weights, padding]))
        eigenvalues = np.linalg.eigvalsh(entries)

        if np.max(np.abs(eigenvalues - padded)) > 1e-10:
            raise ValidationError("S matrix eigenvalues do not match the weights.")

        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def build(
        cls,
        unitary: ModeUnitary,
        w: Weights,
        phase_modes: Optional[Sequence[int]] = None,
    ) -> SMatrix:
        return cls(s_matrix(unitary, w, phase_modes), _weights(w))


def _photon_numbers(n: Sequence[int], dim: Optional[int] = None) -> np.ndarray:
    array = np.asarray(n)

    if array.ndim != 1 or array.size == 0:
        raise ValidationError("Photon numbers must be a non-empty list.")

    if np.any(array < 0) or np.any(array != np.round(array)):
        raise ValidationError("Photon numbers must be non-negative integers.")

    if dim is not None and array.size != dim:
        raise ValidationError(f"Got {array.size} photon numbers for {dim} modes.")

    return array.astype(float)


def fock_trace_bound(
    unitary: ModeUnitary,
    w: Weights,
    n: Sequence[int],
    phase_modes: Optional[Sequence[int]] = None,
) -> float:
    """Returns ``4 Tr[N S (N + 1) S]`` for a Fock input with photon numbers ``n``."""

    numbers = _photon_numbers(n, unitary.dim)
    S = s_matrix(unitary, w, phase_modes)

    return float(4.0 * np.sum(np.outer(numbers, numbers + 1) * np.abs(S) ** 2))


@dataclass(frozen=True)
class FockEigenvalueBound:
    """Eigenvalue bounds on ``F_w`` for a Fock input.

    Attributes
    ----------
    pairing
        ``4 sum_j n_(j) (n_(j) + 1) w_(j)^2`` with both lists sorted by
        decreasing absolute value.
    closed_form
        ``4 |n|^2 / d^2``.
    certified
        Whether ``closed_form`` is a valid bound for this instance: weights of a
        single sign and ``(sum n)^2 <= 4 |n|^2``.
    value
        The tightest valid bound.
    """

    pairing: float
    closed_form: float
    certified: bool
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pairing": self.pairing,
            "closed_form": self.closed_form,
            "certified": self.certified,
            "value": self.value,
        }


def _closed_form_certified(numbers: np.ndarray, w: np.ndarray) -> bool:
    nonzero = w[w != 0]
    single_sign = bool(np.all(nonzero > 0) or np.all(nonzero < 0))

    return bool(single_sign and numbers.sum() ** 2 <= 4.0 * (numbers @ numbers))


def fock_eigenvalue_bound(n: Sequence[int], w: Weights) -> FockEigenvalueBound:
    """Bounds ``F_w`` for any network given only the input photon numbers.

    Parameters
    ----------
    n
        Photon number in each input mode.
    w
        The weights. Padded with zeros to the number of modes.

    Returns
    -------
    :
        A `.FockEigenvalueBound` with both forms and the value to use.
    """

    numbers = _photon_numbers(n)
    w = _weights(w)
    d = w.size

    if numbers.size < d:
        raise ValidationError("Need at least as many modes as weights.")

    padded = np.zeros(numbers.size)
    padded[:d] = np.abs(w)

    sorted_n = np.sort(numbers)[::-1]
    sorted_w = np.sort(padded)[::-1]

    pairing = float(4.0 * np.sum(sorted_n * (sorted_n + 1) * sorted_w**2))
    closed_form = float(4.0 * (numbers @ numbers) / d**2)
    certified = _closed_form_certified(numbers, w)

    value = min(pairing, closed_form) if certified else pairing

    return FockEigenvalueBound(pairing, closed_form, certified, value)


def fock_delta_q_bound(n: Sequence[int], w: Weights) -> float:
    """Returns the Fock-input sensitivity bound ``d |w|^2 / (2 |n|)``.

    If the closed form is not certified for these weights (see
    `.fock_eigenvalue_bound`), warns and returns ``|w|^2 / sqrt(pairing)``.

    Raises
    ------
    NoPhotonsError
        If all photon numbers are zero.
    """

    numbers = _photon_numbers(n)
    w = _weights(w)

    norm_n = float(np.sqrt(numbers @ numbers))
    if norm_n == 0:
        raise NoPhotonsError("The input has no photons.")

    if _closed_form_certified(numbers, w):
        return float(w.size * (w @ w) / (2.0 * norm_n))

    warnings.warn(
        "Closed-form bound not certified for these weights; using the pairing bound.",
        DistmetUserWarning,
    )

    return float((w @ w) / np.sqrt(fock_eigenvalue_bound(numbers, w).pairing))


@dataclass(frozen=True)
class BoundConstants:
    """Moment maxima and the constants of the separable-input bound."""

    modes: int
    n_max: float
    xi_max: float
    beta_max: float
    v_max: float
    M_max: float
    Xi_max: float
    alpha_max: float
    A: float
    B: float
    m_max: float
    nbar_max: float
    C: int = C_CONSTANT

    def ceilings(self) -> Dict[str, float]:
        """Moment-only ceilings on ``A``, ``B`` and ``A + B``."""

        m, n = self.m_max, self.nbar_max
        return {
            "A": 304.0 * m + 40.0 * n,
            "B": 20.0 * m + 4.0 * n,
            "A_simple": 344.0 * m,
            "B_simple": 24.0 * m,
            "A+B": float(self.C**2) * m,
        }

    def ceiling_failures(self, slack: float = BOUND_SLACK) -> List[str]:
        """Names of the ceilings that do not hold (``A + B`` must be strict)."""

        ceilings = self.ceilings()
        failures = [
            name
            for name, value in (
                ("A", self.A),
                ("B", self.B),
                ("A_simple", self.A),
                ("B_simple", self.B),
            )
            if value > ceilings[name] + slack
        ]

        if self.m_max > 0 and not self.A + self.B < ceilings["A+B"]:
            failures.append("A+B")

        return failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "modes": self.modes,
            "n_max": self.n_max,
            "xi_max": self.xi_max,
            "beta_max": self.beta_max,
            "v_max": self.v_max,
            "M_max": self.M_max,
            "Xi_max": self.Xi_max,
            "alpha_max": self.alpha_max,
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "m_max": self.m_max,
            "nbar_max": self.nbar_max,
        }


def separable_bound_constants(moments: Sequence[MomentSet]) -> BoundConstants:
    """Computes the moment maxima and the constants ``A`` and ``B``.

    Pair maxima (``M_max``, ``Xi_max``) run over ordered pairs ``l != m`` and
    are zero for a single mode.
    """

    if len(moments) == 0:
        raise ValidationError("Need at least one mode.")

    for moment in moments:
        moment.validate()

    alpha = np.array([moment.alpha for moment in moments], dtype=complex)
    nbar = np.array([moment.nbar for moment in moments])
    xi = np.array([moment.xi for moment in moments], dtype=complex)
    beta = np.array([moment.beta for moment in moments], dtype=complex)
    v = np.array([moment.v for moment in moments])
    m = np.array([moment.m for moment in moments])

    alpha_abs2 = np.abs(alpha) ** 2

    n_max = float(np.max(nbar + 0.5 - alpha_abs2))
    xi_max = float(np.max(np.abs(xi - alpha**2)))
    beta_max = float(np.max(np.abs(beta + alpha / 2 - nbar * alpha)))
    v_max = float(max(0.0, np.max(v)))
    alpha_max = float(np.max(np.abs(alpha)))

    if len(moments) > 1:
        off = ~np.eye(len(moments), dtype=bool)
        pair_M = np.outer(nbar, nbar + 1) - np.outer(alpha_abs2, alpha_abs2)
        pair_Xi = np.abs(
            np.outer(xi.conj(), xi) - np.outer(alpha.conj() ** 2, alpha**2)
        )
        M_max = float(np.max(pair_M[off]))
        Xi_max = float(np.max(pair_Xi[off]))
    else:
        M_max = Xi_max = 0.0

    A = 16.0 * alpha_max * (
        5.0 * n_max * alpha_max + 6.0 * xi_max * alpha_max + 4.0 * beta_max
    )
    B = 4.0 * (v_max + M_max + Xi_max + 2.0 * xi_max * alpha_max**2)

    return BoundConstants(
        modes=len(moments),
        n_max=n_max,
        xi_max=xi_max,
        beta_max=beta_max,
        v_max=v_max,
        M_max=M_max,
        Xi_max=Xi_max,
        alpha_max=alpha_max,
        A=float(A),
        B=float(B),
        m_max=float(np.max(m)),
        nbar_max=float(np.max(nbar)),
    )


def _check_mode_count(modes: int, d: int):
    if modes > 2 * d:
        raise ValidationError(
            f"The separable bound holds for at most 2d = {2 * d} modes, got {modes}."
        )


def separable_fw_bound(constants: BoundConstants, d: int, w: Weights) -> float:
    """Returns ``A / d + B |w|^2``."""

    w = _weights(w)
    if w.size != d:
        raise ValidationError(f"Got {w.size} weights for d = {d}.")

    _check_mode_count(constants.modes, d)

    return float(constants.A / d + constants.B * (w @ w))


def simplified_delta_q_bound(moments: Sequence[MomentSet], d: int) -> float:
    """Returns ``1 / (C sqrt(d max_j m_j))`` for well-distributed weights."""

    if d < 1:
        raise ValidationError("d must be positive.")

    m_max = max((moment.m for moment in moments), default=0.0)
    if m_max <= 0:
        raise NoPhotonsError("All second moments are zero.")

    return float(1.0 / (C_CONSTANT * np.sqrt(d * m_max)))


@dataclass(frozen=True)
class TermCheck:
    name: str
    value: float
    bound: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class TermBoundReport:
    """Each term of the ``F_w`` expansion with its bound, plus intermediates."""

    checks: List[TermCheck]
    intermediates: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[TermCheck]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "intermediates": dict(self.intermediates),
        }


def verify_term_bounds(
    unitary: ModeUnitary,
    moments: Sequence[MomentSet],
    w: Weights,
    phase_modes: Optional[Sequence[int]] = None,
    slack: float = BOUND_SLACK,
) -> TermBoundReport:
    """Checks each of the six ``F_w`` terms against its moment bound.

    The bounds use ``w_max = 1/d`` and require at most ``2d`` modes. The report
    also carries the intermediates ``K1 .. K6``:

    - ``K1 = sum_l S_ll^2`` and ``K2 = sum_{l != m} |S_lm|^2``, both at most
      ``sum w^2``;
    - ``K3 = sum_l |A_l|^2`` with ``A_l = sum_{m != l} S_lm alpha_m``, at most
      ``8 d w_max^2 alpha_max^2``;
    - ``K4 = sum_{l != m} |S_lm|^2 |alpha_m|^2``, at most ``alpha_max^2 sum w^2``;
    - ``K5 = sum_l |A_l|``, at most ``4 d w_max alpha_max``;
    - ``K6 = max_l |S_ll|``, at most ``w_max``.
    """

    w = _weights(w)
    d = w.size
    _check_mode_count(unitary.dim, d)

    terms = fw_terms(unitary, moments, w, phase_modes)
    constants = separable_bound_constants(moments)

    S = s_matrix(unitary, w, phase_modes)
    alpha = np.array([moment.alpha for moment in moments], dtype=complex)

    diagonal = S.diagonal()
    off = S - np.diag(diagonal)
    mixed = off @ alpha

    sum_w2 = float(w @ w)
    w_max = 1.0 / d

    k = constants
    bounds = [
        ("F1", terms.f1, k.v_max * sum_w2),
        ("F2", terms.f2, k.M_max * sum_w2),
        ("F3", terms.f3, k.Xi_max * sum_w2),
        ("F4", terms.f4, 20.0 * d * k.n_max * w_max**2 * k.alpha_max**2),
        (
            "F5",
            terms.f5,
            2.0 * k.xi_max * k.alpha_max**2 * sum_w2
            + 24.0 * d * k.xi_max * w_max**2 * k.alpha_max**2,
        ),
        ("F6", terms.f6, 16.0 * d * w_max**2 * k.alpha_max * k.beta_max),
    ]

    checks = [
        TermCheck(name, float(value), float(bound), bool(value <= bound + slack))
        for name, value, bound in bounds
    ]

    intermediates = {
        "K1": float(np.sum(np.abs(diagonal) ** 2)),
        "K2": float(np.sum(np.abs(off) ** 2)),
        "K3": float(np.sum(np.abs(mixed) ** 2)),
        "K4": float(np.sum(np.abs(off) ** 2 @ np.abs(alpha) ** 2)),
        "K5": float(np.sum(np.abs(mixed))),
        "K6": float(np.max(np.abs(diagonal))),
    }

    return TermBoundReport(checks, intermediates)

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: qfi.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

from dataclasses import dataclass, field

from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike

from . import config
from .exceptions import EstimationError, ValidationError
from .fock import FockState, MomentSet
from .network import ModeUnitary


__all__ = [
    "WeightVector",
    "PhaseVector",
    "QfiMatrix",
    "FwTerms",
    "phase_allocation",
    "s_matrix",
    "qfi_direct",
    "fw_terms",
    "qfi_from_moments",
    "crb_delta_q",
    "crb_cauchy_schwarz",
]


SYMMETRY_TOLERANCE: float = config["tolerances"]["symmetry"]
PSD_TOLERANCE: float = config["tolerances"]["psd"]
SUPPORT_THRESHOLD: float = config["qfi"]["support_threshold"]
KERNEL_TOLERANCE: float = config["qfi"]["kernel_tolerance"]

Weights = Union["WeightVector", ArrayLike]


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Weights of the linear combination ``q = sum_j w_j theta_j``.

    Weights are normalised so that ``max |w_j| = 1/d``; use `.normalized` to
    rescale arbitrary weights.
    """

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float).ravel()

        if w.size == 0:
            raise ValidationError("Weight vector cannot be empty.")

        if not np.all(np.isfinite(w)):
            raise ValidationError("Weights must be finite.")

        if abs(np.max(np.abs(w)) - 1.0 / w.size) > 1e-12:
            raise ValidationError(
                f"Weights must satisfy max|w| = 1/d = {1 / w.size:.6g}, "
                f"got {np.max(np.abs(w)):.6g}."
            )

        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def __repr__(self):
        return f"<WeightVector {self.w.tolist()}>"

    def __len__(self) -> int:
        return self.w.size

    def __array__(self, dtype=None, copy=None):
        return np.array(self.w, dtype=dtype)

    @property
    def d(self) -> int:
        return self.w.size

    @property
    def norm2(self) -> float:
        """``|w|^2``."""

        return float(self.w @ self.w)

    @property
    def l1(self) -> float:
        return float(np.abs(self.w).sum())

    def well_distributed(self, c: float = 1.0) -> bool:
        """Whether ``|w|^2 <= c / d``."""

        return self.norm2 <= c / self.d + 1e-15

    def to_list(self) -> List[float]:
        return self.w.tolist()

    @classmethod
    def normalized(cls, raw: Sequence[float]) -> WeightVector:
        """Rescales raw weights to ``max |w_j| = 1/d``."""

        raw = np.asarray(raw, dtype=float).ravel()
        peak = np.max(np.abs(raw)) if raw.size > 0 else 0.0

        if peak == 0:
            raise ValidationError("Weights cannot all be zero.")

        w = raw / (peak * raw.size)
        w[np.argmax(np.abs(raw))] = np.sign(raw[np.argmax(np.abs(raw))]) / raw.size

        return cls(w)

    @classmethod
    def uniform(cls, d: int) -> WeightVector:
        return cls(np.full(d, 1.0 / d))

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        d: int,
        nonnegative: bool = True,
    ) -> WeightVector:
        """Draws random weights, uniform in ``(0, 1]`` or ``[-1, 1]``, normalised."""

        if nonnegative:
            raw = 1.0 - rng.random(d)
        else:
            raw = rng.uniform(-1.0, 1.0, d)

        return cls.normalized(raw)


def _weights(w: Weights) -> np.ndarray:
    return np.asarray(w, dtype=float).ravel()


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """The phases ``theta_j`` imprinted on the signal modes, in radians."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        if not np.all(np.isfinite(theta)):
            raise ValidationError("Phases must be finite.")

        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    def __len__(self) -> int:
        return self.theta.size

    def __array__(self, dtype=None, copy=None):
        return np.array(self.theta, dtype=dtype)


def phase_allocation(
    q: float,
    w: Weights,
    direction: Optional[ArrayLike] = None,
) -> PhaseVector:
    """Chooses phases with ``sum_j w_j theta_j = q``.

    By default ``theta = q w / |w|^2``. If ``direction`` is given the phases are
    ``q direction / (w . direction)``.
    """

    w = _weights(w)

    if direction is None:
        return PhaseVector(q * w / (w @ w))

    direction = np.asarray(direction, dtype=float).ravel()
    if direction.size != w.size:
        raise ValidationError("Direction and weights have different lengths.")

    projection = float(w @ direction)
    if abs(projection) < 1e-15:
        raise ValidationError("Direction is orthogonal to the weights.")

    return PhaseVector(q * direction / projection)


def _validate_phase_modes(phase_modes: Sequence[int], modes: int) -> List[int]:
    phase_modes = [int(mode) for mode in phase_modes]

    if len(set(phase_modes)) != len(phase_modes):
        raise ValidationError(f"Duplicate phase modes in {phase_modes}.")

    for mode in phase_modes:
        if not 0 <= mode < modes:
            raise ValidationError(f"Invalid phase mode {mode} for {modes} modes.")

    return phase_modes


@dataclass(frozen=True, eq=False)
class QfiMatrix:
    """A real, symmetric, positive-semidefinite QFI matrix.

    The eigensystem is computed on construction.

    Parameters
    ----------
    entries
        The ``d x d`` matrix.
    support_threshold
        Eigenvalues below ``support_threshold`` times the largest eigenvalue are
        treated as the kernel.
    """

    entries: np.ndarray
    support_threshold: float = SUPPORT_THRESHOLD
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)

        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError(f"QFI matrix must be square, got {entries.shape}.")

        scale = max(1.0, float(np.max(np.abs(entries), initial=0.0)))
        asymmetry = np.max(np.abs(entries - entries.T), initial=0.0)
        if asymmetry > SYMMETRY_TOLERANCE * scale:
            raise ValidationError("QFI matrix is not symmetric.")

        entries = (entries + entries.T) / 2.0
        eigenvalues, eigenvectors = np.linalg.eigh(entries)

        if eigenvalues.size > 0 and eigenvalues[0] < -PSD_TOLERANCE * scale:
            raise ValidationError(
                "QFI matrix is not positive semidefinite "
                f"(eigenvalue {eigenvalues[0]})."
            )

        for array in (entries, eigenvalues, eigenvectors):
            array.setflags(write=False)

        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "eigenvectors", eigenvectors)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def support(self) -> np.ndarray:
        """Boolean mask of the eigenvalues spanning the support."""

        top = float(self.eigenvalues[-1]) if self.d > 0 else 0.0
        if top <= 0:
            return np.zeros(self.d, dtype=bool)

        return self.eigenvalues > self.support_threshold * top

    def fw(self, w: Weights) -> float:
        """``w^T F w``."""

        w = _weights(w)
        return float(w @ self.entries @ w)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "entries": self.entries.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "support_threshold": self.support_threshold,
        }


@dataclass(frozen=True)
class FwTerms:
    """The six terms with ``F_w / 4 = f1 + ... + f6``."""

    f1: float
    f2: float
    f3: float
    f4: float
    f5: float
    f6: float

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.f1, self.f2, self.f3, self.f4, self.f5, self.f6)

    @property
    def total(self) -> float:
        return float(sum(self.as_tuple()))

    @property
    def fw(self) -> float:
        return 4.0 * self.total


def s_matrix(
    unitary: ModeUnitary,
    w: Weights,
    phase_modes: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Returns ``S = U^dagger W U`` with ``W`` the weights placed on the phase modes.

    Element-wise, ``S[l, m] = sum_j U[j, m] w_j conj(U[j, l])``, so the weighted
    generator is ``sum_lm S[l, m] a_l^dagger a_m`` in terms of the input modes.
    """

    w = _weights(w)
    dim = unitary.dim

    phase_modes = list(range(w.size)) if phase_modes is None else phase_modes
    phase_modes = _validate_phase_modes(phase_modes, dim)

    if len(phase_modes) != w.size:
        raise ValidationError("Need one phase mode per weight.")

    diagonal = np.zeros(dim)
    diagonal[phase_modes] = w

    matrix = unitary.matrix
    return matrix.conj().T @ (diagonal[:, None] * matrix)


def qfi_direct(psi_u: FockState, phase_modes: Sequence[int]) -> QfiMatrix:
    """Computes ``F_jk = 4 (<n_j n_k> - <n_j><n_k>)`` on the output state."""

    phase_modes = _validate_phase_modes(phase_modes, psi_u.modes)

    occupations, amplitudes = psi_u.arrays()
    probabilities = np.abs(amplitudes) ** 2
    numbers = occupations[:, phase_modes].astype(float)

    mean = probabilities @ numbers
    second = numbers.T @ (probabilities[:, None] * numbers)

    return QfiMatrix(4.0 * (second - np.outer(mean, mean)))


def _moment_arrays(moments: Sequence[MomentSet]):
    alpha = np.array([moment.alpha for moment in moments], dtype=complex)
    nbar = np.array([moment.nbar for moment in moments], dtype=float)
    xi = np.array([moment.xi for moment in moments], dtype=complex)
    beta = np.array([moment.beta for moment in moments], dtype=complex)
    v = np.array([moment.v for moment in moments], dtype=float)

    return alpha, nbar, xi, beta, v


def fw_terms(
    unitary: ModeUnitary,
    moments: Sequence[MomentSet],
    w: Weights,
    phase_modes: Optional[Sequence[int]] = None,
) -> FwTerms:
    """Evaluates the six-term expansion of ``F_w / 4`` from the input moments.

    Parameters
    ----------
    unitary
        The network.
    moments
        One `.MomentSet` per input mode of a product input.
    w
        The weights.
    phase_modes
        Output modes carrying the phases. Defaults to ``0 .. d-1``.

    Returns
    -------
    :
        A `.FwTerms` instance.
    """

    if len(moments) != unitary.dim:
        raise ValidationError(
            f"Got {len(moments)} moment sets for a {unitary.dim}-mode network."
        )

    S = s_matrix(unitary, w, phase_modes)
    alpha, nbar, xi, beta, v = _moment_arrays(moments)

    diagonal = S.diagonal().real
    off = S - np.diag(S.diagonal())
    off_abs2 = np.abs(off) ** 2
    alpha_abs2 = np.abs(alpha) ** 2

    f1 = float(np.sum(diagonal**2 * v))

    f2 = float(
        np.sum(off_abs2 * (np.outer(nbar, nbar + 1) - np.outer(alpha_abs2, alpha_abs2)))
    )

    pair = np.outer(xi.conj(), xi) - np.outer(alpha.conj() ** 2, alpha**2)
    f3 = float(np.sum(off**2 * pair).real)

    mixed = off @ alpha
    c = 2 * nbar + 1 - 2 * alpha_abs2
    f4 = float(c @ (np.abs(mixed) ** 2 - off_abs2 @ alpha_abs2))

    squeeze = xi.conj() - alpha.conj() ** 2
    f5 = float(2 * (squeeze @ (mixed**2 - (off**2) @ alpha**2)).real)

    g = 2 * beta.conj() + alpha.conj() - 2 * nbar * alpha.conj()
    f6 = float(2 * np.sum(diagonal * g * mixed).real)

    return FwTerms(f1, f2, f3, f4, f5, f6)


def qfi_from_moments(
    unitary: ModeUnitary,
    moments: Sequence[MomentSet],
    phase_modes: Optional[Sequence[int]],
    w: Weights,
) -> float:
    """Returns ``F_w`` for a product input using only single-mode moments."""

    return fw_terms(unitary, moments, w, phase_modes).fw


def crb_delta_q(F: QfiMatrix, w: Weights) -> float:
    """Cramér-Rao sensitivity ``sqrt(w^T F^+ w)`` with the inverse on the support.

    Raises
    ------
    EstimationError
        If ``w`` has a component on the kernel of ``F`` larger than the kernel
        tolerance (relative to ``|w|``).
    """

    w = _weights(w)
    if w.size != F.d:
        raise ValidationError(f"Got {w.size} weights for a {F.d}x{F.d} QFI matrix.")

    support = F.support()
    overlaps = F.eigenvectors.T @ w

    kernel = overlaps[~support]
    tolerance = KERNEL_TOLERANCE * np.linalg.norm(w)
    if kernel.size > 0 and np.linalg.norm(kernel) > tolerance:
        vectors = F.eigenvectors[:, ~support]
        direction = vectors[:, int(np.argmax(np.abs(kernel)))]
        raise EstimationError(
            "Weights overlap the kernel of the QFI matrix; q cannot be estimated.",
            direction=direction.tolist(),
        )

    value = np.sum(overlaps[support] ** 2 / F.eigenvalues[support])

    return float(np.sqrt(value))


def crb_cauchy_schwarz(F_w: float, w: Weights) -> float:
    """The weaker bound ``|w|^2 / sqrt(F_w)``."""

    if F_w <= 0:
        raise EstimationError(f"F_w must be positive, got {F_w}.")

    w = _weights(w)
    return float((w @ w) / np.sqrt(F_w))

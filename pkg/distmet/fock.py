#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# @Author: José Sánchez-Gallego (gallegoj@uw.edu)
# @Date: 2026-10-18
# @Filename: fock.py
# @License: BSD 3-clause (http://www.opensource.org/licenses/BSD-3-Clause)

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from math import comb, factorial, sqrt
from types import MappingProxyType

from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import factorial as sp_factorial

from . import config, log
from .exceptions import DimensionError, ValidationError


__all__ = [
    "Occupation",
    "FockState",
    "SingleModeState",
    "MomentSet",
    "beam_splitter_matrix",
    "product_state",
    "apply_two_mode",
    "apply_beam_splitter",
    "apply_phase_shift",
    "apply_phases",
    "number_correlation",
    "single_mode_moments",
    "fidelity_projector",
]


Occupation = Tuple[int, ...]

PRUNE_THRESHOLD: float = config["tolerances"]["prune"]
NORMALIZATION_TOLERANCE: float = config["tolerances"]["normalization"]


def _validate_mode(modes: int, *indices: int):
    """Raises `.ValidationError` if any index is not a valid mode."""

    for index in indices:
        if not isinstance(index, (int, np.integer)) or index < 0 or index >= modes:
            raise ValidationError(
                f"Invalid mode index {index!r} for a {modes}-mode state."
            )


class FockState:
    """An immutable, sparse multi-mode state in a truncated Fock space.

    Amplitudes are stored in canonical form: keys sorted lexicographically and
    amplitudes with magnitude below the prune threshold removed.

    Parameters
    ----------
    modes
        The number of modes, ``M``.
    cap
        The total-photon cap. Every occupation must have at most ``cap`` photons.
    amplitudes
        A mapping of occupation tuples to complex amplitudes.
    discarded_norm
        Squared norm of any tail discarded when the input factors were truncated.
        Carried along so that outputs can report it.
    """

    __slots__ = ("modes", "cap", "discarded_norm", "_amplitudes", "_arrays")

    def __init__(
        self,
        modes: int,
        cap: int,
        amplitudes: Mapping[Occupation, complex],
        discarded_norm: float = 0.0,
    ):
        if modes < 1:
            raise ValidationError("A Fock state needs at least one mode.")

        if cap < 0:
            raise ValidationError("The photon cap cannot be negative.")

        canonical: Dict[Occupation, complex] = {}
        required = 0

        for occupation, amplitude in sorted(amplitudes.items()):
            if abs(amplitude) < PRUNE_THRESHOLD:
                continue

            occupation = tuple(int(count) for count in occupation)

            if len(occupation) != modes:
                raise ValidationError(
                    f"Occupation {occupation} does not have {modes} modes."
                )

            if any(count < 0 for count in occupation):
                raise ValidationError(f"Negative occupation in {occupation}.")

            required = max(required, sum(occupation))
            canonical[occupation] = complex(amplitude)

        if required > cap:
            raise DimensionError("State exceeds the total-photon cap.", required)

        norm = sum(abs(amplitude) ** 2 for amplitude in canonical.values())
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValidationError(f"State is not normalized (norm={norm:.16g}).")

        self.modes = int(modes)
        self.cap = int(cap)
        self.discarded_norm = float(discarded_norm)

        self._amplitudes = MappingProxyType(canonical)
        self._arrays: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def __repr__(self):
        return f"<FockState (modes={self.modes}, cap={self.cap}, terms={len(self)})>"

    def __len__(self) -> int:
        return len(self._amplitudes)

    def __iter__(self) -> Iterator[Occupation]:
        return iter(self._amplitudes)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, FockState):
            return NotImplemented

        return (
            self.modes == other.modes
            and self.cap == other.cap
            and dict(self._amplitudes) == dict(other._amplitudes)
        )

    @property
    def amplitudes(self) -> Mapping[Occupation, complex]:
        """A read-only view of the canonical amplitudes."""

        return self._amplitudes

    def items(self):
        """Iterates over ``(occupation, amplitude)`` pairs in canonical order."""

        return self._amplitudes.items()

    def amplitude(self, occupation: Sequence[int]) -> complex:
        """Returns the amplitude of an occupation (zero if not stored)."""

        return self._amplitudes.get(tuple(occupation), 0j)

    def norm(self) -> float:
        """Returns the squared norm of the state."""

        amplitudes = self._amplitudes.values()
        return float(sum(abs(amplitude) ** 2 for amplitude in amplitudes))

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Returns the occupations as a ``K x M`` integer array and the amplitudes.

        The arrays are computed once and shared; they are read-only.
        """

        if self._arrays is None:
            if len(self) > 0:
                occupations = np.array(list(self._amplitudes), dtype=int)
            else:
                occupations = np.zeros((0, self.modes), dtype=int)
            amplitudes = np.array(list(self._amplitudes.values()), dtype=complex)
            occupations.setflags(write=False)
            amplitudes.setflags(write=False)
            self._arrays = (occupations, amplitudes)

        return self._arrays

    def mean_photons(self) -> np.ndarray:
        """Returns ``<n_j>`` for every mode."""

        occupations, amplitudes = self.arrays()
        return np.abs(amplitudes) ** 2 @ occupations

    def isclose(self, other: FockState, atol: float = 1e-10) -> bool:
        """Compares two states amplitude by amplitude (no global phase freedom)."""

        if self.modes != other.modes:
            return False

        keys = set(self._amplitudes) | set(other._amplitudes)
        return all(
            abs(self.amplitude(key) - other.amplitude(key)) <= atol for key in keys
        )

    @classmethod
    def from_occupation(cls, occupation: Sequence[int], cap: Optional[int] = None):
        """Builds the number state with the given occupation."""

        occupation = tuple(int(count) for count in occupation)
        cap = sum(occupation) if cap is None else cap

        return cls(len(occupation), cap, {occupation: 1.0})

    def to_dict(self) -> Dict[str, Any]:
        """Serialises the state as ``{"modes", "cap", "amps"}``."""

        return {
            "modes": self.modes,
            "cap": self.cap,
            "amps": [
                [list(occupation), amplitude.real, amplitude.imag]
                for occupation, amplitude in self._amplitudes.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> FockState:
        """Loads a state serialised with `.to_dict`."""

        try:
            amplitudes = {
                tuple(occupation): complex(real, imag)
                for occupation, real, imag in data["amps"]
            }
            return cls(int(data["modes"]), int(data["cap"]), amplitudes)
        except (KeyError, TypeError) as err:
            raise ValidationError(f"Invalid serialised Fock state: {err}") from err


@dataclass(frozen=True, eq=False)
class SingleModeState:
    """A normalised single-mode state on ``|0>, ..., |cutoff>``.

    Parameters
    ----------
    amplitudes
        Complex coefficients on the number basis.
    discarded_norm
        Squared norm of the tail that was dropped when the state was truncated.
    """

    amplitudes: np.ndarray
    discarded_norm: float = 0.0

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).ravel()

        if amplitudes.size == 0:
            raise ValidationError("A single-mode state needs at least one amplitude.")

        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValidationError(f"State is not normalized (norm={norm:.16g}).")

        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def cutoff(self) -> int:
        """The largest photon number represented."""

        return self.amplitudes.size - 1

    @property
    def photon_number(self) -> Optional[int]:
        """The photon number if this is a number state, otherwise `None`."""

        support = np.flatnonzero(np.abs(self.amplitudes) >= PRUNE_THRESHOLD)
        if support.size == 1:
            return int(support[0])

        return None

    @property
    def max_photons(self) -> int:
        """The largest photon number with a non-negligible amplitude."""

        support = np.flatnonzero(np.abs(self.amplitudes) >= PRUNE_THRESHOLD)
        return int(support[-1]) if support.size > 0 else 0

    @classmethod
    def fock(cls, n: int, cutoff: Optional[int] = None) -> SingleModeState:
        """Returns the number state ``|n>``."""

        if n < 0:
            raise ValidationError("Photon number cannot be negative.")

        cutoff = n if cutoff is None else cutoff
        if cutoff < n:
            raise ValidationError(f"Cutoff {cutoff} cannot hold |{n}>.")

        amplitudes = np.zeros(cutoff + 1, dtype=complex)
        amplitudes[n] = 1.0

        return cls(amplitudes)

    @classmethod
    def vacuum(cls) -> SingleModeState:
        """Returns ``|0>``."""

        return cls.fock(0)

    @classmethod
    def from_amplitudes(
        cls,
        amplitudes: Sequence[complex],
        normalize: bool = True,
    ) -> SingleModeState:
        """Builds a state from raw amplitudes, optionally renormalising them."""

        amplitudes = np.array(amplitudes, dtype=complex).ravel()

        if normalize:
            norm = np.linalg.norm(amplitudes)
            if norm == 0:
                raise ValidationError("Cannot normalise an all-zero amplitude vector.")
            amplitudes = amplitudes / norm

        return cls(amplitudes)

    @classmethod
    def coherent(cls, alpha: complex, cutoff: int) -> SingleModeState:
        """Returns a coherent state truncated at ``cutoff`` and renormalised.

        The squared norm of the dropped tail is stored in ``discarded_norm``.
        """

        if cutoff < 0:
            raise ValidationError("Cutoff cannot be negative.")

        k = np.arange(cutoff + 1)
        amplitudes = (
            np.exp(-abs(alpha) ** 2 / 2.0)
            * np.power(complex(alpha), k)
            / np.sqrt(sp_factorial(k))
        )

        kept = float(np.vdot(amplitudes, amplitudes).real)
        discarded = max(0.0, 1.0 - kept)

        if discarded > NORMALIZATION_TOLERANCE:
            log.warning(
                f"Coherent state alpha={alpha} truncated at {cutoff}: "
                f"discarded norm {discarded:.3g}."
            )

        return cls(amplitudes / np.sqrt(kept), discarded_norm=discarded)

    @classmethod
    def random(cls, rng: np.random.Generator, cutoff: int) -> SingleModeState:
        """Draws a random pure state with complex Gaussian amplitudes."""

        amplitudes = rng.normal(size=cutoff + 1) + 1j * rng.normal(size=cutoff + 1)
        return cls.from_amplitudes(amplitudes)


@dataclass(frozen=True)
class MomentSet:
    """Single-mode moments of an input state.

    Attributes
    ----------
    alpha
        ``<a>``.
    nbar
        ``<a^dagger a>``.
    xi
        ``<a^2>``.
    beta
        ``<a^dagger a a>``.
    m
        ``<(a^dagger a)^2>``.
    """

    alpha: complex
    nbar: float
    xi: complex
    beta: complex
    m: float

    @property
    def v(self) -> float:
        """The photon-number variance ``m - nbar^2``."""

        return self.m - self.nbar**2

    @classmethod
    def fock(cls, n: int) -> MomentSet:
        """Moments of the number state ``|n>``."""

        return cls(0j, float(n), 0j, 0j, float(n * n))

    def validate(self, tolerance: float = NORMALIZATION_TOLERANCE) -> MomentSet:
        """Checks the Cauchy-Schwarz chain. Returns the instance for chaining."""

        m, nbar = self.m, self.nbar
        tolerance = tolerance * max(1.0, m)

        failures: List[str] = []
        if nbar < -tolerance:
            failures.append("nbar >= 0")
        if abs(self.alpha) ** 2 > nbar + tolerance:
            failures.append("|alpha|^2 <= nbar")
        if nbar > sqrt(max(m, 0.0)) + tolerance:
            failures.append("nbar <= sqrt(m)")
        if abs(self.xi) > sqrt(max(m - nbar, 0.0)) + tolerance:
            failures.append("|xi| <= sqrt(m - nbar)")
        if abs(self.beta) > sqrt(max(m * nbar, 0.0)) + tolerance:
            failures.append("|beta| <= sqrt(m nbar)")
        if self.v < -tolerance:
            failures.append("v >= 0")

        if failures:
            pretty = ", ".join(failures)
            raise ValidationError(f"Inconsistent moments {self}: {pretty}.")

        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": [self.alpha.real, self.alpha.imag],
            "nbar": self.nbar,
            "xi": [self.xi.real, self.xi.imag],
            "beta": [self.beta.real, self.beta.imag],
            "m": self.m,
            "v": self.v,
        }


def beam_splitter_matrix(transmissivity: float, phase: float) -> np.ndarray:
    """Returns the 2x2 mode matrix of a beam splitter.

    The convention is ``[[t, e^{-i phi} r], [-e^{i phi} r, t]]`` with
    ``t = sqrt(T)`` and ``r = sqrt(1 - T)``. Column ``k`` is the image of input
    mode ``k``. With ``T = 1/2`` and ``phi = 0``, ``|1,1>`` goes to
    ``(|2,0> - |0,2>)/sqrt(2)``.
    """

    if not 0.0 <= transmissivity <= 1.0:
        raise ValidationError(f"Transmissivity {transmissivity} is not in [0, 1].")

    t = sqrt(transmissivity)
    r = sqrt(1.0 - transmissivity)

    return np.array(
        [
            [t, np.exp(-1j * phase) * r],
            [-np.exp(1j * phase) * r, t],
        ],
        dtype=complex,
    )


def _two_mode_block(matrix: np.ndarray, photons: int) -> np.ndarray:
    """Fock-space block of a two-mode unitary in the ``photons`` sector.

    ``block[x, p]`` is the amplitude of ``|x, k-x>`` produced by ``|p, k-p>``.
    """

    k = photons
    block = np.zeros((k + 1, k + 1), dtype=complex)

    for p in range(k + 1):
        q = k - p
        scale = 1.0 / sqrt(factorial(p) * factorial(q))

        for x in range(p + 1):
            cx = comb(p, x) * matrix[0, 0] ** x * matrix[1, 0] ** (p - x)
            if cx == 0:
                continue

            for y in range(q + 1):
                cy = comb(q, y) * matrix[0, 1] ** y * matrix[1, 1] ** (q - y)
                if cy == 0:
                    continue

                out = x + y
                norm = sqrt(factorial(out) * factorial(k - out))
                block[out, p] += cx * cy * scale * norm

    return block


def apply_two_mode(
    state: FockState,
    modes: Tuple[int, int],
    matrix: np.ndarray,
) -> FockState:
    """Applies an arbitrary 2x2 mode unitary to the pair ``modes``.

    Every basis component keeps its total photon number, so the result lives
    in the same truncated space as the input.
    """

    i, j = modes
    _validate_mode(state.modes, i, j)

    if i == j:
        raise ValidationError("A two-mode gate needs two different modes.")

    blocks: Dict[int, np.ndarray] = {}
    output: Dict[Occupation, complex] = defaultdict(complex)

    for occupation, amplitude in state.items():
        p = occupation[i]
        k = p + occupation[j]

        if k == 0:
            output[occupation] += amplitude
            continue

        if k not in blocks:
            blocks[k] = _two_mode_block(matrix, k)

        column = blocks[k][:, p]
        target = list(occupation)

        for x in range(k + 1):
            coefficient = column[x]
            if coefficient == 0:
                continue
            target[i] = x
            target[j] = k - x
            output[tuple(target)] += coefficient * amplitude

    return FockState(state.modes, state.cap, output, state.discarded_norm)


def apply_beam_splitter(
    state: FockState,
    modes: Tuple[int, int],
    transmissivity: float,
    phase: float = 0.0,
) -> FockState:
    """Applies a beam splitter (see `.beam_splitter_matrix`) to two modes."""

    return apply_two_mode(state, modes, beam_splitter_matrix(transmissivity, phase))


def apply_phase_shift(state: FockState, mode: int, theta: float) -> FockState:
    """Multiplies each amplitude by ``exp(-i theta k_mode)``."""

    _validate_mode(state.modes, mode)

    output = {
        occupation: amplitude * np.exp(-1j * theta * occupation[mode])
        for occupation, amplitude in state.items()
    }

    return FockState(state.modes, state.cap, output, state.discarded_norm)


def apply_phases(
    state: FockState,
    modes: Sequence[int],
    thetas: Sequence[float],
) -> FockState:
    """Applies ``exp(-i sum_j theta_j n_j)`` over several modes at once."""

    if len(modes) != len(thetas):
        raise ValidationError("Need one phase per mode.")

    _validate_mode(state.modes, *modes)

    occupations, amplitudes = state.arrays()
    if len(state) == 0:
        return state

    exponent = occupations[:, list(modes)] @ np.asarray(thetas, dtype=float)
    shifted = amplitudes * np.exp(-1j * exponent)

    output = {tuple(row): value for row, value in zip(occupations.tolist(), shifted)}

    return FockState(state.modes, state.cap, output, state.discarded_norm)


def number_correlation(state: FockState, j: int, k: int) -> Tuple[float, float]:
    """Returns ``(<n_j n_k>, <n_j><n_k>)``."""

    _validate_mode(state.modes, j, k)

    occupations, amplitudes = state.arrays()
    probabilities = np.abs(amplitudes) ** 2

    nj = occupations[:, j]
    nk = occupations[:, k]

    correlation = float(probabilities @ (nj * nk))
    product = float((probabilities @ nj) * (probabilities @ nk))

    return correlation, product


def single_mode_moments(state: SingleModeState) -> MomentSet:
    """Computes ``(alpha, nbar, xi, beta, m)`` by exact ladder-operator sums."""

    c = state.amplitudes
    k = np.arange(c.size, dtype=float)
    probabilities = np.abs(c) ** 2

    nbar = float(probabilities @ k)
    m = float(probabilities @ k**2)

    # a|k> = sqrt(k)|k-1>
    lowered = np.sqrt(k[1:]) * c[1:]

    alpha = complex(np.sum(np.conj(c[:-1]) * lowered))
    beta = complex(np.sum(np.conj(c[:-1]) * (k[1:] - 1) * lowered))
    xi = complex(np.sum(np.conj(c[:-2]) * np.sqrt(k[2:] * (k[2:] - 1)) * c[2:]))

    return MomentSet(alpha, nbar, xi, beta, m)


def product_state(
    factors: Sequence[SingleModeState],
    cap: Optional[int] = None,
) -> FockState:
    """Builds the tensor product of single-mode states.

    Parameters
    ----------
    factors
        One `.SingleModeState` per mode.
    cap
        Total-photon cap of the result. Defaults to the smallest cap that holds
        the product.

    Returns
    -------
    :
        The product `.FockState`. Its ``discarded_norm`` is the squared norm lost
        by truncating the factors.

    Raises
    ------
    DimensionError
        If the product needs more photons than ``cap``.
    """

    if len(factors) == 0:
        raise ValidationError("A product state needs at least one factor.")

    required = sum(factor.max_photons for factor in factors)
    cap = required if cap is None else cap

    if required > cap:
        raise DimensionError("Product state exceeds the total-photon cap.", required)

    supports = [
        [
            (n, amplitude)
            for n, amplitude in enumerate(factor.amplitudes)
            if abs(amplitude) >= PRUNE_THRESHOLD
        ]
        for factor in factors
    ]

    amplitudes: Dict[Occupation, complex] = {}
    for combination in itertools.product(*supports):
        occupation = tuple(n for n, _ in combination)
        amplitudes[occupation] = complex(np.prod([amp for _, amp in combination]))

    kept = float(np.prod([1.0 - factor.discarded_norm for factor in factors]))

    return FockState(len(factors), cap, amplitudes, discarded_norm=1.0 - kept)


def fidelity_projector(state: FockState, reference: FockState) -> float:
    """Returns ``|<reference|state>|^2``, clipped to ``[0, 1]``."""

    if state.modes != reference.modes:
        raise ValidationError(
            f"Mode count mismatch ({state.modes} != {reference.modes})."
        )

    overlap = sum(
        np.conj(amplitude) * state.amplitude(occupation)
        for occupation, amplitude in reference.items()
    )

    return float(min(1.0, max(0.0, abs(overlap) ** 2)))

"""Exact transition probabilities between measurement contexts.

Everything here is a pure function of context bases: the squared-overlap
probability linking two modalities, the doubly stochastic matrix of all N²
such probabilities between two contexts, propagation of outcome
distributions, and the probability of returning to the starting outcome
after passing through an intermediate context.

Two return routes exist and they differ physically. If an outcome is
realized in the intermediate context, probabilities add over intermediate
outcomes (``irreversible_return``); if none is realized, amplitudes add
instead and the start outcome is recovered with certainty
(``reversible_return``).  ``interference_return`` exposes the amplitude sum
with adjustable per-path phases, which is what an interferometer dials.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InternalConsistencyError,
    InvalidDistribution,
)
from .hilbert import INPUT_TOL, Context, Modality


def as_probability(x: float, tol: float = INPUT_TOL) -> float:
    """Clamp ``x`` into [0,1] when within ``tol`` of a boundary.

    Excursions beyond ``tol`` are bugs, not rounding, and raise
    :class:`InternalConsistencyError`.
    """
    if x < 0.0:
        if x < -tol:
            raise InternalConsistencyError(f"probability {x!r} below 0 beyond tolerance")
        return 0.0
    if x > 1.0:
        if x > 1.0 + tol:
            raise InternalConsistencyError(f"probability {x!r} above 1 beyond tolerance")
        return 1.0
    return float(x)


def clamp_probabilities(arr: np.ndarray, tol: float = INPUT_TOL) -> np.ndarray:
    """Vector form of :func:`as_probability`."""
    arr = np.asarray(arr, dtype=float)
    if float(np.min(arr)) < -tol or float(np.max(arr)) > 1.0 + tol:
        raise InternalConsistencyError("probabilities outside [0,1] beyond tolerance")
    return np.clip(arr, 0.0, 1.0)


def uniform_distribution(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def point_mass(n: int, index: int) -> np.ndarray:
    if not 0 <= index < n:
        raise IndexOutOfRange(f"index {index} not in [0, {n})")
    dist = np.zeros(n)
    dist[index] = 1.0
    return dist


def validate_distribution(dist: np.ndarray, tol: float = INPUT_TOL) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 1:
        raise InvalidDistribution(f"distribution must be a vector, got shape {dist.shape}")
    if float(np.min(dist)) < -tol or float(np.max(dist)) > 1.0 + tol:
        raise InvalidDistribution("weights outside [0, 1]")
    total = float(np.sum(dist))
    if abs(total - 1.0) > tol:
        raise InvalidDistribution(f"weights sum to {total!r}, not 1")
    return dist


def born_probability(a: Modality, b: Modality) -> float:
    """Probability of finding modality ``b`` starting from modality ``a``.

    Tr(P_a P_b) = |⟨a|b⟩|², symmetric in its arguments exactly (the squared
    modulus is insensitive to conjugation).
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims differ: {a.dim} vs {b.dim}")
    amp = np.vdot(a.vector, b.vector)
    return as_probability(amp.real * amp.real + amp.imag * amp.imag)


def transition_matrix(frm: Context, to: Context) -> np.ndarray:
    """All N² outcome-to-outcome probabilities between two contexts.

    Entry (j, i) is the probability of outcome j of ``to`` given outcome i
    of ``frm``.  Entries are squared moduli of a unitary's entries, so every
    row and every column sums to 1 (doubly stochastic).
    """
    if frm.dim != to.dim:
        raise DimensionMismatch(f"dims differ: {frm.dim} vs {to.dim}")
    amps = to.basis.conj().T @ frm.basis
    return clamp_probabilities(amps.real**2 + amps.imag**2)


def propagate(dist: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Push an outcome distribution through a transition matrix: p'_j = Σ_i t_ji p_i."""
    dist = validate_distribution(dist)
    t = np.asarray(t, dtype=float)
    if t.shape != (dist.size, dist.size):
        raise DimensionMismatch(f"matrix shape {t.shape} does not match dim {dist.size}")
    return clamp_probabilities(t @ dist)


def return_path_amplitudes(initial: Modality, intermediate: Context, final_index: int) -> np.ndarray:
    """Per-path amplitude products ⟨u_k|v_j⟩⟨v_j|u_i⟩ for all intermediate j."""
    ctx = initial.context
    if ctx.dim != intermediate.dim:
        raise DimensionMismatch(f"dims differ: {ctx.dim} vs {intermediate.dim}")
    if not 0 <= final_index < ctx.dim:
        raise IndexOutOfRange(f"final index {final_index} not in [0, {ctx.dim})")
    # ⟨u_k|v_j⟩ and ⟨v_j|u_i⟩ from the two overlap matrices
    u_k = ctx.basis[:, final_index]
    u_i = initial.vector
    to_final = intermediate.basis.conj().T @ u_i  # ⟨v_j|u_i⟩
    from_final = u_k.conj() @ intermediate.basis  # ⟨u_k|v_j⟩
    return from_final * to_final


def irreversible_return(initial: Modality, intermediate: Context, final_index: int) -> float:
    """Return probability when an outcome is realized in the intermediate context.

    Probabilities add over the intermediate outcomes:
    Σ_j |⟨u_k|v_j⟩|² |⟨v_j|u_i⟩|².
    """
    ctx = initial.context
    if ctx.dim != intermediate.dim:
        raise DimensionMismatch(f"dims differ: {ctx.dim} vs {intermediate.dim}")
    if not 0 <= final_index < ctx.dim:
        raise IndexOutOfRange(f"final index {final_index} not in [0, {ctx.dim})")
    u_k = ctx.basis[:, final_index]
    u_i = initial.vector
    to_mid = intermediate.basis.conj().T @ u_i
    from_mid = intermediate.basis.conj().T @ u_k
    p_to = to_mid.real**2 + to_mid.imag**2
    p_from = from_mid.real**2 + from_mid.imag**2
    return as_probability(float(np.dot(p_from, p_to)))


def reversible_return(initial: Modality, intermediate: Context, final_index: int) -> float:
    """Return probability when no intermediate outcome is realized.

    Amplitudes add over the intermediate outcomes, |Σ_j ⟨u_k|v_j⟩⟨v_j|u_i⟩|²;
    by the closure relation this is δ_{k,i}, but the sum is evaluated
    numerically rather than asserted, so the identity is a tested consequence.
    """
    amp = np.sum(return_path_amplitudes(initial, intermediate, final_index))
    return as_probability(amp.real * amp.real + amp.imag * amp.imag)


def interference_return(
    initial: Modality,
    intermediate: Context,
    phases: np.ndarray,
    final_index: int,
) -> float:
    """Amplitude-summed return probability with a phase dialed onto each path.

    |Σ_j e^{iφ_j} ⟨u_k|v_j⟩⟨v_j|u_i⟩|²; all phases zero reduces to
    :func:`reversible_return`.
    """
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (intermediate.dim,):
        raise DimensionMismatch(
            f"need {intermediate.dim} phases, got shape {phases.shape}"
        )
    amps = return_path_amplitudes(initial, intermediate, final_index)
    amp = np.sum(np.exp(1j * phases) * amps)
    return as_probability(amp.real * amp.real + amp.imag * amp.imag)

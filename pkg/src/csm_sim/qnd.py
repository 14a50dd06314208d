"""Indirect measurement through a meter, with tunable strength.

Instead of realizing an outcome in the intermediate (pointer) context
directly, the system is entangled with an auxiliary meter: branch ``j`` of
the pointer context gets tagged with a meter state ``|w_j⟩``.  Nothing
observable depends on the meter states themselves, only on their pairwise
overlaps ⟨w_j|w_j'⟩, collected in a Hermitian positive-semidefinite matrix
with unit diagonal.  That overlap matrix is the strength dial: identity
overlaps reproduce a projective measurement of the pointer context,
all-ones overlaps leave the system untouched, and everything in between is
a weak measurement.

Conventions: meter states are stored as the columns of an M×N complex
matrix, with M the meter dimension; composite amplitudes are indexed
``j * M + l`` for system branch ``j`` (pointer basis) and meter component
``l``; composite and reduced density matrices use pointer-basis coordinates
on the system factor.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InternalConsistencyError,
    InvalidGramMatrix,
    InvalidMeterStates,
    MeterNotOrthogonal,
    NotPositiveSemidefinite,
    StrengthOutOfRange,
)
from .hilbert import INPUT_TOL, Context, Modality
from .measurement import as_probability, clamp_probabilities, return_path_amplitudes

# Eigenvalues below this are treated as zero when realizing meter states.
RANK_TOL = 1e-10
# Gram reproduction / orthogonality tolerance for realized meter states.
METER_TOL = 1e-8


def gram_uniform(n: int, g: float) -> np.ndarray:
    """Overlap matrix with unit diagonal and constant off-diagonal ``g``.

    ``g = 0`` is the projective-measurement limit (orthogonal meter states),
    ``g = 1`` the no-measurement limit (indistinguishable meter states); the
    matrix is positive semidefinite on the whole range.
    """
    if not 0.0 <= g <= 1.0:
        raise StrengthOutOfRange(f"overlap strength g={g!r} outside [0, 1]")
    gram = np.full((n, n), complex(g))
    np.fill_diagonal(gram, 1.0)
    return gram


def validate_gram(gram: np.ndarray, tol: float = INPUT_TOL) -> np.ndarray:
    """Check Hermiticity, unit diagonal and positive semidefiniteness."""
    gram = np.asarray(gram, dtype=complex)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise InvalidGramMatrix(f"overlap matrix must be square, got shape {gram.shape}")
    if float(np.max(np.abs(gram - gram.conj().T))) > tol:
        raise InvalidGramMatrix("overlap matrix is not Hermitian")
    if float(np.max(np.abs(np.diagonal(gram) - 1.0))) > tol:
        raise InvalidGramMatrix("overlap matrix diagonal is not 1")
    smallest = float(np.linalg.eigvalsh(gram)[0])
    if smallest < -RANK_TOL:
        raise NotPositiveSemidefinite(f"smallest eigenvalue {smallest:.3e} below -{RANK_TOL:.0e}")
    return gram


def meter_states_from_gram(gram: np.ndarray) -> np.ndarray:
    """Realize unit vectors whose pairwise overlaps reproduce ``gram``.

    Returns an M×N matrix whose column ``j`` is ``|w_j⟩``, with M the
    numerical rank of the overlap matrix (eigenvalues above ``RANK_TOL``).
    The construction is an eigendecomposition with eigenvalues sorted
    descending and each eigenvector's largest-magnitude component made real
    positive, so the output is deterministic given the input.
    """
    gram = validate_gram(gram)
    eigvals, eigvecs = np.linalg.eigh(gram)
    order = np.argsort(-eigvals, kind="stable")
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    keep = eigvals > RANK_TOL
    eigvals, eigvecs = eigvals[keep], eigvecs[:, keep]
    for a in range(eigvecs.shape[1]):
        pivot = int(np.argmax(np.abs(eigvecs[:, a])))
        phase = eigvecs[pivot, a] / abs(eigvecs[pivot, a])
        eigvecs[:, a] /= phase
    states = np.sqrt(eigvals)[:, None] * eigvecs.conj().T
    residual = float(np.max(np.abs(states.conj().T @ states - gram)))
    if residual > METER_TOL:
        raise InternalConsistencyError(
            f"realized meter states reproduce overlaps only to {residual:.3e}"
        )
    return states


def validate_meter_states(meters: np.ndarray) -> np.ndarray:
    meters = np.asarray(meters, dtype=complex)
    if meters.ndim != 2:
        raise InvalidMeterStates(f"meter states must form a matrix, got shape {meters.shape}")
    norms = np.linalg.norm(meters, axis=0)
    if float(np.max(np.abs(norms - 1.0))) > METER_TOL:
        raise InvalidMeterStates("meter states must have unit norm")
    return meters


def entangle(initial: Modality, pointer: Context, meters: np.ndarray) -> np.ndarray:
    """Composite state after the system-meter coupling.

    Branch ``j`` of the pointer context carries amplitude ⟨v_j|u_i⟩ and tags
    the meter with ``|w_j⟩``; the returned vector holds amplitude
    ⟨v_j|u_i⟩ · (w_j)_l at index ``j * M + l`` and has unit norm.
    """
    meters = validate_meter_states(meters)
    m_dim, n = meters.shape
    if pointer.dim != n:
        raise DimensionMismatch(f"pointer dim {pointer.dim} vs {n} meter states")
    if initial.dim != pointer.dim:
        raise DimensionMismatch(f"dims differ: {initial.dim} vs {pointer.dim}")
    branch = pointer.basis.conj().T @ initial.vector  # ⟨v_j|u_i⟩
    state = (branch[:, None] * meters.T).reshape(n * m_dim)
    norm_dev = abs(float(np.linalg.norm(state)) - 1.0)
    if norm_dev > INPUT_TOL:
        raise InternalConsistencyError(f"composite state norm off by {norm_dev:.3e}")
    return state


def meter_return_probability(
    initial: Modality, pointer: Context, gram: np.ndarray, final_index: int
) -> float:
    """Probability of outcome ``final_index`` back in the initial context after meter coupling.

    Quadratic form Σ_{j,j'} ⟨u_i|v_j⟩⟨v_j|u_k⟩ ⟨w_j|w_j'⟩ ⟨u_k|v_j'⟩⟨v_j'|u_i⟩
    in the per-path amplitudes; real up to rounding for a Hermitian overlap
    matrix.  Identity overlaps make it the probability-summed return, all-ones
    overlaps the amplitude-summed (certain) return.
    """
    gram = validate_gram(gram)
    if gram.shape[0] != pointer.dim:
        raise DimensionMismatch(
            f"overlap matrix dim {gram.shape[0]} vs pointer dim {pointer.dim}"
        )
    paths = return_path_amplitudes(initial, pointer, final_index)
    value = complex(np.vdot(paths, gram @ paths))
    if abs(value.imag) > INPUT_TOL:
        raise InternalConsistencyError(f"imaginary residue {value.imag!r} in return probability")
    return as_probability(value.real)


def composite_return_probability(
    state: np.ndarray, context: Context, pointer: Context, final_index: int
) -> float:
    """Return probability read off an explicit composite state.

    Expectation of (projector onto outcome ``final_index`` of ``context``) ⊗ 1
    in ``state``; the overlap-matrix route of
    :func:`meter_return_probability` must reproduce it.
    """
    state = np.asarray(state, dtype=complex)
    n = pointer.dim
    if context.dim != n:
        raise DimensionMismatch(f"dims differ: {context.dim} vs {n}")
    if not 0 <= final_index < n:
        raise IndexOutOfRange(f"final index {final_index} not in [0, {n})")
    if state.ndim != 1 or state.size % n != 0 or state.size == 0:
        raise DimensionMismatch(
            f"composite state of size {state.shape} not compatible with dim {n}"
        )
    overlaps = context.basis[:, final_index].conj() @ pointer.basis  # ⟨u_k|v_j⟩
    meter_components = overlaps @ state.reshape(n, state.size // n)
    return as_probability(float(np.sum(meter_components.real**2 + meter_components.imag**2)))


def post_measurement_state(
    initial: Modality, pointer: Context, meters: np.ndarray
) -> np.ndarray:
    """Composite density matrix after a completed (projective-limit) measurement.

    Σ_j |⟨v_j|u_i⟩|² |v_j⟩⟨v_j| ⊗ |w_j⟩⟨w_j|: one block per pointer branch,
    no cross-branch coherence.  Requires mutually orthogonal meter states,
    since only then is the measurement completed.
    """
    meters = validate_meter_states(meters)
    m_dim, n = meters.shape
    ortho_dev = float(np.max(np.abs(meters.conj().T @ meters - np.eye(n))))
    if ortho_dev > METER_TOL:
        raise MeterNotOrthogonal(f"meter overlap deviates from identity by {ortho_dev:.3e}")
    if pointer.dim != n or initial.dim != n:
        raise DimensionMismatch(f"dims differ: {initial.dim}, {pointer.dim}, {n}")
    branch = pointer.basis.conj().T @ initial.vector
    weights = branch.real**2 + branch.imag**2
    rho = np.zeros((n * m_dim, n * m_dim), dtype=complex)
    for j in range(n):
        w = meters[:, j]
        rho[j * m_dim : (j + 1) * m_dim, j * m_dim : (j + 1) * m_dim] = weights[j] * np.outer(
            w, w.conj()
        )
    return rho


def reduced_system_state(state: np.ndarray, gram: np.ndarray, pointer: Context) -> np.ndarray:
    """System state after tracing out the meter, in pointer-basis coordinates.

    For the entangled state this gives element (j, j') = c_j c̄_j' ⟨w_j'|w_j⟩:
    off-diagonal coherence survives exactly to the extent the meter states
    overlap.
    """
    state = np.asarray(state, dtype=complex)
    gram = validate_gram(gram)
    n = pointer.dim
    if gram.shape[0] != n:
        raise DimensionMismatch(f"overlap matrix dim {gram.shape[0]} vs pointer dim {n}")
    if state.ndim != 1 or state.size % n != 0 or state.size == 0:
        raise DimensionMismatch(
            f"composite state of size {state.shape} not compatible with dim {n}"
        )
    branches = state.reshape(n, state.size // n)
    return branches @ branches.conj().T


def meter_chain_reduced_state(
    initial: Modality, pointer: Context, gram: np.ndarray, m_count: int
) -> np.ndarray:
    """Reduced system state after coupling to a chain of ``m_count`` identical meters.

    Each meter in the chain multiplies the (j, j') coherence by ⟨w_j'|w_j⟩,
    so the off-diagonal scales with the m_count-th power of the overlap while
    the diagonal stays put; ``m_count = 0`` returns the pure pre-meter state.
    """
    if m_count < 0:
        raise ValueError(f"m_count must be >= 0, got {m_count}")
    gram = validate_gram(gram)
    if gram.shape[0] != pointer.dim:
        raise DimensionMismatch(
            f"overlap matrix dim {gram.shape[0]} vs pointer dim {pointer.dim}"
        )
    if initial.dim != pointer.dim:
        raise DimensionMismatch(f"dims differ: {initial.dim} vs {pointer.dim}")
    branch = pointer.basis.conj().T @ initial.vector
    # (⟨w_j'|w_j⟩)^m = conj(gram)[j, j']^m
    return np.outer(branch, branch.conj()) * gram.conj() ** m_count


def partial_trace_meter(rho: np.ndarray, n: int, m: int) -> np.ndarray:
    """Trace the meter factor out of an (n·m)×(n·m) composite density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (n * m, n * m):
        raise DimensionMismatch(f"matrix shape {rho.shape} not ({n * m}, {n * m})")
    return np.trace(rho.reshape(n, m, n, m), axis1=1, axis2=3)


def density_matrix_residuals(rho: np.ndarray) -> dict[str, float]:
    """Hermiticity, trace and positivity residuals of a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace = abs(complex(np.trace(rho)) - 1.0)
    smallest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return {"hermiticity": herm, "trace": float(trace), "negativity": max(0.0, -smallest)}


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr(ρ log ρ) in nats; eigenvalues within tolerance of zero contribute nothing."""
    eigvals = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    if float(eigvals[0]) < -INPUT_TOL:
        raise InternalConsistencyError(f"density matrix eigenvalue {eigvals[0]:.3e} < 0")
    probs = clamp_probabilities(eigvals)
    positive = probs[probs > 0.0]
    return float(-np.sum(positive * np.log(positive))) + 0.0

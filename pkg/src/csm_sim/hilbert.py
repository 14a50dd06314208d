"""Measurement contexts as orthonormal bases of a finite-dimensional complex space.

A context is an ordered orthonormal basis of C^N; column ``j`` of
``Context.basis`` is the vector attached to outcome ``j``.  A modality is one
outcome of one context, i.e. a (context, index) pair carrying a rank-one
projector.  Changes of context are unitary matrices mapping one basis onto
another, and they compose as a group.

Contexts compare by ``id``, not by matrix equality: whether two setups are
"the same context" is a protocol-level statement, so equality follows the
label chosen at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NonOrthonormalInput

# Validation tolerance for user-supplied matrices vs. objects the library
# builds itself; the latter must sit well below the former.
INPUT_TOL = 1e-10
GENERATED_TOL = 1e-12


def orthonormality_residual(basis: np.ndarray) -> float:
    """Max-norm deviation of B†B from the identity."""
    basis = np.asarray(basis, dtype=complex)
    gram = basis.conj().T @ basis
    return float(np.max(np.abs(gram - np.eye(basis.shape[1]))))


@dataclass(frozen=True, eq=False)
class Context:
    """An ordered orthonormal basis; column ``basis[:, j]`` is outcome ``j``'s vector."""

    id: str
    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=complex)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise NonOrthonormalInput(f"basis must be square, got shape {basis.shape}")
        if basis.shape[0] < 2:
            raise DimensionMismatch(f"context dimension must be >= 2, got {basis.shape[0]}")
        residual = orthonormality_residual(basis)
        if residual > INPUT_TOL:
            raise NonOrthonormalInput(
                f"columns not orthonormal: residual {residual:.3e} exceeds {INPUT_TOL:.0e}"
            )
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def vector(self, index: int) -> np.ndarray:
        """Basis vector of outcome ``index``."""
        if not 0 <= index < self.dim:
            raise IndexOutOfRange(f"index {index} not in [0, {self.dim})")
        return self.basis[:, index]

    def modality(self, index: int) -> "Modality":
        return Modality(self, index)

    def projector(self, index: int) -> np.ndarray:
        return projector(self.modality(index))

    # Identity is the label, not the matrix: two contexts with equal bases but
    # different ids are distinct protocol steps.
    def __eq__(self, other) -> bool:
        return isinstance(other, Context) and self.id == other.id

    def __hash__(self) -> int:
        return hash(self.id)

    def __repr__(self) -> str:
        return f"Context(id={self.id!r}, dim={self.dim})"


@dataclass(frozen=True)
class Modality:
    """One certain, repeatable outcome of one context."""

    context: Context
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.context.dim:
            raise IndexOutOfRange(
                f"modality index {self.index} not in [0, {self.context.dim})"
            )

    @property
    def dim(self) -> int:
        return self.context.dim

    @property
    def vector(self) -> np.ndarray:
        return self.context.basis[:, self.index]


@dataclass(frozen=True)
class ContextSpec:
    """Declarative recipe for a context, as it appears in scenario files.

    ``kind`` is one of ``computational``, ``fourier``, ``rotation``, ``haar``
    or ``explicit``; ``theta`` (radians), ``seed`` and ``matrix`` apply to the
    kinds that need them.
    """

    kind: str
    dim: int
    theta: float | None = None
    seed: int | None = None
    matrix: np.ndarray | None = None


def computational_context(dim: int, id: str | None = None) -> Context:
    """Standard basis of C^dim."""
    return Context(id or f"computational:{dim}", np.eye(dim, dtype=complex))


def fourier_context(dim: int, id: str | None = None) -> Context:
    """Discrete-Fourier basis, column j has entries exp(2πi·k·j/dim)/√dim."""
    k = np.arange(dim)
    basis = np.exp(2j * np.pi * np.outer(k, k) / dim) / np.sqrt(dim)
    return Context(id or f"fourier:{dim}", basis)


def rotation_context(theta: float, id: str | None = None) -> Context:
    """Two-dimensional basis tilted by theta.

    Column 0 is (cos θ/2, sin θ/2), column 1 its orthogonal complement, so
    transition probabilities against the computational basis are cos²(θ/2)
    and sin²(θ/2).
    """
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    basis = np.array([[c, -s], [s, c]], dtype=complex)
    return Context(id or f"rotation:{float(theta)!r}", basis)


def haar_context(dim: int, seed: int, id: str | None = None) -> Context:
    """Haar-random basis; bit-identical for identical (dim, seed)."""
    return Context(id or f"haar:{dim}:{seed}", haar_random_unitary(seed, dim))


def explicit_context(matrix: np.ndarray, id: str | None = None) -> Context:
    """Context from a user-supplied orthonormal matrix (validated)."""
    return Context(id or "explicit", np.asarray(matrix, dtype=complex))


def build_context(spec: ContextSpec, id: str | None = None) -> Context:
    """Construct the context a :class:`ContextSpec` describes.

    Construction is deterministic given the spec, including the seed of the
    ``haar`` kind.

    Raises
    ------
    DimensionMismatch
        ``rotation`` requested with dim != 2, or dim < 2.
    NonOrthonormalInput
        ``explicit`` matrix fails the orthonormality tolerance.
    """
    if spec.dim < 2:
        raise DimensionMismatch(f"context dimension must be >= 2, got {spec.dim}")
    if spec.kind == "computational":
        return computational_context(spec.dim, id)
    if spec.kind == "fourier":
        return fourier_context(spec.dim, id)
    if spec.kind == "rotation":
        if spec.dim != 2:
            raise DimensionMismatch(f"rotation contexts require dim 2, got {spec.dim}")
        if spec.theta is None:
            raise ValueError("rotation spec needs theta")
        return rotation_context(spec.theta, id)
    if spec.kind == "haar":
        if spec.seed is None:
            raise ValueError("haar spec needs a seed")
        return haar_context(spec.dim, spec.seed, id)
    if spec.kind == "explicit":
        if spec.matrix is None:
            raise ValueError("explicit spec needs a matrix")
        matrix = np.asarray(spec.matrix, dtype=complex)
        if matrix.shape != (spec.dim, spec.dim):
            raise DimensionMismatch(
                f"explicit matrix shape {matrix.shape} does not match dim {spec.dim}"
            )
        return explicit_context(matrix, id)
    raise ValueError(f"unknown context kind {spec.kind!r}")


def projector(m: Modality) -> np.ndarray:
    """Rank-one projector |u⟩⟨u| of a modality: Hermitian, idempotent, trace 1."""
    v = m.vector
    return np.outer(v, v.conj())


def context_change_unitary(frm: Context, to: Context) -> np.ndarray:
    """Unitary U mapping each basis vector of ``frm`` onto the same-index vector of ``to``.

    U = Σ_i |v_i⟩⟨u_i|, so U maps the projector set of ``frm`` onto that of
    ``to``; composing A→B with B→C gives A→C and every change has an inverse.
    """
    if frm.dim != to.dim:
        raise DimensionMismatch(f"dims differ: {frm.dim} vs {to.dim}")
    return to.basis @ frm.basis.conj().T


def haar_random_unitary(seed: int, dim: int) -> np.ndarray:
    """Haar-distributed random unitary, deterministic per seed.

    Draws a dim×dim matrix of independent standard complex Gaussians from a
    PCG64 generator and orthonormalizes it by QR, rescaling so that R's
    diagonal is real positive; that phase convention makes the distribution
    exactly Haar and the output reproducible.

    Parameters
    ----------
    seed : int
        PRNG seed; identical seeds give bit-identical matrices.
    dim : int
        Matrix dimension, >= 2.
    """
    if dim < 2:
        raise DimensionMismatch(f"dim must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))

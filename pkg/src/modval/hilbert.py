"""Dense complex linear algebra over small tensor-product Hilbert spaces.

Conventions shared by every module in the package:

* A space is an ordered tuple of factor dimensions ``dims``.
* Basis order is lexicographic with the FIRST factor most significant,
  i.e. index = ((i0*d1 + i1)*d2 + i2)*... for factor indices (i0, i1, ...).
* States and operators are immutable after construction; every operation
  is a pure function returning fresh values, so concurrent use is safe.

Dimensions are capped at a total of 4096 (desk-scale protocols only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_TOTAL_DIM = 4096


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerance policy, one record for the whole package.

    structural: idempotence / unitarity / normalization checks.
    algebraic: algebraically exact identities compared in floating point.
    orthogonal: smallest postselection overlap |<phi|psi>| still accepted.
    """

    structural: float = 1e-10
    algebraic: float = 1e-12
    orthogonal: float = 1e-6


DEFAULT_TOL = Tolerances()


def _product(dims) -> int:
    return int(math.prod(dims))


def _checked_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    total = _product(dims)
    if total > MAX_TOTAL_DIM:
        raise ValueError(
            f"total dimension {total} exceeds the supported cap of {MAX_TOTAL_DIM}"
        )
    return dims


def _frozen_complex(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PureState:
    """State vector with explicit tensor-factor dimensions."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self):
        dims = _checked_dims(self.dims)
        amps = _frozen_complex(self.amps, (_product(dims),))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class LinearOperator:
    """Square complex matrix acting on a declared factor structure."""

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = _checked_dims(self.dims)
        total = _product(dims)
        mat = np.asarray(self.mat)
        if mat.shape != (total, total):
            raise ValueError(
                f"matrix shape {mat.shape} does not match dims {dims} (side {total})"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", _frozen_complex(mat, (total, total)))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def basis_state(dims, index: int) -> PureState:
    """Computational basis vector |index> on the given factor structure."""
    dims = _checked_dims(dims)
    total = _product(dims)
    if not 0 <= index < total:
        raise ValueError(f"basis index {index} out of range for dimension {total}")
    amps = np.zeros(total, dtype=np.complex128)
    amps[index] = 1.0
    return PureState(dims, amps)


def identity(dims) -> LinearOperator:
    return LinearOperator(_checked_dims(dims), np.eye(_product(dims), dtype=np.complex128))


def tensor(a, b):
    """Tensor product of two states or two operators (Kronecker convention).

    The result's dims are the concatenation; lexicographic basis order makes
    this a plain ``np.kron`` on the amplitudes/matrices.
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(a.dims + b.dims, np.kron(a.amps, b.amps))
    if isinstance(a, LinearOperator) and isinstance(b, LinearOperator):
        return LinearOperator(a.dims + b.dims, np.kron(a.mat, b.mat))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def projector(dims, target, *, tol: Tolerances = DEFAULT_TOL) -> LinearOperator:
    """Rank-1 projector |v><v| from a basis index or a unit vector.

    A vector target must already be normalized (within the structural
    tolerance); a non-normalized vector is an error, not silently fixed.
    """
    dims = _checked_dims(dims)
    total = _product(dims)
    if isinstance(target, (int, np.integer)):
        vec = basis_state(dims, int(target)).amps
    else:
        vec = np.asarray(target.amps if isinstance(target, PureState) else target,
                         dtype=np.complex128).reshape(-1)
        if vec.size != total:
            raise ValueError(f"vector length {vec.size} does not match dims {dims}")
        if abs(np.linalg.norm(vec) - 1.0) > tol.structural:
            raise ValueError("projector target vector is not normalized")
    return LinearOperator(dims, np.outer(vec, vec.conj()))


def is_idempotent(op: LinearOperator, *, tol: float = DEFAULT_TOL.structural) -> bool:
    return bool(np.max(np.abs(op.mat @ op.mat - op.mat)) <= tol)


def exp_projector_phase(proj: LinearOperator, g: float,
                        *, tol: Tolerances = DEFAULT_TOL) -> LinearOperator:
    """exp(-i*g*P) for an idempotent P, via the closed form I + (e^{-ig}-1) P.

    Equals the dense matrix exponential of -i*g*P; unitary whenever P is
    Hermitian. Rejects non-idempotent input instead of silently computing
    something else.
    """
    if not is_idempotent(proj, tol=tol.structural):
        raise ValueError("exp_projector_phase requires an idempotent operator")
    phase = np.exp(-1j * float(g)) - 1.0
    mat = np.eye(proj.dim, dtype=np.complex128) + phase * proj.mat
    return LinearOperator(proj.dims, mat)


def _require_same_dims(a, b):
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")


def inner(a: PureState, b: PureState) -> complex:
    """Sesquilinear inner product <a|b>, conjugate-linear in the first slot."""
    _require_same_dims(a, b)
    return complex(np.vdot(a.amps, b.amps))


def apply(op: LinearOperator, state: PureState) -> PureState:
    _require_same_dims(op, state)
    return PureState(state.dims, op.mat @ state.amps)


def normalize(state: PureState) -> PureState:
    n = state.norm()
    if n < 1e-150:
        raise ValueError("cannot normalize a zero state")
    return PureState(state.dims, state.amps / n)


def partial_inner(phi: PureState, state: PureState) -> PureState:
    """Contract ``phi`` against the trailing factors of ``state``.

    Returns the (unnormalized) state left on the leading factors,
    (<phi| on trailing part) |state>; its squared norm is the probability
    of finding the trailing part in |phi>.
    """
    k = len(phi.dims)
    if k >= len(state.dims) or state.dims[-k:] != phi.dims:
        raise ValueError(
            f"trailing dims {state.dims} do not end with {phi.dims}"
        )
    lead = state.dims[:-k]
    block = state.amps.reshape(_product(lead), phi.dim)
    return PureState(lead, block @ phi.amps.conj())

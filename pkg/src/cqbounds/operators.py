"""Dense Hermitian operators, density matrices, and spectral calculus.

All types are immutable after construction and all operations are pure, so
values can be shared freely across threads.
"""

from __future__ import annotations

import numpy as np

from . import _linalg as la
from .config import EIG_CLIP_TOL, HERMITIAN_TOL, MAX_TOTAL_DIM, SUPPORT_TOL
from .errors import DomainError, ResourceCapError, ValidationError


class HermitianOperator:
    """A dense complex Hermitian matrix with subsystem-dimension metadata.

    Inputs may deviate from exact Hermiticity by at most 1e-10 in max norm
    and are symmetrized on construction.
    """

    __slots__ = ("entries", "subsystem_dims")

    def __init__(self, entries, subsystem_dims=None):
        arr = la.hermitize(entries, HERMITIAN_TOL)
        dim = arr.shape[0]
        if dim > MAX_TOTAL_DIM:
            raise ResourceCapError(
                f"dimension {dim} exceeds the configured cap {MAX_TOTAL_DIM}"
            )
        if subsystem_dims is None:
            subsystem_dims = (dim,)
        subsystem_dims = tuple(int(d) for d in subsystem_dims)
        if any(d <= 0 for d in subsystem_dims):
            raise ValidationError(f"subsystem dims must be positive, got {subsystem_dims}")
        if int(np.prod(subsystem_dims)) != dim:
            raise ValidationError(
                f"product of subsystem dims {subsystem_dims} != matrix dimension {dim}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "subsystem_dims", subsystem_dims)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def with_subsystems(self, subsystem_dims) -> "HermitianOperator":
        """Same matrix, reinterpreted with a new subsystem layout."""
        return HermitianOperator(self.entries, subsystem_dims)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim}, subsystems={self.subsystem_dims})"


class DensityMatrix:
    """A unit-trace PSD operator; eigenvalues in [-1e-10, 0) are clipped to 0."""

    __slots__ = ("op", "min_eig")

    def __init__(self, entries, subsystem_dims=None):
        if isinstance(entries, HermitianOperator):
            op = entries if subsystem_dims is None else entries.with_subsystems(subsystem_dims)
        else:
            op = HermitianOperator(entries, subsystem_dims)
        tr = la.trace_real(op.entries)
        if abs(tr - 1.0) > 1e-10:
            raise ValidationError(f"trace {tr!r} differs from 1 by more than 1e-10")
        w, v = np.linalg.eigh(op.entries)
        if w[0] < -EIG_CLIP_TOL:
            raise ValidationError(
                f"smallest eigenvalue {w[0]:.3e} below the -1e-10 clip tolerance"
            )
        if w[0] < 0.0:
            w = np.maximum(w, 0.0)
            op = HermitianOperator((v * w) @ v.conj().T, op.subsystem_dims)
            w_min = 0.0
        else:
            w_min = float(w[0])
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "min_eig", w_min)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def subsystem_dims(self):
        return self.op.subsystem_dims

    def with_subsystems(self, subsystem_dims) -> "DensityMatrix":
        return DensityMatrix(self.op.with_subsystems(subsystem_dims))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, subsystems={self.subsystem_dims})"


def _as_array(a) -> np.ndarray:
    return a.entries if isinstance(a, (HermitianOperator, DensityMatrix)) else np.asarray(a, dtype=complex)


def _as_dims(a):
    if isinstance(a, (HermitianOperator, DensityMatrix)):
        return a.subsystem_dims
    return (np.asarray(a).shape[0],)


def tensor(a, b) -> HermitianOperator:
    """Kronecker product; subsystem layouts concatenate."""
    return HermitianOperator(
        np.kron(_as_array(a), _as_array(b)), _as_dims(a) + _as_dims(b)
    )


def tensor_density(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(tensor(a, b))


def tensor_all(ops) -> HermitianOperator:
    """Kronecker product of a nonempty sequence of operators, left to right."""
    ops = list(ops)
    if not ops:
        raise DomainError("tensor_all needs at least one operator")
    out = _as_array(ops[0])
    dims = _as_dims(ops[0])
    for op in ops[1:]:
        out = np.kron(out, _as_array(op))
        dims = dims + _as_dims(op)
    return HermitianOperator(out, dims)


def partial_trace(a, keep) -> HermitianOperator:
    """Trace out every subsystem not listed in ``keep`` (indices, any order)."""
    keep = [keep] if isinstance(keep, int) else list(keep)
    dims = _as_dims(a)
    reduced = la.ptrace(_as_array(a), dims, keep)
    kept_dims = [dims[k] for k in sorted(set(keep))]
    return HermitianOperator(reduced, kept_dims)


def eig_hermitian(a):
    """Ascending eigenvalues and a unitary of eigenvectors, deterministically.

    Degenerate clusters (gap < 1e-10) are ordered lexicographically by
    eigenvector entries, with each column's phase fixed, so repeated calls
    agree bit for bit.
    """
    return la.eigh_deterministic(_as_array(a))


_FUNCTION_NAMES = ("log", "exp", "power", "abs")


def matrix_function(a, name: str, exponent: float | None = None,
                    support_restricted: bool = False) -> HermitianOperator:
    """Spectral calculus: apply log, exp, power(r), or abs to the eigenvalues.

    ``log`` requires eigenvalues above the support threshold 1e-12 unless
    ``support_restricted`` is set, in which case near-null directions
    contribute 0 to the spectral sum.
    """
    arr = _as_array(a)
    dims = _as_dims(a)
    if name == "log":
        out = la.logm_psd(arr, restricted=support_restricted)
    elif name == "exp":
        out = la.expm_herm(arr)
    elif name == "abs":
        out = la.absm_herm(arr)
    elif name == "power":
        if exponent is None:
            raise DomainError("power requires an exponent")
        out = la.powm_psd(arr, float(exponent), restricted=support_restricted or exponent >= 0)
    else:
        raise DomainError(f"unknown matrix function {name!r}; expected one of {_FUNCTION_NAMES}")
    return HermitianOperator(out, dims)


def random_density(dim: int, seed: int, min_eig_floor: float = 0.0) -> DensityMatrix:
    """Seeded full-rank density matrix with smallest eigenvalue >= the floor."""
    if dim < 1:
        raise DomainError("dimension must be positive")
    if not 0.0 <= min_eig_floor < 1.0 / dim:
        raise DomainError(
            f"min_eig_floor must lie in [0, 1/dim={1.0 / dim!r}); got {min_eig_floor!r}"
        )
    rng = np.random.default_rng(seed)
    if dim == 1:
        return DensityMatrix(np.array([[1.0 + 0j]]))
    probs = rng.dirichlet(np.ones(dim))
    lam = min_eig_floor + (1.0 - dim * min_eig_floor) * probs
    u = _random_unitary(dim, rng)
    return DensityMatrix((u * lam) @ u.conj().T)


def random_hermitian(dim: int, seed: int, scale: float = 1.0) -> HermitianOperator:
    """Seeded GUE-style Hermitian matrix."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator(scale * (g + g.conj().T) / 2.0)


def random_psd(dim: int, seed: int, min_eig_floor: float = 0.0, scale: float = 1.0) -> HermitianOperator:
    """Seeded PSD matrix W W^dagger / dim (+ floor), unnormalized."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = scale * (g @ g.conj().T) / dim + min_eig_floor * np.eye(dim)
    return HermitianOperator(mat)


def _random_unitary(dim: int, rng) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # fix the phase ambiguity of QR so the result is a deterministic Haar draw
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_isometry(dim_in: int, dim_out: int, seed: int) -> np.ndarray:
    """Seeded isometry V with V^dagger V = Id on the input space."""
    if dim_out < dim_in:
        raise DomainError("an isometry needs dim_out >= dim_in")
    rng = np.random.default_rng(seed)
    return _random_unitary(dim_out, rng)[:, :dim_in]


def random_channel_kraus(dim_in: int, dim_out: int, dim_env: int, seed: int):
    """Kraus operators of a seeded channel: a random isometry into
    output x environment followed by tracing out the environment."""
    v = random_isometry(dim_in, dim_out * dim_env, seed)
    return [v[i * dim_out : (i + 1) * dim_out, :] for i in range(dim_env)]


def apply_kraus(rho, kraus) -> np.ndarray:
    """sum_i K_i rho K_i^dagger on raw arrays."""
    arr = _as_array(rho)
    return sum(k @ arr @ k.conj().T for k in kraus)


def support_tolerance() -> float:
    return SUPPORT_TOL

"""Dense complex linear algebra for finite-dimensional quantum operators.

Everything operates on plain ``numpy.ndarray`` matrices (complex, row-major).
Storage is dense throughout; a global dimension cap guards against tensor
powers silently blowing up, since the intended workloads are small channels
(d <= 4) and at most three copies.

All functions are pure; none mutates its arguments.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, DomainError, ResourceError

#: Largest operator dimension the dense routines accept.
MAX_DIM = 256

#: Eigenvalues in [-EIG_CLIP, 0] are clamped to 0 before applying scalar
#: functions; solver output is PSD only up to this kind of round-off.
EIG_CLIP = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex ndarray without copying when possible."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of ndim {m.ndim}")
    return m


def check_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m.shape[0]


def check_dim_cap(d: int) -> None:
    if d > MAX_DIM:
        raise ResourceError(f"operator dimension {d} exceeds the cap {MAX_DIM}")


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def hermitianize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (m + m^dagger) / 2."""
    return (m + m.conj().T) / 2


class HermitianEig(NamedTuple):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def herm_eig(h: np.ndarray) -> HermitianEig:
    """Eigendecomposition of ``h`` after symmetrizing (h + h^dagger)/2.

    Eigenvalues come back ascending; eigenvector columns are orthonormal.
    """
    h = as_matrix(h)
    d = check_square(h)
    check_dim_cap(d)
    w, v = np.linalg.eigh(hermitianize(h))
    return HermitianEig(w, v)


def mat_func(h: np.ndarray, f: Callable[[np.ndarray], np.ndarray], name: str = "f") -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Eigenvalues in ``[-EIG_CLIP, 0]`` are clamped to 0 first.  If ``f``
    produces a non-finite value on any (clamped) eigenvalue, a
    :class:`DomainError` naming that eigenvalue is raised.
    """
    w, v = herm_eig(h)
    w = np.where((w > -EIG_CLIP) & (w < 0.0), 0.0, w)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=complex)
    bad = ~np.isfinite(fw)
    if bad.any():
        raise DomainError(f"{name} undefined at eigenvalue {w[bad][0]!r}")
    return (v * fw) @ v.conj().T


def sqrtm_psd(h: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix."""
    return mat_func(h, np.sqrt, name="sqrt")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; checks the result against the dimension cap."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.ndim == 2 and b.ndim == 2:
        check_dim_cap(a.shape[0] * b.shape[0])
    return np.kron(a, b)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of an arbitrary list of factors."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = kron(out, m)
    return out


def _subsystem_view(m: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    dims = list(dims)
    d = int(np.prod(dims))
    m = as_matrix(m)
    if m.shape != (d, d):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
    return m.reshape(dims + dims)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` are the tensor-factor dimensions of a square operator on their
    product space; ``keep`` holds the (0-based) indices of the factors that
    survive, in ascending order of the returned factor layout.
    """
    dims = list(dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if keep and (keep[0] < 0 or keep[-1] >= n):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    t = _subsystem_view(m, dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise ResourceError(f"too many subsystems ({n})")
    row = [letters[i] for i in range(n)]
    col = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    res = np.einsum("".join(row + col) + "->" + "".join(out), t)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(d_keep, d_keep)


def permute_systems(m: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``i`` is old factor ``perm[i]``."""
    dims = list(dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"perm {perm} is not a permutation of {n} subsystems")
    t = _subsystem_view(m, dims)
    t = t.transpose(perm + [p + n for p in perm])
    d = int(np.prod(dims))
    return t.reshape(d, d)


def tensor_power_bipartite(m: np.ndarray, d_a: int, d_b: int, n: int) -> np.ndarray:
    """n-th tensor power of an operator on A x B, regrouped as A^n x B^n.

    The plain power lives on (A B)(A B)...; the copies are permuted so that
    all A factors come first, which is the bipartition the smoothing SDP pins.
    """
    out = np.asarray(m, dtype=complex)
    for _ in range(n - 1):
        out = kron(out, m)
    dims = [d_a, d_b] * n
    perm = [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]
    return permute_systems(out, dims, perm)


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalized maximally entangled vector sum_i |ii> on C^d x C^d."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0
    return v


def hs_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt inner product Re tr(a^dagger b) of Hermitian operands."""
    return float(np.real(np.sum(a.conj() * b)))

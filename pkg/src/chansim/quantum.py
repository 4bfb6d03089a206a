"""States, purifications, channels, and entanglement-assisted protocols.

Conventions used throughout the package:

* the maximally entangled vector |gamma> = sum_i |ii> is *unnormalized*, so
  the canonical purification (sqrt(rho) (x) I)|gamma> has unit norm and the
  Choi matrix J = (id (x) N)(|gamma><gamma|) satisfies tr J = d_in;
* joint input-output states live on A' (x) B with A' the reference copy of
  the input system;
* a protocol's systems are ordered (A, K, K'): the measurement acts on
  A (x) K', the decoders on K.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DimensionError, InvalidProtocolError, ParameterError
from .linalg import dag, hermitianize, kron, max_entangled_vector, partial_trace

TRACE_TOL = 1e-9
PSD_TOL = 1e-9
CHANNEL_TOL = 1e-8


class DensityOperator:
    """Unit-trace PSD Hermitian matrix."""

    __slots__ = ("dim", "matrix")

    def __init__(self, matrix):
        m = linalg.as_matrix(matrix)
        d = linalg.check_square(m)
        m = hermitianize(m)
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ParameterError(f"density operator trace {np.trace(m).real} is not 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ParameterError("density operator has a negative eigenvalue beyond tolerance")
        self.dim = d
        self.matrix = m
        self.matrix.setflags(write=False)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def sqrt(self) -> np.ndarray:
        return linalg.sqrtm_psd(self.matrix)


class PureState:
    """Unit vector on C^dim."""

    __slots__ = ("dim", "amplitudes")

    def __init__(self, amplitudes):
        v = np.array(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-10:
            raise ParameterError(f"pure state norm {n} is not 1")
        self.dim = len(v)
        self.amplitudes = v
        self.amplitudes.setflags(write=False)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityOperator:
        return DensityOperator(self.projector())


class QuantumChannel:
    """CPTP map from C^{d_in} to C^{d_out}, held as a Kraus list.

    The Choi matrix (unnormalized convention, tr J = d_in) is derived
    lazily and cached.
    """

    def __init__(self, kraus: Sequence[np.ndarray], d_in: int | None = None, d_out: int | None = None):
        ops = [linalg.as_matrix(k) for k in kraus]
        if not ops:
            raise DimensionError("a channel needs at least one Kraus operator")
        d_out_, d_in_ = ops[0].shape
        if d_in is not None and d_in != d_in_:
            raise DimensionError(f"Kraus shape {ops[0].shape} disagrees with d_in={d_in}")
        if d_out is not None and d_out != d_out_:
            raise DimensionError(f"Kraus shape {ops[0].shape} disagrees with d_out={d_out}")
        for k in ops:
            if k.shape != (d_out_, d_in_):
                raise DimensionError("all Kraus operators must share one shape")
        total = sum(dag(k) @ k for k in ops)
        if np.abs(total - np.eye(d_in_)).max() > CHANNEL_TOL:
            raise InvalidProtocolError("Kraus operators do not satisfy sum K^t K = I")
        self.d_in = d_in_
        self.d_out = d_out_
        self.kraus = ops
        self._choi: np.ndarray | None = None

    def __repr__(self):
        return f"QuantumChannel({self.d_in}->{self.d_out}, kraus={len(self.kraus)})"

    def apply(self, rho: np.ndarray | DensityOperator) -> np.ndarray:
        m = rho.matrix if isinstance(rho, DensityOperator) else linalg.as_matrix(rho)
        if m.shape[0] != self.d_in:
            raise DimensionError(f"state dim {m.shape[0]} does not match d_in {self.d_in}")
        return sum(k @ m @ dag(k) for k in self.kraus)

    @property
    def choi(self) -> np.ndarray:
        if self._choi is None:
            self._choi = kraus_to_choi(self)
            self._choi.setflags(write=False)
        return self._choi


@dataclass
class ELOCCProtocol:
    """Shared entangled state, a POVM on A (x) K', and per-outcome decoders.

    d_k is the local dimension of each half of the shared state; the POVM
    elements act on A (x) K' and must sum to the identity; decoder m maps
    K to B after Alice communicates outcome m.
    """

    d_k: int
    shared_state: PureState  # on K (x) K'
    povm: list  # M Hermitian PSD matrices on A (x) K'
    decoders: list  # M channels from K to B

    d_a: int = field(init=False)
    d_b: int = field(init=False)

    def __post_init__(self):
        if self.shared_state.dim != self.d_k * self.d_k:
            raise InvalidProtocolError("shared state must live on K (x) K' with equal dimensions")
        if len(self.povm) != len(self.decoders) or not self.povm:
            raise InvalidProtocolError("need one decoder per POVM element")
        self.povm = [linalg.as_matrix(e) for e in self.povm]
        d_ak = self.povm[0].shape[0]
        if d_ak % self.d_k:
            raise InvalidProtocolError("POVM dimension is not divisible by d_k")
        self.d_a = d_ak // self.d_k
        total = sum(self.povm)
        if np.abs(total - np.eye(d_ak)).max() > CHANNEL_TOL:
            raise InvalidProtocolError("POVM does not sum to the identity")
        for e in self.povm:
            if np.linalg.eigvalsh(hermitianize(e)).min() < -PSD_TOL:
                raise InvalidProtocolError("POVM element has a negative eigenvalue")
        d_bs = {c.d_out for c in self.decoders}
        if len(d_bs) != 1 or any(c.d_in != self.d_k for c in self.decoders):
            raise InvalidProtocolError("decoders must map K to a common output system")
        self.d_b = d_bs.pop()

    @property
    def alphabet_size(self) -> int:
        return len(self.povm)


def canonical_purification(rho: DensityOperator) -> PureState:
    """|rho> = (sqrt(rho) (x) I)|gamma> on A' (x) A."""
    d = rho.dim
    v = (kron(rho.sqrt(), np.eye(d)) @ max_entangled_vector(d)).reshape(-1)
    v = v / np.linalg.norm(v)
    return PureState(v)


def kraus_to_choi(channel: QuantumChannel) -> np.ndarray:
    """J = sum_ij |i><j| (x) N(|i><j|); PSD with tr_B J = I (tr J = d_in)."""
    d_in, d_out = channel.d_in, channel.d_out
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in channel.kraus:
        v = k.T.reshape(-1)  # vec of |i> -> K|i> arranged on A' (x) B
        j += np.outer(v, v.conj())
    return hermitianize(j)


def choi_to_kraus(j: np.ndarray, d_in: int, d_out: int) -> QuantumChannel:
    """Invert the Choi map by eigendecomposition; rank = #eigenvalues > 1e-10."""
    j = linalg.as_matrix(j)
    if j.shape != (d_in * d_out, d_in * d_out):
        raise DimensionError(f"Choi shape {j.shape} does not match dims {(d_in, d_out)}")
    marginal = partial_trace(j, [d_in, d_out], [0])
    if np.abs(marginal - np.eye(d_in)).max() > 1e-6:
        raise InvalidProtocolError("Choi marginal tr_B J != I: map is not trace preserving")
    w, v = np.linalg.eigh(hermitianize(j))
    if w.min() < -CHANNEL_TOL:
        raise InvalidProtocolError("Choi matrix has a negative eigenvalue beyond tolerance")
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam > 1e-10:
            kraus.append(np.sqrt(lam) * vec.reshape(d_in, d_out).T)
    # eigenvalue truncation can leave sum K^t K a hair off the identity
    total = sum(dag(k) @ k for k in kraus)
    corr = linalg.mat_func(total, lambda t: 1.0 / np.sqrt(t), name="inv-sqrt")
    return QuantumChannel([k @ corr for k in kraus], d_in=d_in, d_out=d_out)


def stinespring(channel: QuantumChannel) -> np.ndarray:
    """Isometry U: A -> E (x) B with tr_E(U rho U^t) = N(rho), d_E = #Kraus."""
    u = np.concatenate([k for k in channel.kraus], axis=0)
    return u


def joint_output(channel: QuantumChannel, rho: DensityOperator) -> DensityOperator:
    """(id (x) N)(|rho><rho|) computed as (sqrt(rho) (x) I) J (sqrt(rho) (x) I)."""
    if rho.dim != channel.d_in:
        raise DimensionError(f"state dim {rho.dim} does not match d_in {channel.d_in}")
    s = kron(rho.sqrt(), np.eye(channel.d_out))
    out = hermitianize(s @ channel.choi @ s)
    # round-off can leave the trace a hair off 1
    return DensityOperator(out / np.trace(out).real)


def _povm_on_akk(e_m: np.ndarray, d_a: int, d_k: int) -> np.ndarray:
    """Lift a POVM element on A (x) K' to the ordered systems A (x) K (x) K'."""
    e4 = e_m.reshape(d_a, d_k, d_a, d_k)  # (a, k', a2, k2')
    out = np.einsum("abcd,ef->aebcfd", e4, np.eye(d_k, dtype=complex))
    return out.reshape((d_a * d_k * d_k,) * 2)


def elocc_to_channel(protocol: ELOCCProtocol) -> QuantumChannel:
    """Assemble the protocol's overall channel from A to B.

    rho_A -> sum_m Decoder_m( tr_{AK'}[ (E_m (x) I_K) (rho_A (x) |s><s|_{KK'}) ] )
    realised on the ordered systems (A, K, K').
    """
    d_a, d_k, d_b = protocol.d_a, protocol.d_k, protocol.d_b
    shared = protocol.shared_state.projector()  # on K (x) K'
    dims = [d_a, d_k, d_k]
    # Choi route: feed each |i><j| basis element through the map
    j = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    basis_out = np.empty((d_a, d_a, d_b, d_b), dtype=complex)
    lifted = [_povm_on_akk(e, d_a, d_k) for e in protocol.povm]
    for i in range(d_a):
        for jj in range(d_a):
            inp = np.zeros((d_a, d_a), dtype=complex)
            inp[i, jj] = 1.0
            state = kron(inp, shared)
            out = np.zeros((d_b, d_b), dtype=complex)
            for e_m, dec in zip(lifted, protocol.decoders):
                post = partial_trace(e_m @ state, dims, [1])
                out += dec.apply(post)
            basis_out[i, jj] = out
    for i in range(d_a):
        for jj in range(d_a):
            j[i * d_b : (i + 1) * d_b, jj * d_b : (jj + 1) * d_b] = basis_out[i, jj]
    marginal = partial_trace(j, [d_a, d_b], [0])
    if np.abs(marginal - np.eye(d_a)).max() > 1e-7:
        raise InvalidProtocolError("assembled protocol map is not trace preserving")
    return choi_to_kraus(hermitianize(j), d_a, d_b)


# ---------------------------------------------------------------------------
# constructors


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d)])


def depolarizing(p: float, d: int = 2) -> QuantumChannel:
    """N(rho) = (1-p) rho + p I/d."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"depolarizing probability {p} outside [0, 1]")
    if d != 2:
        raise ParameterError("depolarizing is implemented for qubits")
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    kraus = [np.sqrt(1 - 3 * p / 4) * np.eye(2), np.sqrt(p / 4) * sx, np.sqrt(p / 4) * sy, np.sqrt(p / 4) * sz]
    return QuantumChannel([k for k in kraus if np.abs(k).max() > 0])


def dephasing(p: float) -> QuantumChannel:
    """Qubit phase damping: off-diagonals scaled by 1-p."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"dephasing probability {p} outside [0, 1]")
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    kraus = [np.sqrt(1 - p / 2) * np.eye(2), np.sqrt(p / 2) * sz]
    return QuantumChannel([k for k in kraus if np.abs(k).max() > 0])


def constant_channel(tau: DensityOperator, d_in: int | None = None) -> QuantumChannel:
    """rho -> tau regardless of the input."""
    d_in = tau.dim if d_in is None else d_in
    w, v = np.linalg.eigh(tau.matrix)
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam < 1e-14:
            continue
        for i in range(d_in):
            k = np.zeros((tau.dim, d_in), dtype=complex)
            k[:, i] = np.sqrt(lam) * vec
            kraus.append(k)
    return QuantumChannel(kraus, d_in=d_in, d_out=tau.dim)


def random_density(d: int, rank: int | None = None, seed: int = 0) -> DensityOperator:
    """Ginibre construction: rho = GG^t / tr(GG^t) with G of shape d x rank."""
    rank = d if rank is None else rank
    if rank < 1:
        raise ParameterError("rank must be at least 1")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ dag(g)
    return DensityOperator(m / np.trace(m).real)


def random_channel(d_in: int, d_out: int, kraus_rank: int | None = None, seed: int = 0) -> QuantumChannel:
    """QR-orthonormalized Ginibre isometry cut into Kraus blocks."""
    kraus_rank = d_in * d_out if kraus_rank is None else kraus_rank
    if kraus_rank < 1:
        raise ParameterError("kraus_rank must be at least 1")
    if kraus_rank * d_out < d_in:
        raise ParameterError(f"kraus_rank {kraus_rank} too small for an isometry {d_in}->{d_out}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(kraus_rank * d_out, d_in)) + 1j * rng.normal(size=(kraus_rank * d_out, d_in))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.real(np.diag(r)) + 1e-300)[None, :]  # phase fix, deterministic
    return QuantumChannel([q[i * d_out : (i + 1) * d_out, :] for i in range(kraus_rank)])


def random_pure(d: int, seed: int = 0) -> PureState:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(v / np.linalg.norm(v))


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(np.eye(d) / d)


def channel_distance(a: QuantumChannel, b: QuantumChannel) -> float:
    """Max absolute entrywise difference of the Choi matrices."""
    if (a.d_in, a.d_out) != (b.d_in, b.d_out):
        raise DimensionError("channels act on different systems")
    return float(np.abs(a.choi - b.choi).max())


def tensor_channels(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    """Tensor product channel with Kraus set {K_i (x) L_j}."""
    return QuantumChannel(
        [kron(ka, kb) for ka in a.kraus for kb in b.kraus],
        d_in=a.d_in * b.d_in,
        d_out=a.d_out * b.d_out,
    )


def mix_channels(channels: Sequence[QuantumChannel], weights: Sequence[float]) -> QuantumChannel:
    """Convex combination, realised through the mixed Choi matrix."""
    weights = np.asarray(weights, dtype=float)
    if len(channels) != len(weights) or abs(weights.sum() - 1.0) > 1e-10 or (weights < -1e-12).any():
        raise ParameterError("weights must be a probability vector over the channels")
    j = sum(w * c.choi for w, c in zip(weights, channels))
    return choi_to_kraus(j, channels[0].d_in, channels[0].d_out)

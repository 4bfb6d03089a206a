"""Fidelity, max-divergence, Renyi families, max-information and smoothing.

All divergence values are in bits (log base 2).  Support conditions use the
eigenvalue threshold SUPPORT_TOL: weight of the first argument outside the
second argument's support beyond tolerance yields +inf, returned as
``math.inf`` rather than raised.

The semidefinite programs all use the inverse-free block form of the
fidelity constraint, with fixed corners compressed to their support so the
solver never sees a rank-deficient pinned block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import sdp
from .errors import DimensionError, ParameterError
from .linalg import hermitianize, kron, partial_trace
from .quantum import DensityOperator
from .sdp import SparseEntries, entries

SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class SmoothingSpec:
    """Fidelity-ball radius and which subsystem's marginal stays pinned.

    marginal_system 0 pins the A-marginal (the only option exercised here;
    the field exists so reports can state the convention explicitly).
    """

    epsilon: float
    marginal_system: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ParameterError(f"epsilon {self.epsilon} outside [0, 1)")


class SmoothedValue(NamedTuple):
    value: float
    witness_state: DensityOperator  # the optimal rho~ on A (x) B
    witness_sigma: DensityOperator  # the optimal (or given) sigma_B


def _as_state_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> int:
    if a.shape != b.shape:
        raise DimensionError(f"operands have different shapes {a.shape} vs {b.shape}")
    return a.shape[0]


def _support(mat: np.ndarray, tol: float = 1e-12):
    """Eigenvalues above threshold and the matching eigenvector isometry."""
    w, v = np.linalg.eigh(hermitianize(mat))
    keep = w > max(tol, tol * max(float(w.max()), 0.0))
    return w[keep], v[:, keep]


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Evaluated as the squared nuclear norm of sqrt(rho) sqrt(sigma), which is
    manifestly symmetric in the arguments.
    """
    a = _as_state_matrix(rho)
    b = _as_state_matrix(sigma)
    _check_same_dim(a, b)
    wa, va = np.linalg.eigh(hermitianize(a))
    wb, vb = np.linalg.eigh(hermitianize(b))
    sa = (va * np.sqrt(np.clip(wa, 0.0, None))) @ va.conj().T
    sb = (vb * np.sqrt(np.clip(wb, 0.0, None))) @ vb.conj().T
    s = np.linalg.svd(sa @ sb, compute_uv=False)
    return float(min(1.0, s.sum() ** 2))


def root_fidelity(rho, sigma) -> float:
    return math.sqrt(fidelity(rho, sigma))


def _corner_pin_constraints(block: int, offset: int, diag: np.ndarray) -> list:
    """Constraints pinning a diagonal corner of a block to diag(diag)."""
    cons = []
    r = len(diag)
    for i in range(r):
        cons.append(({block: entries([offset + i], [offset + i], [1.0])}, float(diag[i])))
        for j in range(i + 1, r):
            cons.append(
                ({block: entries([offset + i, offset + j], [offset + j, offset + i], [1.0, 1.0])}, 0.0)
            )
            cons.append(
                ({block: entries([offset + i, offset + j], [offset + j, offset + i], [1.0j, -1.0j])}, 0.0)
            )
    return cons


def _block_fidelity_sdp(top: np.ndarray, bottom: np.ndarray, weight: np.ndarray | None = None, **solve_kw):
    """max (1/2) tr(W (Z + Z^t)) s.t. [[top, Z], [Z^t, bottom]] >= 0.

    Both corners are compressed to their supports, so the program always has
    a strictly feasible interior point.  weight defaults to the identity.
    """
    w1, v1 = _support(top)
    w2, v2 = _support(bottom)
    r1, r2 = len(w1), len(w2)
    if r1 == 0 or r2 == 0:
        raise ParameterError("fidelity SDP received a zero operator")
    n = r1 + r2
    wmat = np.eye(top.shape[0], dtype=complex) if weight is None else np.asarray(weight, dtype=complex)
    k = v2.conj().T @ wmat @ v1  # objective couples Z' through V2^t W V1
    c = np.zeros((n, n), dtype=complex)
    c[r1:, :r1] = -0.5 * k
    c[:r1, r1:] = -0.5 * k.conj().T
    cons = _corner_pin_constraints(0, 0, w1) + _corner_pin_constraints(0, r1, w2)
    problem = sdp.SdpProblem(blocks=[n], objective=[c], constraints=cons)
    sol = sdp.solve(problem, **solve_kw)
    sdp.require_optimal(sol, "fidelity SDP")
    return -sol.primal_objective, sol


def root_fidelity_sdp(rho, sigma) -> float:
    """sqrt(F) through the semidefinite characterization (never inverts)."""
    a = _as_state_matrix(rho)
    b = _as_state_matrix(sigma)
    _check_same_dim(a, b)
    value, _ = _block_fidelity_sdp(a, b)
    return float(min(1.0, max(0.0, value)))


def f_channel(channel, simulator, rho: DensityOperator) -> float:
    """Root fidelity of the joint outputs of two channels on one input."""
    from .quantum import joint_output

    if (channel.d_in, channel.d_out) != (simulator.d_in, simulator.d_out):
        raise DimensionError("channels act on different systems")
    out_true = joint_output(channel, rho)
    out_sim = joint_output(simulator, rho)
    return root_fidelity(out_true.matrix, out_sim.matrix)


def f_choi_sdp(choi_true: np.ndarray, choi_sim: np.ndarray, rho: DensityOperator) -> float:
    """Channel simulation fidelity straight from the (unnormalized) Chois.

    max (1/2) tr((rho (x) I)(Z + Z^t)) s.t. [[J, Z], [Z^t, J~]] >= 0.
    """
    j = np.asarray(choi_true, dtype=complex)
    jt = np.asarray(choi_sim, dtype=complex)
    d = _check_same_dim(j, jt)
    d_out = d // rho.dim
    if rho.dim * d_out != d:
        raise DimensionError("Choi dimension is not a multiple of the input dimension")
    weight = kron(rho.matrix, np.eye(d_out))
    value, _ = _block_fidelity_sdp(j, jt, weight=weight)
    return float(min(1.0, max(0.0, value)))


def _support_spectral(sigma: np.ndarray):
    w, v = np.linalg.eigh(hermitianize(sigma))
    keep = w > SUPPORT_TOL
    return w[keep], v[:, keep], v[:, ~keep]


def _weight_outside(rho: np.ndarray, v_out: np.ndarray) -> float:
    if v_out.shape[1] == 0:
        return 0.0
    block = v_out.conj().T @ rho @ v_out
    return float(np.abs(np.linalg.eigvalsh(hermitianize(block))).max())


def dmax(rho, sigma) -> float:
    """Max-divergence log2 lambda_max(sigma^{-1/2} rho sigma^{-1/2}), in bits."""
    a = _as_state_matrix(rho)
    b = _as_state_matrix(sigma)
    _check_same_dim(a, b)
    w, v, v_out = _support_spectral(b)
    if _weight_outside(a, v_out) > 1e-9:
        return math.inf
    core = (v / np.sqrt(w)).conj().T @ a @ (v / np.sqrt(w))
    lam = float(np.linalg.eigvalsh(hermitianize(core)).max())
    return math.log2(max(lam, 1e-300))


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy tr rho (log rho - log sigma), in bits."""
    a = _as_state_matrix(rho)
    b = _as_state_matrix(sigma)
    _check_same_dim(a, b)
    w, v, v_out = _support_spectral(b)
    if _weight_outside(a, v_out) > 1e-9:
        return math.inf
    wa, va = np.linalg.eigh(hermitianize(a))
    wa = np.clip(wa, 0.0, None)
    ent_a = float(np.sum(wa[wa > 1e-15] * np.log2(wa[wa > 1e-15])))
    log_b = (v * np.log2(w)) @ v.conj().T
    return ent_a - float(np.real(np.trace(a @ log_b)))


def sandwiched_renyi(rho, sigma, alpha: float) -> float:
    """Sandwiched Renyi divergence for alpha > 1, in bits.

    Near alpha = 1 the 1/(alpha-1) prefactor is catastrophically cancelling,
    so alpha < 1 + 1e-4 is evaluated as the relative entropy instead.
    """
    if alpha <= 1.0:
        raise ParameterError(f"alpha must exceed 1, got {alpha}")
    if alpha < 1.0 + 1e-4:
        return relative_entropy(rho, sigma)
    a = _as_state_matrix(rho)
    b = _as_state_matrix(sigma)
    _check_same_dim(a, b)
    w, v, v_out = _support_spectral(b)
    if _weight_outside(a, v_out) > 1e-9:
        return math.inf
    power = (v * w ** ((1.0 - alpha) / (2.0 * alpha))) @ v.conj().T
    core = power @ a @ power
    lam = np.clip(np.linalg.eigvalsh(hermitianize(core)), 0.0, None)
    total = float(np.sum(lam**alpha))
    return math.log2(max(total, 1e-300)) / (alpha - 1.0)


def _rotate_to_diagonal_marginal(rho_ab: np.ndarray, d_a: int, d_b: int):
    """Rotate the A factor into the eigenbasis of rho_A.

    Returns (rotated state, marginal eigenvalues, rotation on A).  Sparse SDP
    constraints then only couple X_B entries through diagonal rho_A weights.
    """
    rho_a = partial_trace(rho_ab, [d_a, d_b], [0])
    lam, u = np.linalg.eigh(hermitianize(rho_a))
    rot = kron(u.conj().T, np.eye(d_b))
    return hermitianize(rot @ rho_ab @ rot.conj().T), lam, u


def _hermitian_probes(i: int, j: int):
    """Index/value triplet pairs covering the (i, j) Hermitian component."""
    if i == j:
        return [(np.array([i]), np.array([i]), np.array([1.0 + 0j]))]
    return [
        (np.array([i, j]), np.array([j, i]), np.array([1.0 + 0j, 1.0 + 0j])),
        (np.array([i, j]), np.array([j, i]), np.array([1.0j, -1.0j])),
    ]


def imax(rho_ab, dims: tuple[int, int]) -> tuple[float, DensityOperator]:
    """Max-information: min over sigma_B of D_max(rho_AB || rho_A (x) sigma_B).

    Solved as min tr(X_B) s.t. rho_AB <= rho_A (x) X_B, X_B >= 0; the value
    is log2 of the optimum and the witness is X_B normalized.  The A factor
    is restricted to the support of rho_A before solving.
    """
    d_a, d_b = dims
    rho = _as_state_matrix(rho_ab)
    if rho.shape != (d_a * d_b, d_a * d_b):
        raise DimensionError(f"state shape {rho.shape} does not match dims {dims}")
    rho_rot, lam_full, u_a = _rotate_to_diagonal_marginal(rho, d_a, d_b)
    keep = lam_full > SUPPORT_TOL
    lam = lam_full[keep]
    r_a = len(lam)
    sel = np.concatenate([np.arange(a * d_b, (a + 1) * d_b) for a in range(d_a) if keep[a]])
    rho_s = rho_rot[np.ix_(sel, sel)]
    d = r_a * d_b

    cons = []
    for i in range(d):
        a_i, b_i = divmod(i, d_b)
        for jj in range(i, d):
            a_j, b_j = divmod(jj, d_b)
            for rows, cols, vals in _hermitian_probes(i, jj):
                coeff = {1: SparseEntries(rows, cols, -vals)}
                if a_i == a_j:
                    coeff[0] = SparseEntries(rows % d_b, cols % d_b, lam[a_i] * vals)
                rhs = float(np.real(np.sum(np.conj(vals) * rho_s[rows, cols])))
                cons.append((coeff, rhs))
    problem = sdp.SdpProblem(
        blocks=[d_b, d],
        objective=[np.eye(d_b), np.zeros((d, d))],
        constraints=cons,
    )
    sol = sdp.solve(problem)
    sdp.require_optimal(sol, "max-information SDP")
    optimum = max(sol.primal_objective, 1e-300)
    x_b = hermitianize(sol.primal[0])
    sigma = _pad_full_rank(x_b / np.trace(x_b).real)
    return math.log2(optimum), sigma


def _pad_full_rank(sigma: np.ndarray) -> DensityOperator:
    """Mix in 1e-12 of the maximally mixed state, keeping the witness full rank."""
    d = sigma.shape[0]
    padded = (sigma + 1e-12 * np.eye(d) / d) / (1.0 + 1e-12)
    w = np.linalg.eigvalsh(hermitianize(padded))
    if w.min() < 0:
        padded = (padded + abs(w.min()) * np.eye(d)) / (1.0 + d * abs(w.min()))
    return DensityOperator(padded / np.trace(padded).real)


def smoothed_dmax(
    rho_ab,
    spec: SmoothingSpec,
    dims: tuple[int, int],
    sigma_b: DensityOperator | None = None,
) -> SmoothedValue:
    """Partially smoothed max-divergence, one SDP.

    Minimizes tr(X_B) (or the scalar t when sigma_B is given) over states
    rho~ with the A-marginal pinned to rho_A and fidelity to rho_AB at least
    1 - epsilon^2, subject to rho~ <= rho_A (x) X_B (resp. t rho_A (x) sigma_B).
    The fidelity certificate is the PSD block [[rho_AB, Z], [Z^t, rho~]] with
    (1/2) tr(Z + Z^t) >= sqrt(1 - eps^2), compressed to the support of rho_AB.

    At epsilon = 0 the fidelity ball degenerates to the single point
    rho~ = rho_AB (Slater's condition fails for the block encoding), so the
    equality is imposed directly and the smoothing variables drop out.
    """
    d_a_full, d_b = dims
    eps = spec.epsilon
    rho = _as_state_matrix(rho_ab)
    if rho.shape != (d_a_full * d_b, d_a_full * d_b):
        raise DimensionError(f"state shape {rho.shape} does not match dims {dims}")
    rho_rot, lam_a, u_a = _rotate_to_diagonal_marginal(rho, d_a_full, d_b)
    keep = lam_a > SUPPORT_TOL
    sel = np.concatenate([np.arange(a * d_b, (a + 1) * d_b) for a in range(d_a_full) if keep[a]])
    rho_rot = rho_rot[np.ix_(sel, sel)]
    lam_a = lam_a[keep]
    d_a = len(lam_a)
    d = d_a * d_b
    target = None if sigma_b is None else kron(np.diag(lam_a), sigma_b.matrix)

    if eps == 0.0:
        return _smoothed_eps_zero(rho, rho_rot, lam_a, (d_a, d_b), sigma_b, target)

    w_r, v_r = _support(rho_rot)
    r = len(w_r)
    n_g = r + d
    # blocks: 0 fidelity block G = [[D_r, Z], [Z^t, rho~]], 1 slack
    # S1 = rho_A (x) X_B - rho~, 2 X_B (or scalar t), 3 scalar slack u
    dim2 = d_b if sigma_b is None else 1
    cons = _corner_pin_constraints(0, 0, w_r)

    # marginal pin: tr_B rho~ = diag(lam_a)
    for a in range(d_a):
        idx = r + a * d_b + np.arange(d_b)
        cons.append(({0: SparseEntries(idx, idx, np.ones(d_b, dtype=complex))}, float(lam_a[a])))
        for a2 in range(a + 1, d_a):
            idx2 = r + a2 * d_b + np.arange(d_b)
            both_r = np.concatenate([idx, idx2])
            both_c = np.concatenate([idx2, idx])
            cons.append(
                ({0: SparseEntries(both_r, both_c, np.ones(2 * d_b, dtype=complex))}, 0.0)
            )
            cons.append(
                (
                    {
                        0: SparseEntries(
                            both_r,
                            both_c,
                            np.concatenate([1.0j * np.ones(d_b), -1.0j * np.ones(d_b)]),
                        )
                    },
                    0.0,
                )
            )

    # linking: rho~ + S1 - rho_A (x) X_B = 0 (resp. - t rho_A (x) sigma_B)
    for i in range(d):
        a_i, b_i = divmod(i, d_b)
        for jj in range(i, d):
            a_j, b_j = divmod(jj, d_b)
            for rows, cols, vals in _hermitian_probes(i, jj):
                coeff = {
                    0: SparseEntries(rows + r, cols + r, vals),
                    1: SparseEntries(rows, cols, vals),
                }
                if sigma_b is None:
                    if a_i == a_j:
                        coeff[2] = SparseEntries(rows % d_b, cols % d_b, -lam_a[a_i] * vals)
                else:
                    t_coeff = -float(np.real(np.sum(np.conj(vals) * target[rows, cols])))
                    if abs(t_coeff) > 1e-300:
                        coeff[2] = entries([0], [0], [t_coeff])
                cons.append((coeff, 0.0))

    # fidelity floor: Re tr(V_r Z) - u = sqrt(1 - eps^2)
    f_rows, f_cols, f_vals = [], [], []
    for k in range(r):
        for j in range(d):
            v = np.conj(v_r[j, k]) / 2.0
            if v != 0:
                f_rows += [k, r + j]
                f_cols += [r + j, k]
                f_vals += [v, np.conj(v)]
    cons.append(
        (
            {
                0: SparseEntries(np.array(f_rows), np.array(f_cols), np.array(f_vals, dtype=complex)),
                3: entries([0], [0], [-1.0]),
            },
            float(math.sqrt(1.0 - eps * eps)),
        )
    )

    objective = [
        np.zeros((n_g, n_g)),
        np.zeros((d, d)),
        np.eye(dim2),
        np.zeros((1, 1)),
    ]
    problem = sdp.SdpProblem(blocks=[n_g, d, dim2, 1], objective=objective, constraints=cons)
    sol = sdp.solve(problem)
    sdp.require_optimal(sol, "smoothing SDP")
    optimum = max(sol.primal_objective, 1e-300)

    tilde_small = sol.primal[0][r:, r:]
    tilde_rot = np.zeros((d_a_full * d_b, d_a_full * d_b), dtype=complex)
    tilde_rot[np.ix_(sel, sel)] = tilde_small
    back = kron(u_a, np.eye(d_b))
    tilde_state = _psd_state(back @ tilde_rot @ back.conj().T)
    if sigma_b is None:
        x_b = hermitianize(sol.primal[2])
        sigma = _pad_full_rank(x_b / np.trace(x_b).real)
    else:
        sigma = sigma_b
    return SmoothedValue(math.log2(optimum), tilde_state, sigma)


def _psd_state(mat: np.ndarray) -> DensityOperator:
    w, v = np.linalg.eigh(hermitianize(mat))
    w = np.clip(w, 0.0, None)
    m = (v * w) @ v.conj().T
    return DensityOperator(m / np.trace(m).real)


def _smoothed_eps_zero(rho, rho_rot, lam_a, dims, sigma_b, target) -> SmoothedValue:
    """epsilon = 0: the ball is {rho_AB}; solve with rho~ pinned."""
    d_a, d_b = dims
    d = d_a * d_b
    dim2 = d_b if sigma_b is None else 1
    cons = []
    for i in range(d):
        a_i, b_i = divmod(i, d_b)
        for jj in range(i, d):
            a_j, b_j = divmod(jj, d_b)
            for rows, cols, vals in _hermitian_probes(i, jj):
                coeff = {0: SparseEntries(rows, cols, vals)}
                if sigma_b is None:
                    if a_i == a_j:
                        coeff[1] = SparseEntries(rows % d_b, cols % d_b, -lam_a[a_i] * vals)
                else:
                    t_coeff = -float(np.real(np.sum(np.conj(vals) * target[rows, cols])))
                    if abs(t_coeff) > 1e-300:
                        coeff[1] = entries([0], [0], [t_coeff])
                rhs = -float(np.real(np.sum(np.conj(vals) * rho_rot[rows, cols])))
                cons.append((coeff, rhs))
    problem = sdp.SdpProblem(
        blocks=[d, dim2],
        objective=[np.zeros((d, d)), np.eye(dim2)],
        constraints=cons,
    )
    sol = sdp.solve(problem)
    sdp.require_optimal(sol, "smoothing SDP (eps = 0)")
    optimum = max(sol.primal_objective, 1e-300)
    if sigma_b is None:
        x_b = hermitianize(sol.primal[1])
        sigma = _pad_full_rank(x_b / np.trace(x_b).real)
    else:
        sigma = sigma_b
    return SmoothedValue(math.log2(optimum), _psd_state(rho), sigma)

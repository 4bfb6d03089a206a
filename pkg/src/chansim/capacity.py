"""Channel mutual information, entanglement-assisted capacity, and the
sandwiched Renyi channel mutual information.

The capacity maximization runs mirror ascent on the density-operator
simplex: rho <- exp(log rho + s G) / Z with the analytic gradient of the
mutual information.  Mutual information is concave in rho, so any
stationary point is the global optimum; mirror steps keep iterates
strictly positive.

The Renyi quantity sup_rho inf_sigma D~_alpha(rho_AB || rho_A (x) sigma_B)
has no closed-form optimizer: the inner infimum runs a damped first-order
(entropic mirror descent) iteration on the stationarity condition with a
derivative-free simplex fallback, and the outer supremum runs Nelder-Mead
over a triangular-factor parametrization of rho with multi-start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize as sopt

from .errors import DimensionError, ParameterError, ResourceError
from .linalg import hermitianize, kron, partial_trace
from .quantum import DensityOperator, QuantumChannel, joint_output, maximally_mixed, tensor_channels

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 3
    max_iter: int = 300
    step_tol: float = 1e-10
    value_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError("restarts must be at least 1")
        if self.step_tol <= 0 or self.value_tol <= 0:
            raise ParameterError("tolerances must be positive")


@dataclass
class CapacityResult:
    value: float
    optimizer_state: DensityOperator
    inner_witness: DensityOperator | None
    iterations: int
    converged: bool


def entropy_bits(mat: np.ndarray) -> float:
    w = np.linalg.eigvalsh(hermitianize(mat))
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log2(w)))


def mutual_info(channel: QuantumChannel, rho: DensityOperator) -> float:
    """I(A':B) = S(A') + S(B) - S(A'B) of the joint input-output state.

    The canonical purification leaves the transposed state on the channel
    input leg, so the B marginal is N(rho^T); both marginals are taken from
    the joint state itself.
    """
    if rho.dim != channel.d_in:
        raise DimensionError(f"state dim {rho.dim} does not match d_in {channel.d_in}")
    joint = joint_output(channel, rho)
    s_a = entropy_bits(rho.matrix)
    s_b = entropy_bits(partial_trace(joint.matrix, [channel.d_in, channel.d_out], [1]))
    s_ab = entropy_bits(joint.matrix)
    return max(0.0, s_a + s_b - s_ab)


def _complementary_kraus(channel: QuantumChannel) -> list[np.ndarray]:
    """Kraus set of the complementary channel A -> E (E indexed by Kraus)."""
    n_k = len(channel.kraus)
    out = []
    for b in range(channel.d_out):
        v = np.zeros((n_k, channel.d_in), dtype=complex)
        for k, kr in enumerate(channel.kraus):
            v[k, :] = kr[b, :]
        out.append(v)
    return out


def _safe_log(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitianize(mat))
    w = np.clip(w, 1e-300, None)
    return (v * np.log(w)) @ v.conj().T


def _mi_nats_and_grad(channel, comp_kraus, rho_mat):
    """Mutual information in nats and its gradient with respect to rho.

    The joint state carries rho^T on the channel leg, so B and E outputs
    are images of rho^T; S(A'B) = S(E) through the complementary channel,
    making all three terms entropies of linear images of rho.
    """
    rho_t = rho_mat.T
    out_b = sum(k @ rho_t @ k.conj().T for k in channel.kraus)
    out_e = sum(k @ rho_t @ k.conj().T for k in comp_kraus)
    log_rho = _safe_log(rho_mat)
    log_b = _safe_log(out_b)
    log_e = _safe_log(out_e)
    val = (
        -float(np.real(np.trace(rho_mat @ log_rho)))
        - float(np.real(np.trace(out_b @ log_b)))
        + float(np.real(np.trace(out_e @ log_e)))
    )
    grad = (
        -log_rho
        - sum(k.conj().T @ log_b @ k for k in channel.kraus).T
        + sum(k.conj().T @ log_e @ k for k in comp_kraus).T
    )
    return val, hermitianize(grad)


def _mirror_ascent(channel, comp_kraus, rho0: np.ndarray, cfg: OptimizerConfig):
    """Maximize mutual information from one starting state."""
    rho = rho0.copy()
    val, grad = _mi_nats_and_grad(channel, comp_kraus, rho)
    step = 1.0
    iters = 0
    converged = False
    for iters in range(1, cfg.max_iter + 1):
        improved = False
        log_rho = _safe_log(rho)
        while step > 1e-14:
            h = hermitianize(log_rho + step * grad)
            w, v = np.linalg.eigh(h)
            w = w - w.max()
            cand = (v * np.exp(w)) @ v.conj().T
            cand = hermitianize(cand / np.trace(cand).real)
            cand_val, cand_grad = _mi_nats_and_grad(channel, comp_kraus, cand)
            if cand_val > val:
                improved = True
                break
            step /= 2.0
        if not improved:
            converged = True
            break
        gain = cand_val - val
        rho, val, grad = cand, cand_val, cand_grad
        step = min(step * 2.0, 1e6)
        if gain < cfg.value_tol * LOG2:
            converged = True
            break
    return val / LOG2, rho, iters, converged


def capacity_CE(channel: QuantumChannel, cfg: OptimizerConfig = OptimizerConfig()) -> CapacityResult:
    """Entanglement-assisted capacity sup_rho I(A':B), in bits."""
    comp = _complementary_kraus(channel)
    rng = np.random.default_rng(cfg.seed)
    starts = [maximally_mixed(channel.d_in).matrix]
    for _ in range(cfg.restarts - 1):
        g = rng.normal(size=(channel.d_in, channel.d_in)) + 1j * rng.normal(
            size=(channel.d_in, channel.d_in)
        )
        m = g @ g.conj().T + 1e-3 * np.eye(channel.d_in)
        starts.append(m / np.trace(m).real)
    best = None
    total_iters = 0
    for idx, rho0 in enumerate(starts):
        val, rho, iters, conv = _mirror_ascent(channel, comp, rho0, cfg)
        total_iters += iters
        if best is None or val > best[0] + 1e-15:
            best = (val, rho, conv)
    val, rho, conv = best
    return CapacityResult(
        value=max(0.0, val),
        optimizer_state=DensityOperator(rho),
        inner_witness=None,
        iterations=total_iters,
        converged=conv,
    )


# ---------------------------------------------------------------------------
# sandwiched Renyi channel mutual information


def _renyi_q_and_grad(rho_ab, rho_a, sigma, alpha, dims, want_grad=True):
    """Q(sigma) = tr[(sbar^{b/2} rho sbar^{b/2})^alpha] and d Q / d sigma.

    b = (1-alpha)/alpha; the gradient applies the Daleckii-Krein divided
    differences of x^{b/2} in the eigenbasis of sbar = rho_A (x) sigma.
    """
    d_a, d_b = dims
    beta = (1.0 - alpha) / alpha
    sbar = kron(rho_a, sigma)
    w, v = np.linalg.eigh(hermitianize(sbar))
    w = np.clip(w, 1e-200, None)
    fw = w ** (beta / 2.0)
    p_half = (v * fw) @ v.conj().T
    core = hermitianize(p_half @ rho_ab @ p_half)
    wp, vp = np.linalg.eigh(core)
    wp = np.clip(wp, 0.0, None)
    q_val = float(np.sum(wp**alpha))
    if not want_grad:
        return q_val, None
    p_am1 = (vp * wp ** (alpha - 1.0)) @ vp.conj().T
    m = rho_ab @ p_half @ p_am1
    m = (m + m.conj().T) / 2.0
    # divided differences of x^{beta/2} on the spectrum of sbar
    diff = w[:, None] - w[None, :]
    phi = np.where(
        np.abs(diff) > 1e-13 * (1.0 + np.abs(w[:, None]) + np.abs(w[None, :])),
        (fw[:, None] - fw[None, :]) / np.where(np.abs(diff) < 1e-300, 1.0, diff),
        (beta / 2.0) * ((w[:, None] + w[None, :]) / 2.0) ** (beta / 2.0 - 1.0),
    )
    mb = v.conj().T @ m @ v
    g_sbar = v @ (phi * mb) @ v.conj().T
    g4 = g_sbar.reshape(d_a, d_b, d_a, d_b)
    grad = 2.0 * alpha * np.einsum("abcd,ca->bd", g4, rho_a)
    return q_val, hermitianize(grad)


def _inner_renyi_inf(rho_ab, rho_a, alpha, dims, cfg, sigma0=None):
    """inf over sigma_B of D~_alpha(rho_AB || rho_A (x) sigma_B), in bits.

    Entropic mirror descent with backtracking; if the first-order iteration
    fails to settle, falls back to Nelder-Mead over a factor parametrization.
    """
    d_a, d_b = dims
    sigma = np.eye(d_b, dtype=complex) / d_b if sigma0 is None else sigma0.copy()
    q, grad = _renyi_q_and_grad(rho_ab, rho_a, sigma, alpha, dims)
    step = 1.0 / max(1.0, float(np.abs(grad).max()))
    converged = False
    for _ in range(400):
        improved = False
        log_sigma = _safe_log(sigma)
        while step > 1e-16:
            h = hermitianize(log_sigma - step * grad)
            w, v = np.linalg.eigh(h)
            w = w - w.max()
            cand = (v * np.exp(w)) @ v.conj().T
            cand = hermitianize(cand / np.trace(cand).real)
            q_cand, g_cand = _renyi_q_and_grad(rho_ab, rho_a, cand, alpha, dims)
            if q_cand < q:
                improved = True
                break
            step /= 2.0
        if not improved:
            converged = True
            break
        gain = q - q_cand
        sigma, q, grad = cand, q_cand, g_cand
        step *= 2.0
        if gain < 1e-13 * max(q, 1e-30):
            converged = True
            break
    if not converged:
        # derivative-free fallback on a Cholesky-style parametrization
        def unpack(x):
            l = np.zeros((d_b, d_b), dtype=complex)
            k = 0
            for i in range(d_b):
                for j in range(i + 1):
                    if i == j:
                        l[i, j] = x[k]
                        k += 1
                    else:
                        l[i, j] = x[k] + 1j * x[k + 1]
                        k += 2
            m = l @ l.conj().T + 1e-14 * np.eye(d_b)
            return m / np.trace(m).real

        def objective(x):
            return _renyi_q_and_grad(rho_ab, rho_a, unpack(x), alpha, dims, want_grad=False)[0]

        w0, v0 = np.linalg.eigh(sigma)
        l0 = (v0 * np.sqrt(np.clip(w0, 1e-12, None))) @ v0.conj().T
        x0 = []
        for i in range(d_b):
            for j in range(i + 1):
                if i == j:
                    x0.append(l0[i, j].real)
                else:
                    x0 += [l0[i, j].real, l0[i, j].imag]
        res = sopt.minimize(objective, np.array(x0), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if res.fun < q:
            sigma, q = unpack(res.x), float(res.fun)
    value = math.log2(max(q, 1e-300)) / (alpha - 1.0)
    return value, hermitianize(sigma)


def _factor_to_state(x: np.ndarray, d: int) -> np.ndarray:
    """Lower-triangular factor coordinates -> strictly positive state."""
    l = np.zeros((d, d), dtype=complex)
    k = 0
    for i in range(d):
        for j in range(i + 1):
            if i == j:
                l[i, j] = x[k]
                k += 1
            else:
                l[i, j] = x[k] + 1j * x[k + 1]
                k += 2
    m = l @ l.conj().T + 1e-12 * np.eye(d)
    return m / np.trace(m).real


def _state_to_factor(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitianize(rho))
    l = (v * np.sqrt(np.clip(w, 1e-10, None))) @ v.conj().T
    # use the Cholesky of the symmetrized positive matrix for a stable seed
    l = np.linalg.cholesky(hermitianize(l @ l.conj().T) + 1e-12 * np.eye(rho.shape[0]))
    d = rho.shape[0]
    x = []
    for i in range(d):
        for j in range(i + 1):
            if i == j:
                x.append(l[i, j].real)
            else:
                x += [l[i, j].real, l[i, j].imag]
    return np.array(x)


def renyi_channel_mutual_info(
    channel: QuantumChannel, alpha: float, cfg: OptimizerConfig = OptimizerConfig()
) -> CapacityResult:
    """I~_alpha(N) = sup_rho inf_sigma D~_alpha(rho_A'B || rho_A' (x) sigma_B)."""
    if alpha <= 1.0:
        raise ParameterError(f"alpha must exceed 1, got {alpha}")
    d_in, d_out = channel.d_in, channel.d_out
    dims = (d_in, d_out)
    sigma_cache: dict[int, np.ndarray] = {}

    def evaluate(rho_mat: np.ndarray, slot: int) -> float:
        joint = joint_output(channel, DensityOperator(rho_mat))
        rho_a = partial_trace(joint.matrix, [d_in, d_out], [0])
        sigma0 = sigma_cache.get(slot)
        s0 = DensityOperator(sigma0) if sigma0 is not None else None
        val, sigma = _inner_renyi_inf(joint.matrix, rho_a, alpha, dims, cfg,
                                      sigma0=sigma0)
        sigma_cache[slot] = sigma
        return val

    rng = np.random.default_rng(cfg.seed)
    starts = [maximally_mixed(d_in).matrix]
    for _ in range(cfg.restarts - 1):
        g = rng.normal(size=(d_in, d_in)) + 1j * rng.normal(size=(d_in, d_in))
        m = g @ g.conj().T + 1e-2 * np.eye(d_in)
        starts.append(m / np.trace(m).real)

    best = None
    total_evals = 0
    for slot, rho0 in enumerate(starts):
        x0 = _state_to_factor(rho0)

        def neg(x, slot=slot):
            return -evaluate(_factor_to_state(x, d_in), slot)

        res = sopt.minimize(neg, x0, method="Nelder-Mead",
                            options={"xatol": cfg.step_tol ** 0.5, "fatol": cfg.value_tol,
                                     "maxiter": cfg.max_iter * max(1, d_in * d_in)})
        total_evals += res.nfev
        val = -float(res.fun)
        if best is None or val > best[0] + 1e-15:
            rho_best = _factor_to_state(res.x, d_in)
            joint = joint_output(channel, DensityOperator(rho_best))
            rho_a = partial_trace(joint.matrix, [d_in, d_out], [0])
            _, sigma_best = _inner_renyi_inf(joint.matrix, rho_a, alpha, dims, cfg,
                                             sigma0=sigma_cache.get(slot))
            best = (val, rho_best, sigma_best, bool(res.success))
    val, rho_best, sigma_best, conv = best
    return CapacityResult(
        value=max(0.0, val),
        optimizer_state=DensityOperator(rho_best),
        inner_witness=DensityOperator(sigma_best),
        iterations=total_evals,
        converged=conv,
    )


def renyi_mi_product(
    channel: QuantumChannel, alpha: float, n: int, cfg: OptimizerConfig = OptimizerConfig()
) -> float:
    """I~_alpha(N^(x)n) evaluated directly, for the additivity check (n <= 2)."""
    if n not in (1, 2):
        raise ParameterError(f"n must be 1 or 2, got {n}")
    if channel.d_in**n > 4:
        raise ResourceError(
            f"product input dimension {channel.d_in ** n} exceeds the n-copy cap of 4"
        )
    big = channel if n == 1 else tensor_channels(channel, channel)
    return renyi_channel_mutual_info(big, alpha, cfg).value

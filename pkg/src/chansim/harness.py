"""Property suites for the structural claims behind the bounds.

Each check draws its randomness from a dedicated seeded generator, so a
report is reproducible bit for bit from (seed, trials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize as sopt

from .capacity import OptimizerConfig, mutual_info
from .divergences import SmoothingSpec, f_channel, smoothed_dmax
from .errors import ParameterError, ResourceError
from .linalg import MAX_DIM, tensor_power_bipartite
from .quantum import (
    DensityOperator,
    QuantumChannel,
    joint_output,
    mix_channels,
    random_channel,
    random_density,
)

CONVEXITY_TOL = 1e-7
MINIMAX_TOL = 1e-4


@dataclass
class PropertyReport:
    name: str
    trials: int
    worst_violation: float
    passed: bool
    seed: int

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "worst_violation": self.worst_violation,
            "pass": self.passed,
            "seed": self.seed,
        }


def _random_cptp(d_in: int, d_out: int, rng: np.random.Generator) -> QuantumChannel:
    rank = int(rng.integers(1, d_in * d_out + 1))
    return random_channel(d_in, d_out, rank, seed=int(rng.integers(0, 2**31)))


def _random_state(d: int, rng: np.random.Generator) -> DensityOperator:
    return random_density(d, rank=d, seed=int(rng.integers(0, 2**31)))


def check_lemma1(channel: QuantumChannel, trials: int = 1000, seed: int = 0) -> PropertyReport:
    """Convexity of the simulation fidelity in the input state.

    Samples (simulator, rho0, rho1, lambda) and records the worst violation
    of f(rho_lambda) <= (1 - lambda) f(rho0) + lambda f(rho1).
    """
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        sim = _random_cptp(channel.d_in, channel.d_out, rng)
        rho0 = _random_state(channel.d_in, rng)
        rho1 = _random_state(channel.d_in, rng)
        lam = float(rng.uniform(0.05, 0.95))
        mix = DensityOperator((1 - lam) * rho0.matrix + lam * rho1.matrix)
        lhs = f_channel(channel, sim, mix)
        rhs = (1 - lam) * f_channel(channel, sim, rho0) + lam * f_channel(channel, sim, rho1)
        worst = max(worst, lhs - rhs)
    return PropertyReport("lemma1-convexity-in-state", trials, worst, worst <= CONVEXITY_TOL, seed)


def check_concavity_in_channel(channel: QuantumChannel, trials: int = 1000, seed: int = 0) -> PropertyReport:
    """Concavity of the simulation fidelity in the simulating channel."""
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(trials):
        sim0 = _random_cptp(channel.d_in, channel.d_out, rng)
        sim1 = _random_cptp(channel.d_in, channel.d_out, rng)
        rho = _random_state(channel.d_in, rng)
        lam = float(rng.uniform(0.05, 0.95))
        mix = mix_channels([sim0, sim1], [1 - lam, lam])
        lhs = (1 - lam) * f_channel(channel, sim0, rho) + lam * f_channel(channel, sim1, rho)
        rhs = f_channel(channel, mix, rho)
        worst = max(worst, lhs - rhs)
    return PropertyReport("concavity-in-channel", trials, worst, worst <= CONVEXITY_TOL, seed)


def _simplex(theta: np.ndarray) -> np.ndarray:
    e = np.exp(theta - theta.max())
    return e / e.sum()


def _state_from_params(x: np.ndarray, d: int) -> DensityOperator:
    from .capacity import _factor_to_state

    return DensityOperator(_factor_to_state(x, d))


def _state_params(rho: DensityOperator) -> np.ndarray:
    from .capacity import _state_to_factor

    return _state_to_factor(rho.matrix)


def best_response_state(channel, components, weights, x0, maxfev=400):
    """min over rho of f(mix(weights), rho); returns (value, params).

    The objective is convex over the state set, so the only failure mode is
    premature simplex collapse; a few deterministic extra starts plus a
    restart at the running argmin make the solve reliable to ~1e-10.
    """
    mix = mix_channels(components, weights)
    d = channel.d_in

    def objective(x):
        return f_channel(channel, mix, _state_from_params(x, d))

    starts = [
        np.asarray(x0, dtype=float),
        _state_params(DensityOperator(np.eye(d) / d)),
        _state_params(DensityOperator(np.diag([0.9] + [0.1 / (d - 1)] * (d - 1)))),
        _state_params(DensityOperator(np.diag([0.1 / (d - 1)] * (d - 1) + [0.9]))),
    ]
    best_val, best_x = math.inf, np.asarray(x0, dtype=float)
    for start in starts:
        res = sopt.minimize(objective, start, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-13, "maxfev": maxfev})
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    for _ in range(2):  # polish restarts at the running argmin
        res = sopt.minimize(objective, best_x, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-13, "maxfev": maxfev})
        if res.fun >= best_val - 1e-13:
            break
        best_val, best_x = float(res.fun), res.x
    return best_val, best_x


def best_response_weights(channel, components, rho, theta0, maxfev=400):
    """max over simplex weights of f(mix(w), rho); returns (value, theta).

    Concave over the simplex; multi-start plus an argmax restart keeps the
    estimate reliable (an undershoot here would fake a minimax crossing).
    """
    k = len(components)

    def objective(theta):
        mix = mix_channels(components, _simplex(theta))
        return -f_channel(channel, mix, rho)

    starts = [np.asarray(theta0, dtype=float), np.zeros(k)]
    starts += [3.0 * np.eye(k)[i] for i in range(k)]
    best_val, best_theta = -math.inf, np.asarray(theta0, dtype=float)
    for start in starts:
        res = sopt.minimize(objective, start, method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-13, "maxfev": maxfev})
        if -res.fun > best_val:
            best_val, best_theta = -float(res.fun), res.x
    res = sopt.minimize(objective, best_theta, method="Nelder-Mead",
                        options={"xatol": 1e-10, "fatol": 1e-13, "maxfev": maxfev})
    if -res.fun > best_val:
        best_val, best_theta = -float(res.fun), res.x
    return best_val, best_theta


def check_restricted_minimax(
    channel: QuantumChannel,
    k: int = 3,
    cfg: OptimizerConfig = OptimizerConfig(),
    seed: int = 0,
    components: list[QuantumChannel] | None = None,
) -> PropertyReport:
    """Minimax equality on the convex hull of k sampled CPTP maps.

    The hull is compact and convex and f is concave-convex on hull x states,
    so sup-inf equals inf-sup there; the reported violation is the numerical
    gap |sup-inf - inf-sup| found by alternating best responses from
    multiple starts on both orderings.  Passing components overrides the
    seeded sampling (the hull size is then len(components)).
    """
    if k < 2 and components is None:
        raise ParameterError("k must be at least 2")
    rng = np.random.default_rng(seed)
    if components is None:
        components = [_random_cptp(channel.d_in, channel.d_out, rng) for _ in range(k)]
    k = len(components)
    d = channel.d_in

    sup_inf = -math.inf
    inf_sup = math.inf
    rounds = 0
    for restart in range(cfg.restarts):
        theta = np.zeros(k) if restart == 0 else rng.normal(size=k)
        x = _state_params(DensityOperator(np.eye(d) / d)) if restart == 0 else _state_params(
            _random_state(d, rng)
        )
        g_prev = None
        for _ in range(100):
            rounds += 1
            g_val, x = best_response_state(channel, components, _simplex(theta), x)
            sup_inf = max(sup_inf, g_val)  # g(w) = inf_rho f certified by the search
            h_val, theta = best_response_weights(channel, components,
                                                 _state_from_params(x, d), theta)
            inf_sup = min(inf_sup, h_val)  # h(rho) = sup_w f
            if g_prev is not None and abs(g_val - g_prev) < cfg.value_tol:
                break
            g_prev = g_val
    gap = abs(sup_inf - inf_sup)
    return PropertyReport("restricted-minimax-gap", rounds, gap, gap <= MINIMAX_TOL, seed)


def aep_trend(
    channel: QuantumChannel,
    rho: DensityOperator,
    epsilon: float,
    n_max: int = 3,
) -> tuple[list[tuple[int, float]], float]:
    """Per-copy smoothed rates a_n = (1/n) Imax^eps on the n-fold joint state.

    Returns ([(n, a_n)], I) with I the channel mutual information at rho;
    |a_n - I| must be nonincreasing in n (checked by the caller's suite).
    """
    if n_max < 1 or n_max > 3:
        raise ParameterError("n_max must be between 1 and 3")
    d_a, d_b = channel.d_in, channel.d_out
    if (d_a * d_b) ** n_max > MAX_DIM:
        raise ResourceError(
            f"joint dimension {(d_a * d_b) ** n_max} exceeds the dense cap {MAX_DIM}"
        )
    joint = joint_output(channel, rho)
    target = mutual_info(channel, rho)
    rates = []
    for n in range(1, n_max + 1):
        big = tensor_power_bipartite(joint.matrix, d_a, d_b, n)
        res = smoothed_dmax(big, SmoothingSpec(epsilon), (d_a**n, d_b**n))
        rates.append((n, res.value / n))
    return rates, target

import math

import numpy as np
import pytest

from chansim import bounds as bd
from chansim import quantum as q
from chansim.capacity import OptimizerConfig
from chansim.divergences import SmoothingSpec, smoothed_dmax
from chansim.errors import ParameterError
from chansim.quantum import joint_output

QUICK = OptimizerConfig(restarts=2, max_iter=25, seed=0)


class TestConverse:
    def test_constant_channel_zero(self):
        ch = q.constant_channel(q.random_density(2, seed=1), d_in=2)
        rep = bd.converse_bound(ch, 0.2, QUICK)
        assert abs(rep.converse_bits) <= 1e-6

    def test_identity_small_epsilon_approaches_two(self):
        rep = bd.converse_bound(q.identity_channel(2), 1e-4, QUICK)
        assert abs(rep.converse_bits - 2.0) <= 1e-4

    def test_identity_epsilon_closed_form(self):
        # for the maximally entangled joint state the smoothed value is
        # exactly 2 + log2(1 - eps^2), attained at the maximally mixed input
        for eps in (0.1, 0.3):
            rep = bd.converse_bound(q.identity_channel(2), eps, QUICK)
            assert rep.converse_bits >= 2.0 + math.log2(1 - eps**2) - 1e-6

    def test_full_dephasing_against_input_family_sweep(self):
        ch = q.dephasing(1.0)
        eps = 0.1
        rep = bd.converse_bound(ch, eps, QUICK)
        best = -math.inf
        for p in np.linspace(0.02, 0.98, 33):
            rho = q.DensityOperator(np.diag([p, 1 - p]).astype(complex))
            joint = joint_output(ch, rho)
            val = smoothed_dmax(joint.matrix, SmoothingSpec(eps), (2, 2)).value
            best = max(best, val)
        assert rep.converse_bits >= best - 1e-4
        assert abs(rep.converse_bits - best) <= 1e-4

    def test_epsilon_domain(self):
        with pytest.raises(ParameterError):
            bd.converse_bound(q.identity_channel(2), 0.0, QUICK)

    def test_smoothing_monotone_at_maximally_mixed(self):
        ch = q.random_channel(2, 2, 3, seed=2)
        joint = joint_output(ch, q.maximally_mixed(2))
        values = [
            smoothed_dmax(joint.matrix, SmoothingSpec(eps), (2, 2)).value
            for eps in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
        ]
        for hi, lo in zip(values[:-1], values[1:]):
            assert lo <= hi + 1e-6


class TestAchievability:
    def test_constant_channel_additive_term_only(self):
        ch = q.constant_channel(q.random_density(2, seed=3), d_in=2)
        rep = bd.achievability_bound(ch, 0.2, 0.1, QUICK)
        assert abs(rep.achievability_bits - 2 * math.log2(10)) <= 1e-6

    def test_identity_smoothed_term_cross_check(self):
        rep = bd.achievability_bound(q.identity_channel(2), 0.2, 0.1, QUICK)
        smoothed_term = rep.achievability_bits - 2 * math.log2(10)
        assert smoothed_term <= 2.0 + 1e-9
        joint = joint_output(q.identity_channel(2), rep.witness_rho)
        direct = smoothed_dmax(joint.matrix, SmoothingSpec(0.1), (2, 2)).value
        assert abs(smoothed_term - direct) <= 1e-9

    def test_parameter_domain(self):
        with pytest.raises(ParameterError):
            bd.achievability_bound(q.identity_channel(2), 0.1, 0.2, QUICK)

    def test_ordering_against_converse(self):
        rng = np.random.default_rng(4)
        for _ in range(3):
            ch = q.random_channel(2, 2, int(rng.integers(1, 5)), seed=int(rng.integers(2**31)))
            conv = bd.converse_bound(ch, 0.3, QUICK)
            ach = bd.achievability_bound(ch, 0.3, 0.1, QUICK)
            assert ach.achievability_bits - conv.converse_bits >= -1e-6


class TestFudge:
    def test_known_value(self):
        assert abs(bd.asymptotic_fudge(1, 0.4, 2.0) - 23.9297504734528) <= 1e-10

    def test_exact_scaling(self):
        base = bd.asymptotic_fudge(1, 0.4, 2.0)
        for n in (10, 100):
            assert bd.asymptotic_fudge(n, 0.4, 2.0) == base / n

    def test_vanishes(self):
        assert bd.asymptotic_fudge(10**6, 0.4, 2.0) < 1e-4

    def test_strictly_decreasing_in_n(self):
        vals = [bd.asymptotic_fudge(n, 0.3, 1.5) for n in (1, 2, 3, 10)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domains(self):
        with pytest.raises(ParameterError):
            bd.asymptotic_fudge(0, 0.4, 2.0)
        with pytest.raises(ParameterError):
            bd.asymptotic_fudge(1, 1.2, 2.0)
        with pytest.raises(ParameterError):
            bd.asymptotic_fudge(1, 0.4, 1.0)


class TestSweep:
    def test_constant_channel_rows(self):
        ch = q.constant_channel(q.maximally_mixed(2), d_in=2)
        rows, flags = bd.sweep(ch, [0.2], [0.1], [1], alpha=2.0, cfg=QUICK)
        by_kind = {}
        for r in rows:
            by_kind.setdefault(r.kind, []).append(r)
        assert abs(by_kind["converse"][0].value_bits) <= 1e-6
        assert abs(by_kind["achievability"][0].value_bits - 2 * math.log2(10)) <= 1e-6
        assert abs(by_kind["capacity"][0].value_bits) <= 1e-6
        assert all("pass" in f for f in flags)

    def test_identity_chain_row_passes(self):
        rows, flags = bd.sweep(q.identity_channel(2), [0.2], [0.1], [1], alpha=2.0, cfg=QUICK)
        assert flags and all(f.endswith("pass") for f in flags)

    def test_depolarizing_two_copies_rows_emitted(self):
        rows, _ = bd.sweep(
            q.depolarizing(0.3), [0.3], [0.1], [1, 2], alpha=2.0,
            cfg=OptimizerConfig(restarts=1, max_iter=10, seed=0),
        )
        kinds = {(r.kind, r.n) for r in rows}
        assert ("converse", 1) in kinds and ("converse", 2) in kinds
        assert ("fudge", 1) in kinds and ("fudge", 2) in kinds

    def test_csv_round_trip(self):
        ch = q.constant_channel(q.maximally_mixed(2), d_in=2)
        rows, _ = bd.sweep(ch, [0.2], [0.1], [1], alpha=2.0, cfg=QUICK)
        header = bd.CSV_HEADER.split(",")
        for row in rows:
            fields = row.csv().split(",")
            assert len(fields) == len(header)
            parsed = float(fields[header.index("value_bits")])
            assert parsed == float(f"{row.value_bits:.10g}")

    def test_jobs_parallel_matches_serial(self):
        ch = q.constant_channel(q.maximally_mixed(2), d_in=2)
        serial, _ = bd.sweep(ch, [0.2, 0.3], [0.1], [1], alpha=2.0, cfg=QUICK)
        parallel, _ = bd.sweep(ch, [0.2, 0.3], [0.1], [1], alpha=2.0, cfg=QUICK, jobs=4)
        assert [r.kind for r in serial] == [r.kind for r in parallel]
        for a, b in zip(serial, parallel):
            assert a.value_bits == b.value_bits

import numpy as np
import pytest

from chansim import quantum as q
from chansim.errors import InvalidProtocolError, ParameterError
from chansim.linalg import kron, partial_trace

BELL = {
    "00": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "01": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "10": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "11": np.array([0, 1, -1, 0]) / np.sqrt(2),
}
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


class TestStates:
    def test_purification_of_pure_state(self):
        rho = q.DensityOperator(np.diag([1.0, 0.0]))
        psi = q.canonical_purification(rho)
        expected = np.zeros(4)
        expected[0] = 1.0
        np.testing.assert_allclose(psi.amplitudes, expected, atol=1e-12)

    def test_purification_of_maximally_mixed(self):
        psi = q.canonical_purification(q.maximally_mixed(2))
        target = np.array([1, 0, 0, 1]) / np.sqrt(2)
        np.testing.assert_allclose(psi.amplitudes, target, atol=1e-12)

    def test_purification_marginal(self):
        rho = q.random_density(3, rank=2, seed=5)
        psi = q.canonical_purification(rho)
        marginal = partial_trace(psi.projector(), [3, 3], [0])
        assert np.abs(marginal - rho.matrix).max() <= 1e-9

    def test_density_validation(self):
        with pytest.raises(ParameterError):
            q.DensityOperator(np.eye(2))  # trace 2
        with pytest.raises(ParameterError):
            q.DensityOperator(np.diag([1.5, -0.5]))

    def test_random_density_rank_and_determinism(self):
        rho = q.random_density(3, rank=2, seed=9)
        w = rho.eigenvalues()
        assert (w > 1e-10).sum() == 2
        assert abs(np.trace(rho.matrix).real - 1.0) <= 1e-10
        rho2 = q.random_density(3, rank=2, seed=9)
        assert rho.matrix.tobytes() == rho2.matrix.tobytes()


class TestChoi:
    def test_identity_choi_is_gamma(self):
        ch = q.identity_channel(2)
        g = np.array([1, 0, 0, 1.0])
        np.testing.assert_allclose(ch.choi, np.outer(g, g), atol=1e-12)
        assert abs(np.trace(ch.choi) - 2.0) <= 1e-12

    def test_constant_channel_choi(self):
        tau = q.maximally_mixed(2)
        ch = q.constant_channel(tau, d_in=2)
        np.testing.assert_allclose(ch.choi, kron(np.eye(2), np.eye(2) / 2), atol=1e-9)

    def test_round_trip_action(self):
        ch = q.random_channel(3, 2, kraus_rank=4, seed=9)
        back = q.choi_to_kraus(ch.choi, 3, 2)
        for s in range(20):
            rho = q.random_density(3, seed=100 + s)
            assert np.abs(ch.apply(rho) - back.apply(rho)).max() <= 1e-9

    def test_gamma_choi_gives_identity_kraus(self):
        g = np.array([1, 0, 0, 1.0])
        ch = q.choi_to_kraus(np.outer(g, g), 2, 2)
        assert len(ch.kraus) == 1
        np.testing.assert_allclose(np.abs(ch.kraus[0]), np.eye(2), atol=1e-9)

    def test_rank_three_choi_gives_three_kraus(self):
        ch = q.random_channel(2, 2, kraus_rank=3, seed=21)
        back = q.choi_to_kraus(ch.choi, 2, 2)
        assert len(back.kraus) == 3

    def test_constant_choi_reproduces_action(self):
        tau = q.random_density(2, seed=33)
        ch = q.constant_channel(tau, d_in=2)
        back = q.choi_to_kraus(ch.choi, 2, 2)
        rho = q.random_density(2, seed=34)
        assert np.abs(back.apply(rho) - tau.matrix).max() <= 1e-9

    def test_bad_marginal_rejected(self):
        with pytest.raises(InvalidProtocolError):
            q.choi_to_kraus(np.eye(4) / 1.7, 2, 2)


class TestStinespring:
    def test_identity(self):
        u = q.stinespring(q.identity_channel(2))
        np.testing.assert_allclose(u, np.eye(2))

    def test_full_dephasing(self):
        ch = q.dephasing(1.0)
        u = q.stinespring(ch)
        assert u.shape == (4, 2)  # d_E = number of Kraus operators = 2
        assert np.abs(u.conj().T @ u - np.eye(2)).max() <= 1e-10
        rho = q.random_density(2, seed=3)
        big = u @ rho.matrix @ u.conj().T
        out = partial_trace(big, [2, 2], [1])
        assert np.abs(out - ch.apply(rho)).max() <= 1e-10

    def test_random_channel(self):
        ch = q.random_channel(3, 2, kraus_rank=4, seed=8)
        u = q.stinespring(ch)
        assert np.abs(u.conj().T @ u - np.eye(3)).max() <= 1e-9
        for s in range(20):
            rho = q.random_density(3, seed=200 + s)
            big = u @ rho.matrix @ u.conj().T
            out = partial_trace(big, [len(ch.kraus), 2], [1])
            assert np.abs(out - ch.apply(rho)).max() <= 1e-9


class TestJointOutput:
    def test_identity_channel_gives_max_entangled(self):
        joint = q.joint_output(q.identity_channel(2), q.maximally_mixed(2))
        target = np.outer(BELL["00"], BELL["00"])
        np.testing.assert_allclose(joint.matrix, target, atol=1e-12)

    def test_constant_channel_decouples(self):
        tau = q.random_density(2, seed=41)
        rho = q.random_density(2, seed=42)
        joint = q.joint_output(q.constant_channel(tau, 2), rho)
        np.testing.assert_allclose(joint.matrix, kron(rho.matrix, tau.matrix), atol=1e-9)

    def test_choi_sandwich_equals_kraus_on_purification(self):
        ch = q.random_channel(3, 2, kraus_rank=2, seed=51)
        rho = q.random_density(3, seed=52)
        joint = q.joint_output(ch, rho)
        pur = q.canonical_purification(rho).projector()
        other = sum(
            kron(np.eye(3), k) @ pur @ kron(np.eye(3), k).conj().T for k in ch.kraus
        )
        assert np.abs(joint.matrix - other).max() <= 1e-10

    def test_marginal_is_input(self):
        ch = q.random_channel(2, 3, kraus_rank=2, seed=61)
        rho = q.random_density(2, seed=62)
        joint = q.joint_output(ch, rho)
        marginal = partial_trace(joint.matrix, [2, 3], [0])
        assert np.abs(marginal - rho.matrix).max() <= 1e-9


def teleportation_protocol():
    povm = [np.outer(v, v.conj()) for v in BELL.values()]
    corrections = [np.eye(2, dtype=complex), SX, SZ, SX @ SZ]
    return q.ELOCCProtocol(
        d_k=2,
        shared_state=q.PureState(BELL["00"]),
        povm=povm,
        decoders=[q.QuantumChannel([u]) for u in corrections],
    )


class TestProtocols:
    def test_trivial_protocol_is_constant_channel(self):
        tau = q.random_density(2, seed=71)
        prot = q.ELOCCProtocol(
            d_k=2,
            shared_state=q.PureState(BELL["00"]),
            povm=[np.eye(4)],
            decoders=[q.constant_channel(tau, d_in=2)],
        )
        ch = q.elocc_to_channel(prot)
        assert q.channel_distance(ch, q.constant_channel(tau, d_in=2)) <= 1e-9

    def test_teleportation_is_identity(self):
        ch = q.elocc_to_channel(teleportation_protocol())
        assert q.channel_distance(ch, q.identity_channel(2)) <= 1e-9

    def test_shared_randomness_realizes_mixtures(self):
        first = q.random_channel(2, 2, 2, seed=81)
        second = q.random_channel(2, 2, 3, seed=82)
        lam = 0.35

        def protocol_for(chan):
            base = teleportation_protocol()
            decoders = [
                q.QuantumChannel([k @ u.kraus[0] for k in chan.kraus])
                for u in base.decoders
            ]
            return q.ELOCCProtocol(
                d_k=2, shared_state=base.shared_state, povm=base.povm, decoders=decoders
            )

        p1, p2 = protocol_for(first), protocol_for(second)
        shared = np.zeros((2, 2, 2, 2), dtype=complex)  # (c, K, c', K')
        b = BELL["00"].reshape(2, 2)
        for bit, w in ((0, np.sqrt(1 - lam)), (1, np.sqrt(lam))):
            shared[bit, :, bit, :] += w * b
        povm, decoders = [], []
        for m in range(4):
            e = np.zeros((2, 2, 2, 2, 2, 2), dtype=complex)  # (a, c', k' ; ...)
            for bit, prot in ((0, p1), (1, p2)):
                em = prot.povm[m].reshape(2, 2, 2, 2)
                e[:, bit, :, :, bit, :] += em.transpose(0, 1, 2, 3)
            povm.append(e.reshape(8, 8))
            kraus = []
            for bit, prot in ((0, p1), (1, p2)):
                proj = np.zeros((1, 2))
                proj[0, bit] = 1.0
                kraus += [np.kron(proj, k) for k in prot.decoders[m].kraus]
            decoders.append(q.QuantumChannel(kraus, d_in=4, d_out=2))
        mixed = q.ELOCCProtocol(
            d_k=4, shared_state=q.PureState(shared.reshape(-1)), povm=povm, decoders=decoders
        )
        ch = q.elocc_to_channel(mixed)
        target = q.mix_channels([first, second], [1 - lam, lam])
        assert q.channel_distance(ch, target) <= 1e-9

    def test_incomplete_povm_rejected(self):
        with pytest.raises(InvalidProtocolError):
            q.ELOCCProtocol(
                d_k=2,
                shared_state=q.PureState(BELL["00"]),
                povm=[0.5 * np.eye(4)],
                decoders=[q.identity_channel(2)],
            )

    def test_random_protocols_are_cptp(self):
        rng = np.random.default_rng(90)
        for _ in range(200):
            d_k = int(rng.integers(2, 5))
            m_out = int(rng.integers(1, 5))
            d_a, d_b = 2, 2
            # random POVM by normalizing squares of Ginibre matrices
            raw = [
                (lambda g: g @ g.conj().T)(
                    rng.normal(size=(d_a * d_k, d_a * d_k))
                    + 1j * rng.normal(size=(d_a * d_k, d_a * d_k))
                )
                for _ in range(m_out)
            ]
            total = sum(raw)
            w, v = np.linalg.eigh(total)
            inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
            povm = [inv_sqrt @ e @ inv_sqrt for e in raw]
            shared = rng.normal(size=d_k * d_k) + 1j * rng.normal(size=d_k * d_k)
            prot = q.ELOCCProtocol(
                d_k=d_k,
                shared_state=q.PureState(shared / np.linalg.norm(shared)),
                povm=povm,
                decoders=[
                    q.random_channel(d_k, d_b, int(rng.integers(1, d_k * d_b + 1)),
                                     seed=int(rng.integers(0, 2**31)))
                    for _ in range(m_out)
                ],
            )
            ch = q.elocc_to_channel(prot)
            total_k = sum(k.conj().T @ k for k in ch.kraus)
            assert np.abs(total_k - np.eye(d_a)).max() <= 1e-7
            marg = partial_trace(ch.choi, [d_a, d_b], [0])
            assert np.abs(marg - np.eye(d_a)).max() <= 1e-7
            assert np.linalg.eigvalsh(ch.choi).min() >= -1e-8


class TestConstructors:
    def test_depolarizing_full(self):
        ch = q.depolarizing(1.0)
        rho = q.random_density(2, seed=7)
        np.testing.assert_allclose(ch.apply(rho), np.eye(2) / 2, atol=1e-12)

    def test_dephasing_zero_is_identity(self):
        assert q.channel_distance(q.dephasing(0.0), q.identity_channel(2)) <= 1e-12

    def test_parameter_range(self):
        with pytest.raises(ParameterError):
            q.depolarizing(1.5)
        with pytest.raises(ParameterError):
            q.random_channel(2, 2, kraus_rank=0)

    def test_generated_channels_trace_preserving(self):
        rng = np.random.default_rng(99)
        for _ in range(30):
            d_in = int(rng.integers(2, 4))
            d_out = int(rng.integers(2, 4))
            rank = int(rng.integers(1, d_in * d_out + 1))
            ch = q.random_channel(d_in, d_out, rank, seed=int(rng.integers(0, 2**31)))
            total = sum(k.conj().T @ k for k in ch.kraus)
            assert np.abs(total - np.eye(d_in)).max() <= 1e-8
            marg = partial_trace(ch.choi, [d_in, d_out], [0])
            assert np.abs(marg - np.eye(d_in)).max() <= 1e-8

    def test_tensor_channels(self):
        a = q.depolarizing(0.3)
        big = q.tensor_channels(a, a)
        rho = q.random_density(4, seed=13)
        direct = big.apply(rho)
        assert abs(np.trace(direct).real - 1.0) <= 1e-10
        assert big.d_in == 4 and big.d_out == 4

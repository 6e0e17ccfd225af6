import numpy as np
import pytest

from relqinfo import qstate
from relqinfo._errors import ValidationError
from relqinfo.channel import (BipartiteOperation, KrausSet, apply, bell_state,
                              chsh_optimize, chsh_value, choi_and_cp_check,
                              cluster_chsh_bound, complete_bell_pvm,
                              conditioned_basis_protocol, conditioned_basis_pvm,
                              incomplete_bell_pvm, is_semicausal,
                              kraus_from_unitary, locc_outcome_to_global,
                              povm_of, settings_to_observables,
                              simulate_locc_protocol, simulate_teleportation,
                              teleport_identity_residual, verify_no_signalling)
from relqinfo.qstate import DensityMatrix, PureState

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class TestKrausFromUnitary:
    def test_identity_with_trivial_apparatus(self):
        ks = kraus_from_unitary(np.eye(2, dtype=complex),
                                PureState(np.array([1.0])),
                                [[np.array([1.0])]])
        assert ks.n_outcomes == 1
        assert np.abs(ks.ops[0][0] - np.eye(2)).max() < 1e-14

    def test_cnot_premeasurement(self):
        ks = kraus_from_unitary(CNOT, PureState(np.array([1.0, 0])),
                                [[np.array([1.0, 0])], [np.array([0, 1.0])]])
        assert np.abs(ks.ops[0][0] - np.diag([1.0, 0])).max() < 1e-14
        assert np.abs(ks.ops[1][0] - np.diag([0, 1.0])).max() < 1e-14

    def test_apparatus_hadamard_is_identity_channel(self):
        u = np.kron(np.eye(2, dtype=complex), HAD)
        ks = kraus_from_unitary(u, PureState(np.array([1.0, 0])),
                                [[np.array([1.0, 0]), np.array([0, 1.0])]])
        assert ks.n_outcomes == 1
        c1, cp, _ = choi_and_cp_check(ks)
        c2, _, _ = choi_and_cp_check(lambda r: r, dim_in=2)
        assert cp
        assert np.abs(c1.matrix - c2.matrix).max() < 1e-12

    def test_non_unitary_rejected(self):
        with pytest.raises(ValidationError):
            kraus_from_unitary(np.eye(2) * 2.0, PureState(np.array([1.0])),
                               [[np.array([1.0])]])

    def test_non_orthogonal_partition_rejected(self):
        with pytest.raises(ValidationError):
            kraus_from_unitary(CNOT, PureState(np.array([1.0, 0])),
                               [[np.array([1.0, 0])],
                                [np.array([1.0, 1.0]) / np.sqrt(2)]])


class TestApplyAndPovm:
    def test_z_measurement_on_plus(self):
        pvm = KrausSet.from_projectors([np.diag([1.0, 0]), np.diag([0, 1.0])])
        plus = DensityMatrix.from_pure(np.array([1, 1]) / np.sqrt(2))
        out = apply(pvm, plus)
        assert abs(out[0][0] - 0.5) < 1e-12 and abs(out[1][0] - 0.5) < 1e-12
        assert np.abs(out[0][1].matrix - np.diag([1.0, 0])).max() < 1e-12
        assert np.abs(out[1][1].matrix - np.diag([0, 1.0])).max() < 1e-12

    def test_incomplete_bell_on_01(self):
        T = incomplete_bell_pvm()
        rho = DensityMatrix.from_pure(np.kron([1, 0], [0, 1]).astype(complex))
        out = apply(T.kraus, rho)
        assert out[0][0] < 1e-12 and out[0][1] is None
        assert abs(out[1][0] - 1.0) < 1e-12

    def test_incomplete_bell_on_00(self):
        T = incomplete_bell_pvm()
        rho = DensityMatrix.from_pure(np.kron([1, 0], [1, 0]).astype(complex))
        out = apply(T.kraus, rho)
        assert abs(out[0][0] - 0.5) < 1e-12 and abs(out[1][0] - 0.5) < 1e-12
        for _, post in out:
            assert qstate.concurrence(post) > 1.0 - 1e-10

    def test_probability_conservation(self):
        rng = np.random.default_rng(21)
        T = conditioned_basis_pvm()
        for _ in range(50):
            rho = qstate.random_density_matrix(4, rng)
            probs = [p for p, _ in apply(T.kraus, rho)]
            assert abs(sum(probs) - 1.0) < 1e-12

    def test_povm_of_projective_set(self):
        pvm = KrausSet.from_projectors([np.diag([1.0, 0]), np.diag([0, 1.0])])
        povm = povm_of(pvm)
        assert np.abs(povm.elements[0] - np.diag([1.0, 0])).max() < 1e-14

    def test_povm_of_unitary_mixture(self):
        sx = qstate.SIGMA_X
        ks = KrausSet.single([np.eye(2) / np.sqrt(2), sx / np.sqrt(2)])
        povm = povm_of(ks)
        assert np.abs(povm.elements[0] - np.eye(2)).max() < 1e-12

    def test_povm_of_conditioned_basis_projectors(self):
        ks = conditioned_basis_pvm().kraus
        povm = povm_of(ks)
        for e in povm.elements:
            ev = np.linalg.eigvalsh(e)
            assert abs(ev.max() - 1.0) < 1e-12 and ev[:-1].max() < 1e-12

    def test_povm_completeness_over_random_kraus_sets(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            u = qstate.haar_unitary(8, rng)
            ks = kraus_from_unitary(
                u.reshape(8, 8), PureState(np.eye(4)[0].astype(complex)),
                [[np.eye(4)[j].astype(complex)] for j in range(4)])
            total = sum(e for e in povm_of(ks).elements)
            assert np.abs(total - np.eye(2)).max() < 1e-12


class TestChoi:
    def test_identity_channel_choi(self):
        choi, cp, _ = choi_and_cp_check(lambda r: r, dim_in=2)
        phip = bell_state("phi+")
        assert cp
        assert np.abs(choi.matrix - 2.0 * np.outer(phip, phip.conj())).max() < 1e-12
        assert abs(np.trace(choi.matrix).real - 2.0) < 1e-12

    def test_transpose_map_not_cp(self):
        _, cp, min_eig = choi_and_cp_check(lambda r: r.T, dim_in=2)
        assert not cp
        assert abs(min_eig + 0.5) < 1e-10

    def test_depolarizing_channel_cp(self):
        p = 0.3
        ops = [np.sqrt(1 - 3 * p / 4) * np.eye(2, dtype=complex),
               np.sqrt(p / 4) * qstate.SIGMA_X,
               np.sqrt(p / 4) * qstate.SIGMA_Y,
               np.sqrt(p / 4) * qstate.SIGMA_Z]
        _, cp, min_eig = choi_and_cp_check(KrausSet.single(ops))
        assert cp and min_eig > -1e-12

    def test_all_premeasurement_channels_certify_cp(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            u = qstate.haar_unitary(4, rng)
            ks = kraus_from_unitary(u, PureState(np.array([1.0, 0])),
                                    [[np.array([1.0, 0])], [np.array([0, 1.0])]])
            _, cp, _ = choi_and_cp_check(ks)
            assert cp


class TestNoSignalling:
    def test_local_instruments_do_not_shift_marginals(self):
        rng = np.random.default_rng(24)
        a = KrausSet.from_projectors([np.diag([1.0, 0]), np.diag([0, 1.0])])
        b = KrausSet.single([qstate.haar_unitary(2, rng)])
        rho = qstate.random_density_matrix(4, rng)
        report = verify_no_signalling(a, b, rho, trials=10)
        assert report["max_marginal_shift"] < 1e-12

    def test_hundred_random_local_instruments(self):
        rng = np.random.default_rng(25)
        worst = 0.0
        for _ in range(100):
            ua = qstate.haar_unitary(2, rng)
            proj = np.outer(qstate.haar_state(2, rng),
                            qstate.haar_state(2, rng).conj())
            # random local instrument: conjugated projective measurement
            p1 = ua @ np.diag([1.0, 0]).astype(complex) @ ua.conj().T
            a = KrausSet.from_projectors([p1, np.eye(2) - p1])
            b = KrausSet.single([qstate.haar_unitary(2, rng)])
            rho = qstate.random_density_matrix(4, rng)
            report = verify_no_signalling(a, b, rho, trials=2)
            worst = max(worst, report["max_marginal_shift"])
        assert worst < 1e-12

    def test_frame_order_independence(self):
        # commuting embedded sets applied in either order agree outcome by
        # outcome on the unnormalized branch states
        rng = np.random.default_rng(26)
        a = KrausSet.from_projectors([np.diag([1.0, 0]), np.diag([0, 1.0])])
        ub = qstate.haar_unitary(2, rng)
        b = KrausSet.from_projectors([ub @ np.diag([1.0, 0]) @ ub.conj().T,
                                      ub @ np.diag([0, 1.0]) @ ub.conj().T])
        eye = np.eye(2, dtype=complex)
        for _ in range(20):
            rho = qstate.random_density_matrix(4, rng).matrix
            for am in a.ops:
                for bm in b.ops:
                    ae = np.kron(am[0], eye)
                    be = np.kron(eye, bm[0])
                    ab = ae @ be @ rho @ be.conj().T @ ae.conj().T
                    ba = be @ ae @ rho @ ae.conj().T @ be.conj().T
                    assert np.abs(ab - ba).max() < 1e-12


class TestSemicausality:
    def test_complete_bell_is_causal(self):
        T = complete_bell_pvm()
        for direction in ("B->A", "A->B"):
            v = is_semicausal(T, direction, haar_probes=50, seed=31)
            assert v.semicausal

    def test_incomplete_bell_witness(self):
        v = is_semicausal(incomplete_bell_pvm(), "B->A", haar_probes=50, seed=31)
        assert not v.semicausal
        assert abs(v.advantage - 0.75) < 1e-9
        assert v.witness is not None

    def test_conditioned_basis_pvm_is_semicausal_b_to_a(self):
        v = is_semicausal(conditioned_basis_pvm(), "B->A", haar_probes=100, seed=31)
        assert v.semicausal

    def test_conditioned_basis_pvm_signals_a_to_b(self):
        v = is_semicausal(conditioned_basis_pvm(), "A->B", haar_probes=50, seed=31)
        assert not v.semicausal

    def test_report_shape(self):
        v = is_semicausal(incomplete_bell_pvm(), "B->A", haar_probes=10, seed=31)
        report = v.to_report("incomplete-bell", 1e-9)
        assert report["advantage"] == v.advantage
        assert report["direction"] == "B->A"
        assert report["witness_pre_op"] is not None


class TestLocc:
    def test_zero_plus_input(self):
        rho = DensityMatrix.from_pure(
            np.kron([1, 0], [1, 1] / np.sqrt(2)).astype(complex))
        dist = simulate_locc_protocol(conditioned_basis_protocol(), rho)
        probs = {locc_outcome_to_global(k): v for k, v in dist.items()
                 if len(k) == 2}
        assert abs(probs.get(0, 0.0) - 0.5) < 1e-12
        assert abs(probs.get(1, 0.0) - 0.5) < 1e-12

    def test_one_plus_input(self):
        rho = DensityMatrix.from_pure(
            np.kron([0, 1], [1, 1] / np.sqrt(2)).astype(complex))
        dist = simulate_locc_protocol(conditioned_basis_protocol(), rho)
        probs = {locc_outcome_to_global(k): v for k, v in dist.items()
                 if len(k) == 2}
        assert abs(probs.get(2, 0.0) - 1.0) < 1e-12

    def test_matches_global_pvm_on_random_inputs(self):
        rng = np.random.default_rng(27)
        T = conditioned_basis_pvm()
        for _ in range(50):
            v = qstate.haar_state(4, rng)
            rho = DensityMatrix.from_pure(v)
            global_probs = povm_of(T.kraus).probabilities(rho)
            dist = simulate_locc_protocol(conditioned_basis_protocol(), rho)
            locc_probs = np.zeros(4)
            for k, p in dist.items():
                if len(k) == 2:
                    locc_probs[locc_outcome_to_global(k)] += p
            assert 0.5 * np.abs(global_probs - locc_probs).sum() < 1e-12


class TestTeleportation:
    def test_basis_input(self):
        assert teleport_identity_residual(1.0, 0.0) < 1e-12

    def test_complex_input(self):
        assert teleport_identity_residual(1 / np.sqrt(2), 1j / np.sqrt(2)) < 1e-12

    def test_haar_sweep(self):
        rng = np.random.default_rng(28)
        worst_res, worst_fid = 0.0, 1.0
        for _ in range(100):
            v = qstate.haar_state(2, rng)
            worst_res = max(worst_res, teleport_identity_residual(v[0], v[1]))
            sim = simulate_teleportation(v[0], v[1])
            worst_fid = min(worst_fid, sim["min_fidelity"])
            assert abs(sum(sim["probabilities"]) - 1.0) < 1e-12
        assert worst_res < 1e-12
        assert worst_fid > 1.0 - 1e-12

    def test_unnormalized_rejected(self):
        with pytest.raises(ValidationError):
            teleport_identity_residual(1.0, 1.0)


class TestChsh:
    def test_singlet_optimal_settings(self):
        singlet = DensityMatrix.from_pure(bell_state("psi-"))
        zeta, settings = chsh_optimize(singlet)
        assert abs(zeta - np.sqrt(2)) < 1e-9
        obs = settings_to_observables(settings)
        assert abs(chsh_value(singlet, *obs) - np.sqrt(2)) < 1e-9

    def test_product_state_classical_bound(self):
        rho = DensityMatrix.from_pure(np.kron([1, 0], [1, 0]).astype(complex))
        zeta, settings = chsh_optimize(rho)
        assert zeta <= 1.0 + 1e-9
        zg, _ = chsh_optimize(rho, method="grid")
        assert abs(zeta - zg) < 1e-3

    def test_maximally_mixed_is_uncorrelated(self):
        rho = DensityMatrix.maximally_mixed(4)
        a = qstate.SIGMA_Z
        b = qstate.SIGMA_X
        assert abs(chsh_value(rho, a, a, b, b)) < 1e-12

    def test_werner_against_grid_oracle(self):
        p = 0.5
        psim = bell_state("psi-")
        rho = DensityMatrix(p * np.outer(psim, psim.conj()) + (1 - p) * np.eye(4) / 4)
        zeta, _ = chsh_optimize(rho)
        z_grid, _ = chsh_optimize(rho, method="grid")
        assert abs(zeta - z_grid) < 1e-3
        assert abs(zeta - 0.7071067811865476) < 1e-9

    def test_observable_spectrum_enforced(self):
        rho = DensityMatrix.maximally_mixed(4)
        with pytest.raises(ValidationError):
            chsh_value(rho, 2 * qstate.SIGMA_Z, qstate.SIGMA_Z, qstate.SIGMA_X,
                       qstate.SIGMA_X)

    def test_tsirelson_bound_over_random_draws(self):
        rng = np.random.default_rng(29)
        bound = np.sqrt(2) + 1e-9
        for _ in range(2000):
            rho = qstate.random_density_matrix(4, rng)
            zeta, _ = chsh_optimize(rho)
            assert zeta <= bound


class TestClusterBound:
    def test_zero_separation(self):
        assert abs(cluster_chsh_bound(0.0, 0.0) - 5.0) < 1e-15

    def test_large_separation_limit(self):
        assert abs(cluster_chsh_bound(1.0, 100.0) - 1.0) < 1e-12

    def test_log4_crossing(self):
        assert abs(cluster_chsh_bound(1.0, np.log(4.0)) - 2.0) < 1e-12

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            cluster_chsh_bound(-1.0, 1.0)


class TestBipartiteOperation:
    def test_dimension_validation(self):
        with pytest.raises(Exception):
            BipartiteOperation(dims=(2, 3), kraus=complete_bell_pvm().kraus)


class TestSubnormalizedInstruments:
    def test_incomplete_set_needs_the_flag(self):
        half = [np.diag([1.0, 0.0]).astype(complex)]
        with pytest.raises(ValidationError):
            KrausSet(dim_in=2, dim_out=2, ops=(tuple(half),))
        ks = KrausSet(dim_in=2, dim_out=2, ops=(tuple(half),),
                      subnormalized=True)
        assert ks.subnormalized

    def test_overcomplete_rejected_even_with_flag(self):
        with pytest.raises(ValidationError):
            KrausSet(dim_in=2, dim_out=2,
                     ops=((np.eye(2, dtype=complex) * 1.2,),),
                     subnormalized=True)

"""Acceptance criteria as executable checks.

Each criterion runs at a named tolerance and reports what it measured.
The CLI --selfcheck flag and the acceptance test module both drive this
table; tolerance overrides let a caller tighten a check and see whether a
failure is tolerance-class (fails only at the override) or logic-class
(fails at the shipped tolerance too).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channel, horizon, lorentz, photon, qstate, wavepacket
from .qstate import DensityMatrix, hermitize

SEED = 20240901

DEFAULT_TOLS = {
    "bell_advantage": 1e-9,
    "semicausal_shift": 1e-12,
    "locc_tv": 1e-12,
    "teleport": 1e-12,
    "chsh_singlet": 1e-6,
    "chsh_product": 1e-9,
    "tsirelson": 1e-9,
    "choi_transpose": 1e-10,
    "standard_boost": 1e-10,
    "wigner_rotation": 1e-10,
    "representation": 1e-8,
    "entropy_zero": 1e-12,
    "entropy_convergence": 0.05,
    "exponent_low": 1.8,
    "exponent_high": 2.2,
    "inverse_restore": 1e-8,
    "concurrence_rest": 1e-3,
    "concurrence_restore": 1e-6,
    "povm_completeness": 1e-10,
    "effective_naive": 1e-10,
    "doppler_ratio": 0.02,
    "aberration": 1e-3,
    "detailed_balance": 1e-12,
    "rindler_entropy": 1e-10,
    "mean_occupation": 1e-12,
    "bh_scaling": 1e-12,
    "first_law": 1e-7,
    "evaporate_half": 1e-9,
    "evaporate_ode": 1e-3,
    "hawking_pin": 1e-3,
    "noncovariance_gap": 1e-4,
    "cp_margin": 1e-6,
}

DEFAULT_GRIDS = {
    "entropy_points": 15,
    "entropy_points_coarse": 11,
    "entropy_points_fine": 21,
    "scaling_points": 15,
    "bipartite_points": 9,
    "photon_theta": 32,
    "photon_phi": 64,
    "povm_packets": 500,
    "povm_theta": 12,
    "povm_phi": 16,
    "chsh_draws": 10000,
    "teleport_draws": 100,
    "locc_draws": 50,
    "momentum_draws": 1000,
}

# constants-derived pins, recomputed from scipy.constants CODATA values
HAWKING_T_SOLAR_KG = 1.989e30
HAWKING_T_SOLAR_K = 6.168429716410344e-08


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict
    tolerance_name: str
    tolerance: float
    failure_class: str | None = None  # 'tolerance' or 'logic' when failed


@dataclass(frozen=True)
class Criterion:
    name: str
    tolerance_name: str
    run: Callable  # (tols, grids) -> (passed: bool, measured: dict)


def _tols(overrides: dict | None) -> dict:
    t = dict(DEFAULT_TOLS)
    if overrides:
        unknown = set(overrides) - set(t)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        t.update(overrides)
    return t


def _grids(overrides: dict | None) -> dict:
    g = dict(DEFAULT_GRIDS)
    if overrides:
        unknown = set(overrides) - set(g)
        if unknown:
            raise KeyError(f"unknown grid names: {sorted(unknown)}")
        g.update({k: int(v) for k, v in overrides.items()})
    return g


# ---------------------------------------------------------------------------
# criterion bodies

def _check_incomplete_bell(tols, grids):
    verdict = channel.is_semicausal(channel.incomplete_bell_pvm(), "B->A",
                                    haar_probes=50, seed=SEED)
    gap = abs(verdict.advantage - 0.75)
    return (not verdict.semicausal and gap < tols["bell_advantage"],
            {"advantage": verdict.advantage, "gap_from_0.75": gap})


def _marginal_shift(T, direction, rng, n_haar=25):
    da, db = T.dims
    sender_dim = db if direction == "B->A" else da
    receiver = 0 if direction == "B->A" else 1
    pre = [u for _, u in channel._PAULI_FAMILY]
    pre += [qstate.haar_unitary(sender_dim, rng) for _ in range(n_haar)]
    states = [np.zeros(da * db, dtype=complex) for _ in range(4)]
    for i, s in enumerate(states):
        s[i] = 1.0
    states += [channel.bell_state(n) for n in ("phi+", "phi-", "psi+", "psi-")]
    states += [qstate.haar_state(da * db, rng) for _ in range(8)]
    worst = 0.0
    for v in states:
        rho0 = np.outer(v, v.conj())
        base = None
        for u in pre:
            ue = (np.kron(np.eye(da, dtype=complex), u) if direction == "B->A"
                  else np.kron(u, np.eye(db, dtype=complex)))
            out = channel._sum_channel(T.kraus, ue @ rho0 @ ue.conj().T)
            marg = channel._marginal(out, T.dims, receiver)
            if base is None:
                base = marg
            else:
                ev = np.linalg.eigvalsh(hermitize(marg - base))
                worst = max(worst, 0.5 * np.abs(ev).sum())
    return worst


def _check_complete_bell(tols, grids):
    rng = np.random.default_rng(SEED)
    T = channel.complete_bell_pvm()
    shift = max(_marginal_shift(T, "B->A", rng), _marginal_shift(T, "A->B", rng))
    return shift < tols["semicausal_shift"], {"max_marginal_shift": shift}


def _check_locc(tols, grids):
    rng = np.random.default_rng(SEED)
    T = channel.conditioned_basis_pvm()
    povm = channel.povm_of(T.kraus)
    protocol = channel.conditioned_basis_protocol()
    worst = 0.0
    for _ in range(grids["locc_draws"]):
        rho = DensityMatrix.from_pure(qstate.haar_state(4, rng))
        global_probs = povm.probabilities(rho)
        dist = channel.simulate_locc_protocol(protocol, rho)
        locc = np.zeros(4)
        for k, p in dist.items():
            if len(k) == 2:
                locc[channel.locc_outcome_to_global(k)] += p
        worst = max(worst, 0.5 * np.abs(global_probs - locc).sum())
    return worst < tols["locc_tv"], {"max_total_variation": worst}


def _check_teleport(tols, grids):
    rng = np.random.default_rng(SEED)
    worst_res, worst_fid = 0.0, 1.0
    for _ in range(grids["teleport_draws"]):
        v = qstate.haar_state(2, rng)
        worst_res = max(worst_res, channel.teleport_identity_residual(v[0], v[1]))
        worst_fid = min(worst_fid,
                        channel.simulate_teleportation(v[0], v[1])["min_fidelity"])
    ok = worst_res < tols["teleport"] and worst_fid > 1.0 - tols["teleport"]
    return ok, {"max_residual": worst_res, "min_fidelity": worst_fid}


def _random_density_batch(n, rng):
    g = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    rhos = g @ np.conj(np.swapaxes(g, 1, 2))
    tr = np.einsum("nii->n", rhos).real
    return rhos / tr[:, None, None]


def _check_chsh(tols, grids):
    singlet = DensityMatrix.from_pure(channel.bell_state("psi-"))
    z_singlet, settings = channel.chsh_optimize(singlet)
    z_via_value = channel.chsh_value(
        singlet, *channel.settings_to_observables(settings))
    product = DensityMatrix.from_pure(np.kron([1, 0], [1, 0]).astype(complex))
    z_product, _ = channel.chsh_optimize(product)

    rng = np.random.default_rng(SEED)
    worst_product = z_product
    for _ in range(50):
        v = np.kron(qstate.haar_state(2, rng), qstate.haar_state(2, rng))
        z, _ = channel.chsh_optimize(DensityMatrix.from_pure(v))
        worst_product = max(worst_product, z)

    # batched random (state, settings) draws against the quantum bound
    n = grids["chsh_draws"]
    rhos = _random_density_batch(n, rng)
    sig = np.stack([qstate.SIGMA_X, qstate.SIGMA_Y, qstate.SIGMA_Z])

    def bloch_batch(k):
        v = rng.normal(size=(k, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return np.einsum("ni,iab->nab", v, sig)

    a1, a2, b1, b2 = (bloch_batch(n) for _ in range(4))
    op = (np.einsum("nij,nkl->nikjl", a1, b1 + b2)
          + np.einsum("nij,nkl->nikjl", a2, b1 - b2)).reshape(n, 4, 4)
    zetas = 0.5 * np.einsum("nab,nba->n", rhos, op).real
    worst_draw = float(np.abs(zetas).max())

    bound = np.sqrt(2.0)
    ok = (abs(z_singlet - bound) < tols["chsh_singlet"]
          and abs(z_via_value - bound) < tols["chsh_singlet"]
          and worst_product <= 1.0 + tols["chsh_product"]
          and worst_draw <= bound + tols["tsirelson"])
    return ok, {"singlet": z_singlet, "max_product": worst_product,
                "max_random_draw": worst_draw}


def _check_choi(tols, grids):
    _, cp_t, min_eig = channel.choi_and_cp_check(lambda r: r.T, dim_in=2)
    gap = abs(min_eig + 0.5)
    rng = np.random.default_rng(SEED)
    all_cp = True
    for _ in range(25):
        u = qstate.haar_unitary(4, rng)
        ks = channel.kraus_from_unitary(
            u, qstate.PureState(np.array([1.0, 0])),
            [[np.array([1.0, 0])], [np.array([0, 1.0])]])
        _, cp, _ = channel.choi_and_cp_check(ks)
        all_cp = all_cp and cp
    ok = (not cp_t) and gap < tols["choi_transpose"] and all_cp
    return ok, {"transpose_min_eig": min_eig, "kraus_channels_cp": all_cp}


def _check_wigner(tols, grids):
    rng = np.random.default_rng(SEED)
    n = grids["momentum_draws"]
    m = 1.0
    worst_massive = 0.0
    for _ in range(n):
        p = np.array([0.0, *rng.normal(scale=0.8, size=3)])
        p[0] = np.sqrt(m * m + p[1:] @ p[1:])
        got = lorentz.standard_boost_massive(p, m).apply([m, 0, 0, 0])
        worst_massive = max(worst_massive, np.abs(got - p).max())
    worst_massless = 0.0
    for _ in range(n):
        nvec = rng.normal(size=3)
        nvec /= np.linalg.norm(nvec)
        e = rng.uniform(0.1, 5.0)
        k = np.array([e, *(e * nvec)])
        got = lorentz.standard_boost_massless(k).apply([1.0, 0, 0, 1.0])
        worst_massless = max(worst_massless, np.abs(got - k).max())

    worst_rot = 0.0
    for _ in range(50):
        lam = lorentz.rotation(rng.normal(size=3), rng.uniform(0, np.pi))
        p = np.array([0.0, *rng.normal(size=3)])
        p[0] = np.sqrt(1.0 + p[1:] @ p[1:])
        w = lorentz.wigner_rotation(lam, p, 1.0)
        worst_rot = max(worst_rot, np.abs(w.rotation - lam.matrix[1:, 1:]).max())

    p = np.array([np.sqrt(1.25), 0, 0, 0.5])
    w_col = lorentz.wigner_rotation(lorentz.boost([0, 0, 0.6]), p, 1.0)

    pk = wavepacket.gaussian_packet(wavepacket.PacketSpec(mass=1.0, spread=0.2,
                                                          points=9))
    l1 = lorentz.boost(rapidity=0.8, axis=(0, 0, 1.0))
    l2 = lorentz.boost(rapidity=0.6, axis=(1.0, 0, 0))
    two = wavepacket.boost_packet(wavepacket.boost_packet(pk, l1), l2)
    one = wavepacket.boost_packet(pk, lorentz.compose(l2, l1))
    rep_gap = float(np.abs(two.amplitudes - one.amplitudes).max())

    ok = (worst_massive < tols["standard_boost"]
          and worst_massless < tols["standard_boost"]
          and worst_rot < tols["wigner_rotation"]
          and abs(w_col.angle) < tols["wigner_rotation"]
          and rep_gap < tols["representation"])
    return ok, {"standard_boost_massive": worst_massive,
                "standard_boost_massless": worst_massless,
                "rotation_passthrough": worst_rot,
                "collinear_angle": abs(w_col.angle),
                "composition_gap": rep_gap}


def _check_entropy_surface(tols, grids):
    dm = 0.35
    thetas = [0.0, np.pi / 4, np.pi / 2]
    zero_rows = wavepacket.entropy_surface(dm, [0.0], thetas,
                                           points=grids["entropy_points"])
    max_zero = max(s for _, _, s in zero_rows)

    gammas = [0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]
    betas = [wavepacket.beta_for_gamma(g, dm, 1.0) for g in gammas]
    rows = wavepacket.entropy_surface(dm, betas, [np.pi / 2],
                                      points=grids["entropy_points"])
    entropies = [s for _, _, s in rows]
    increasing = all(b > a for a, b in zip(entropies, entropies[1:]))

    beta = wavepacket.beta_for_gamma(0.2, dm, 1.0)
    s_co = wavepacket.entropy_surface(dm, [beta], [np.pi / 2],
                                      points=grids["entropy_points_coarse"])[0][2]
    s_fi = wavepacket.entropy_surface(dm, [beta], [np.pi / 2],
                                      points=grids["entropy_points_fine"])[0][2]
    conv = abs(s_fi - s_co) / s_fi

    ok = (max_zero < tols["entropy_zero"] and increasing
          and conv < tols["entropy_convergence"])
    return ok, {"max_entropy_at_zero": max_zero,
                "strictly_increasing": increasing,
                "self_convergence": conv}


def _check_error_scaling(tols, grids):
    report = wavepacket.packet_error_scaling(
        0.1, [0.0125, 0.025, 0.05], points=grids["scaling_points"])
    expo = report["fitted_exponent"]
    restored = max(report["pe_restored"])
    ok = (tols["exponent_low"] <= expo <= tols["exponent_high"]
          and restored < tols["inverse_restore"])
    return ok, {"fitted_exponent": expo, "max_pe_restored": restored}


def _check_bipartite(tols, grids):
    rows = wavepacket.bipartite_boost_concurrence(
        0.3, [0.0, 0.5, 1.0, 2.0], points=grids["bipartite_points"])
    cs = [c for _, c in rows]
    monotone = all(b <= a + 1e-12 for a, b in zip(cs, cs[1:]))

    pk = wavepacket.singlet_packet(0.3, points=grids["bipartite_points"])
    lam = lorentz.boost(rapidity=1.0, axis=(0, 0, 1.0))
    back = wavepacket.boost_bipartite(wavepacket.boost_bipartite(pk, lam),
                                      lam.inverse())
    c0 = qstate.concurrence(wavepacket.reduced_spin_pair(pk))
    c_back = qstate.concurrence(wavepacket.reduced_spin_pair(back))
    ok = (cs[0] > 1.0 - tols["concurrence_rest"] and monotone
          and abs(c_back - c0) < tols["concurrence_restore"])
    return ok, {"concurrence_by_rapidity": cs, "monotone": monotone,
                "restoration_gap": abs(c_back - c0)}


def _check_photon_povm(tols, grids):
    rng = np.random.default_rng(SEED)
    worst_sum, worst_eq = 0.0, 0.0
    for _ in range(grids["povm_packets"]):
        aperture = rng.uniform(0.02, 0.6)
        pk = photon.collimated_packet(aperture,
                                      polarization=qstate.haar_state(2, rng),
                                      n_theta=grids["povm_theta"],
                                      n_phi=grids["povm_phi"])
        total = sum(photon.povm_expectation(pk, ax) for ax in "xyz")
        worst_sum = max(worst_sum, abs(total - 1.0))
        gap = np.abs(photon.effective_density_matrix(pk).matrix
                     - photon.naive_density_matrix(pk).matrix).max()
        worst_eq = max(worst_eq, float(gap))
    ok = (worst_sum < tols["povm_completeness"]
          and worst_eq < tols["effective_naive"])
    return ok, {"max_completeness_gap": worst_sum,
                "max_effective_vs_naive": worst_eq}


def _check_doppler(tols, grids):
    worst_rel = 0.0
    ratio_at_half = None
    for v in (-0.5, -0.25, 0.25, 0.5):
        out = photon.doppler_error_ratio(0.05, v, n_theta=grids["photon_theta"],
                                         n_phi=grids["photon_phi"])
        target = (1 + v) / (1 - v)
        worst_rel = max(worst_rel, abs(out["ratio"] - target) / target)
        if v == 0.5:
            ratio_at_half = out["ratio"]
    ok = worst_rel < tols["doppler_ratio"]
    return ok, {"max_relative_error": worst_rel, "ratio_at_v_half": ratio_at_half}


def _check_aberration(tols, grids):
    tp, _ = lorentz.aberrate(0.01, 0.0, 0.6)
    rel = abs(tp / 0.01 - 2.0) / 2.0
    return rel < tols["aberration"], {"theta_ratio": tp / 0.01,
                                      "relative_error": rel}


def _check_unruh_rindler(tols, grids):
    worst_balance = 0.0
    for omega, a in ((0.5, 1.0), (2.0, 3.0), (1.0, 0.7)):
        lhs = horizon.detector_response(-omega, a) / horizon.detector_response(omega, a)
        target = np.exp(2 * np.pi * omega / a)
        worst_balance = max(worst_balance, abs(lhs - target) / target)

    worst_entropy = 0.0
    for ratio in (0.3, 1.0, 3.0):
        st = horizon.rindler_mode_state(ratio, 2 * np.pi)
        worst_entropy = max(worst_entropy,
                            abs(st.entropy() - st.thermal_entropy_oracle()))

    st = horizon.rindler_mode_state(1.0, 2 * np.pi / np.log(2.0))
    occ_gap = abs(st.mean_occupation() - 1.0)

    ok = (worst_balance < tols["detailed_balance"]
          and worst_entropy < tols["rindler_entropy"]
          and occ_gap < tols["mean_occupation"])
    return ok, {"detailed_balance_gap": worst_balance,
                "entropy_oracle_gap": worst_entropy,
                "mean_occupation_gap": occ_gap}


def _check_black_hole(tols, grids):
    from scipy.integrate import solve_ivp

    masses = (0.5, 1.0, 3.0, 100.0)
    kappa_m = [horizon.surface_gravity(horizon.BlackHole(M)) * M for M in masses]
    t_m = [horizon.hawking_temperature(horizon.BlackHole(M)) * M for M in masses]
    s_m2 = [horizon.bekenstein_entropy(horizon.BlackHole(M)) / M**2 for M in masses]
    scaling_gap = max(
        max(abs(k - 0.25) for k in kappa_m),
        max(abs(t - t_m[0]) for t in t_m),
        max(abs(s - s_m2[0]) for s in s_m2),
    )

    r1 = horizon.first_law_residual(1.0, 1e-3)
    r2 = horizon.first_law_residual(1.0, 5e-4)
    quad_gap = abs(r1 / r2 - 4.0)

    M0 = 3.7e8
    t_e = horizon.evaporation_lifetime(M0)
    half_gap = abs(horizon.evaporate(M0, 7 * t_e / 8).mass - M0 / 2) / M0

    def rhs(t, y):
        return -(M0**3) / (3 * t_e * y[0] ** 2)

    ts = np.linspace(0.0, 0.99 * t_e, 25)
    sol = solve_ivp(rhs, (0.0, ts[-1]), [M0], t_eval=ts, rtol=1e-10, atol=1e-6)
    closed = np.array([horizon.evaporate(M0, t).mass for t in ts])
    ode_gap = float((np.abs(sol.y[0] - closed) / closed).max())

    t_sun = horizon.hawking_temperature(horizon.BlackHole(HAWKING_T_SOLAR_KG),
                                        horizon.SI)
    pin_gap = abs(t_sun - HAWKING_T_SOLAR_K) / HAWKING_T_SOLAR_K

    ok = (scaling_gap < tols["bh_scaling"]
          and horizon.first_law_residual(1.0, 1e-4) < tols["first_law"]
          and quad_gap < 1e-3
          and half_gap < tols["evaporate_half"]
          and ode_gap < tols["evaporate_ode"]
          and pin_gap < tols["hawking_pin"])
    return ok, {"scaling_gap": scaling_gap, "first_law_quadratic_ratio_gap": quad_gap,
                "half_mass_gap": half_gap, "ode_gap": ode_gap,
                "solar_pin_gap": pin_gap}


def _check_witnesses(tols, grids):
    nc = wavepacket.noncovariance_witness(beta=0.8, spreads=(0.1, 0.3),
                                          points=grids["scaling_points"])
    cp = wavepacket.cp_failure_witness(gamma=0.04,
                                       points=grids["scaling_points"])
    ok = (nc["spectral_gap"] > tols["noncovariance_gap"]
          and nc["rest_marginal_gap"] < 1e-12
          and cp["pe_before_map"] > cp["pe_after_map"] + tols["cp_margin"])
    return ok, {"spectral_gap": nc["spectral_gap"],
                "pe_boosted": cp["pe_before_map"],
                "pe_after_inverse": cp["pe_after_map"]}


CRITERIA = [
    Criterion("01-incomplete-bell-advantage", "bell_advantage", _check_incomplete_bell),
    Criterion("02-complete-bell-semicausal", "semicausal_shift", _check_complete_bell),
    Criterion("03-locc-matches-global-pvm", "locc_tv", _check_locc),
    Criterion("04-teleportation-identity", "teleport", _check_teleport),
    Criterion("05-chsh-tsirelson", "chsh_singlet", _check_chsh),
    Criterion("06-choi-cp-certification", "choi_transpose", _check_choi),
    Criterion("07-wigner-machinery", "standard_boost", _check_wigner),
    Criterion("08-spin-entropy-surface", "entropy_convergence", _check_entropy_surface),
    Criterion("09-distinguishability-scaling", "exponent_low", _check_error_scaling),
    Criterion("10-bipartite-concurrence", "concurrence_restore", _check_bipartite),
    Criterion("11-photon-povm", "povm_completeness", _check_photon_povm),
    Criterion("12-photon-doppler-law", "doppler_ratio", _check_doppler),
    Criterion("13-aberration-small-angle", "aberration", _check_aberration),
    Criterion("14-unruh-rindler", "detailed_balance", _check_unruh_rindler),
    Criterion("15-black-hole-thermodynamics", "bh_scaling", _check_black_hole),
    Criterion("16-noncovariance-cp-failure", "noncovariance_gap", _check_witnesses),
]


def run_criterion(crit: Criterion, tols: dict, grids: dict) -> CheckResult:
    passed, measured = crit.run(tols, grids)
    result = CheckResult(name=crit.name, passed=bool(passed), measured=measured,
                         tolerance_name=crit.tolerance_name,
                         tolerance=tols[crit.tolerance_name])
    return result


def run_all(tol_overrides: dict | None = None,
            grid_overrides: dict | None = None,
            names: list | None = None) -> list:
    """Run the acceptance criteria; classify failures under overrides.

    A criterion that fails with overridden tolerances but passes at the
    shipped defaults is tolerance-class; failing at the defaults too makes
    it logic-class.
    """
    tols = _tols(tol_overrides)
    grids = _grids(grid_overrides)
    results = []
    for crit in CRITERIA:
        if names and crit.name not in names:
            continue
        res = run_criterion(crit, tols, grids)
        if not res.passed:
            if tol_overrides and any(k in tol_overrides for k in DEFAULT_TOLS):
                default_res = run_criterion(crit, _tols(None), grids)
                res.failure_class = "tolerance" if default_res.passed else "logic"
            else:
                res.failure_class = "logic"
        results.append(res)
    return results


def report_dict(results: list) -> dict:
    return {
        "all_passed": all(r.passed for r in results),
        "criteria": [
            {
                "name": r.name,
                "passed": r.passed,
                "tolerance_name": r.tolerance_name,
                "tolerance": r.tolerance,
                "measured": {k: (v if not isinstance(v, (list, np.ndarray))
                                 else [float(x) for x in v])
                             for k, v in r.measured.items()},
                **({"failure_class": r.failure_class} if r.failure_class else {}),
            }
            for r in results
        ],
    }

import math

import numpy as np
import pytest

from cqbounds import (
    DensityMatrix,
    DeltaInstance,
    DomainError,
    HermitianOperator,
    PreconditionError,
    ResourceCapError,
    ValidationError,
    continuity_margin,
    delta,
    delta_grid_value,
    delta_star,
    delta_variational_value,
    phi,
    random_density,
    random_psd,
    single_letter_gap,
    typical_set,
)
from cqbounds._linalg import expm_herm, logm_psd

LN2 = math.log(2.0)


def _orthogonal_instance(c=2.0):
    e0 = DensityMatrix(np.diag([1.0, 0.0]))
    e1 = DensityMatrix(np.diag([0.0, 1.0]))
    nu = HermitianOperator(np.eye(2) / 2)
    return DeltaInstance([0.5, 0.5], [e0, e1], nu, c)


def _random_states(rng, k, d, floor=0.05):
    return [
        random_density(d, int(rng.integers(0, 2**31)), min_eig_floor=floor)
        for _ in range(k)
    ]


def test_delta_instance_validation():
    inst = _orthogonal_instance()
    assert inst.support.tolist() == [0, 1]
    with pytest.raises(ValidationError):
        DeltaInstance([0.7, 0.7], inst.states, inst.nu, 1.0)
    with pytest.raises(ValidationError):
        DeltaInstance([0.5, 0.5], inst.states, inst.nu, -1.0)
    with pytest.raises(ValidationError):
        DeltaInstance([0.5, 0.5], inst.states, HermitianOperator(np.diag([1.0, 0.0])), 1.0)
    with pytest.raises(DomainError):
        delta(DeltaInstance([0.0, 0.0], inst.states, inst.nu, 1.0))


def test_delta_zero_at_matched_reference():
    # nu = channel image of mu, c = 1: data processing pins the value at 0
    rng = np.random.default_rng(5)
    for _ in range(10):
        states = _random_states(rng, 2, 2)
        mu = np.array([0.4, 0.6])
        avg = mu[0] * states[0].entries + mu[1] * states[1].entries
        inst = DeltaInstance(mu, states, HermitianOperator(avg), 1.0)
        res = delta(inst)
        assert abs(res.value) < 1e-9
        np.testing.assert_allclose(res.gamma, mu, atol=1e-5)


def test_delta_orthogonal_point_mass():
    res = delta(_orthogonal_instance(c=2.0))
    assert abs(res.value - LN2) < 1e-3  # grid-certified example
    assert max(res.gamma) > 0.99


def test_delta_constant_channel():
    nu = random_density(2, 17, min_eig_floor=0.1)
    inst = DeltaInstance([0.5, 0.5], [nu, nu], HermitianOperator(nu.entries), 1.5)
    res = delta(inst)
    assert abs(res.value) < 1e-9


def test_delta_nonnegative_for_probability_and_matched_nu():
    rng = np.random.default_rng(23)
    for _ in range(10):
        states = _random_states(rng, 3, 2)
        mu = rng.dirichlet(np.ones(3))
        avg = sum(m * s.entries for m, s in zip(mu, states))
        for c in (1.0, 1.5, 2.0):
            inst = DeltaInstance(mu, states, HermitianOperator(avg), c)
            assert delta(inst).value >= -1e-10


def test_delta_grid_agreement():
    rng = np.random.default_rng(29)
    for trial in range(6):
        k = int(rng.integers(2, 4))
        d = int(rng.integers(2, 4))
        states = _random_states(rng, k, d)
        mu = rng.dirichlet(np.ones(k)) * float(rng.uniform(0.5, 1.0))
        nu = random_density(d, int(rng.integers(0, 2**31)), min_eig_floor=0.05)
        c = (1.0, 1.5, 2.0)[trial % 3]
        inst = DeltaInstance(mu, states, HermitianOperator(nu.entries), c)
        solver = delta(inst, cross_check=False)
        grid = delta_grid_value(inst)
        assert abs(solver.value - grid.value) < 1e-3
        assert solver.value >= grid.value - 1e-9  # solver at least matches the grid


def test_delta_variational_examples():
    rng = np.random.default_rng(41)
    states = _random_states(rng, 2, 2)
    mu = np.array([0.3, 0.45])  # unnormalized
    nu = random_psd(2, 77, min_eig_floor=0.2)
    inst = DeltaInstance(mu, states, nu, 1.5)
    # T = Id: ln sum mu - c ln tr nu
    got = delta_variational_value(inst, HermitianOperator(np.eye(2)))
    want = math.log(mu.sum()) - 1.5 * math.log(float(np.trace(nu.entries).real))
    assert abs(got - want) < 1e-12
    # the maximizer-induced T reproduces the solver value
    res = delta(inst)
    sigma = sum(g * s.entries for g, s in zip(res.gamma, states))
    t_opt = HermitianOperator(expm_herm(logm_psd(sigma) - logm_psd(nu.entries)))
    assert abs(delta_variational_value(inst, t_opt) - res.value) < 1e-6
    # random T never beats the solver value
    for _ in range(50):
        t_rand = random_psd(2, int(rng.integers(0, 2**31)), min_eig_floor=0.1)
        assert delta_variational_value(inst, t_rand) <= res.value + 1e-8
    with pytest.raises(DomainError):
        delta_variational_value(inst, HermitianOperator(np.diag([1.0, 0.0])))


def _kernel_grid_oracle(q, states, nu, c, resolution=64):
    """Exhaustive 2x2 stochastic-kernel grid for the channel functional."""
    stack = np.stack([s.entries for s in states])
    log_nu = logm_psd(nu.entries)
    best = -math.inf
    for i in range(resolution + 1):
        for j in range(resolution + 1):
            kernel = np.array(
                [[i / resolution, 1 - i / resolution], [j / resolution, 1 - j / resolution]]
            )
            joint = np.asarray(q)[:, None] * kernel
            p_u = joint.sum(axis=0)
            val = 0.0
            for u in range(2):
                if p_u[u] <= 1e-14:
                    continue
                sig = np.einsum("x,xjk->jk", joint[:, u] / p_u[u], stack)
                w = np.linalg.eigvalsh(sig)
                w = w[w > 1e-12]
                d_out = float(np.sum(w * np.log(w))) - float(
                    np.sum((sig * log_nu.T).real)
                )
                post = joint[:, u] / p_u[u]
                d_in = sum(
                    pi * math.log(pi / qi) for pi, qi in zip(post, q) if pi > 0
                )
                val += p_u[u] * (c * d_out - d_in)
            best = max(best, val)
    return best


def test_delta_star_orthogonal_against_kernel_grid():
    e0 = DensityMatrix(np.diag([1.0, 0.0]))
    e1 = DensityMatrix(np.diag([0.0, 1.0]))
    rho_y = DensityMatrix(np.eye(2) / 2)
    res = delta_star([0.5, 0.5], [e0, e1], rho_y, 2.0, 2)
    assert abs(res.value - LN2) < 1e-6
    oracle = _kernel_grid_oracle([0.5, 0.5], [e0, e1], rho_y, 2.0)
    assert res.value >= oracle - 1e-9
    assert abs(res.value - oracle) < 1e-3


def test_delta_star_constant_family():
    nu = random_density(2, 31, min_eig_floor=0.2)
    res = delta_star([0.5, 0.5], [nu, nu], nu, 1.5, 3)
    assert abs(res.value) < 1e-10


def test_delta_star_below_delta_and_stabilization():
    rng = np.random.default_rng(47)
    for _ in range(5):
        states = _random_states(rng, 2, 2)
        q = np.array([0.5, 0.5])
        avg = DensityMatrix(0.5 * (states[0].entries + states[1].entries))
        for c in (1.0, 2.0):
            star = delta_star(q, states, avg, c, 3)
            inst = DeltaInstance(q, states, HermitianOperator(avg.entries), c)
            big = delta(inst)
            assert star.value <= big.value + 1e-6
            star_small = delta_star(q, states, avg, c, 2)
            star_bigger = delta_star(q, states, avg, c, 4)
            assert star_small.value <= star.value + 1e-8
            assert abs(star_bigger.value - star.value) < 1e-6


def test_delta_star_posterior_package():
    src_states = [random_density(2, 61, min_eig_floor=0.1), random_density(2, 62, min_eig_floor=0.1)]
    q = np.array([0.4, 0.6])
    avg = DensityMatrix(0.4 * src_states[0].entries + 0.6 * src_states[1].entries)
    res = delta_star(q, src_states, avg, 1.5, 3)
    best = res.best
    np.testing.assert_allclose(best.p_u_given_x.kernel.sum(axis=1), np.ones(2), atol=1e-12)
    for u in range(3):
        if best.p_u[u] > 1e-14:
            assert abs(best.p_x_given_u[u].sum() - 1.0) < 1e-9
            assert best.sigma_y_given_u[u] is not None


def test_phi_matches_delta_star_at_reference():
    rng = np.random.default_rng(53)
    states = _random_states(rng, 2, 2)
    q = np.array([0.45, 0.55])
    rho_y = DensityMatrix(0.45 * states[0].entries + 0.55 * states[1].entries)
    a = phi(q, q, states, rho_y, 1.5, 3)
    b = delta_star(q, states, rho_y, 1.5, 3).value
    assert abs(a - b) < 1e-8
    nu = random_density(2, 3, min_eig_floor=0.2)
    assert abs(phi(q, q, [nu, nu], nu, 2.0, 3)) < 1e-10


def test_continuity_margin():
    rng = np.random.default_rng(59)
    states = _random_states(rng, 2, 2)
    q = np.array([0.5, 0.5])
    rho_y = DensityMatrix(0.5 * (states[0].entries + states[1].entries))
    near = np.array([0.5 + 1e-9, 0.5 - 1e-9])
    m = continuity_margin(near, q, states, rho_y, 1.5, 0.01, 3, multistarts=16)
    assert m.margin >= -1e-5
    shifted = np.array([0.5 * 1.2, 1.0 - 0.5 * 1.2])
    m2 = continuity_margin(shifted, q, states, rho_y, 1.5, 0.2, 3, multistarts=16)
    assert m2.margin >= -1e-5
    with pytest.raises(PreconditionError):
        continuity_margin([0.8, 0.2], q, states, rho_y, 1.5, 0.2, 3)


def test_typical_set_contract():
    q = np.array([0.5, 0.5])
    # threshold: n > 3*2*ln(2/delta)
    with pytest.raises(PreconditionError):
        typical_set(q, 4, 0.9)
    ts = typical_set(q, 8, 0.9)
    assert 0.0 < ts.eps_n < 1.0
    bound = (1.0 + ts.eps_n) * 0.5
    for seq in ts.members:
        counts = np.bincount(seq, minlength=2) / ts.n
        assert np.all(counts <= bound + 1e-12)
    assert ts.mass >= 1.0 - ts.delta - 1e-12
    # product weights are consistent
    member_mass = sum(0.5**8 for _ in ts.members)
    assert abs(member_mass - ts.mass) < 1e-12
    # a nearly vacuous delta keeps the threshold easy
    ts2 = typical_set(q, 8, 0.97)
    assert ts2.mass >= 0.03 - 1e-12


def test_single_letter_gap_constant_channel():
    nu = random_density(2, 71, min_eig_floor=0.2)
    report = single_letter_gap(
        np.array([0.5, 0.5]), [nu, nu], nu, 1.5, 8, 0.9, 3,
        multistarts=8, star_multistarts=16,
    )
    assert abs(report.first_order) < 1e-9
    assert report.second_order >= 0.0
    assert report.constants["margin"] >= 0.0


def test_single_letter_gap_guards():
    q3 = np.ones(3) / 3
    states3 = [random_density(2, s, min_eig_floor=0.1) for s in (1, 2, 3)]
    with pytest.raises(ResourceCapError):
        single_letter_gap(q3, states3, states3[0], 1.5, 6, 0.9, 4)
    with pytest.raises(PreconditionError):
        single_letter_gap(np.array([0.5, 0.5]), states3[:2], states3[0], 1.5, 4, 0.9, 3)

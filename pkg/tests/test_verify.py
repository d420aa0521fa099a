import json

import pytest

from twclab import (
    BlockCode,
    DelayedCopyPair,
    EnumerationCapError,
    IidNoise,
    MarkovNoise,
    Pmf,
    TwoWayChannel,
    compose_2twc,
    coupled_equivalence,
    coupled_equivalence_madbc,
    delayed_copy_feedback_scheme,
    derive_rng,
    exhaustive_code_search,
    mac_joint_ml_code,
    monte_carlo,
    random_coset_code,
    rate_capacity_sweep,
    superposition_dbc_code,
    wilson_interval,
)

BERN01 = Pmf.bernoulli(0.1)
IID01 = IidNoise(BERN01)
ZERO2 = IidNoise(Pmf.point_mass(0, 2))


def test_wilson_interval():
    rate, half = wilson_interval(0, 1000)
    assert rate > 0 and half > 0  # sane at zero counts
    rate, half = wilson_interval(500, 1000)
    assert abs(rate - 0.5) < 0.01
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


def test_monte_carlo_zero_noise_perfect():
    c1 = BlockCode(2, [[0, 0, 0], [1, 1, 1]], noise=ZERO2)
    c2 = BlockCode(2, [[0, 1, 0], [1, 0, 1]], noise=ZERO2)
    ch = TwoWayChannel((ZERO2, ZERO2))
    rep = monte_carlo(ch, compose_2twc(c1, c2), 500, seed=0)
    assert rep.errors == {"w1_at_user2": 0, "w2_at_user1": 0}


def test_monte_carlo_replay_deterministic():
    c1 = random_coset_code(2, 6, 4, IID01, derive_rng(1))
    c2 = random_coset_code(2, 6, 4, IID01, derive_rng(2))
    ch = TwoWayChannel((IID01, IID01))
    a = monte_carlo(ch, compose_2twc(c1, c2), 3000, seed=5)
    b = monte_carlo(ch, compose_2twc(c1, c2), 3000, seed=5)
    c = monte_carlo(ch, compose_2twc(c1, c2), 3000, seed=6)
    assert a.to_dict() == b.to_dict()
    assert a.errors != c.errors or a.seed != c.seed
    assert 0 < a.errors["w1_at_user2"] < 3000


def test_monte_carlo_worker_count_invariance():
    c1 = random_coset_code(2, 6, 4, IID01, derive_rng(1))
    c2 = random_coset_code(2, 6, 4, IID01, derive_rng(2))
    ch = TwoWayChannel((IID01, IID01))
    a = monte_carlo(ch, compose_2twc(c1, c2), 5000, seed=7, shard_size=1024, workers=1)
    b = monte_carlo(ch, compose_2twc(c1, c2), 5000, seed=7, shard_size=1024, workers=4)
    assert a.to_dict() == b.to_dict()


def test_monte_carlo_adaptive_feedback_zero_errors():
    ch = TwoWayChannel(DelayedCopyPair())
    rep = monte_carlo(ch, delayed_copy_feedback_scheme(16), 2000, seed=8)
    assert rep.errors == {"w1_at_user2": 0, "w2_at_user1": 0}


def test_coupled_equivalence_zero_mismatch():
    for q, make in ((2, lambda: IID01), (3, lambda: MarkovNoise(
            [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]))):
        noise = make()
        c1 = random_coset_code(q, 6, 4, noise, derive_rng(9, q))
        c2 = random_coset_code(q, 6, 4, noise, derive_rng(10, q))
        rep = coupled_equivalence(c1, c2, 5000, seed=11)
        assert rep.mismatch_count == 0
        assert rep.trials == 5000


def test_coupled_equivalence_negative_control():
    c1 = random_coset_code(2, 8, 4, IID01, derive_rng(12))
    c2 = random_coset_code(2, 8, 4, IID01, derive_rng(13))
    rep = coupled_equivalence(c1, c2, 5000, seed=14, negative_control=True)
    assert rep.mismatch_count > 0


def test_coupled_equivalence_needs_noise_models():
    c1 = BlockCode(2, [[0, 0], [1, 1]])
    c2 = BlockCode(2, [[0, 1], [1, 0]], noise=IID01)
    with pytest.raises(ValueError):
        coupled_equivalence(c1, c2, 10, seed=0)


def _small_madbc_codes():
    mac = mac_joint_ml_code(2, 8, 4, 4, MarkovNoise([[0.9, 0.1], [0.1, 0.9]]), derive_rng(15))
    dbc = superposition_dbc_code(
        2, 8, 4, 2, [0.5, 0.5, 0.0], [[0.9, 0.1], [0.1, 0.9], [0.5, 0.5]],
        BERN01, BERN01, derive_rng(16),
    )
    return mac, dbc


def test_coupled_equivalence_madbc():
    mac, dbc = _small_madbc_codes()
    rep = coupled_equivalence_madbc(mac, dbc, 5000, seed=17)
    assert rep.mismatch_count == 0
    neg = coupled_equivalence_madbc(mac, dbc, 2000, seed=17, negative_control=True)
    assert neg.mismatch_count > 0


def test_trial_report_serialization():
    mac, dbc = _small_madbc_codes()
    rep = coupled_equivalence_madbc(mac, dbc, 300, seed=18)
    d = json.loads(rep.to_json())
    assert d["mismatch_count"] == 0
    assert set(d["errors"]) == {"w13w23_at_user3", "w31_at_user1", "w32_at_user2"}
    csv = rep.to_csv()
    assert csv.startswith("link,errors,trials")
    assert "mismatch" in csv


def test_search_noiseless():
    res = exhaustive_code_search((ZERO2, ZERO2), n=1, M1=2, M2=2)
    assert res.best_adaptive_error == 0.0
    assert res.best_nonadaptive_error == 0.0


def test_search_uniform_noise_dead_link():
    res = exhaustive_code_search((ZERO2, IidNoise(Pmf.uniform(2))), n=2, M1=2, M2=1)
    assert abs(res.best_adaptive_error - 0.5) < 1e-12
    assert abs(res.best_nonadaptive_error - 0.5) < 1e-12


def test_search_delayed_copy_strict_gap():
    res = exhaustive_code_search(DelayedCopyPair(), n=2, M1=4, M2=1)
    assert res.best_adaptive_error == 0.0
    assert res.best_nonadaptive_error > 0.0
    assert res.witness_adaptive is not None


def test_search_class_containment_battery():
    specs = [
        ((IID01, IID01), 1, 2, 2),
        ((IID01, IidNoise(Pmf.bernoulli(0.3))), 2, 2, 1),
        (DelayedCopyPair(), 2, 2, 2),
        ((MarkovNoise([[0.9, 0.1], [0.3, 0.7]]), IID01), 2, 2, 1),
    ]
    for noise, n, M1, M2 in specs:
        res = exhaustive_code_search(noise, n=n, M1=M1, M2=M2)
        assert res.best_adaptive_error <= res.best_nonadaptive_error + 1e-15


def test_search_independent_noise_no_gap_regression():
    res = exhaustive_code_search((IidNoise(Pmf.bernoulli(0.3)), IID01), n=2, M1=2, M2=2)
    assert abs(res.best_adaptive_error - res.best_nonadaptive_error) < 1e-12


def test_search_cap_and_scope():
    with pytest.raises(EnumerationCapError):
        exhaustive_code_search((IID01, IID01), n=2, M1=8, M2=8, cap=1000)
    with pytest.raises(ValueError):
        exhaustive_code_search((IID01, IID01), n=3, M1=2, M2=2)


def test_sweep_rate_zero_is_error_free():
    rows = rate_capacity_sweep(2, IID01, [0.0], [4, 8], codebooks_per_point=5, trials_per_codebook=20, seed=19)
    assert all(r["mean_block_error"] == 0.0 for r in rows)
    assert all(r["M"] == 1 for r in rows)


def test_sweep_rejects_oversized_rate():
    with pytest.raises(ValueError):
        rate_capacity_sweep(2, IID01, [1.5], [4], codebooks_per_point=1, trials_per_codebook=1, seed=0)


def test_sweep_is_deterministic():
    a = rate_capacity_sweep(2, IID01, [0.25], [4], codebooks_per_point=10, trials_per_codebook=20, seed=20)
    b = rate_capacity_sweep(2, IID01, [0.25], [4], codebooks_per_point=10, trials_per_codebook=20, seed=20)
    assert a == b

import numpy as np
import pytest

from twclab import (
    DelayedCopyPair,
    IidNoise,
    InsufficientDataError,
    MarkovNoise,
    NotErgodicError,
    Pmf,
    derive_rng,
    empirical_entropy_rate,
    entropy_rate,
    noise_from_config,
    sample_path,
    stationary_distribution,
)

H_BERN_01 = 0.4689955935892812  # -0.1 log2 0.1 - 0.9 log2 0.9


def test_stationary_examples():
    assert np.allclose(stationary_distribution([[0.9, 0.1], [0.1, 0.9]]).probs, [0.5, 0.5])
    # solve pi P = pi by hand: pi = (0.75, 0.25)
    assert np.allclose(stationary_distribution([[0.9, 0.1], [0.3, 0.7]]).probs, [0.75, 0.25], atol=1e-12)


def test_stationary_rejects_non_ergodic():
    with pytest.raises(NotErgodicError):
        stationary_distribution(np.eye(2))
    with pytest.raises(NotErgodicError):
        stationary_distribution([[0.0, 1.0], [1.0, 0.0]])  # period 2
    with pytest.raises(NotErgodicError):
        stationary_distribution([[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]])


def test_stationary_rejects_bad_rows():
    with pytest.raises(ValueError):
        stationary_distribution([[0.9, 0.2], [0.3, 0.7]])


def test_entropy_rates():
    assert abs(IidNoise(Pmf.bernoulli(0.1)).entropy_rate() - H_BERN_01) < 1e-6
    assert abs(MarkovNoise([[0.9, 0.1], [0.1, 0.9]]).entropy_rate() - H_BERN_01) < 1e-6
    assert DelayedCopyPair().marginal_entropy_rates() == (1.0, 1.0)
    assert entropy_rate(DelayedCopyPair()) == (1.0, 1.0)


def test_equal_rows_markov_reduces_to_iid():
    m = MarkovNoise([[0.8, 0.2], [0.8, 0.2]])
    i = IidNoise(Pmf([0.8, 0.2]))
    assert abs(m.entropy_rate() - i.entropy_rate()) <= 1e-12
    pm = m.sample_paths(20, 50, derive_rng(3))
    pi = i.sample_paths(20, 50, derive_rng(3))
    assert np.array_equal(pm, pi)


def test_sample_path_point_mass():
    path = sample_path(IidNoise(Pmf.point_mass(0, 3)), 5, derive_rng(0))
    assert np.array_equal(path, np.zeros(5))


def test_markov_path_state_frequencies():
    m = MarkovNoise([[0.9, 0.1], [0.3, 0.7]])
    path = m.sample_path(200_000, derive_rng(1))
    freq = np.bincount(path, minlength=2) / len(path)
    # 3 sigma with lag-correlation inflation for this chain
    assert np.all(np.abs(freq - m.stationary.probs) < 0.012)


def test_delayed_copy_exact_shift():
    pair = DelayedCopyPair()
    for seed in range(5):
        z1, z2 = pair.sample_pair(64, derive_rng(seed))
        assert z2[0] == 0
        assert np.array_equal(z2[1:], z1[:-1])
    z1b, z2b = pair.sample_pairs(100, 16, derive_rng(7))
    assert np.array_equal(z2b[:, 1:], z1b[:, :-1])
    assert np.all(z2b[:, 0] == 0)


def test_sample_path_dispatch_pair():
    z1, z2 = sample_path(DelayedCopyPair(), 8, derive_rng(2))
    assert len(z1) == len(z2) == 8
    with pytest.raises(ValueError):
        sample_path(IidNoise(Pmf.uniform(2)), 0, derive_rng(0))


def test_log_prob_paths_match_products():
    i = IidNoise(Pmf([0.9, 0.1]))
    got = i.log_prob_paths(np.array([[0, 1, 0], [1, 1, 1]]))
    want = [np.log2(0.9 * 0.1 * 0.9), np.log2(0.1**3)]
    assert np.allclose(got, want)

    m = MarkovNoise([[0.9, 0.1], [0.3, 0.7]])
    pi = m.stationary.probs
    got = m.log_prob_paths(np.array([[0, 1, 1]]))
    want = np.log2(pi[0] * 0.1 * 0.7)
    assert np.allclose(got, [want])


def test_enumerate_paths_total_probability():
    for model in (IidNoise(Pmf.bernoulli(0.3)), MarkovNoise([[0.9, 0.1], [0.3, 0.7]])):
        paths, probs = model.enumerate_paths(3)
        assert len(paths) == 8
        assert abs(probs.sum() - 1.0) < 1e-12
    z1s, z2s, probs = DelayedCopyPair().enumerate_pairs(3)
    assert len(z1s) == 8 and abs(probs.sum() - 1.0) < 1e-12


def test_empirical_entropy_rate():
    assert empirical_entropy_rate(np.zeros(1000, dtype=int), 0) == 0.0

    i = IidNoise(Pmf.bernoulli(0.1))
    path = i.sample_path(100_000, derive_rng(4))
    assert abs(empirical_entropy_rate(path, 0) - H_BERN_01) < 0.01

    m = MarkovNoise([[0.9, 0.1], [0.1, 0.9]])
    path = m.sample_path(100_000, derive_rng(5))
    assert abs(empirical_entropy_rate(path, 1) - H_BERN_01) < 0.01


def test_empirical_entropy_rate_insufficient_data():
    with pytest.raises(InsufficientDataError):
        empirical_entropy_rate(np.array([0, 1, 0, 1]), 1, min_context_count=10)
    with pytest.raises(InsufficientDataError):
        empirical_entropy_rate(np.array([0]), 2)


def test_markov_vs_empirical_invariant():
    for T in ([[0.9, 0.1], [0.1, 0.9]], [[0.9, 0.1], [0.3, 0.7]], [[0.5, 0.5], [0.2, 0.8]]):
        m = MarkovNoise(T)
        path = m.sample_path(300_000, derive_rng(6))
        assert abs(m.entropy_rate() - empirical_entropy_rate(path, 1)) <= 0.01


def test_noise_config_round_trips():
    for model in (
        IidNoise(Pmf([0.7, 0.2, 0.1])),
        MarkovNoise([[0.9, 0.1], [0.3, 0.7]]),
        DelayedCopyPair(),
    ):
        cfg = model.to_config()
        rebuilt = noise_from_config(cfg)
        assert type(rebuilt) is type(model)
        assert rebuilt.q == model.q
    with pytest.raises(ValueError):
        noise_from_config({"kind": "nope"})
    with pytest.raises(ValueError):
        noise_from_config({"kind": "iid", "q": 3, "pmf": [0.5, 0.5]})


def test_sampling_is_seed_deterministic():
    m = MarkovNoise([[0.9, 0.1], [0.3, 0.7]])
    a = m.sample_paths(10, 20, derive_rng(11, 0))
    b = m.sample_paths(10, 20, derive_rng(11, 0))
    c = m.sample_paths(10, 20, derive_rng(11, 1))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

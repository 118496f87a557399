import math

import pytest

import gjrvol


def test_catalogues():
    assert "gold" in gjrvol.presets()
    assert "asymmetry-relaxed" in gjrvol.regimes() or "asymmetry_relaxed" in gjrvol.regimes()


def test_skst_pdf_integrates_and_cdf_inverts():
    xi, nu = 0.8, 6.0
    h = 1e-3
    mass = sum(gjrvol.skst_pdf(-40 + k * h, xi, nu) for k in range(80001)) * h
    assert mass == pytest.approx(1.0, abs=1e-3)
    for p in (0.01, 0.3, 0.5, 0.9):
        assert gjrvol.skst_cdf(gjrvol.skst_quantile(p, xi, nu), xi, nu) == pytest.approx(p, abs=1e-10)


def test_skst_sample_is_standardized_and_seeded():
    a = gjrvol.skst_sample(50000, 0.9, 8.0, seed=3)
    assert a == gjrvol.skst_sample(50000, 0.9, 8.0, seed=3)
    mean = sum(a) / len(a)
    var = sum((x - mean) ** 2 for x in a) / (len(a) - 1)
    assert abs(mean) < 0.03
    assert var == pytest.approx(1.0, abs=0.05)


def test_regime_check_flags_negative_alpha():
    report = gjrvol.regime_check(1e-6, [-0.02], [0.9], [0.12], regime="asymmetry")
    assert not report["passed"]
    assert report["violations"]
    relaxed = gjrvol.regime_check(1e-6, [0.08], [0.9], [-0.047], regime="asymmetry-relaxed")
    assert relaxed["passed"]


def test_conditional_variances_follow_the_recursion():
    eps = [0.01, -0.02, 0.005]
    sig = gjrvol.conditional_variances(eps, 1e-5, [0.05], [0.9], [0.1])
    assert len(sig) == 3
    expected = 1e-5 + 0.9 * sig[1] + (0.05 + 0.1) * eps[1] ** 2
    assert sig[2] == pytest.approx(expected, rel=1e-12)


def test_simulate_and_survival_are_deterministic():
    path = gjrvol.simulate("gold", 500, seed=11)
    assert path["died_at"] is None
    assert len(path["returns"]) == 500
    assert all(v > 0 for v in path["variances"])
    rows = gjrvol.survival("eq11", n_paths=20, tgrid=[100, 1000], seed=5, threads=1)
    assert rows == gjrvol.survival("eq11", n_paths=20, tgrid=[100, 1000], seed=5, threads=4)
    assert [r["T"] for r in rows] == [100, 1000]
    assert rows[0]["SR"] >= rows[1]["SR"]


def test_describe_and_fit_on_simulated_data():
    r = gjrvol.simulate("gold", 2000, seed=21)["returns"]
    stats = gjrvol.describe(r, lags=[5])
    assert stats["n"] == 2000
    result = gjrvol.fit(r, regime="asymmetry-relaxed", multistart=2, seed=1)
    assert math.isfinite(result["log_likelihood"])
    names = [p["name"] for p in result["parameters"]]
    assert names[:3] == ["mu", "phi", "omega"]
    assert 0.5 < result["estimates"]["beta_1"] < 1.0


def test_errors_carry_a_code():
    with pytest.raises(gjrvol.GjrvolError) as info:
        gjrvol.simulate("no-such-preset", 10)
    assert info.value.code == "InvalidPreset"
    with pytest.raises(gjrvol.GjrvolError) as info:
        gjrvol.fit([0.01, -0.01, 0.02])
    assert info.value.code == "TooShort"

import math

import pytest

import domcode


def test_graph_specs():
    g = domcode.Graph.from_spec("tree:3:2")
    assert g.size == 10
    assert g.interior == [0, 1, 2, 3]
    assert g.max_degree == 3
    with pytest.raises(domcode.ConfigError):
        domcode.Graph.from_spec("tree:3")


def test_bernoulli_p_of():
    g = domcode.tree_ball(3, 2)
    mu = domcode.bernoulli_measure(g, 0.3)
    assert sum(mu.probs()) == pytest.approx(1.0)
    assert domcode.p_of(mu) == pytest.approx(0.3, abs=1e-5)
    assert domcode.strassen_dominates(mu, domcode.bernoulli_measure(g, 0.2))
    assert not domcode.strassen_dominates(mu, domcode.bernoulli_measure(g, 0.4))


def test_ising_single_site():
    g = domcode.tree_ball(3, 1)
    mu = domcode.ising_measure(g, beta=0.5)
    assert mu.prob(1) == pytest.approx(math.exp(3) / (math.exp(3) + 1))
    assert domcode.p_star(mu) == pytest.approx(mu.prob(1))


def test_bound_reports():
    rep = domcode.ising_bounds(3, 1.0, 1.0, 0.0, alpha=1.0)
    assert rep["upper_energy"] == pytest.approx(1 - math.exp(-2))
    perc = domcode.perc_bounds(3, 1.0, 1.0, 0.5)
    assert perc["series"] == 0.0


def test_shearer_two_elements():
    table = domcode.shearer_measure(2, [(0, 1)], [0.3, 0.3])
    assert table[0] == pytest.approx(0.4)
    assert table[1] == pytest.approx(0.3)
    assert table.get(3, 0.0) == 0.0
    with pytest.raises(domcode.RegimeError):
        domcode.shearer_measure(2, [(0, 1)], [0.6, 0.6])


def test_cftp_resolves_every_site():
    g = domcode.tree_ball(3, 2)
    out = domcode.cftp_diluted_ising(g, 3.0, 0.0, 0.95, seed=7)
    assert out["sites"] == g.interior
    assert all(v in (0, 1) for v in out["values"])
    assert domcode.refines(1, domcode.STAR)


def test_survival_curve():
    g = domcode.tree_ball(3, 6)
    rows = domcode.survival_curve(g, 0, 0.9, [1, 2], 500, seed=3)
    assert [r["n"] for r in rows] == [2, 4]
    for row in rows:
        assert 0.0 <= row["rate"] <= row["wilson_hi"]
    assert domcode.union_bound(3, 0.5, 0) == 1.0

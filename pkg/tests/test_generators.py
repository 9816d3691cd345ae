import numpy as np
import pytest

from hyperstream.generators import (generate_instance, grid_graph, large_stream_hgr, powerlaw_hgr,
                                    powerlaw_pmf, random_graph, random_hgr)
from hyperstream.io import check_symmetric, write_hgr


def test_random_hgr_is_deterministic(tmp_path):
    write_hgr(random_hgr(n=10, m=5, avg_pins=3, seed=1), tmp_path / "a.hgr")
    write_hgr(random_hgr(n=10, m=5, avg_pins=3, seed=1), tmp_path / "b.hgr")
    assert (tmp_path / "a.hgr").read_bytes() == (tmp_path / "b.hgr").read_bytes()
    assert random_hgr(50, 40, seed=2) != random_hgr(50, 40, seed=3)


def test_grid():
    g = grid_graph(3, 3)
    assert g.num_vertices == 9 and g.num_edges == 12
    check_symmetric(g)


def _ks_statistic(sample, support, pmf):
    ecdf = np.searchsorted(np.sort(sample), support, side="right") / len(sample)
    return float(np.max(np.abs(ecdf - np.cumsum(pmf))))


@pytest.mark.parametrize("exponent", [2.0, 2.5, 3.0])
def test_powerlaw_net_sizes_fit(exponent):
    m = 20000
    h = powerlaw_hgr(50000, m, exponent=exponent, max_size=100, seed=4)
    support, pmf = powerlaw_pmf(exponent, 2, 100)
    d = _ks_statistic(h.net_sizes(), support, pmf)
    # 1% critical value of the one-sample KS test (conservative for discrete data)
    assert d < 1.63 / np.sqrt(h.num_nets)
    # a neighbouring exponent must be rejected
    _, other = powerlaw_pmf(exponent + 0.3, 2, 100)
    assert _ks_statistic(h.net_sizes(), support, other) > 1.63 / np.sqrt(h.num_nets)


def test_powerlaw_is_clean_and_deterministic():
    h = powerlaw_hgr(2000, 2000, seed=9)
    h.validate()
    assert h == powerlaw_hgr(2000, 2000, seed=9)
    with pytest.raises(ValueError):
        powerlaw_hgr(10, 10, max_size=20)


def test_large_stream_hgr():
    h = large_stream_hgr(5000, 5000, 4.0, seed=1)
    h.validate()
    assert 3.5 < h.pin_count / h.num_nets < 4.1


def test_random_graph():
    g = random_graph(500, 2000, seed=3)
    check_symmetric(g)
    assert g.num_edges == 2000
    with pytest.raises(ValueError):
        random_graph(4, 7)


def test_dispatch():
    assert generate_instance("grid-graph", rows=2, cols=2).num_edges == 4
    assert generate_instance("random-hgr", seed=1, n=10, m=5) == random_hgr(10, 5, seed=1)
    with pytest.raises(ValueError):
        generate_instance("torus")

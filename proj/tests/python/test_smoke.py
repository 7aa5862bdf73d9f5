import numpy as np
import pytest

import srr


def test_generate_channels_deterministic():
    a = srr.generate_channels(7, 3, [2, 2])
    b = srr.generate_channels(7, 3, [2, 2])
    assert a.users() == 2
    assert a.eavesdroppers() == 1
    for x, y in zip(a.rx, b.rx):
        assert x.shape == (2, 3)
        assert np.array_equal(x, y)


def test_channel_file_roundtrip(tmp_path):
    ch = srr.generate_channels(42, 2, [2, 1, 1])
    path = str(tmp_path / "ch.json")
    srr.save_channels(ch, path, 42)
    back = srr.load_channels(path)
    for x, y in zip(ch.rx, back.rx):
        assert np.allclose(x, y, atol=0, rtol=0)


def test_capacities_scalar_case():
    ch = srr.ChannelSet()
    ch.n_t = 1
    ch.rx = [np.array([[1.0 + 0j]]), np.array([[0.5 + 0j]])]
    cov = srr.CovarianceTriple.zero(1, 1.0)
    cov.confidential = np.array([[1.0 + 0j]])
    # log2(1 + 1) - log2(1 + 0.25) = 1 - log2(1.25)
    expect = 1.0 - np.log2(1.25)
    assert srr.secrecy_rate(ch, cov) == pytest.approx(expect, abs=1e-12)


def test_dc_solve_small():
    ch = srr.generate_channels(11, 2, [1, 1])
    tau, q0 = srr.compute_tau_max(ch, 1.0)
    assert tau > 0
    assert q0.shape == (2, 2)
    res = srr.dc_solve(ch, 1.0, 0.5 * tau)
    assert res.status in ("ok", "max_outer")
    assert res.rates.multicast_bits >= 0.5 * tau - 1e-6
    assert res.rates.secrecy_bits >= 0


def test_ao_solve_monotone():
    ch = srr.generate_channels(12, 2, [1, 1])
    res = srr.ao_solve(ch, 1.0, 1.0)
    assert res.status in ("ok", "max_outer")
    objs = [row.objective_nats for row in res.trace]
    assert all(b >= a - 1e-9 for a, b in zip(objs, objs[1:]))


def test_complexity_estimate():
    n1, n2, t1, t2 = srr.complexity_estimate(1, 1)
    assert (n1, n2) == (4, 5)
    assert t1 == pytest.approx(np.sqrt(5) * 164)
    assert t2 == pytest.approx(np.sqrt(5) * 275)
    assert t2 > t1


def test_db_roundtrip():
    for db in (-3.0, 0.0, 10.0, 17.5):
        assert srr.linear_to_db(srr.db_to_linear(db)) == pytest.approx(
            db, abs=1e-12
        )

from fractions import Fraction as F

import pytest

from anharmonic.cache import TableCache
from anharmonic.rspt import (
    OscillatorSpec,
    degree_bound,
    lagrange_interpolate,
    rspt_coeffs,
    rspt_nu_polys,
)


def test_quartic_ground_state():
    assert rspt_coeffs(4, 0, 4).coeffs == (F(1, 2), F(3, 4), F(-21, 8), F(333, 16), F(-30885, 128))


def test_quartic_first_excited():
    # first order is <1|q^4|1> = 15/4
    assert rspt_coeffs(4, 1, 1)[1] == F(15, 4)


def test_sextic_first_order():
    assert rspt_coeffs(6, 0, 1)[1] == F(15, 8)


def test_cubic_series():
    t = rspt_coeffs(3, 0, 3)
    assert t.coeffs == (F(1, 2), F(-11, 8), F(-465, 32), F(-39709, 128))
    assert rspt_coeffs(3, 1, 1)[1] == F(-71, 8)


def test_odd_degree_coefficients_are_negative():
    assert all(c < 0 for c in rspt_coeffs(5, 0, 8).coeffs[1:])


def test_spec_properties():
    s = OscillatorSpec(6)
    assert s.even and s.rho == 2 and s.lattice_step == F(1, 2)
    o = OscillatorSpec(7)
    assert o.parity == "odd" and o.rho == 5 and o.convention == "+sqrt(g)*q^7"
    with pytest.raises(ValueError):
        OscillatorSpec(2)


def test_rejects_negative_arguments():
    with pytest.raises(ValueError):
        rspt_coeffs(4, -1, 3)


def test_nu_polynomials_reproduce_levels():
    table = rspt_nu_polys(3, 3)
    for n in range(6):
        assert table.at_level(n) == list(rspt_coeffs(3, n, 3).coeffs)
    assert table.coeffs[1] == lagrange_interpolate([F(1, 2), F(3, 2), F(5, 2)], [F(-11, 8), F(-71, 8), F(-191, 8)])


def test_degree_bound_values():
    assert degree_bound(OscillatorSpec(4), 3) == 4
    assert degree_bound(OscillatorSpec(3), 3) == 4
    assert degree_bound(OscillatorSpec(7), 2) == 11


def test_cache_round_trip(tmp_path):
    cache = TableCache(tmp_path)
    first = rspt_coeffs(4, 0, 40, cache)
    assert cache.path(4, 0, 40).exists()
    again = rspt_coeffs(4, 0, 40, cache)
    assert again.coeffs == first.coeffs


def test_cache_rejects_tampering(tmp_path, caplog):
    cache = TableCache(tmp_path)
    rspt_coeffs(3, 0, 5, cache)
    p = cache.path(3, 0, 5)
    p.write_text(p.read_text().replace("-11/8", "-12/8"))
    assert cache.load(3, 0, 5) is None
    assert rspt_coeffs(3, 0, 5, cache)[1] == F(-11, 8)
    assert "validation" in caplog.text


def test_cache_schema_bump_misses(tmp_path):
    TableCache(tmp_path).store(4, 0, 2, [F(1, 2), F(3, 4), F(-21, 8)])
    assert TableCache(tmp_path, schema=2).load(4, 0, 2) is None


def test_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("ANHARMONIC_CACHE", str(tmp_path))
    assert TableCache().directory == tmp_path


def test_concurrent_writers_leave_one_valid_file(tmp_path):
    from concurrent.futures import ThreadPoolExecutor

    coeffs = list(rspt_coeffs(4, 0, 20).coeffs)
    cache = TableCache(tmp_path)
    with ThreadPoolExecutor(8) as pool:
        list(pool.map(lambda _: cache.store(4, 0, 20, coeffs), range(16)))
    assert cache.load(4, 0, 20) == coeffs
    assert [p.name for p in tmp_path.iterdir()] == [cache.path(4, 0, 20).name]

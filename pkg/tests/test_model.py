import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from soqd.model import (CombSpec, DegenerateModesWarning, MeasurementCoeffs, ModelParams,
                        ReservoirMode, ValidationError, build_comb, flat_density, load_config,
                        params_from_config, validate)


def test_comb_five_modes():
    modes = build_comb(CombSpec(1.0, 0.4, 5, 0.17))
    np.testing.assert_allclose([m.omega_j for m in modes], [0.6, 0.8, 1.0, 1.2, 1.4], atol=1e-15)
    assert all(m.d_j == 0.17 for m in modes)


def test_comb_single_mode_sits_at_center():
    modes = build_comb(CombSpec(1.0, 0.4, 1, 0.17))
    assert modes == [ReservoirMode(1.0, 0.17)]


def test_comb_nine_spacing_and_density():
    spec = CombSpec(1.0, 0.4, 9, 0.17)
    assert spec.spacing == pytest.approx(0.1)
    assert spec.density == pytest.approx(10.0)
    np.testing.assert_allclose(np.diff([m.omega_j for m in build_comb(spec)]), 0.1, atol=1e-14)


def test_comb_offset_moves_center_between_teeth():
    freqs = [m.omega_j for m in build_comb(CombSpec(1.0, 0.4, 5, 0.1, offset=0.5))]
    assert min(abs(np.array(freqs) - 1.0)) == pytest.approx(0.1)


@pytest.mark.parametrize("bad", [
    CombSpec(1.0, 0.4, 0, 0.1),
    CombSpec(1.0, 0.0, 3, 0.1),
    CombSpec(math.nan, 0.4, 3, 0.1),
    CombSpec(1.0, math.inf, 3, 0.1),
])
def test_comb_rejects(bad):
    with pytest.raises(ValueError):
        build_comb(bad)


@given(center=st.floats(-5, 5), width=st.floats(0.01, 5), count=st.integers(1, 60))
def test_comb_count_order_symmetry(center, width, count):
    freqs = np.array([m.omega_j for m in build_comb(CombSpec(center, width, count, 0.1))])
    assert freqs.size == count
    if count > 1:
        assert np.all(np.diff(freqs) > 0)
    np.testing.assert_allclose(freqs - center, -(freqs - center)[::-1], atol=1e-12)


def test_validate_balanced_measurement():
    p = ModelParams.single_mode(1.0, 1.2, 0.07, MeasurementCoeffs(1 / math.sqrt(2), 1 / math.sqrt(2)))
    assert validate(p) is p


def test_validate_reports_every_problem():
    p = ModelParams(0.0, (ReservoirMode(1.0, -0.1),), MeasurementCoeffs(1, 1))
    with pytest.raises(ValidationError) as info:
        validate(p)
    fields = {prob["field"] for prob in info.value.problems}
    assert fields == {"omega_e", "modes[0].d", "measurement"}


def test_validate_norm_violation():
    with pytest.raises(ValidationError, match="measurement"):
        validate(ModelParams(1.0, (), MeasurementCoeffs(1, 1)))


def test_degenerate_modes_warn_not_fail():
    p = ModelParams(1.0, (ReservoirMode(1.0, 0.1), ReservoirMode(1.0, 0.2)))
    with pytest.warns(DegenerateModesWarning):
        assert validate(p) is p


def test_config_comb_and_measurement():
    cfg = {"omega_e": 1, "comb": {"center": 1, "half_bandwidth": 0.4, "count": 3, "coupling": 0.17},
           "measurement": {"c1_re": 0.6, "c1_im": 0, "c2_re": 0, "c2_im": 0.8}}
    p = params_from_config(cfg)
    assert len(p.modes) == 3
    assert p.measurement.c2 == 0.8j


def test_config_requires_exactly_one_reservoir():
    with pytest.raises(ValidationError):
        params_from_config({"omega_e": 1})
    with pytest.raises(ValidationError):
        params_from_config({"omega_e": 1, "modes": [{"omega": 1, "d": 0.1}],
                            "comb": {"center": 1, "half_bandwidth": 0.4, "count": 3, "coupling": 0.1}})


def test_config_default_measurement_and_roundtrip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"omega_e": 1.0, "modes": [{"omega": 1.2, "d": 0.07}]}))
    p = params_from_config(load_config(path))
    assert p.measurement.balanced
    assert params_from_config(p.to_dict()) == p


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        load_config(path)


def test_flat_density_weight():
    sd = flat_density(10.0, 0.02, 0.5, 1.5)
    assert sd.weight(1.0) == pytest.approx(10 * 0.0004)
    with pytest.raises(ValueError):
        flat_density(1.0, 1.0, 2.0, 1.0)


def test_digest_depends_on_params():
    a = ModelParams.single_mode(1.0, 1.2, 0.07)
    b = ModelParams.single_mode(1.0, 1.2, 0.071)
    assert a.digest() != b.digest()
    assert a.digest() == ModelParams.single_mode(1.0, 1.2, 0.07).digest()

from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from schlesinger.dpv import DPVParameters
from schlesinger.sampling import POLE_SEPARATION, random_a2, random_dpv, random_system, trial_rng
from schlesinger.serialize import (
    ConfigError,
    dataclass_from_dict,
    dataclass_to_dict,
    decode_complex,
    encode_complex,
    fmt,
    system_from_dict,
    system_to_dict,
    write_csv,
)

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_complex_round_trip_is_exact(re, im):
    z = complex(re, im)
    assert decode_complex(json.loads(json.dumps(encode_complex(z)))) == z
    assert complex(float(fmt(re)), float(fmt(im))) == z


def test_decode_variants_and_errors():
    assert decode_complex(2) == 2
    assert decode_complex("1+2j") == 1 + 2j
    assert decode_complex([0.5, -1]) == 0.5 - 1j
    for bad in ([1, 2, 3], "abc", None):
        with pytest.raises(ConfigError):
            decode_complex(bad)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_system_round_trip(seed):
    system = random_system(np.random.default_rng(seed), 3, 3)
    back = system_from_dict(json.loads(json.dumps(system_to_dict(system))))
    assert back.poles == system.poles
    for a, b in zip(back.residues, system.residues):
        assert_array_equal(a, b)


def test_system_block_errors():
    with pytest.raises(ConfigError):
        system_from_dict({"poles": [[0, 0]]})
    with pytest.raises(ConfigError):
        system_from_dict({"matrix_size": 3, "poles": [[0, 0]], "residues": [[[[0, 0], [0, 0]], [[0, 0], [0, 0]]]]})


def test_dataclass_blocks():
    params = DPVParameters.fuchs_consistent(0.1, 0.2 + 1e-17j, 1 / 3, -2.5, 0.4 + 0.3j)
    data = json.loads(json.dumps(dataclass_to_dict(params)))
    assert DPVParameters(**dataclass_from_dict(DPVParameters, data)) == params
    with pytest.raises(ConfigError):
        dataclass_from_dict(DPVParameters, {"theta1": 0})


def test_csv_writer():
    text = write_csv(["a", "b"], [[1, "x,y"]])
    assert text == 'a,b\n1,"x,y"\n'


def test_sampling_is_deterministic_and_guarded():
    a = random_system(trial_rng(5, 2), 3, 3)
    b = random_system(trial_rng(5, 2), 3, 3)
    assert a.distance(b) == 0
    assert min(abs(u - v) for i, u in enumerate(a.poles) for v in a.poles[i + 1:]) >= POLE_SEPARATION
    assert random_dpv(trial_rng(1, 1)) == random_dpv(trial_rng(1, 1))
    assert random_a2(trial_rng(1, 1)) == random_a2(trial_rng(1, 1))
    params, _ = random_dpv(trial_rng(1, 1))
    assert all(abs(v.real) <= 1 and abs(v.imag) <= 1 for v in (params.theta1, params.thetat, params.t))

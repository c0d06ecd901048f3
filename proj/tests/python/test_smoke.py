# Copyright 2026 The mdalab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import mdalab

EXAMPLE_X = (0.41421356, 0.73205081)


def test_count_matches_lattice_points():
    s = mdalab.ParamSchedule(a=0.0, b=0.2, c=0.49, T=10)
    r = mdalab.count_Q(EXAMPLE_X, s)
    assert r.count == 6
    assert r.q_hits == [1, 2, 3, 4, 5, 7]
    points = mdalab.lattice_points_in_omega(EXAMPLE_X, s)
    assert [q for _, _, q in points] == r.q_hits


def test_weighted_count_uses_the_callable():
    s = mdalab.ParamSchedule(a=0.0, b=0.2, c=0.49, T=10)
    r = mdalab.count_Q(EXAMPLE_X, s, h=lambda u: u)
    assert r.weighted_sum == pytest.approx(sum([1, 2, 3, 4, 5, 7]) / 10)


def test_schedule_validation():
    assert mdalab.validate_schedule(mdalab.ParamSchedule(0.01, 0.1, 0.4, 1e4)) == []
    bad = mdalab.validate_schedule(mdalab.ParamSchedule(0.2, 0.1, 0.4, 1e4))
    assert bad[0][0] == "a < b"
    with pytest.raises(ValueError):
        mdalab.validate_schedule(mdalab.ParamSchedule(0.01, 0.1, 0.4, 1e4), "other")


def test_volumes():
    assert mdalab.xi_area(0.1) == pytest.approx(4 * 0.1 * (1 - math.log(0.1)), rel=1e-15)
    s = mdalab.ParamSchedule(0.01, 0.1, 0.5, 1e4)
    assert mdalab.omega_volume(s) == pytest.approx(mdalab.omega_volume_quadrature(s), rel=1e-9)
    with pytest.raises(ValueError):
        mdalab.xi_area(0.0)


def test_height_of_the_integer_lattice():
    h = mdalab.height((0.0, 0.0))
    assert (h["s1"], h["s2"], h["s3"], h["ht"]) == (1.0, 1.0, 1.0, 1.0)
    assert h["ht"] <= h["upper_bound"]


def test_flow_cap_raises_overflow():
    assert mdalab.apply_flow((1.0, 2.0), (1.0, 1.0, 1.0))[2] == pytest.approx(math.exp(-3.0))
    with pytest.raises(OverflowError):
        mdalab.apply_flow((600.0, 0.0), (1.0, 1.0, 1.0))


def test_run_experiment_is_thread_independent():
    params = {"n": "500", "T": "1e3, 1e4"}
    one = mdalab.run_experiment("thinstrip", params, seed=3, threads=1)
    four = mdalab.run_experiment("thinstrip", params, seed=3, threads=4)
    assert one["csv"] == four["csv"]
    assert one["columns"][0] == "T"
    assert len(one["rows"]) == 2
    with pytest.raises(ValueError):
        mdalab.run_experiment("nonexistent")


def test_cli_in_process():
    code, out, err = mdalab.cli(["count", "--x", "0.41421356,0.73205081", "--a", "0",
                                 "--b", "0.2", "--c", "0.49", "--T", "10"])
    assert code == 0, err
    assert ",6," in out
    code, _, err = mdalab.cli(["count", "--x", "0.1,0.2"])
    assert code == 2
    assert err

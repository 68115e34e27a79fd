import json

import pytest

import ttubs


@pytest.fixture(scope="module")
def adas():
    return ttubs.adas_scenario(), ttubs.fixture_schedule("table3")


def test_frame_duration():
    assert ttubs.bytes_to_duration(1500, 1_000_000_000) == 12176


def test_fixture_validates(adas):
    scenario, schedule = adas
    assert ttubs.validate(scenario, schedule, "nfic") == []
    assert json.loads(scenario)["streams"]


def test_bounds(adas):
    bounds = ttubs.e2e_bounds(*adas)
    assert bounds["cam1"] == (41776, 40176, 1600)
    assert bounds["control"][0] == 7776


def test_census_drops_isolation_in_nfic():
    chain = ttubs.gen_chain(3, 20, seed=5)
    wa = ttubs.census(chain, "wa")
    nfic = ttubs.census(chain, "nfic")
    assert nfic["total"] == wa["total"] - wa["isolation"]


def test_lstb_schedule_is_valid():
    chain = ttubs.gen_chain(2, 10, seed=3)
    result = ttubs.lstb_solve(chain, "nfic")
    assert result["status"] == "sat"
    assert ttubs.validate(chain, result["schedule"], "nfic") == []


def test_simulate_delay_under_ttubs(adas):
    report = ttubs.simulate(*adas, egress="ttubs", seed=3, duration="20ms",
                            attacks=["delay,SW1:SW2/cam2,21us,1,10us"])
    cams = {m["stream"]: m for m in report["metrics"]}
    assert cams["cam2"]["timeout_discarded"] == 1
    assert cams["cam1"]["e2e_max_ns"] == 41776
    assert report["discards"] == 1


def test_bad_input_raises(adas):
    with pytest.raises(ValueError):
        ttubs.simulate(*adas, egress="bogus")
    with pytest.raises(ValueError):
        ttubs.fixture_schedule("table9")

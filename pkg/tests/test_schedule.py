import pytest

from incontext.model.schedule import (ScheduleError, exposure_to_steps,
                                      schedule_inputs)
from incontext.stimuli import StimulusCondition, TimingConfig, build_schedule


def test_exposure_mapping_values():
    assert exposure_to_steps(200) == 8
    assert exposure_to_steps(25) == 1
    assert exposure_to_steps(100) == 4
    assert exposure_to_steps(50) == 2


def test_exposure_must_divide_by_25():
    with pytest.raises(ScheduleError):
        exposure_to_steps(30)
    with pytest.raises(ScheduleError):
        exposure_to_steps(0)


def _timing(condition):
    return build_schedule(condition, TimingConfig())


def test_sync_default_runs_eight_steps():
    roles = schedule_inputs(_timing(StimulusCondition("A1_full")), horizon=8)
    assert roles == ["image"] * 8


def test_c1_runs_exactly_exposure_steps():
    cond = StimulusCondition("C1_exposure", exposure_ms=50)
    assert schedule_inputs(_timing(cond), horizon=8) == ["image"] * 2


def test_c2_mask_fills_to_horizon():
    cond = StimulusCondition("C2_masking", exposure_ms=50)
    roles = schedule_inputs(_timing(cond), horizon=8)
    assert roles == ["image"] * 2 + ["mask"] * 6


def test_c3_context_then_object():
    cond = StimulusCondition("C3_async", t1_ms=100, t2_ms=100)
    roles = schedule_inputs(_timing(cond), horizon=8)
    assert roles == ["context_only"] * 4 + ["object_only"] * 4


def test_c3_never_presents_object_before_context():
    for t1 in (25, 50, 100):
        for t2 in (50, 100):
            if t1 + t2 > 200:
                continue
            cond = StimulusCondition("C3_async", t1_ms=t1, t2_ms=t2)
            roles = schedule_inputs(_timing(cond), horizon=8)
            first_obj = roles.index("object_only")
            assert "context_only" not in roles[first_obj:]
            assert roles[:first_obj] == ["context_only"] * first_obj


def test_exceeding_horizon_is_an_error():
    cond = StimulusCondition("C3_async", t1_ms=200, t2_ms=200)
    with pytest.raises(ScheduleError):
        schedule_inputs(_timing(cond), horizon=8)
    ok = schedule_inputs(_timing(cond), horizon=16)
    assert len(ok) == 16

"""Mapping between display timing and recurrence steps.

One step is 25 ms. Synchronous trials run exposure/25 steps; masked
trials continue on the mask up to the readout horizon; asynchronous
trials present the context-only asset first, then the object-only asset.
The prediction is read out at the final step.
"""

from .config import MS_PER_STEP


class ScheduleError(ValueError):
    pass


def exposure_to_steps(t_ms):
    """Display milliseconds -> recurrence steps (25 ms each)."""
    if t_ms is None or t_ms <= 0:
        raise ScheduleError(f"exposure must be positive, got {t_ms}")
    if t_ms % MS_PER_STEP:
        raise ScheduleError(
            f"exposure {t_ms} ms is not a multiple of {MS_PER_STEP} ms")
    return t_ms // MS_PER_STEP


def schedule_inputs(trial_timing, horizon):
    """Per-step asset roles for a trial's timing schedule.

    trial_timing: the TrialSpec timing list ({"phase", "ms"} dicts); the
    fixation and cue phases precede the stimulus and carry no model
    input. Raises ScheduleError when the schedule exceeds the horizon.
    """
    stimulus = [e for e in trial_timing
                if e["phase"] in ("image", "mask", "context_only",
                                  "object_only")]
    if not stimulus:
        raise ScheduleError("schedule has no stimulus phase")
    phases = [e["phase"] for e in stimulus]

    roles = []
    if phases == ["image", "mask"]:
        k = exposure_to_steps(stimulus[0]["ms"])
        if k > horizon:
            raise ScheduleError(
                f"exposure {stimulus[0]['ms']} ms exceeds the "
                f"{horizon}-step readout horizon")
        roles = ["image"] * k + ["mask"] * (horizon - k)
    elif phases == ["context_only", "object_only"]:
        k1 = exposure_to_steps(stimulus[0]["ms"])
        k2 = exposure_to_steps(stimulus[1]["ms"])
        if k1 + k2 > horizon:
            raise ScheduleError(
                f"async schedule {k1}+{k2} steps exceeds the "
                f"{horizon}-step readout horizon")
        roles = ["context_only"] * k1 + ["object_only"] * k2
    elif phases == ["image"]:
        k = exposure_to_steps(stimulus[0]["ms"])
        if k > horizon:
            raise ScheduleError(
                f"exposure {stimulus[0]['ms']} ms exceeds the "
                f"{horizon}-step readout horizon")
        roles = ["image"] * k
    else:
        raise ScheduleError(f"unsupported stimulus phase order {phases}")
    return roles

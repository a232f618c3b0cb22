"""Stimulus condition descriptors.

A condition names one experimental manipulation plus exactly the
parameters that manipulation needs; everything random about rendering a
trial is derived from the condition seed and the trial's image id.
"""

from dataclasses import dataclass, fields

CO_RATIOS = (0, 2, 4, 8, 16, 128)
SIGMAS = (2, 4, 8, 16, 32)
GRIDS = ("2x2", "4x4", "8x8")
CONGRUENCES = ("congruent", "incongruent")
EXPOSURES_MS = (50, 100, 200)
T1_MS = (25, 50, 100, 200)
T2_MS = (50, 100, 200)

# experiment id -> required parameter fields
EXPERIMENT_PARAMS = {
    "A1_minimal": (),
    "A1_full": (),
    "A2_co": ("co_ratio",),
    "B1_blur_ctx": ("sigma",),
    "B2_blur_obj": ("sigma",),
    "B3_texture": (),
    "B4_jigsaw": ("grid",),
    "B5_congruence": ("congruence",),
    "C1_exposure": ("exposure_ms",),
    "C2_masking": ("exposure_ms",),
    "C3_async": ("t1_ms", "t2_ms"),
}

_ALLOWED = {
    "co_ratio": CO_RATIOS,
    "sigma": SIGMAS,
    "grid": GRIDS,
    "congruence": CONGRUENCES,
    "exposure_ms": EXPOSURES_MS,
    "t1_ms": T1_MS,
    "t2_ms": T2_MS,
}


@dataclass(frozen=True)
class StimulusCondition:
    experiment: str
    co_ratio: int | None = None
    sigma: int | None = None
    grid: str | None = None
    congruence: str | None = None
    exposure_ms: int | None = None
    t1_ms: int | None = None
    t2_ms: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_PARAMS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        required = EXPERIMENT_PARAMS[self.experiment]
        for f in fields(self):
            if f.name in ("experiment", "seed"):
                continue
            value = getattr(self, f.name)
            if f.name in required:
                if value is None:
                    raise ValueError(
                        f"{self.experiment} requires {f.name}")
                if value not in _ALLOWED[f.name]:
                    raise ValueError(
                        f"{f.name}={value!r} not in {_ALLOWED[f.name]}")
            elif value is not None:
                raise ValueError(
                    f"{f.name} is not a parameter of {self.experiment}")

    def param_tag(self):
        """Short string naming the parameter setting, for ids and paths."""
        parts = []
        for name in EXPERIMENT_PARAMS[self.experiment]:
            parts.append(f"{name.replace('_ms', '')}{getattr(self, name)}")
        return "-".join(parts) if parts else "base"

    def key(self):
        """Hashable grouping key: experiment plus its parameters."""
        params = tuple(
            (n, getattr(self, n)) for n in EXPERIMENT_PARAMS[self.experiment])
        return (self.experiment,) + params

    def to_dict(self):
        d = {"experiment": self.experiment, "seed": self.seed}
        for name in EXPERIMENT_PARAMS[self.experiment]:
            d[name] = getattr(self, name)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

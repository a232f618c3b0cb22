"""Model configuration."""

from dataclasses import dataclass, asdict

MS_PER_STEP = 25

ABLATIONS = ("single_stream", "binary_mask_input", "no_attention",
             "no_recurrence")

# default conv widths per backbone family; the last width is the feature
# dimension D, and each conv halves the spatial resolution
BACKBONES = {
    "toy": (16, 24, 32),
    "deep": (32, 64, 128, 256),
}


@dataclass
class ModelConfig:
    input_size: int = 400
    backbone: str = "toy"
    backbone_channels: tuple = None   # overrides the backbone default
    kernel_size: int = 3
    n: int = 128                      # recurrent hidden size
    C: int = 55                       # class count
    T_m: int = 8                      # training steps; 25 ms each
    horizon: int = 8                  # readout depth for masked schedules
    ablation: tuple = ()
    dtype: str = "float32"
    box_width: int = 2                # white cue rectangle line width
    box_gap: int = 1                  # gap between bbox and cue rectangle
    seed: int = 0

    def __post_init__(self):
        if self.backbone not in BACKBONES:
            raise ValueError(f"unknown backbone {self.backbone!r}")
        if self.backbone_channels is None:
            self.backbone_channels = BACKBONES[self.backbone]
        self.backbone_channels = tuple(self.backbone_channels)
        self.ablation = tuple(sorted(set(self.ablation)))
        for flag in self.ablation:
            if flag not in ABLATIONS:
                raise ValueError(f"unknown ablation flag {flag!r}")
        if ("single_stream" in self.ablation
                and "binary_mask_input" in self.ablation):
            raise ValueError("single_stream and binary_mask_input conflict")
        if self.T_m < 1:
            raise ValueError("T_m must be >= 1")
        if self.C < 2:
            raise ValueError("C must be >= 2")
        stride = 2 ** len(self.backbone_channels)
        if self.input_size % stride:
            raise ValueError(
                f"input_size {self.input_size} not divisible by the "
                f"backbone stride {stride}")

    @property
    def D(self):
        return self.backbone_channels[-1]

    @property
    def feature_hw(self):
        side = self.input_size // (2 ** len(self.backbone_channels))
        return side, side

    @property
    def L(self):
        h, w = self.feature_hw
        return h * w

    @property
    def two_stream(self):
        return ("single_stream" not in self.ablation
                and "binary_mask_input" not in self.ablation)

    @property
    def in_channels(self):
        return 4 if "binary_mask_input" in self.ablation else 3

    @property
    def gist_dim(self):
        return 2 * self.D if self.two_stream else self.D

    def to_dict(self):
        d = asdict(self)
        d["backbone_channels"] = list(self.backbone_channels)
        d["ablation"] = list(self.ablation)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["backbone_channels"] = tuple(d.get("backbone_channels") or ())
        if not d["backbone_channels"]:
            d["backbone_channels"] = None
        d["ablation"] = tuple(d.get("ablation") or ())
        return cls(**d)

from .config import ModelConfig, MS_PER_STEP, ABLATIONS
from .network import CATNet, ForwardResult, classify, init_params
from .attention import AttentionState, attend, attend_backward
from .lstm import RecurrentState, lstm_step, lstm_step_backward, zero_state
from .loss import training_loss, batch_loss_and_grad
from .schedule import ScheduleError, exposure_to_steps, schedule_inputs
from .streams import StreamInput, preprocess_streams, batch_streams
from .checkpoint import save_checkpoint, load_checkpoint
from .train import (TrainConfig, TrainingSet, Adam, DivergenceError,
                    build_training_set, train, train_to_checkpoint)
from .evalrun import evaluate_manifest, effective_bbox, RESULT_COLUMNS

__all__ = [
    "ModelConfig", "MS_PER_STEP", "ABLATIONS", "CATNet", "ForwardResult",
    "classify", "init_params", "AttentionState", "attend", "attend_backward",
    "RecurrentState", "lstm_step", "lstm_step_backward", "zero_state",
    "training_loss", "batch_loss_and_grad", "ScheduleError",
    "exposure_to_steps", "schedule_inputs", "StreamInput",
    "preprocess_streams", "batch_streams", "save_checkpoint",
    "load_checkpoint", "TrainConfig", "TrainingSet", "Adam",
    "DivergenceError", "build_training_set", "train", "train_to_checkpoint",
    "evaluate_manifest", "effective_bbox", "RESULT_COLUMNS",
]

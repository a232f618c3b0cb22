"""Single-file versioned checkpoints: parameters + config echo + curve."""

import json

import numpy as np

from .config import ModelConfig

FORMAT_VERSION = 1


def save_checkpoint(path, params, config, categories, loss_curve=None):
    payload = {f"param.{name}": value for name, value in params.items()}
    payload["meta.format_version"] = np.array(FORMAT_VERSION, dtype=np.int64)
    payload["meta.config"] = np.frombuffer(
        json.dumps(config.to_dict(), sort_keys=True).encode(), dtype=np.uint8)
    payload["meta.categories"] = np.frombuffer(
        json.dumps(list(categories)).encode(), dtype=np.uint8)
    curve = np.asarray(loss_curve if loss_curve is not None else [],
                       dtype=np.float64)
    payload["meta.loss_curve"] = curve.reshape(-1, 2) if curve.size else \
        np.zeros((0, 2))
    np.savez(path, **payload)


def load_checkpoint(path):
    with np.load(path) as data:
        version = int(data["meta.format_version"])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        config = ModelConfig.from_dict(
            json.loads(bytes(data["meta.config"]).decode()))
        categories = json.loads(bytes(data["meta.categories"]).decode())
        loss_curve = data["meta.loss_curve"]
        params = {name[len("param."):]: data[name]
                  for name in data.files if name.startswith("param.")}
    return params, config, categories, loss_curve

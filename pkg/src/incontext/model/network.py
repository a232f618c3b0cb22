"""The two-stream attention recurrent recognizer.

Both streams run through a weight-sharing convolutional extractor; each
stream has its own gated soft attention whose gists are concatenated and
fed to an LSTM; a linear head classifies from the hidden state at every
25 ms step. Feature maps are extracted once per distinct input image,
and the attention/recurrence loop revisits them each step.
"""

from dataclasses import dataclass, field

import numpy as np

from .attention import (attend, attend_backward, attend_uniform,
                        attend_uniform_backward, init_attention_params)
from .backbone import backbone_backward, backbone_forward, init_backbone_params
from .config import ModelConfig
from .layers import glorot, softmax
from .lstm import init_lstm_params, lstm_step, lstm_step_backward, zero_state

STREAMS = ("ctx", "obj")


def init_params(config):
    rng = np.random.default_rng(config.seed)
    params = init_backbone_params(config, rng)
    if "no_attention" not in config.ablation:
        params.update(init_attention_params(config, rng, "ctx"))
        if config.two_stream:
            params.update(init_attention_params(config, rng, "obj"))
    params.update(init_lstm_params(config, rng))
    params["head.L_h"] = glorot(
        rng, (config.C, config.n), np.dtype(config.dtype))
    return params


def classify(h, L_h):
    """Probabilities and argmax labels from a hidden state batch.

    Ties break toward the lowest class index (argmax's first occurrence).
    """
    logits = h @ L_h.T
    probs = softmax(logits, axis=-1)
    return logits, probs, np.argmax(probs, axis=-1)


@dataclass
class ForwardResult:
    logits: list          # T x (B, C)
    probs: list           # T x (B, C)
    labels: list          # T x (B,)
    attention: dict       # stream -> list of AttentionState per step
    states: list          # RecurrentState per step
    caches: dict = field(default_factory=dict, repr=False)

    @property
    def steps(self):
        return len(self.logits)


class CATNet:
    def __init__(self, config: ModelConfig, params=None):
        self.config = config
        self.params = params if params is not None else init_params(config)

    # ---- feature extraction -------------------------------------------

    def extract(self, images, keep_cache=True):
        feats, cache = backbone_forward(self.params, self.config, images)
        return feats, (cache if keep_cache else None)

    # ---- forward -------------------------------------------------------

    def _streams_for_step(self, feats):
        if self.config.two_stream:
            return [("ctx", feats["ctx"]), ("obj", feats["obj"])]
        return [("ctx", feats["ctx"])]

    def _attend_stream(self, stream, a, h):
        if "no_attention" in self.config.ablation:
            state, L = attend_uniform(a)
            return state, ("uniform", L)
        p = self.params
        return attend(a, h, p[f"attn.{stream}.A_h"], p[f"attn.{stream}.A_a"],
                      p[f"attn.{stream}.W_beta"])

    def forward(self, ctx_images, obj_images=None, steps=None,
                keep_cache=False):
        """Static-input forward: the same images feed every step.

        ctx_images: (B, in_channels, S, S); obj_images: (B, 3, S, S) for
        the two-stream configuration, None otherwise.
        """
        steps = steps if steps is not None else self.config.T_m
        feats = {}
        feat_caches = {}
        feats["ctx"], feat_caches["ctx"] = self.extract(
            ctx_images, keep_cache=keep_cache)
        if self.config.two_stream:
            if obj_images is None:
                raise ValueError("two-stream model needs obj_images")
            feats["obj"], feat_caches["obj"] = self.extract(
                obj_images, keep_cache=keep_cache)
        per_step_feats = [feats] * steps
        return self._run_steps(per_step_feats, feat_caches=feat_caches,
                               keep_cache=keep_cache)

    def forward_scheduled(self, step_images):
        """Per-step inputs for the timing experiments.

        step_images: list over steps of dicts {"ctx": array, "obj": array}.
        Features are extracted once per distinct array (by identity).
        """
        seen = {}
        per_step_feats = []
        for entry in step_images:
            feats = {}
            for stream in ("ctx", "obj") if self.config.two_stream else ("ctx",):
                arr = entry[stream]
                key = id(arr)
                if key not in seen:
                    seen[key], _ = self.extract(arr, keep_cache=False)
                feats[stream] = seen[key]
            per_step_feats.append(feats)
        return self._run_steps(per_step_feats, feat_caches={},
                               keep_cache=False)

    def _run_steps(self, per_step_feats, feat_caches, keep_cache):
        config = self.config
        p = self.params
        batch = per_step_feats[0]["ctx"].shape[0]
        dtype = np.dtype(config.dtype)
        requested = len(per_step_feats)
        effective = 1 if "no_recurrence" in config.ablation else requested

        state = zero_state(batch, config.n, dtype)
        result = ForwardResult(logits=[], probs=[], labels=[],
                               attention={s: [] for s in STREAMS},
                               states=[])
        attn_caches, lstm_caches, hidden = [], [], []
        for t in range(effective):
            feats = per_step_feats[t]
            gists = []
            step_attn = {}
            for stream, a in self._streams_for_step(feats):
                astate, acache = self._attend_stream(stream, a, state.h)
                result.attention[stream].append(astate)
                step_attn[stream] = acache
                gists.append(astate.gist)
            gist = np.concatenate(gists, axis=1) if len(gists) > 1 else gists[0]
            state, lcache = lstm_step(
                gist, state, p["lstm.W_x"], p["lstm.W_h"], p["lstm.b"])
            logits, probs, labels = classify(state.h, p["head.L_h"])
            result.states.append(state)
            result.logits.append(logits)
            result.probs.append(probs)
            result.labels.append(labels)
            if keep_cache:
                attn_caches.append(step_attn)
                lstm_caches.append(lcache)
                hidden.append(state.h)

        # the no-recurrence ablation repeats its single step's output
        for _ in range(requested - effective):
            for name in ("logits", "probs", "labels", "states"):
                getattr(result, name).append(getattr(result, name)[0])
            for s in result.attention:
                if result.attention[s]:
                    result.attention[s].append(result.attention[s][0])

        if keep_cache:
            result.caches = {
                "feat": feat_caches, "attn": attn_caches,
                "lstm": lstm_caches, "effective": effective,
                "per_step_feats": per_step_feats,
            }
        return result

    # ---- backward ------------------------------------------------------

    def backward(self, result, dlogits):
        """Gradients of a scalar objective given d(objective)/d(logits).

        Only static-input forwards run with keep_cache=True support this.
        Returns a dict matching self.params keys.
        """
        config = self.config
        p = self.params
        caches = result.caches
        if not caches:
            raise ValueError("forward was run without keep_cache=True")
        effective = caches["effective"]
        if effective != len(dlogits):
            # repeated steps: fold their gradients into the single real step
            folded = dlogits[0].copy()
            for d in dlogits[1:]:
                folded += d
            dlogits = [folded]

        grads = {k: np.zeros_like(v) for k, v in p.items()}
        batch = dlogits[0].shape[0]
        dtype = np.dtype(config.dtype)
        dh_next = np.zeros((batch, config.n), dtype=dtype)
        dc_next = np.zeros((batch, config.n), dtype=dtype)
        dfeat = {s: None for s in ("ctx", "obj")}

        for t in reversed(range(effective)):
            h_t = result.states[t].h
            dh = dh_next + dlogits[t] @ p["head.L_h"]
            grads["head.L_h"] += dlogits[t].T @ h_t

            dgist, dh_prev, dc_prev, lgrads = lstm_step_backward(
                dh, dc_next, caches["lstm"][t], p["lstm.W_x"], p["lstm.W_h"])
            for name, g in lgrads.items():
                grads[f"lstm.{name}"] += g

            streams = self._streams_for_step(caches["per_step_feats"][t])
            if len(streams) == 2:
                d_gists = np.split(dgist, 2, axis=1)
            else:
                d_gists = [dgist]
            for (stream, a), dg in zip(streams, d_gists):
                acache = caches["attn"][t][stream]
                if "no_attention" in config.ablation:
                    da = attend_uniform_backward(dg, acache[1])
                else:
                    da, dh_a, agrads = attend_backward(
                        dg, acache, p[f"attn.{stream}.A_h"],
                        p[f"attn.{stream}.A_a"],
                        p[f"attn.{stream}.W_beta"])
                    dh_prev = dh_prev + dh_a
                    for name, g in agrads.items():
                        grads[f"attn.{stream}.{name}"] += g
                dfeat[stream] = da if dfeat[stream] is None \
                    else dfeat[stream] + da

            dh_next, dc_next = dh_prev, dc_prev

        for stream in ("ctx", "obj"):
            if dfeat[stream] is None:
                continue
            _, bgrads = backbone_backward(
                p, config, dfeat[stream], caches["feat"][stream])
            for name, g in bgrads.items():
                grads[name] += g
        return grads

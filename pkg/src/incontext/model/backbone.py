"""All-convolutional feature extractor shared by both streams.

A stack of stride-2 convolutions with ReLU between them; the last conv
output is the feature map. Spatial organization is preserved: location i
of the (L, D) feature list corresponds to a fixed image region.
"""

import numpy as np

from .layers import (conv2d_backward, conv2d_forward, he_normal,
                     relu_backward, relu_forward)


def init_backbone_params(config, rng):
    params = {}
    cin = config.in_channels
    k = config.kernel_size
    dtype = np.dtype(config.dtype)
    for idx, cout in enumerate(config.backbone_channels):
        params[f"backbone.conv{idx}.W"] = he_normal(
            rng, (cout, cin, k, k), dtype)
        params[f"backbone.conv{idx}.b"] = np.zeros(cout, dtype=dtype)
        cin = cout
    return params


def backbone_forward(params, config, x):
    """x: (B, Cin, S, S) -> features (B, L, D) plus cache for backward."""
    caches = []
    out = x
    k = config.kernel_size
    pad = k // 2
    n_layers = len(config.backbone_channels)
    for idx in range(n_layers):
        W = params[f"backbone.conv{idx}.W"]
        b = params[f"backbone.conv{idx}.b"]
        out, conv_cache = conv2d_forward(out, W, b, stride=2, pad=pad)
        if idx < n_layers - 1:
            out, mask = relu_forward(out)
        else:
            mask = None
        caches.append((conv_cache, mask))
    batch, d, fh, fw = out.shape
    features = out.transpose(0, 2, 3, 1).reshape(batch, fh * fw, d)
    return features, (caches, (batch, d, fh, fw))


def backbone_backward(params, config, dfeatures, cache):
    caches, (batch, d, fh, fw) = cache
    dout = dfeatures.reshape(batch, fh, fw, d).transpose(0, 3, 1, 2)
    grads = {}
    for idx in reversed(range(len(config.backbone_channels))):
        conv_cache, mask = caches[idx]
        if mask is not None:
            dout = relu_backward(dout, mask)
        W = params[f"backbone.conv{idx}.W"]
        dout, dW, db = conv2d_backward(dout, W, conv_cache)
        grads[f"backbone.conv{idx}.W"] = dW
        grads[f"backbone.conv{idx}.b"] = db
    return dout, grads

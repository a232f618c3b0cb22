"""Cross-entropy objective summed over recurrence steps."""

import numpy as np

LOG_EPS = 1e-12


def training_loss(step_probabilities, true_label):
    """Sum over steps of -log P(true label), probabilities clamped at 1e-12."""
    total = 0.0
    for probs in step_probabilities:
        total += -np.log(max(float(probs[true_label]), LOG_EPS))
    return total


def batch_loss_and_grad(logits_list, labels):
    """Mean-over-batch of the per-trial step-summed cross entropy.

    Works from logits (log-sum-exp form) for stability; returns the loss
    and d(loss)/d(logits) per step.
    """
    batch = labels.shape[0]
    idx = np.arange(batch)
    total = 0.0
    dlogits = []
    for logits in logits_list:
        shifted = logits - logits.max(axis=1, keepdims=True)
        logz = np.log(np.exp(shifted).sum(axis=1))
        total += float((logz - shifted[idx, labels]).sum())
        p = np.exp(shifted - logz[:, None])
        d = p
        d[idx, labels] -= 1.0
        dlogits.append(d / batch)
    return total / batch, dlogits

"""Toolkit for context-aware object recognition experiments.

Subpackages:
    stimuli   - dataset ingestion, target balancing, and condition renderers
    model     - two-stream attention recurrent recognizer and training
    evalstats - response scoring, per-condition reports, statistics
    service   - experiment session server with an append-only response store
    kernels   - compiled/numpy numerical kernels
"""

__version__ = "0.1.0"

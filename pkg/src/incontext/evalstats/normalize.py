"""Free-form answer normalization.

The chain is: lowercase, trim, collapse internal whitespace, synonym
lookup, then a trailing plural "s" strip (with a second synonym lookup on
the stripped form). The synonym table is data, not code; the packaged
starter list is user-extensible and stands in for separately collected
ground-truth answer distributions.
"""

import json
from importlib import resources

_DEFAULT = None


def load_synonyms(path=None):
    """Load a {variant: canonical} mapping, keys already normalized."""
    if path is None:
        text = resources.files("incontext.evalstats").joinpath(
            "data/synonyms.json").read_text()
    else:
        with open(path) as f:
            text = f.read()
    table = json.loads(text)
    return {" ".join(k.lower().split()): " ".join(v.lower().split())
            for k, v in table.items()}


def default_synonyms():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_synonyms()
    return _DEFAULT


def normalize_answer(raw, synonyms=None):
    """Canonical form of a typed answer; pure and idempotent."""
    if synonyms is None:
        synonyms = default_synonyms()
    s = " ".join(str(raw).lower().split())
    if s in synonyms:
        return synonyms[s]
    if len(s) >= 4 and s.endswith("s") and not s.endswith("ss"):
        stripped = s[:-1]
        return synonyms.get(stripped, stripped)
    return s

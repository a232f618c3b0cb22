"""Append-only record store.

One JSON record per line; records are never mutated or deleted. Appends
serialize through a single lock and fsync before acknowledging, so a
response is either fully present or absent after a crash. A trailing
partial line (torn write) is ignored on replay.
"""

import json
import os
import threading


class ResponseStore:
    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        # create the file eagerly so exports of an empty store work
        with open(self.path, "a"):
            pass

    def append(self, record):
        """Atomically append one record."""
        line = json.dumps(record, sort_keys=True) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line)
                f.flush()
                os.fsync(f.fileno())

    def iter_records(self):
        """Yield all complete records, skipping a torn trailing line."""
        try:
            with open(self.path, encoding="utf-8") as f:
                content = f.read()
        except FileNotFoundError:
            return
        for line in content.split("\n")[:-1]:
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError:
                # a torn line can only be the last complete-looking one;
                # anything unparseable is treated as never written
                continue

    def records(self, kind=None):
        out = []
        for record in self.iter_records():
            if kind is None or record.get("kind") == kind:
                out.append(record)
        return out

"""Planted single-rule bugs, switchable at runtime for mutation testing.

Each mutant names one rule of the engine or of the heap instantiation that
it breaks. The conformance and differential suites must detect every one.
"""

from __future__ import annotations

import contextlib
import threading

MUTANTS = {
    "drop-neq-branch": "cell consumer omits the all-keys-differ branch",
    "write-on-error": "setter updates the memory on its error branch",
    "duplicate-producer": "cell producer succeeds on an existing key",
    "weaken-assume": "symbolic assume keeps the old path condition",
    "drop-goto-branch": "symbolic goto explores only the taken branch",
    "non-fresh-alloc": "allocator reuses already allocated names",
    "strengthen-consumer": "cell consumer adds a spurious constraint on success",
}

_state = threading.local()


def _active() -> set:
    if not hasattr(_state, "on"):
        _state.on = set()
    return _state.on


def active(name: str) -> bool:
    return name in _active()


@contextlib.contextmanager
def enabled(*names: str):
    for n in names:
        if n not in MUTANTS:
            raise KeyError(f"unknown mutant {n!r}")
    on = _active()
    before = set(on)
    on.update(names)
    try:
        yield
    finally:
        on.clear()
        on.update(before)

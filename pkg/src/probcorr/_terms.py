"""Shared helpers for immutable syntax trees."""

from __future__ import annotations

import re
from dataclasses import dataclass, fields


def node(cls):
    """Frozen dataclass whose structural hash is computed once.

    Terms are used as dictionary keys during state-space exploration, so
    recomputing a deep hash on every lookup would dominate running time.
    """
    user_post = cls.__dict__.get("__post_init__")

    def __post_init__(self):
        if user_post is not None:
            user_post(self)
        values = tuple(getattr(self, f) for f in names)
        object.__setattr__(self, "_hash", hash((cls.__name__, values)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in names)

    cls.__post_init__ = __post_init__
    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    inherited_repr = any("__repr__" in base.__dict__ for base in cls.__mro__[1:-1])
    cls = dataclass(frozen=True, eq=False, repr=not inherited_repr)(cls)
    names = tuple(f.name for f in fields(cls))
    return cls


_SUFFIX = re.compile(r"^(.*?)(\d+)$")


def fresh_name(base: str, avoid, sep: str = "") -> str:
    """Smallest ``base + sep + k`` (k >= 1) not in ``avoid``."""
    match = _SUFFIX.match(base) if not sep else None
    stem = match.group(1) if match and match.group(1) else base
    k = 1
    while True:
        candidate = f"{stem}{sep}{k}"
        if candidate not in avoid:
            return candidate
        k += 1

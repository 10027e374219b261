"""Structured command reports with a JSON round trip."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .symexpr import Expr, to_text


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst_error: float | None = None
    informational: bool = False
    note: str = ""


@dataclass
class Report:
    command: str
    spec_name: str
    payload: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, name, passed, worst_error=None, informational=False, note=""):
        err = None if worst_error is None else float(worst_error)
        self.checks.append(Check(name, bool(passed), err, informational, note))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "spec_name": self.spec_name,
            "payload": self.payload,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        return cls(d["command"], d["spec_name"], d.get("payload", {}), [Check(**c) for c in d.get("checks", [])])

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.spec_name}"]
        _render(self.payload, lines, 1)
        if self.checks:
            lines.append("checks:")
            width = max(len(c.name) for c in self.checks)
            for c in self.checks:
                status = "PASS" if c.passed else ("NOTE" if c.informational else "FAIL")
                err = "" if c.worst_error is None else f"  worst={c.worst_error:.3e}"
                note = f"  ({c.note})" if c.note else ""
                lines.append(f"  {status}  {c.name:<{width}}{err}{note}")
        return "\n".join(lines)


def _render(node, lines, depth):
    pad = "  " * depth
    for key, val in node.items():
        if isinstance(val, dict):
            if not val:
                lines.append(f"{pad}{key}: (all zero)" if depth > 1 else f"{pad}{key}: {{}}")
                continue
            lines.append(f"{pad}{key}:")
            _render(val, lines, depth + 1)
        elif isinstance(val, list) and val and isinstance(val[0], list):
            lines.append(f"{pad}{key}:")
            for row in val:
                lines.append(f"{pad}  [" + ", ".join(map(str, row)) + "]")
        else:
            lines.append(f"{pad}{key}: {val}")


def matrix_payload(m) -> list:
    """4x4 Expr matrix -> nested lists of expression text."""
    return [[to_text(e) for e in row] for row in m]


def number_payload(z) -> float | dict:
    z = complex(z)
    if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
        return float(z.real)
    return {"re": float(z.real), "im": float(z.imag)}


def array_payload(a: np.ndarray) -> dict:
    """Nonzero entries of a numeric array keyed like tensor components."""
    out = {}
    for idx in np.ndindex(a.shape):
        v = a[idx]
        if abs(v) > 1e-14:
            out[",".join(map(str, idx))] = number_payload(v)
    return out


def expr_payload(e: Expr) -> str:
    return to_text(e)

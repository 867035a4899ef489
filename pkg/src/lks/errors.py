"""Structured errors shared by the pipeline and mapped to CLI exit codes."""

from __future__ import annotations

__all__ = ["InputError", "Infeasible", "InvariantViolation", "EXIT_CODES"]


class InputError(ValueError):
    """Raised when an operation's input violates its documented precondition."""


class _Report(RuntimeError):
    """An error carrying the stage, the failed inequality and its operands."""

    def __init__(self, stage: str, inequality: str, **operands):
        self.stage = stage
        self.inequality = inequality
        self.operands = operands
        ops = ", ".join(f"{k}={_fmt(v)}" for k, v in operands.items())
        super().__init__(f"[{stage}] {inequality}" + (f" ({ops})" if ops else ""))

    def to_json(self) -> dict:
        return {"kind": type(self).__name__, "stage": self.stage, "inequality": self.inequality,
                "operands": {k: _fmt(v) for k, v in self.operands.items()}}


def _fmt(v):
    from fractions import Fraction
    if isinstance(v, Fraction):
        return str(v) if v.denominator == 1 else f"{float(v):.6g}"
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    return v


class Infeasible(_Report):
    """The instance is outside what the construction can handle (exit code 1)."""


class InvariantViolation(_Report):
    """A condition the construction guarantees failed: a bug, not a bad instance (exit code 3)."""


EXIT_CODES = {Infeasible: 1, InputError: 2, InvariantViolation: 3}

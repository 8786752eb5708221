"""Experiment configuration files and their validation."""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field

from .. import measures as ms
from ..errors import ContractViolation

SUITES = ("core-identities", "measure-report", "semigroup-sim", "paper-examples")
TOL_SCALE_ENV = "MISO_LAB_TOL_SCALE"

_FIELDS = {"suite", "measure", "degrees", "times", "tolerancesOverride", "seed"}


class UsageError(ContractViolation):
    """Malformed configuration; the message carries line/field diagnostics."""

    def __init__(self, message, field_name=None, line=None):
        self.field_name = field_name
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field_name is not None:
            where.append(f"field {field_name!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


def named_measures() -> dict:
    return {
        "atomic-neg1": ms.point_mass(1),
        "atomic-i": ms.point_mass("1/2"),
        "lebesgue": ms.lebesgue(),
        "zero": ms.zero(),
        "abs1mz-fejer": ms.abs_one_minus_zeta_fejer(8),
        "abs1mz-power4": ms.abs_one_minus_zeta_power4(),
    }


@dataclass(frozen=True)
class ExperimentConfig:
    suite: str
    measure: ms.OperatorMeasure | None = None
    degrees: tuple = (0, 2, 4, 8)
    times: tuple = (0.5, 1.0, 2.0, 4.0)
    tolerances_override: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; expected one of {', '.join(SUITES)}", "suite")
        degs = list(self.degrees)
        if not degs or any(not isinstance(d, int) or isinstance(d, bool) or d < 0 for d in degs):
            raise UsageError("degrees must be a non-empty list of non-negative integers", "degrees")
        if any(b <= a for a, b in zip(degs, degs[1:])):
            raise UsageError("degrees must be strictly increasing", "degrees")
        if max(degs) > 24:
            raise UsageError("degrees are capped at 24", "degrees")
        ts = list(self.times)
        if not ts or any(not isinstance(t, (int, float)) or isinstance(t, bool) or t < 0 for t in ts):
            raise UsageError("times must be a non-empty list of non-negative numbers", "times")
        for k, v in self.tolerances_override.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
                raise UsageError(f"tolerance for {k!r} must be a positive number", "tolerancesOverride")


def _line_of(text: str, key: str):
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def parse_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON ({exc.msg}, column {exc.colno})", line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise UsageError("configuration must be a JSON object", line=1)
    unknown = sorted(set(doc) - _FIELDS)
    if unknown:
        raise UsageError("unknown field", unknown[0], _line_of(text, unknown[0]))
    if "suite" not in doc:
        raise UsageError("missing required field", "suite", 1)

    def fail(name, message):
        return UsageError(message, name, _line_of(text, name))

    measure = doc.get("measure")
    if measure is not None:
        if isinstance(measure, str):
            table = named_measures()
            if measure not in table:
                raise fail("measure", f"unknown measure name {measure!r}; known: {', '.join(sorted(table))}")
            measure = table[measure]
        else:
            try:
                measure = ms.from_dict(measure)
            except ContractViolation as exc:
                raise fail("measure", str(exc)) from exc
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise fail("seed", "seed must be an integer")
    override = doc.get("tolerancesOverride", {})
    if not isinstance(override, dict):
        raise fail("tolerancesOverride", "must be an object mapping check names to tolerances")
    for name in ("degrees", "times"):
        if name in doc and not isinstance(doc[name], list):
            raise fail(name, "must be a list")
    try:
        return ExperimentConfig(
            suite=doc["suite"],
            measure=measure,
            degrees=tuple(doc.get("degrees", (0, 2, 4, 8))),
            times=tuple(doc.get("times", (0.5, 1.0, 2.0, 4.0))),
            tolerances_override=dict(override),
            seed=seed,
        )
    except UsageError as exc:
        if exc.field_name is not None and exc.line is None:
            raise UsageError(str(exc).split(": ", 1)[-1], exc.field_name, _line_of(text, exc.field_name)) from None
        raise


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read configuration: {exc.strerror}") from exc
    return parse_config(text)


def tolerance_scale() -> float:
    raw = os.environ.get(TOL_SCALE_ENV, "1")
    try:
        value = float(raw)
    except ValueError as exc:
        raise UsageError(f"{TOL_SCALE_ENV}={raw!r} is not a number") from exc
    if not value > 0:
        raise UsageError(f"{TOL_SCALE_ENV} must be positive")
    return value

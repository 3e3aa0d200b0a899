"""Run reports: suite execution and deterministic serialization.

JSON serialization is hand-rolled so floats always print with 17 significant
digits (round-trip exact for regression diffs) and keys are emitted sorted:
two runs with the same config, seed and version produce byte-identical
output.  Wall-clock timings are collected but kept out of the serialized
bytes by default for exactly that reason.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import RunConfig, build_field, build_weight
from .measures import make_measure
from .suites import RunContext, default_library, run_suite


@dataclass
class SuiteResult:
    name: str
    checks: list[dict]
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return all(c.get("pass", False) or c.get("informational", False)
                   for c in self.checks)


@dataclass
class RunReport:
    config: dict
    version: str
    suites: list[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)


def run(config: RunConfig) -> RunReport:
    """Execute the configured suites in declared order, deterministically."""
    from .errors import ConfigError, ToolkitError
    try:
        weight = build_weight(config)
        order = config.quadrature.get("order", 32)
        mc_samples = config.quadrature.get("mc_samples")
        measure = make_measure(weight, 1.0, order=order, mc_samples=mc_samples,
                               seed=config.seed)
        if config.fields is None:
            fields = default_library(weight, seed=config.seed)
        else:
            fields = [build_field(f, config.dim) for f in config.fields]
    except ConfigError:
        raise
    except ToolkitError as exc:
        # an inadmissible weight or impossible rule is a configuration
        # problem, not a theorem failure
        raise ConfigError(str(exc)) from exc
    ctx = RunContext(weight=weight, measure=measure, fields=fields,
                     tolerance=config.tolerance, seed=config.seed, order=order)
    report = RunReport(config=dict(config.raw), version=__version__)
    for name in config.suites:
        t0 = time.perf_counter()
        checks = run_suite(name, ctx)
        report.suites.append(SuiteResult(name, checks,
                                         time.perf_counter() - t0))
    return report


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

def _clean(value):
    """Normalize to plain JSON-serializable python values."""
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        seq = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_clean(v) for v in seq]
    return value


def _emit_json(value, parts: list[str]):
    if value is None:
        parts.append("null")
    elif value is True:
        parts.append("true")
    elif value is False:
        parts.append("false")
    elif isinstance(value, int):
        parts.append(str(value))
    elif isinstance(value, float):
        if math.isnan(value):
            parts.append('"nan"')
        elif math.isinf(value):
            parts.append('"inf"' if value > 0 else '"-inf"')
        else:
            parts.append(format(value, ".17g"))
    elif isinstance(value, str):
        escaped = (value.replace("\\", "\\\\").replace('"', '\\"')
                   .replace("\n", "\\n").replace("\t", "\\t"))
        parts.append(f'"{escaped}"')
    elif isinstance(value, dict):
        parts.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                parts.append(",")
            _emit_json(str(key), parts)
            parts.append(":")
            _emit_json(value[key], parts)
        parts.append("}")
    elif isinstance(value, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(value):
            if i:
                parts.append(",")
            _emit_json(item, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def report_payload(report: RunReport, include_timing: bool = False) -> dict:
    suites = []
    for s in report.suites:
        entry = {"name": s.name, "checks": _clean(s.checks), "pass": s.passed}
        if include_timing:
            entry["wall_time_s"] = s.wall_time_s
        suites.append(entry)
    return {"config": _clean(report.config), "version": report.version,
            "suites": suites, "pass": report.passed}


def emit(report: RunReport, format: str = "json",
         include_timing: bool = False) -> bytes:
    """Serialize the report; json is byte-deterministic given (config, seed)."""
    if format == "json":
        parts: list[str] = []
        _emit_json(report_payload(report, include_timing), parts)
        return ("".join(parts) + "\n").encode()
    if format == "csv":
        def cells_of(theorem, record):
            cells = [str(theorem)]
            for key in ("lhs", "rhs", "deficit"):
                v = record.get(key, "")
                cells.append(format_float(v) if isinstance(v, float) else str(v))
            cells.append(str(bool(record.get("pass", ""))).lower())
            return ",".join(cells)

        lines = ["theorem,lhs,rhs,deficit,pass"]
        for s in report.suites:
            for c in s.checks:
                theorem = c.get("theorem", s.name)
                lines.append(cells_of(theorem, c))
                # sweep tables expand to one row per parameter for plotting
                for row in c.get("rows", ()):
                    tag = f"{theorem}[{row.get('parameter')}]"
                    lines.append(cells_of(tag, dict(row, **{"pass": c.get("pass", "")})))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {format!r}")


def format_float(v: float) -> str:
    return format(v, ".12g")

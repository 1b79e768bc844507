"""Check results and machine-readable reports.

A ``Check`` is one verified identity: name, reference anchor, pass flag,
and on failure a witness (enough data to reproduce standalone).  A
``Report`` is an ordered collection with deterministic JSON serialization;
wall times live in a separate field so byte-comparison modulo timing is a
simple key drop.
"""

from __future__ import annotations

import json
import platform
import sys
import time
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    witness: Any = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        d = {"name": self.name, "anchor": self.anchor, "passed": self.passed}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


class Suite:
    def __init__(self, name: str):
        self.name = name
        self.checks: list[Check] = []

    def add(self, name: str, anchor: str, passed: bool, witness: Any = None,
            wall_time: float = 0.0) -> Check:
        c = Check(name, anchor, bool(passed), witness, wall_time)
        self.checks.append(c)
        return c

    def run(self, name: str, anchor: str, fn) -> Check:
        t0 = time.perf_counter()
        try:
            res = fn()
            passed, witness = (res if isinstance(res, tuple) else (res, None))
        except Exception as exc:            # a crash is a failed check
            passed, witness = False, {"error": repr(exc)}
        return self.add(name, anchor, passed, witness,
                        wall_time=time.perf_counter() - t0)

    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class Report:
    SCHEMA_VERSION = 1

    def __init__(self, config_echo: dict | None = None):
        self.suites: list[Suite] = []
        self.config_echo = config_echo or {}

    def suite(self, name: str) -> Suite:
        s = Suite(name)
        self.suites.append(s)
        return s

    def passed(self) -> bool:
        return all(s.passed() for s in self.suites)

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {
            "schema_version": self.SCHEMA_VERSION,
            "passed": self.passed(),
            "config": self.config_echo,
            "environment": {
                "python": sys.version.split()[0],
                "platform": platform.platform(),
            },
            "suites": [
                {"name": s.name,
                 "passed": s.passed(),
                 "checks": [c.to_dict() for c in s.checks]}
                for s in self.suites
            ],
        }
        if include_timing:
            d["timing"] = {
                s.name: [{"name": c.name, "wall_time": c.wall_time}
                         for c in s.checks]
                for s in self.suites
            }
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing=include_timing),
                          indent=2, sort_keys=True)


def strip_timing(report_json: str) -> str:
    """Drop the timing and environment fields for byte-comparison."""
    d = json.loads(report_json)
    d.pop("timing", None)
    d.pop("environment", None)
    return json.dumps(d, indent=2, sort_keys=True)

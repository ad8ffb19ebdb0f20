"""Verification reports: human summary plus newline-delimited JSON records."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

PASS, FAIL, INFO = "pass", "fail", "info"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass
class Record:
    check: str
    verdict: str
    witness: dict = field(default_factory=dict)
    lines: tuple = ()
    seconds: float | None = None

    def as_json(self, inputs: str) -> dict:
        out = {"check": self.check, "inputs": inputs, "verdict": self.verdict, "witness": self.witness}
        if self.seconds is not None:
            out["seconds"] = round(self.seconds, 6)
        return out


class Report:
    def __init__(self, command: str, inputs: str, timing: bool = False):
        self.command = command
        self.inputs = inputs
        self.timing = timing
        self.records: list[Record] = []
        self._t = time.perf_counter()

    def add(self, check: str, verdict, witness=None, lines=()) -> Record:
        if isinstance(verdict, bool):
            verdict = PASS if verdict else FAIL
        now = time.perf_counter()
        rec = Record(check, verdict, {k: str(v) for k, v in (witness or {}).items()}, tuple(lines))
        if self.timing:
            rec.seconds = now - self._t
        self._t = now
        self.records.append(rec)
        return rec

    @property
    def ok(self) -> bool:
        return all(r.verdict != FAIL for r in self.records)

    def counts(self):
        c = {PASS: 0, FAIL: 0, INFO: 0}
        for r in self.records:
            c[r.verdict] += 1
        return c

    def human(self) -> str:
        out = [f"charp {self.command}  input {self.inputs}"]
        for r in self.records:
            out.extend(r.lines)
            tag = {PASS: "PASS", FAIL: "FAIL", INFO: "INFO"}[r.verdict]
            extra = f"  ({r.seconds:.3f}s)" if r.seconds is not None else ""
            out.append(f"[{tag}] {r.check}{extra}")
        c = self.counts()
        out.append(f"summary: {c[PASS]} passed, {c[FAIL]} failed, {c[INFO]} informational")
        return "\n".join(out) + "\n"

    def ndjson(self) -> str:
        return "".join(json.dumps(r.as_json(self.inputs), sort_keys=True) + "\n" for r in self.records)

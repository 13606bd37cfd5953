"""Run reports: deterministic JSON, RFC 4180 CSV and a short text summary."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from typing import Any, Dict, List, Optional

import numpy as np

SCHEMA_ID = "aswtower-report/1"


def jsonable(x: Any) -> Any:
    """Convert results to JSON-ready values; rationals become 'a/b' strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialise {type(x).__name__}")


@dataclass
class RunReport:
    command: str
    argv: List[str]
    parameters: Dict[str, Any] = field(default_factory=dict)
    spec_digest: Optional[str] = None
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[Dict[str, Any]] = field(default_factory=list)
    figures: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    timestamp: Optional[str] = None

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def stamp(self) -> None:
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def to_dict(self, volatile: bool = True) -> Dict[str, Any]:
        """Serialisable form.  With ``volatile=False`` the timestamp and the
        wall-clock timings are left out so that output is reproducible byte for byte."""
        out = {
            "schema": SCHEMA_ID,
            "command": self.command,
            "argv": list(self.argv),
            "parameters": jsonable(self.parameters),
            "spec_digest": self.spec_digest,
            "results": jsonable(self.results),
            "checks": jsonable(self.checks),
            "passed": self.passed,
            "figures": list(self.figures),
        }
        if volatile:
            out["timestamp"] = self.timestamp
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out

    def to_json(self, volatile: bool = True) -> str:
        return json.dumps(self.to_dict(volatile), sort_keys=True, indent=2) + "\n"

    def to_csv(self, volatile: bool = True) -> str:
        """Flattened rows (section, key, value); nested keys are joined with dots."""
        buf = io.StringIO()
        w = csv.writer(buf)  # default dialect: quoted as needed, CRLF line ends
        w.writerow(["section", "key", "value"])
        d = self.to_dict(volatile)
        for section in ("command", "spec_digest", "passed", "timestamp"):
            if section in d:
                w.writerow(["meta", section, _scalar(d[section])])
        w.writerow(["meta", "argv", " ".join(d["argv"])])
        for section in ("parameters", "results", "timings"):
            for key, value in _flatten(d.get(section, {})):
                w.writerow([section, key, value])
        for c in d["checks"]:
            w.writerow(["checks", c["name"], ("PASS" if c["passed"] else "FAIL") + (f": {c['detail']}" if c["detail"] else "")])
        for path in d["figures"]:
            w.writerow(["figures", "path", path])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for key, value in self.results.items():
            if isinstance(value, (dict, list)) and len(str(jsonable(value))) > 100:
                continue
            lines.append(f"  {key} = {jsonable(value)}")
        failed = [c for c in self.checks if not c["passed"]]
        lines.append(f"  checks: {len(self.checks) - len(failed)}/{len(self.checks)} passed")
        for c in failed[:20]:
            lines.append(f"    FAIL {c['name']}: {c['detail']}")
        for path in self.figures:
            lines.append(f"  figure: {path}")
        return "\n".join(lines) + "\n"


def _scalar(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return "" if v is None else str(v)


def _flatten(obj: Any, prefix: str = ""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    elif isinstance(obj, list):
        yield prefix, " ".join(_scalar(v) for v in obj)
    else:
        yield prefix, _scalar(obj)


def load_schema() -> Dict[str, Any]:
    return json.loads(resources.files("aswtower").joinpath("data/report.schema.json").read_text())

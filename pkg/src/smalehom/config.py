"""Run configuration: search caps and output format."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import InputError


@dataclass(frozen=True)
class Config:
    recoding_cap: int = 8
    L_cap: int = 4
    M_cap: int = 4
    period_cap: int = 6
    level_window: int = 2
    output: str = "json"

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "output":
                if v not in ("json", "text"):
                    raise InputError("config: output must be 'json' or 'text'")
            elif not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise InputError(f"config: {f.name} must be a positive integer")

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        p = Path(path)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"{p}: cannot read config ({exc.strerror})") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise InputError(f"{p}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"{p}: unknown config key {unknown[0]!r}")
        return cls(**data)

    def replace(self, **changes) -> "Config":
        d = asdict(self)
        d.update({k: v for k, v in changes.items() if v is not None})
        return Config(**d)

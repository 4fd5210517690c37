"""Service configuration: bind address, data locations, CORS, auth."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError


@dataclass(frozen=True)
class ApiConfig:
    data_dir: str
    model_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: list[str] = field(default_factory=list)
    auth_token: str | None = None  # static bearer; None disables auth
    poll_seconds: int = 30  # advertised to clients via /health

    def __post_init__(self) -> None:
        if not self.data_dir:
            raise ConfigError("data_dir is required")
        if not (0 < self.port < 65536):
            raise ConfigError(f"port out of range: {self.port}")
        if self.poll_seconds < 1:
            raise ConfigError("poll_seconds must be >= 1")

    def to_dict(self) -> dict:
        return {
            "data_dir": self.data_dir,
            "model_path": self.model_path,
            "host": self.host,
            "port": self.port,
            "cors_origins": list(self.cors_origins),
            "auth_token": self.auth_token,
            "poll_seconds": self.poll_seconds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ApiConfig":
        known = {
            "data_dir", "model_path", "host", "port",
            "cors_origins", "auth_token", "poll_seconds",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "data_dir" not in d:
            raise ConfigError("config must set data_dir")
        defaults = {
            "model_path": None, "host": "127.0.0.1", "port": 8000,
            "cors_origins": [], "auth_token": None, "poll_seconds": 30,
        }
        merged = {**defaults, **d}
        return cls(
            data_dir=str(merged["data_dir"]),
            model_path=None if merged["model_path"] is None else str(merged["model_path"]),
            host=str(merged["host"]),
            port=int(merged["port"]),
            cors_origins=[str(o) for o in merged["cors_origins"]],
            auth_token=None if merged["auth_token"] is None else str(merged["auth_token"]),
            poll_seconds=int(merged["poll_seconds"]),
        )


def load_api_config(path: str | Path) -> ApiConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {p}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return ApiConfig.from_dict(raw)

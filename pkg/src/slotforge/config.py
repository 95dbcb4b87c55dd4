"""Service/CLI settings loaded from a JSON file and environment variables.

SLOTFORGE_CONFIG points at the config file; SLOTFORGE_PORT overrides the
port. Everything has a sensible default so `slotforge serve` works out of
the box against the bundled sample database.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .dialog import DialogConfig
from .estimators import EstimatorModel
from .model import EstimatorConfig
from .nlu import NluConfig

CONFIG_ENV = "SLOTFORGE_CONFIG"
PORT_ENV = "SLOTFORGE_PORT"

DEFAULT_PORT = 8080
DEFAULT_SESSION_TTL = 30 * 60.0


def bundled_movies_path() -> Path:
    """Filesystem path of the packaged 200-movie sample database."""
    return Path(str(resources.files("slotforge.data") / "movies_sample.jsonl"))


@dataclass
class ProviderSettings:
    mode: str = "builtin"  # "builtin" | "remote"
    url: Optional[str] = None
    timeout: float = 5.0

    def __post_init__(self) -> None:
        if self.mode not in ("builtin", "remote"):
            raise ValueError("provider mode must be 'builtin' or 'remote'")
        if self.mode == "remote" and not self.url:
            raise ValueError("remote provider needs a url")


@dataclass
class ServiceSettings:
    movies_path: Optional[str] = None  # None -> bundled sample
    history_dir: Optional[str] = None  # None -> in-memory only
    lexicon_paths: dict = field(default_factory=dict)  # type key -> JSON file
    provider: ProviderSettings = field(default_factory=ProviderSettings)
    dialog: DialogConfig = field(default_factory=DialogConfig)
    session_ttl_seconds: float = DEFAULT_SESSION_TTL
    port: int = DEFAULT_PORT
    ui_dir: Optional[str] = None

    def resolve_movies_path(self) -> Path:
        return Path(self.movies_path) if self.movies_path else bundled_movies_path()

    def resolve_lexicons(self):
        """Bundled lexicons, with per-type overrides from lexicon_paths."""
        from .lexicons import default_lexicons, load_lexicon_file
        from .model import EntityType

        lexicons = default_lexicons()
        for key, path in self.lexicon_paths.items():
            lexicons[EntityType.from_key(key)] = load_lexicon_file(path)
        return lexicons


def _dialog_from_json(data: dict) -> DialogConfig:
    est = EstimatorConfig(**data.get("estimator", {}))
    nlu_data = data.get("nlu", {})
    nlu = NluConfig(
        asked_bias=nlu_data.get("asked_bias", NluConfig.asked_bias),
        threshold=nlu_data.get("threshold", NluConfig.threshold),
        negations=tuple(nlu_data.get("negations", NluConfig.negations)),
    )
    kwargs = {
        k: v
        for k, v in data.items()
        if k
        in (
            "sufficiency_threshold",
            "min_questions",
            "reask_limit",
            "result_limit",
            "adaptive_score_bias",
            "use_global_history",
            "cache_max_age_seconds",
        )
    }
    if "model" in data:
        kwargs["model"] = EstimatorModel(data["model"])
    return DialogConfig(estimator=est, nlu=nlu, **kwargs)


def load_settings(path: Optional[str] = None) -> ServiceSettings:
    """Settings from an explicit path, $SLOTFORGE_CONFIG, or defaults."""
    cfg_path = path or os.environ.get(CONFIG_ENV)
    settings = ServiceSettings()
    if cfg_path:
        with open(cfg_path, encoding="utf-8") as fh:
            data = json.load(fh)
        settings = ServiceSettings(
            movies_path=data.get("movies_path"),
            history_dir=data.get("history_dir"),
            lexicon_paths=dict(data.get("lexicon_paths", {})),
            provider=ProviderSettings(**data.get("provider", {})),
            dialog=_dialog_from_json(data.get("dialog", {})),
            session_ttl_seconds=float(data.get("session_ttl_seconds", DEFAULT_SESSION_TTL)),
            port=int(data.get("port", DEFAULT_PORT)),
            ui_dir=data.get("ui_dir"),
        )
    env_port = os.environ.get(PORT_ENV)
    if env_port:
        settings.port = int(env_port)
    return settings

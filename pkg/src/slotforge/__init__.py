"""Adaptive slot-filling conversation engine for movie search."""

from .dialog import BotDeps, BotTurn, DialogConfig, DialogSession, TurnKind
from .estimators import EstimatorModel, SkipEstimate, estimate_skip
from .history import HistoryStore
from .lexicons import default_lexicons
from .model import (
    ENTITY_TYPES,
    ConversationRecord,
    ConversationState,
    EntityType,
    EstimatorConfig,
    Intent,
    ScoredValue,
    finalize_conversation,
    new_conversation,
)
from .moviedb import MovieDoc, MovieStore, Query, build_query, execute, ingest
from .nlu import NluConfig, ParsedUtterance, ProviderError, understand
from .phonetics import double_metaphone, metaphone_word, person_key
from .providers import BuiltinProvider, RemoteProvider

__version__ = "0.1.0"

__all__ = [
    "BotDeps",
    "BotTurn",
    "BuiltinProvider",
    "ConversationRecord",
    "ConversationState",
    "DialogConfig",
    "DialogSession",
    "ENTITY_TYPES",
    "EntityType",
    "EstimatorConfig",
    "EstimatorModel",
    "HistoryStore",
    "Intent",
    "MovieDoc",
    "MovieStore",
    "NluConfig",
    "ParsedUtterance",
    "ProviderError",
    "Query",
    "RemoteProvider",
    "ScoredValue",
    "SkipEstimate",
    "TurnKind",
    "build_query",
    "default_lexicons",
    "double_metaphone",
    "estimate_skip",
    "execute",
    "finalize_conversation",
    "ingest",
    "metaphone_word",
    "new_conversation",
    "person_key",
    "understand",
]

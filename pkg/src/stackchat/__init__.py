"""Conversational dialog engine built on stacked finite-state machines.

The package couples a semantic-grammar NLU front end with a stack of
declarative FSMs, a two-tier response selection/ranking pipeline over
retrieval responders, and offline conversation-quality analytics.
"""

__version__ = "0.1.0"

__all__ = ["Engine", "EngineConfig", "default_config", "load_config", "__version__"]


def __getattr__(name):
    # Lazy re-exports keep `import stackchat` light for grammar-only users.
    if name == "Engine":
        from .session import Engine

        return Engine
    if name in ("EngineConfig", "default_config", "load_config"):
        from . import config

        return getattr(config, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

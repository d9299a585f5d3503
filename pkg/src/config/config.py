"""
Configuration management for the octahedral systems toolkit.
Handles environment variables, search budgets and enumeration limits.
"""
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class SearchBudget:
    """Node and wall-clock caps for minimum-edge searches"""
    max_nodes: int = 50_000_000
    max_seconds: float = 900.0
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def with_overrides(
        self,
        max_nodes: Optional[int] = None,
        max_seconds: Optional[float] = None,
        workers: Optional[int] = None,
    ) -> "SearchBudget":
        """Return a copy with the given fields replaced (None keeps the current value)"""
        return replace(
            self,
            max_nodes=self.max_nodes if max_nodes is None else max_nodes,
            max_seconds=self.max_seconds if max_seconds is None else max_seconds,
            workers=self.workers if workers is None else workers,
        )


@dataclass(frozen=True)
class EnumerationLimits:
    """Size caps for exhaustive enumerations"""
    max_span_dimension: int = 26
    max_pair_selections: int = 2_000_000
    max_brute_force_edges: int = 25
    exact_count_max_dimension: int = 4096
    max_edge_bits: int = 1 << 20


@dataclass(frozen=True)
class GeometryLimits:
    """Sampling settings for random colourful configurations"""
    sampling_attempts: int = 10_000
    grid_bound: int = 50
    denominator_bound: int = 7
    mu_local_moves: int = 20


@dataclass(frozen=True)
class ServiceSettings:
    """HTTP service settings"""
    result_cache_ttl: int = 4 * 3600
    result_cache_max_size: int = 256
    result_cache_enabled: bool = True
    queue_timeout_seconds: float = 5.0


class OctaConfig:
    """Central configuration for the toolkit"""

    def __init__(self):
        self.budget = SearchBudget(
            max_nodes=_env_int("OCTA_BUDGET_NODES", SearchBudget.max_nodes),
            max_seconds=_env_float("OCTA_BUDGET_SECS", SearchBudget.max_seconds),
            workers=_env_int("OCTA_WORKERS", os.cpu_count() or 1),
        )
        self.limits = EnumerationLimits(
            max_span_dimension=_env_int("OCTA_MAX_ENUM_DIMENSION", EnumerationLimits.max_span_dimension),
            max_pair_selections=_env_int("OCTA_MAX_PAIR_SELECTIONS", EnumerationLimits.max_pair_selections),
            max_brute_force_edges=_env_int("OCTA_MAX_BRUTE_FORCE_EDGES", EnumerationLimits.max_brute_force_edges),
            exact_count_max_dimension=_env_int(
                "OCTA_EXACT_COUNT_MAX_DIMENSION", EnumerationLimits.exact_count_max_dimension
            ),
            max_edge_bits=_env_int("OCTA_MAX_EDGE_BITS", EnumerationLimits.max_edge_bits),
        )
        self.geometry = GeometryLimits(
            sampling_attempts=_env_int("OCTA_SAMPLING_ATTEMPTS", GeometryLimits.sampling_attempts),
            grid_bound=_env_int("OCTA_GRID_BOUND", GeometryLimits.grid_bound),
            denominator_bound=_env_int("OCTA_DENOMINATOR_BOUND", GeometryLimits.denominator_bound),
            mu_local_moves=_env_int("OCTA_MU_LOCAL_MOVES", GeometryLimits.mu_local_moves),
        )
        self.service = ServiceSettings(
            result_cache_ttl=_env_int("RESULT_CACHE_TTL", ServiceSettings.result_cache_ttl),
            result_cache_enabled=os.getenv("RESULT_CACHE_ENABLED", "true").lower() == "true",
            queue_timeout_seconds=_env_float("QUEUE_TIMEOUT_SECONDS", ServiceSettings.queue_timeout_seconds),
        )
        self.log_level = os.getenv("OCTA_LOG_LEVEL", "WARNING").upper()
        self.log_json = os.getenv("OCTA_LOG_JSON", "false").lower() == "true"
        self.validate()

    def validate(self):
        """Reject non-positive budgets and limits"""
        checks = {
            "OCTA_BUDGET_NODES": self.budget.max_nodes,
            "OCTA_BUDGET_SECS": self.budget.max_seconds,
            "OCTA_WORKERS": self.budget.workers,
            "OCTA_MAX_ENUM_DIMENSION": self.limits.max_span_dimension,
            "OCTA_MAX_PAIR_SELECTIONS": self.limits.max_pair_selections,
            "OCTA_MAX_BRUTE_FORCE_EDGES": self.limits.max_brute_force_edges,
            "OCTA_SAMPLING_ATTEMPTS": self.geometry.sampling_attempts,
            "OCTA_GRID_BOUND": self.geometry.grid_bound,
            "OCTA_DENOMINATOR_BOUND": self.geometry.denominator_bound,
        }
        invalid = [name for name, value in checks.items() if value <= 0]
        if invalid:
            raise ValueError(f"Non-positive configuration values: {', '.join(invalid)}")

    def get_all_configs(self) -> Dict[str, Dict[str, Any]]:
        """Get all settings as plain dictionaries"""
        return {
            "budget": {
                "max_nodes": self.budget.max_nodes,
                "max_seconds": self.budget.max_seconds,
                "workers": self.budget.workers,
            },
            "limits": {
                "max_span_dimension": self.limits.max_span_dimension,
                "max_pair_selections": self.limits.max_pair_selections,
                "max_brute_force_edges": self.limits.max_brute_force_edges,
                "exact_count_max_dimension": self.limits.exact_count_max_dimension,
                "max_edge_bits": self.limits.max_edge_bits,
            },
            "geometry": {
                "sampling_attempts": self.geometry.sampling_attempts,
                "grid_bound": self.geometry.grid_bound,
                "denominator_bound": self.geometry.denominator_bound,
                "mu_local_moves": self.geometry.mu_local_moves,
            },
            "service": {
                "result_cache_ttl": self.service.result_cache_ttl,
                "result_cache_enabled": self.service.result_cache_enabled,
                "queue_timeout_seconds": self.service.queue_timeout_seconds,
            },
        }


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}")


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {value!r}")


# Global configuration instance
config = OctaConfig()

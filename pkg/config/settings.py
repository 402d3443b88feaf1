"""Experiment settings with environment-based configuration."""

from enum import Enum
from functools import lru_cache
from typing import List

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings


class Environment(str, Enum):
    """Environment types."""
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class Settings(BaseSettings):
    """Default knobs for graphlim runs; every field can be set as GRAPHLIM_<FIELD>."""

    # Environment
    ENVIRONMENT: str = "development"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "json"

    # Reproducibility
    SEED: int = 0
    THREADS: int = 1

    # Canonical forms
    CANONICAL_VERTEX_LIMIT: int = 64
    COMPONENT_VERTEX_LIMIT: int = 512

    # Metrics
    EXACT_LIMIT: int = 10
    MULTIPLE_CAP: int = 3
    HEURISTIC_RESTARTS: int = 8
    LOCAL_SEARCH_SWEEPS: int = 50

    # Profiles and limits
    MAX_PROFILE_PAIRS: int = 200
    TOLERANCE: float = 1e-3
    SUBADDITIVE_FLOOR: float = -1e6

    # Spectral
    DENSE_SOLVE_LIMIT: int = 4000
    EIGENVALUE_DECIMALS: int = 9
    QUERY_GRID_POINTS: int = 1000
    INERTIA_SHIFT: float = 1e-9

    # Generation
    REJECTION_CAP: int = 1000
    MAX_DERIVED_SEEDS: int = 16

    # Reports
    OUTPUT_DIR: str = "reports"
    REPORT_FORMATS: List[str] = ["json", "csv"]

    model_config = {
        "env_prefix": "GRAPHLIM_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": True,
        "extra": "ignore"
    }

    @field_validator("ENVIRONMENT")
    @classmethod
    def validate_environment(cls, v: str) -> str:
        """Validate environment value."""
        if v.lower() not in [e.value for e in Environment]:
            raise ValueError("ENVIRONMENT must be one of: development, testing, production")
        return v.lower()

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"LOG_LEVEL must be one of: {', '.join(valid_levels)}")
        return v.upper()

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in ("json", "console"):
            raise ValueError("LOG_FORMAT must be one of: json, console")
        return v.lower()

    @field_validator("THREADS", "MULTIPLE_CAP", "CANONICAL_VERTEX_LIMIT", "COMPONENT_VERTEX_LIMIT",
                     "MAX_PROFILE_PAIRS", "DENSE_SOLVE_LIMIT", "REJECTION_CAP", "MAX_DERIVED_SEEDS")
    @classmethod
    def validate_positive(cls, v: int, info) -> int:
        """Counts and limits are at least 1."""
        if v < 1:
            raise ValueError(f"{info.field_name} must be at least 1")
        return v

    @field_validator("HEURISTIC_RESTARTS", "LOCAL_SEARCH_SWEEPS")
    @classmethod
    def validate_non_negative(cls, v: int, info) -> int:
        if v < 0:
            raise ValueError(f"{info.field_name} must be non-negative")
        return v

    @field_validator("EXACT_LIMIT")
    @classmethod
    def validate_exact_limit(cls, v: int) -> int:
        """Exact permutation search is factorial in the vertex count."""
        if v < 1 or v > 12:
            raise ValueError("EXACT_LIMIT must be between 1 and 12")
        return v

    @field_validator("TOLERANCE", "INERTIA_SHIFT")
    @classmethod
    def validate_small_positive(cls, v: float, info) -> float:
        if not 0 < v < 1:
            raise ValueError(f"{info.field_name} must be in (0, 1)")
        return v

    @field_validator("SUBADDITIVE_FLOOR")
    @classmethod
    def validate_floor(cls, v: float) -> float:
        if v >= 0:
            raise ValueError("SUBADDITIVE_FLOOR must be negative")
        return v

    @field_validator("EIGENVALUE_DECIMALS")
    @classmethod
    def validate_decimals(cls, v: int) -> int:
        if v < 1 or v > 15:
            raise ValueError("EIGENVALUE_DECIMALS must be between 1 and 15")
        return v

    @field_validator("QUERY_GRID_POINTS")
    @classmethod
    def validate_grid_points(cls, v: int) -> int:
        if v < 2:
            raise ValueError("QUERY_GRID_POINTS must be at least 2")
        return v

    @field_validator("REPORT_FORMATS", mode="before")
    @classmethod
    def validate_report_formats(cls, v):
        """Parse and validate report formats."""
        if isinstance(v, str):
            if v.startswith("[") and v.endswith("]"):
                import json
                v = json.loads(v)
            else:
                v = [fmt.strip() for fmt in v.split(",") if fmt.strip()]
        unknown = [fmt for fmt in v if fmt not in ("json", "csv")]
        if unknown:
            raise ValueError(f"REPORT_FORMATS entries must be json or csv, got {', '.join(unknown)}")
        return v

    @model_validator(mode="after")
    def validate_limits(self):
        """Cross-field checks."""
        if self.COMPONENT_VERTEX_LIMIT < self.CANONICAL_VERTEX_LIMIT:
            raise ValueError("COMPONENT_VERTEX_LIMIT must be at least CANONICAL_VERTEX_LIMIT")
        if self.ENVIRONMENT == "production" and self.LOG_LEVEL == "DEBUG":
            raise ValueError("LOG_LEVEL cannot be DEBUG in production")
        return self

    def get_canonical_config(self) -> dict:
        """Get canonical form configuration."""
        return {
            "canonical_limit": self.CANONICAL_VERTEX_LIMIT,
            "component_limit": self.COMPONENT_VERTEX_LIMIT,
        }

    def get_metric_config(self) -> dict:
        """Get distance computation configuration."""
        return {
            "exact_limit": self.EXACT_LIMIT,
            "multiple_cap": self.MULTIPLE_CAP,
            "restarts": self.HEURISTIC_RESTARTS,
            "sweeps": self.LOCAL_SEARCH_SWEEPS,
            "max_pairs": self.MAX_PROFILE_PAIRS,
            "tolerance": self.TOLERANCE,
            "floor": self.SUBADDITIVE_FLOOR,
        }

    def get_spectral_config(self) -> dict:
        """Get spectral configuration."""
        return {
            "dense_limit": self.DENSE_SOLVE_LIMIT,
            "eigenvalue_decimals": self.EIGENVALUE_DECIMALS,
            "query_grid_points": self.QUERY_GRID_POINTS,
            "inertia_shift": self.INERTIA_SHIFT,
        }

    def get_generation_config(self) -> dict:
        """Get graph generation configuration."""
        return {
            "seed": self.SEED,
            "rejection_cap": self.REJECTION_CAP,
            "max_derived_seeds": self.MAX_DERIVED_SEEDS,
        }

    def get_report_config(self) -> dict:
        return {
            "output_dir": self.OUTPUT_DIR,
            "formats": list(self.REPORT_FORMATS),
        }

    def experiment_defaults(self) -> dict:
        """Settings mapped onto ExperimentConfig field names."""
        return {
            "seed": self.SEED,
            "threads": self.THREADS,
            "canonical_limit": self.CANONICAL_VERTEX_LIMIT,
            "component_limit": self.COMPONENT_VERTEX_LIMIT,
            "exact_limit": self.EXACT_LIMIT,
            "multiple_cap": self.MULTIPLE_CAP,
            "restarts": self.HEURISTIC_RESTARTS,
            "sweeps": self.LOCAL_SEARCH_SWEEPS,
            "max_pairs": self.MAX_PROFILE_PAIRS,
            "tolerance": self.TOLERANCE,
            "floor": self.SUBADDITIVE_FLOOR,
            "dense_limit": self.DENSE_SOLVE_LIMIT,
            "eigenvalue_decimals": self.EIGENVALUE_DECIMALS,
            "query_grid_points": self.QUERY_GRID_POINTS,
            "inertia_shift": self.INERTIA_SHIFT,
            "rejection_cap": self.REJECTION_CAP,
            "max_derived_seeds": self.MAX_DERIVED_SEEDS,
            "output_dir": self.OUTPUT_DIR,
            "formats": list(self.REPORT_FORMATS),
        }

    def is_development(self) -> bool:
        return self.ENVIRONMENT == "development"

    def is_testing(self) -> bool:
        return self.ENVIRONMENT == "testing"

    def is_production(self) -> bool:
        return self.ENVIRONMENT == "production"


@lru_cache()
def get_settings() -> Settings:
    """Get the cached settings instance."""
    return Settings()


def validate_settings() -> dict:
    """
    Validate settings and return results.

    Returns:
        Dictionary with validation results
    """
    from config.validation import check_reproducibility, get_config_summary

    try:
        settings = Settings()
    except Exception as e:
        return {
            "valid": False,
            "errors": [f"Failed to load settings: {str(e)}"],
            "warnings": [],
            "summary": {}
        }
    return {
        "valid": True,
        "errors": [],
        "warnings": check_reproducibility(settings),
        "summary": get_config_summary(settings),
    }

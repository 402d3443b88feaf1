"""Configuration validation utilities."""

import os
from typing import Any, Dict, List

ENV_PREFIX = "GRAPHLIM_"

# knobs whose values change report contents
REPRODUCIBILITY_VARS = [
    "SEED",
    "EXACT_LIMIT",
    "MULTIPLE_CAP",
    "HEURISTIC_RESTARTS",
    "LOCAL_SEARCH_SWEEPS",
    "EIGENVALUE_DECIMALS",
]


def validate_environment_file(env_file_path: str = ".env") -> Dict[str, Any]:
    """
    Inspect an environment file for graphlim variables.

    Args:
        env_file_path: Path to environment file

    Returns:
        Dictionary of validation results
    """
    validation_results = {
        "file_exists": False,
        "graphlim_vars": [],
        "unknown_vars": [],
        "warnings": [],
        "errors": []
    }

    if not os.path.exists(env_file_path):
        validation_results["warnings"].append(f"Environment file {env_file_path} not found; using defaults")
        return validation_results

    validation_results["file_exists"] = True

    from config.settings import Settings

    known = set(Settings.model_fields)
    try:
        with open(env_file_path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        validation_results["errors"].append(f"Error reading environment file: {str(e)}")
        return validation_results

    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or "=" not in stripped:
            continue
        name = stripped.split("=", 1)[0].strip()
        if not name.startswith(ENV_PREFIX):
            continue
        field = name[len(ENV_PREFIX):]
        if field in known:
            validation_results["graphlim_vars"].append(name)
        else:
            validation_results["unknown_vars"].append(name)
            validation_results["warnings"].append(f"{name} is not a graphlim setting and is ignored")

    return validation_results


def get_config_summary(settings) -> Dict[str, Any]:
    """
    Get a summary of current configuration.

    Args:
        settings: Settings instance

    Returns:
        Configuration summary
    """
    return {
        "environment": settings.ENVIRONMENT,
        "log_level": settings.LOG_LEVEL,
        "log_format": settings.LOG_FORMAT,
        "seed": settings.SEED,
        "threads": settings.THREADS,
        "canonical": settings.get_canonical_config(),
        "metrics": settings.get_metric_config(),
        "spectral": settings.get_spectral_config(),
        "generation": settings.get_generation_config(),
        "reports": settings.get_report_config(),
    }


def check_reproducibility(settings) -> List[str]:
    """
    Warn about settings that make reports hard to reproduce or slow to compute.

    Args:
        settings: Settings instance

    Returns:
        List of warnings
    """
    warnings = []

    overridden = [name for name in REPRODUCIBILITY_VARS if f"{ENV_PREFIX}{name}" in os.environ]
    if overridden:
        warnings.append(
            "Result-affecting settings come from the environment: "
            + ", ".join(f"{ENV_PREFIX}{name}" for name in overridden)
        )

    if settings.EXACT_LIMIT > 10:
        warnings.append(f"EXACT_LIMIT={settings.EXACT_LIMIT} makes exact permutation search very slow")

    if settings.THREADS > (os.cpu_count() or 1):
        warnings.append(f"THREADS={settings.THREADS} exceeds the available CPU count")

    if "json" not in settings.REPORT_FORMATS:
        warnings.append("JSON reports are disabled; runs will not record their configuration")

    if settings.is_production() and settings.LOG_FORMAT == "console":
        warnings.append("Console log format in production; JSON is easier to collect")

    return warnings

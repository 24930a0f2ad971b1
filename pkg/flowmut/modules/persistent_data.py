"""
Configuration loading, source hashing and previous-report access.

Precedence: settings_defaults.json < flowmut.json < FLOWMUT_* environment < command-line flags.
"""
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import PositiveInt, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from modules import logger
from modules.analysis import REPORT_JSON, report_dir
from modules.errors import ConfigError, StaleReportError
from modules.models import MutationReport, RunConfig

DEFAULTS_PATH = Path(__file__).with_name("settings_defaults.json")
CONFIG_FILENAME = "flowmut.json"

# Accepted spellings that map onto a canonical key
_KEY_ALIASES = {"test-only": "tests"}
_PATH_LIST_KEYS = ("sources", "tests")


class EnvironmentSettings(BaseSettings):
    """FLOWMUT_* environment overrides (a .env file is loaded by the launcher)"""
    model_config = SettingsConfigDict(env_prefix="FLOWMUT_", extra="ignore")

    workers: Optional[PositiveInt] = None
    out_dir: Optional[Path] = None
    short_circuit: Optional[bool] = None
    log_dir: Optional[Path] = None

    def overrides(self) -> Dict[str, Any]:
        values = {"workers": self.workers, "out-dir": self.out_dir, "short-circuit": self.short_circuit}
        return {k: v for k, v in values.items() if v is not None}


def load_defaults() -> Dict[str, Any]:
    with open(DEFAULTS_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def normalize_keys(data: Dict[str, Any]) -> Dict[str, Any]:
    """Map snake_case and legacy spellings onto the hyphenated keys of flowmut.json"""
    normalized = {}
    for key, value in data.items():
        canonical = key.replace("_", "-")
        canonical = _KEY_ALIASES.get(canonical, canonical)
        if canonical in normalized:
            raise ConfigError(f"configuration key '{canonical}' given twice (as '{key}')")
        normalized[canonical] = value
    return normalized


def _resolve_paths(data: Dict[str, Any], base: Path) -> Dict[str, Any]:
    resolved = dict(data)
    for key in _PATH_LIST_KEYS:
        if key in resolved:
            resolved[key] = [str((base / p).resolve()) if not Path(p).is_absolute() else p
                             for p in resolved[key]]
    if "out-dir" in resolved and not Path(resolved["out-dir"]).is_absolute():
        resolved["out-dir"] = str((base / resolved["out-dir"]).resolve())
    return resolved


def load_run_config(path: Path, overrides: Optional[Dict[str, Any]] = None,
                    environment: Optional[EnvironmentSettings] = None) -> RunConfig:
    """Merge defaults, the config file, the environment and explicit overrides into a RunConfig"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    try:
        file_data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(file_data, dict):
        raise ConfigError(f"{path}: expected a JSON object")

    merged = {**load_defaults(), **_resolve_paths(normalize_keys(file_data), path.parent)}

    if environment is None:
        try:
            environment = EnvironmentSettings()
        except ValidationError as exc:
            raise ConfigError(f"invalid FLOWMUT_* environment setting: {exc}") from exc
    env = environment
    cwd = Path.cwd()
    merged.update(_resolve_paths(normalize_keys(env.overrides()), cwd))
    if overrides:
        flags = {k: v for k, v in normalize_keys(overrides).items() if v is not None}
        merged.update(_resolve_paths(flags, cwd))

    try:
        config = RunConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    for source in config.sources:
        if not Path(source).is_file():
            raise ConfigError(f"source file not found: {source}")
    logger.info(f"Loaded configuration from {path}: {len(config.sources)} source(s), "
                f"{len(config.operators)} operator(s), {len(config.reduction_rules)} reduction rule(s)")
    return config


def compute_source_hash(config: RunConfig) -> str:
    """Content hash over every source file plus the operator and reduction-rule selection"""
    digest = hashlib.sha256()
    for source in config.sources:
        digest.update(Path(source).read_bytes())
        digest.update(b"\0")
    settings = {
        "operators": sorted(op.value for op in config.operators),
        "reduction-rules": sorted(rule.value for rule in config.reduction_rules),
    }
    digest.update(json.dumps(settings, sort_keys=True).encode("utf-8"))
    return digest.hexdigest()


def previous_report_path(out_dir: Path, program: str) -> Path:
    return report_dir(out_dir, program) / REPORT_JSON


def load_report(path: Path) -> MutationReport:
    path = Path(path)
    if not path.is_file():
        raise StaleReportError(f"no previous report at {path}; run 'flowmut run' first")
    try:
        return MutationReport.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise StaleReportError(f"{path} is not a readable report: {exc}") from exc


def load_previous_reports(config: RunConfig, source_hash: str) -> Dict[str, MutationReport]:
    """Reports of the last run, matched against the current source hash before any source is parsed"""
    names = list(config.programs) or sorted(
        path.parent.name for path in Path(config.out_dir).glob(f"*/{REPORT_JSON}"))
    if not names:
        raise StaleReportError(f"no previous report in {config.out_dir}; run 'flowmut run' first")
    reports = {name: load_report(previous_report_path(config.out_dir, name)) for name in names}
    for name, report in reports.items():
        if report.source_hash != source_hash:
            raise StaleReportError(f"report for '{name}' was produced from different sources or settings; "
                                   f"run 'flowmut run' again")
    logger.debug(f"Loaded previous reports for {', '.join(reports)}")
    return reports

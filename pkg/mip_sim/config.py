import ast
import logging
import os
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    field_validator,
)

from .errors import ConfigError
from .network import NetworkConfig
from .params import AgentParams, EnergyParams
from .planners import PlannerName

logger = logging.getLogger("MipSim.Config")

DEFAULT_SOURCE_COUNTS = list(range(10, 81, 5))
DEFAULT_AGGREGATION_RATIOS = [round(0.1 * i, 1) for i in range(1, 10)]
DEFAULT_SEED_COUNT = 30


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", name, raw)
        return default


def _environment_settings() -> Dict[str, Any]:
    # Process settings; experiment parameters live in the config file
    return {
        "log_level": os.getenv("MIP_LOG_LEVEL", "INFO"),
        "log_dir": os.getenv("MIP_LOG_DIR"),
        "workers": _int_env("MIP_WORKERS", 1),
        "max_deploy_attempts": _int_env("MIP_MAX_DEPLOY_ATTEMPTS", 20),
    }


CONFIG = _environment_settings()


class Config:
    """Process-level settings read from the environment"""

    def __init__(self):
        self.config = CONFIG.copy()

    def reload(self) -> None:
        """Re-read the environment (after load_dotenv, for instance)"""
        self.config = _environment_settings()

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        self.config[key] = value

    def validate_config(self) -> Dict[str, Any]:
        """Validate settings and return any issues"""
        issues = []
        warnings = []

        if self.get("workers", 1) < 1:
            issues.append("workers must be at least 1")
        if self.get("max_deploy_attempts", 1) < 1:
            issues.append("max_deploy_attempts must be at least 1")
        if self.get("workers", 1) > (os.cpu_count() or 1):
            warnings.append("workers exceeds the CPU count")
        if not hasattr(logging, str(self.get("log_level", "INFO")).upper()):
            issues.append(f"unknown log level: {self.get('log_level')}")

        return {"valid": not issues, "issues": issues, "warnings": warnings}


# Global configuration instance
config = Config()


class ExperimentConfig(BaseModel):
    """One reproduction run: network, agent and radio models plus the sweeps"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    network: NetworkConfig = Field(default_factory=NetworkConfig)
    agent: AgentParams = Field(default_factory=AgentParams)
    energy: EnergyParams = Field(default_factory=EnergyParams)
    planners: List[PlannerName] = Field(
        default_factory=lambda: [PlannerName.CMIP, PlannerName.CLMIP, PlannerName.GIGM]
    )
    # scenario A sweep; runs at agent.aggregation_ratio
    source_counts: List[PositiveInt] = Field(default_factory=lambda: list(DEFAULT_SOURCE_COUNTS))
    # scenario B sweep; runs at aggregation_source_count sources
    aggregation_ratios: List[float] = Field(default_factory=lambda: list(DEFAULT_AGGREGATION_RATIOS))
    aggregation_source_count: PositiveInt = 80
    K: Union[PositiveInt, Literal["auto"]] = "auto"
    ma_dpt: Union[PositiveFloat, Literal["auto"]] = "auto"
    # CMIP payload threshold; None shares ma_dpt
    cmip_ma_dpt: Optional[PositiveFloat] = None
    clmip_radius_m: Optional[PositiveFloat] = None
    seeds: List[NonNegativeInt] = Field(default_factory=lambda: list(range(DEFAULT_SEED_COUNT)))
    output_path: str = "results"
    workers: Optional[PositiveInt] = None
    max_deploy_attempts: Optional[PositiveInt] = None

    @field_validator("planners", "source_counts", "aggregation_ratios", "seeds", mode="before")
    @classmethod
    def _scalar_to_list(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return list(value)
        return [value]

    @field_validator("planners", "source_counts", "aggregation_ratios", "seeds")
    @classmethod
    def _non_empty_unique(cls, value: list) -> list:
        if not value:
            raise ValueError("must not be empty")
        if len(set(value)) != len(value):
            raise ValueError("must not contain duplicates")
        return value

    @field_validator("aggregation_ratios")
    @classmethod
    def _ratios_in_range(cls, value: List[float]) -> List[float]:
        for ratio in value:
            if not 0 < ratio <= 1:
                raise ValueError(f"aggregation ratio {ratio} outside (0, 1]")
        return value

    @property
    def partition_count(self) -> Optional[int]:
        return None if self.K == "auto" else int(self.K)

    @property
    def payload_threshold(self) -> Optional[float]:
        return None if self.ma_dpt == "auto" else float(self.ma_dpt)

    @property
    def worker_count(self) -> int:
        return self.workers or config.get("workers", 1)

    @property
    def deploy_attempts(self) -> int:
        return self.max_deploy_attempts or config.get("max_deploy_attempts", 20)


def _parse_value(raw: str) -> Any:
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        pass
    if "," in raw:
        return [part.strip() for part in raw.split(",") if part.strip()]
    return raw


def parse_config_text(text: str) -> Dict[str, Any]:
    """Parse `key = value` lines into a nested mapping"""
    data: Dict[str, Any] = {}
    seen: Dict[str, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=number)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if not key or not raw:
            raise ConfigError("empty key or value", line=number)
        if key in seen:
            raise ConfigError(f"duplicate key '{key}' (first set on line {seen[key]})", line=number)
        seen[key] = number

        parts = key.split(".")
        if len(parts) > 2 or not all(parts):
            raise ConfigError(f"malformed key '{key}'", line=number)
        value = _parse_value(raw)
        if len(parts) == 1:
            if isinstance(data.get(key), dict):
                raise ConfigError(f"'{key}' is a section", line=number)
            data[key] = value
        else:
            section = data.setdefault(parts[0], {})
            if not isinstance(section, dict):
                raise ConfigError(f"'{parts[0]}' is not a section", line=number)
            section[parts[1]] = value
    return data


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        logger.debug("Config validation failed: %s", e)
        field = ".".join(str(part) for part in first["loc"]) or None
        raise ConfigError(first["msg"], field=field) from e


def load_config(path: Union[str, os.PathLike]) -> ExperimentConfig:
    """Read an experiment file; missing keys take their defaults"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e
    experiment = build_config(parse_config_text(text))
    logger.debug("Loaded experiment config from %s", path)
    return experiment

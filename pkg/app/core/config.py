from typing import Optional
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    PROJECT_NAME: str = "CiteGrowth"
    VERSION: str = "1.0.0"

    # Корпус
    YEAR_MIN: int = 1900
    YEAR_MAX: int = 2100
    # Цитирование "из будущего" допустимо на один год (задержки публикации)
    PREPUB_TOLERANCE: int = 1

    # Степенной закон
    ALPHA_MAX: float = 20.0
    MIN_TAIL: int = 10
    HALF_WIDTH: int = 5
    DEFAULT_KMIN_RAW: int = 1

    # Генератор
    SYNTH_EPSILON_MAX: float = 0.05
    SYNTH_START_YEAR: int = 1975

    # Настройки логирования
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    # Вывод
    CSV_FLOAT_FORMAT: str = "%.12g"

    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_file=".env",
        extra="ignore",
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        return v.upper()

    @field_validator("ALPHA_MAX")
    @classmethod
    def alpha_max_above_one(cls, v: float) -> float:
        if v <= 1.0:
            raise ValueError("ALPHA_MAX must be greater than 1")
        return v


settings = Settings()

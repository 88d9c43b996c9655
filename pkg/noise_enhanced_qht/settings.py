#!/usr/bin/env python3
"""
환경 설정 모듈

.env 파일과 환경 변수(QHT_THREADS, QHT_LOG_LEVEL)를 읽어 실행 설정을 제공합니다.
"""

import os
import logging
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from .errors import ConfigError

logger = logging.getLogger("settings")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class EnvSettings(BaseModel):
    """환경 변수 기반 실행 설정"""
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, gt=0)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def check_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"알 수 없는 로그 레벨: {value}")
        return level


def load_settings() -> EnvSettings:
    """
    환경 변수에서 설정 읽기 (.env가 있으면 먼저 로드)

    Raises:
        ConfigError: QHT_THREADS가 양의 정수가 아니거나 로그 레벨이 잘못된 경우
    """
    load_dotenv()
    raw = {}
    if os.getenv("QHT_THREADS") is not None:
        raw["threads"] = os.getenv("QHT_THREADS")
    if os.getenv("QHT_LOG_LEVEL") is not None:
        raw["log_level"] = os.getenv("QHT_LOG_LEVEL")
    try:
        return EnvSettings(**raw)
    except ValidationError as e:
        raise ConfigError(
            [f"QHT_{'.'.join(str(p) for p in err['loc']).upper()}: {err['msg']}" for err in e.errors()]
        ) from e


# 싱글톤 인스턴스
_settings: Optional[EnvSettings] = None


def get_settings() -> EnvSettings:
    """설정 싱글톤 인스턴스 반환"""
    global _settings
    if _settings is None:
        _settings = load_settings()
        logger.debug(f"환경 설정: threads={_settings.threads}, log_level={_settings.log_level}")
    return _settings


def reset_settings() -> None:
    """다음 get_settings 호출에서 환경 변수를 다시 읽도록 초기화"""
    global _settings
    _settings = None

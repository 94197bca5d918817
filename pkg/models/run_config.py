"""
命令行运行配置
"""

import math
import os
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from core.errors import SpecInvariantError
from utils.config import OUTPUT_DIR

# converge 命令的默认 N 扫描：10..50 步长 10
DEFAULT_SWEEP = (10, 20, 30, 40, 50)


class Command(str, Enum):
    """子命令"""

    MODES = "modes"  # 波数表 + 模态形状
    FIELD = "field"  # 传播损失网格
    CONVERGE = "converge"  # 误差随 N 的变化


class RunConfig(BaseModel):
    """一次命令行调用的完整配置"""

    command: Command = Field(..., description="子命令")
    env_path: str = Field(..., description="环境文件路径")
    output_dir: str = Field(default=OUTPUT_DIR, description="输出目录")
    freq_hz: Optional[float] = Field(default=None, gt=0.0, description="覆盖频率 Hz")
    n_water: Optional[int] = Field(default=None, ge=4, description="覆盖水体截断阶数")
    n_bottom: Optional[int] = Field(default=None, ge=4, description="覆盖沉积层截断阶数")
    cp_max_mps: Optional[float] = Field(default=None, gt=0.0, description="覆盖相速度上限")
    emit_image: bool = Field(default=False, description="field 命令同时输出 PGM")
    db_window: tuple[float, float] = Field(default=(40.0, 100.0), description="PGM 的 dB 窗口")
    self_reference: bool = Field(default=False, description="converge 使用自参考误差")
    sweep: tuple[int, ...] = Field(default=DEFAULT_SWEEP, description="converge 的总阶数序列")
    quiet: bool = Field(default=False, description="不打印阶段日志")

    @field_validator("env_path")
    @classmethod
    def _env_exists(cls, value: str) -> str:
        if not os.path.isfile(value):
            raise SpecInvariantError(f"environment file {value} does not exist", key="env_path")
        return value

    @field_validator("sweep")
    @classmethod
    def _sweep_valid(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise SpecInvariantError("sweep must list at least one N", key="sweep")
        if any(n < 8 for n in value):
            raise SpecInvariantError("every N in the sweep must be >= 8", key="sweep")
        return tuple(sorted(set(value)))

    @model_validator(mode="after")
    def _window_valid(self) -> "RunConfig":
        lo, hi = self.db_window
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise SpecInvariantError("dB window needs finite lo < hi", key="db_window")
        return self

    @property
    def verbose(self) -> bool:
        return not self.quiet

    def overrides(self) -> dict:
        """非空的环境覆盖项（EnvironmentSpec 字段名）"""
        fields = {
            "freq_hz": self.freq_hz,
            "n_water": self.n_water,
            "n_bottom": self.n_bottom,
            "cp_max_mps": self.cp_max_mps,
        }
        return {k: v for k, v in fields.items() if v is not None}

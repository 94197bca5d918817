"""
海洋环境模型定义（两层：水体 + 沉积层）
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import SpecInvariantError

# 内置参数化剖面及其默认常数；闭式表达式在 core.env_model 中实现
BUILTIN_PROFILE_DEFAULTS: dict[str, dict[str, float]] = {
    "constant": {"value": 0.0},
    "pseudolinear": {"a": 5.94e-10, "b": 4.16e-7},
    "munk": {"c0": 1500.0, "eps": 0.00737, "z_axis": 1300.0, "scale": 650.0},
    "linear_bottom": {"slope": 0.2, "c0": 1100.0},
    "exp_bottom_a": {"c0": 1500.0, "amp": 30.0, "z_ref": 10.0, "scale": 100.0},
    "exp_bottom_b": {"c0": 2000.0, "amp": 100.0, "z_ref": 400.0, "scale": 1000.0},
    "exp_density": {"scale": 3000.0},
    "linear_atten": {"slope": 0.005, "offset": -1.0},
}

# 参与正值校验的剖面采样点数
_POSITIVITY_SAMPLES = 65


class ProfileKind(str, Enum):
    """剖面类型"""

    TABULATED = "tabulated"  # 表格 + 分段线性插值
    PARAMETRIC = "parametric"  # 内置闭式剖面


class BottomBC(str, Enum):
    """海底边界条件"""

    FREE = "free"  # 压力释放 p = 0
    RIGID = "rigid"  # 刚性 dp/dz = 0


class Profile(BaseModel):
    """随深度变化的标量属性（声速 / 密度 / 衰减）"""

    model_config = ConfigDict(frozen=True)

    kind: ProfileKind = Field(..., description="剖面类型")
    table: Optional[tuple[tuple[float, float], ...]] = Field(
        default=None, description="(深度 m, 值) 表，深度严格递增"
    )
    name: Optional[str] = Field(default=None, description="内置剖面名")
    params: dict[str, float] = Field(
        default_factory=dict, description="内置剖面常数覆盖"
    )

    @model_validator(mode="after")
    def _check_shape(self) -> "Profile":
        if self.kind == ProfileKind.TABULATED:
            if not self.table or len(self.table) < 2:
                raise SpecInvariantError("tabulated profile needs at least 2 points")
            depths = [z for z, _ in self.table]
            if any(b <= a for a, b in zip(depths, depths[1:])):
                raise SpecInvariantError("profile depths must be strictly increasing")
            if not all(math.isfinite(z) and math.isfinite(v) for z, v in self.table):
                raise SpecInvariantError("profile table contains non-finite values")
        else:
            if self.name not in BUILTIN_PROFILE_DEFAULTS:
                raise SpecInvariantError(f"unknown profile '{self.name}'")
            unknown = set(self.params) - set(BUILTIN_PROFILE_DEFAULTS[self.name])
            if unknown:
                raise SpecInvariantError(
                    f"unknown parameter(s) for '{self.name}': {', '.join(sorted(unknown))}"
                )
        return self

    @classmethod
    def tabulated(cls, points) -> "Profile":
        return cls(
            kind=ProfileKind.TABULATED,
            table=tuple((float(z), float(v)) for z, v in points),
        )

    @classmethod
    def named(cls, name: str, **params: float) -> "Profile":
        return cls(
            kind=ProfileKind.PARAMETRIC,
            name=name,
            params={k: float(v) for k, v in params.items()},
        )

    @classmethod
    def constant(cls, value: float) -> "Profile":
        return cls.named("constant", value=value)

    @property
    def domain(self) -> Optional[tuple[float, float]]:
        """表格剖面的定义域；参数化剖面不受限（返回 None）"""
        if self.kind == ProfileKind.TABULATED:
            return self.table[0][0], self.table[-1][0]
        return None

    @property
    def constant_value(self) -> Optional[float]:
        if self.kind == ProfileKind.PARAMETRIC and self.name == "constant":
            return self.resolved_params()["value"]
        return None

    def resolved_params(self) -> dict[str, float]:
        merged = dict(BUILTIN_PROFILE_DEFAULTS[self.name])
        merged.update(self.params)
        return merged


class LayerProfiles(BaseModel):
    """单层介质的声速、密度、衰减剖面"""

    model_config = ConfigDict(frozen=True)

    ssp: Profile = Field(..., description="声速 m/s")
    rho: Profile = Field(..., description="密度 g/cm^3")
    alpha: Profile = Field(
        default_factory=lambda: Profile.constant(0.0), description="衰减 dB/λ"
    )


class Lattice(BaseModel):
    """接收点网格 start:step:stop（含终点）"""

    model_config = ConfigDict(frozen=True)

    start: float
    step: float = Field(..., gt=0.0)
    stop: float

    @model_validator(mode="after")
    def _check_order(self) -> "Lattice":
        if self.stop < self.start:
            raise SpecInvariantError("lattice stop must not be below start")
        return self

    @property
    def count(self) -> int:
        return int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1

    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    def to_text(self) -> str:
        return f"{self.start!r}:{self.step!r}:{self.stop!r}"


class EnvironmentSpec(BaseModel):
    """完整问题描述：两层剖面、频率、声源、边界、截断阶数与相速度窗口"""

    model_config = ConfigDict(frozen=True)

    title: str = Field(default="untitled", description="环境名称（用于日志与输出文件名）")
    freq_hz: float = Field(..., gt=0.0, description="声源频率 Hz")
    source_depth_m: float = Field(..., description="声源深度 z_s")
    h_m: float = Field(..., description="水体-沉积层界面深度 h")
    big_h_m: float = Field(..., description="总深度 H")
    water: LayerProfiles = Field(..., description="水体剖面")
    bottom: LayerProfiles = Field(..., description="沉积层剖面")
    bottom_bc: BottomBC = Field(..., description="海底边界条件")
    n_water: int = Field(..., ge=4, description="水体截断阶数")
    n_bottom: int = Field(..., ge=4, description="沉积层截断阶数")
    cp_min_mps: float = Field(default=0.0, ge=0.0, description="相速度下限")
    cp_max_mps: float = Field(default=math.inf, gt=0.0, description="相速度上限")
    ranges_m: Optional[Lattice] = Field(default=None, description="接收距离网格")
    depths_m: Optional[Lattice] = Field(default=None, description="接收深度网格")

    @field_validator("title")
    @classmethod
    def _single_line_title(cls, value: str) -> str:
        # 必须能原样写回一行 key = value
        if not value or value != value.strip():
            raise SpecInvariantError(
                "title must be non-empty without leading or trailing whitespace", key="title"
            )
        if not value.isprintable():
            raise SpecInvariantError("title must be a single printable line", key="title")
        return value

    @field_validator("freq_hz", "source_depth_m", "h_m", "big_h_m")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("value must be finite")
        return value

    @model_validator(mode="after")
    def _check_geometry(self) -> "EnvironmentSpec":
        if self.h_m <= 0.0:
            raise SpecInvariantError("interface depth must be positive", key="h_m")
        if self.h_m >= self.big_h_m:
            raise SpecInvariantError(
                "interface depth must be strictly less than total depth", key="h_m"
            )
        if not 0.0 <= self.source_depth_m <= self.big_h_m:
            raise SpecInvariantError(
                "source depth must lie within [0, total depth]", key="source_depth_m"
            )
        if self.cp_min_mps >= self.cp_max_mps:
            raise SpecInvariantError(
                "phase-speed window is empty (cp_min >= cp_max)", key="cp_min_mps"
            )
        if self.ranges_m is not None and self.ranges_m.start <= 0.0:
            raise SpecInvariantError("receiver ranges must be positive", key="ranges_m")
        if self.depths_m is not None and (
            self.depths_m.start < 0.0 or self.depths_m.values()[-1] > self.big_h_m
        ):
            raise SpecInvariantError(
                "receiver depths must lie within [0, total depth]", key="depths_m"
            )

        for section, layer, (a, b) in (
            ("water", self.water, self.water_bounds),
            ("bottom", self.bottom, self.bottom_bounds),
        ):
            for key, profile in (("ssp", layer.ssp), ("rho", layer.rho), ("alpha", layer.alpha)):
                domain = profile.domain
                if domain is not None and (domain[0] > a or domain[1] < b):
                    raise SpecInvariantError(
                        f"profile covers [{domain[0]}, {domain[1]}] but the layer spans [{a}, {b}]",
                        key=f"{section}.{key}",
                    )
            self._check_positive(section, "ssp", layer.ssp, a, b, "sound speed")
            self._check_positive(section, "rho", layer.rho, a, b, "density")
        return self

    @staticmethod
    def _check_positive(section: str, key: str, profile: Profile, a: float, b: float, what: str) -> None:
        # 延迟导入，避免 models <-> core 循环依赖
        from core.env_model import eval_profile

        z = np.linspace(a, b, _POSITIVITY_SAMPLES)
        values = eval_profile(profile, z)
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise SpecInvariantError(f"{what} must be positive", key=f"{section}.{key}")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.freq_hz

    @property
    def water_bounds(self) -> tuple[float, float]:
        return 0.0, self.h_m

    @property
    def bottom_bounds(self) -> tuple[float, float]:
        return self.h_m, self.big_h_m

    def layer_at(self, z: float) -> LayerProfiles:
        """界面处取水体一侧"""
        return self.water if z <= self.h_m else self.bottom


class AnalyticIsoSpec(BaseModel):
    """单层等声速、等密度、无衰减问题（解析参考解）"""

    model_config = ConfigDict(frozen=True)

    depth_h: float = Field(..., gt=0.0, description="总深度 H")
    speed: float = Field(..., gt=0.0, description="声速 c")
    bc: BottomBC = Field(..., description="海底边界条件")
    freq_hz: float = Field(..., gt=0.0, description="频率 Hz")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi * self.freq_hz / self.speed

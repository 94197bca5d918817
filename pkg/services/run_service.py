"""
三个命令的编排：modes / field / converge
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from core.baselines import analytic_iso_propagating, fdm_iso_modes, iso_reference
from core.errors import InvalidArgumentError, NoPropagatingModesError
from core.field import pressure_field, transmission_loss
from core.modal import ModeSet, solve_modes
from models.environment import EnvironmentSpec
from models.run_config import Command, RunConfig
from utils.env_lib import load_env_file
from utils.filename import build_output_filename
from utils.output_lib import write_csv, write_pgm, write_tl_csv


@dataclass(frozen=True)
class ConvergenceRow:
    """一行收敛表；FDM 不适用时为 nan"""

    n_total: int
    spectral_error: float
    fdm_error: float


def apply_overrides(env: EnvironmentSpec, **overrides) -> EnvironmentSpec:
    """用命令行覆盖项重建并重新校验环境"""
    if not overrides:
        return env
    data = env.model_dump()
    data.update(overrides)
    try:
        return EnvironmentSpec.model_validate(data)
    except ValidationError as e:
        detail = e.errors()[0]
        inner = detail.get("ctx", {}).get("error")
        message = str(inner) if isinstance(inner, Exception) else detail["msg"]
        raise InvalidArgumentError(f"override rejected: {message}") from None


def load_run_env(cfg: RunConfig) -> EnvironmentSpec:
    return apply_overrides(load_env_file(cfg.env_path), **cfg.overrides())


def split_order(env: EnvironmentSpec, n_total: int) -> tuple[int, int]:
    """按 n_water : n_bottom 的比例拆分总阶数，每层至少 4"""
    if n_total < 8:
        raise InvalidArgumentError(f"total order must be >= 8, got {n_total}")
    share = env.n_water / (env.n_water + env.n_bottom)
    n_water = min(max(4, round(n_total * share)), n_total - 4)
    return n_water, n_total - n_water


def max_abs_error(computed: np.ndarray, reference: np.ndarray) -> float:
    """前 min(len) 个模态的最大绝对误差；一个都没有时为 inf"""
    count = min(len(computed), len(reference))
    if count == 0:
        return math.inf
    return float(np.max(np.abs(np.asarray(computed)[:count] - np.asarray(reference)[:count])))


def _within_window(kr: np.ndarray, env: EnvironmentSpec) -> np.ndarray:
    cp = env.omega / kr
    return kr[(cp >= env.cp_min_mps) & (cp <= env.cp_max_mps)]


def _solve_or_empty(env: EnvironmentSpec, n_water: int, n_bottom: int, verbose: bool) -> np.ndarray:
    try:
        return solve_modes(env, verbose=verbose, n_water=n_water, n_bottom=n_bottom).wavenumbers
    except NoPropagatingModesError:
        return np.array([], dtype=complex)


def convergence_table(
    env: EnvironmentSpec,
    sweep: Sequence[int],
    self_reference: bool = False,
    verbose: bool = False,
) -> list[ConvergenceRow]:
    """
    各总阶数 N 下的最大波数误差

    解析模式：与等声速解析解比较，同时给出二阶 FDM 的误差（n = N 个区间）
    自参考模式：以扫描中最大的 N 的结果为参考，FDM 列为 nan
    """
    sweep = sorted(set(sweep))
    iso = None if self_reference else iso_reference(env)
    if iso is None and not self_reference:
        raise InvalidArgumentError(
            "no analytic oracle for this environment (needs identical constant layers); use --self"
        )

    if iso is not None:
        reference = _within_window(analytic_iso_propagating(iso), env)
    else:
        reference = _solve_or_empty(env, *split_order(env, sweep[-1]), verbose)

    tag = f"[{env.title}]"
    rows: list[ConvergenceRow] = []
    for n_total in sweep:
        computed = _solve_or_empty(env, *split_order(env, n_total), verbose)
        spectral = max_abs_error(computed, reference)
        fdm = math.nan
        if iso is not None and n_total >= 10:
            fdm_kr = fdm_iso_modes(iso, n_total)
            fdm_kr = fdm_kr[(fdm_kr.imag == 0.0) & (fdm_kr.real > 0.0)].real
            fdm = max_abs_error(_within_window(fdm_kr, env), reference)
        if verbose:
            print(f"{tag} N={n_total}: spectral={spectral:.3e}, fdm={fdm:.3e}")
        rows.append(ConvergenceRow(n_total=n_total, spectral_error=spectral, fdm_error=fdm))
    return rows


def _output_path(cfg: RunConfig, env: EnvironmentSpec, kind: str) -> str:
    return os.path.join(cfg.output_dir, build_output_filename(env.title, env.freq_hz, kind))


def write_wavenumbers(path: str, modes: ModeSet) -> str:
    rows = (
        [m, kr.real, kr.imag, cp]
        for m, (kr, cp) in enumerate(zip(modes.wavenumbers, modes.phase_speeds), start=1)
    )
    return write_csv(path, ["m", "re_kr", "im_kr", "phase_speed_mps"], rows)


def write_modes(path: str, modes: ModeSet) -> str:
    header = ["z_m"]
    for m in range(1, modes.n_modes + 1):
        header += [f"psi_re_{m}", f"psi_im_{m}"]
    shapes = modes.union_modes()
    rows = []
    for z, row in zip(modes.union_depths(), shapes):
        cells = [z]
        for value in row:
            cells += [value.real, value.imag]
        rows.append(cells)
    return write_csv(path, header, rows)


def cmd_modes(cfg: RunConfig, env: Optional[EnvironmentSpec] = None) -> list[str]:
    """波数表与并集网格上的模态形状"""
    env = env or load_run_env(cfg)
    modes = solve_modes(env, verbose=cfg.verbose)
    written = [
        write_wavenumbers(_output_path(cfg, env, "wavenumbers"), modes),
        write_modes(_output_path(cfg, env, "modes"), modes),
    ]
    if cfg.verbose:
        for path in written:
            print(f"[{env.title}] 写入 {path}")
    return written


def cmd_field(cfg: RunConfig, env: Optional[EnvironmentSpec] = None) -> list[str]:
    """接收网格上的 TL（CSV，可选 PGM）"""
    env = env or load_run_env(cfg)
    if env.ranges_m is None or env.depths_m is None:
        raise InvalidArgumentError("environment has no receiver lattice (ranges_m / depths_m)")

    modes = solve_modes(env, verbose=cfg.verbose)
    ranges = env.ranges_m.values()
    depths = env.depths_m.values()
    pressure = pressure_field(modes, env.source_depth_m, ranges, depths)
    grid = transmission_loss(pressure, ranges, depths)

    written = [write_tl_csv(_output_path(cfg, env, "tl"), grid.ranges_m, grid.depths_m, grid.tl_db)]
    if cfg.emit_image:
        written.append(write_pgm(_output_path(cfg, env, "tl-image"), grid.tl_db, cfg.db_window))
    if cfg.verbose:
        for path in written:
            print(f"[{env.title}] 写入 {path}")
    return written


def cmd_converge(cfg: RunConfig, env: Optional[EnvironmentSpec] = None) -> list[str]:
    """N 扫描的误差表"""
    env = env or load_run_env(cfg)
    rows = convergence_table(env, cfg.sweep, cfg.self_reference, cfg.verbose)
    path = write_csv(
        _output_path(cfg, env, "converge"),
        ["N", "max_abs_err_spectral", "max_abs_err_fdm"],
        ([r.n_total, r.spectral_error, r.fdm_error] for r in rows),
    )
    if cfg.verbose:
        print(f"[{env.title}] 写入 {path}")
    return [path]


COMMANDS = {
    Command.MODES: cmd_modes,
    Command.FIELD: cmd_field,
    Command.CONVERGE: cmd_converge,
}

"""
环境文件（.env 文本）读写

格式为 UTF-8 文本：顶层 ``key = value`` 行，随后 ``[water]`` 与 ``[bottom]`` 两节。
以 ``#`` 或 ``;`` 开头的行为注释。示例::

    title = example4
    freq_hz = 20
    source_depth_m = 36
    h_m = 50
    big_h_m = 100
    bottom_bc = free
    n_water = 20
    n_bottom = 20
    cp_max_mps = 1800
    ranges_m = 100:100:10000
    depths_m = 0:1:100

    [water]
    ssp = 1500
    rho = 1.0

    [bottom]
    ssp = [[50, 1800], [100, 1800]]
    rho = 1.5
    alpha = 1.5

剖面值有三种写法：纯数字（常数）、``[[z0, v0], [z1, v1], ...]`` 表格、
内置名称（可带参数覆盖，例如 ``munk(eps=0.0057)``）。
接收网格写作 ``start:step:stop``（含终点）。
"""

from __future__ import annotations

import json
import math
import re
from typing import Any, Callable, Optional

from pydantic import ValidationError

from core.errors import EnvFileError, SpecInvariantError
from models.environment import (
    BottomBC,
    EnvironmentSpec,
    LayerProfiles,
    Lattice,
    Profile,
    ProfileKind,
)

LINE_KV_REGEX = re.compile(
    r"^(?P<indent>\s*)(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(?P<value>.*?)\s*$"
)
SECTION_REGEX = re.compile(r"^\s*\[(?P<name>[^\]]*)\]\s*$")
NUMBER_REGEX = re.compile(
    r"^[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf)$", re.IGNORECASE
)
INTEGER_REGEX = re.compile(r"^[+-]?\d+$")
NAMED_PROFILE_REGEX = re.compile(
    r"^(?P<name>[a-z_][a-z0-9_]*)\s*(?:\((?P<args>[^()]*)\))?$"
)
PARAM_REGEX = re.compile(r"^\s*(?P<key>[a-z_][a-z0-9_]*)\s*=\s*(?P<value>\S+?)\s*$")

SECTIONS = ("water", "bottom")
REQUIRED_TOP_KEYS = (
    "freq_hz",
    "source_depth_m",
    "h_m",
    "big_h_m",
    "bottom_bc",
    "n_water",
    "n_bottom",
)
OPTIONAL_TOP_KEYS = ("title", "cp_min_mps", "cp_max_mps", "ranges_m", "depths_m")
REQUIRED_SECTION_KEYS = ("ssp", "rho")
OPTIONAL_SECTION_KEYS = ("alpha",)

_Entry = tuple[str, int]  # (原始值, 行号)


def _parse_number(text: str, line_no: int, key: str) -> float:
    if not NUMBER_REGEX.match(text):
        raise EnvFileError(f"'{key}' expects a number, got '{text}'", line_no)
    return float(text)


def _parse_integer(text: str, line_no: int, key: str) -> int:
    if not INTEGER_REGEX.match(text):
        raise EnvFileError(f"'{key}' expects an integer, got '{text}'", line_no)
    return int(text)


def _parse_bc(text: str, line_no: int, key: str) -> BottomBC:
    try:
        return BottomBC(text.strip().lower())
    except ValueError:
        raise EnvFileError(
            f"unknown bottom_bc '{text}' (expected 'free' or 'rigid')", line_no
        ) from None


def _parse_lattice(text: str, line_no: int, key: str) -> Lattice:
    parts = text.split(":")
    if len(parts) != 3:
        raise EnvFileError(f"'{key}' expects start:step:stop, got '{text}'", line_no)
    start, step, stop = (_parse_number(p.strip(), line_no, key) for p in parts)
    try:
        return Lattice(start=start, step=step, stop=stop)
    except ValidationError as e:
        raise EnvFileError(f"'{key}': {_first_message(e)}", line_no) from None


def _parse_profile(text: str, line_no: int, key: str) -> Profile:
    try:
        if text.startswith("["):
            try:
                table = json.loads(text)
            except json.JSONDecodeError as e:
                raise EnvFileError(f"'{key}': malformed profile table ({e.msg})", line_no) from None
            if not isinstance(table, list) or not all(
                isinstance(row, list)
                and len(row) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)
                for row in table
            ):
                raise EnvFileError(
                    f"'{key}': profile table must be a list of [depth, value] pairs", line_no
                )
            return Profile.tabulated(table)

        if NUMBER_REGEX.match(text):
            return Profile.constant(float(text))

        match = NAMED_PROFILE_REGEX.match(text)
        if not match:
            raise EnvFileError(f"'{key}': cannot parse profile '{text}'", line_no)
        params: dict[str, float] = {}
        args = match.group("args")
        if args is not None and args.strip():
            for item in args.split(","):
                pm = PARAM_REGEX.match(item)
                if not pm or not NUMBER_REGEX.match(pm.group("value")):
                    raise EnvFileError(
                        f"'{key}': bad profile parameter '{item.strip()}'", line_no
                    )
                params[pm.group("key")] = float(pm.group("value"))
        return Profile.named(match.group("name"), **params)
    except ValidationError as e:
        raise EnvFileError(f"'{key}': {_first_message(e)}", line_no) from None


_TOP_CONVERTERS: dict[str, Callable[[str, int, str], Any]] = {
    "title": lambda text, line_no, key: text,
    "freq_hz": _parse_number,
    "source_depth_m": _parse_number,
    "h_m": _parse_number,
    "big_h_m": _parse_number,
    "bottom_bc": _parse_bc,
    "n_water": _parse_integer,
    "n_bottom": _parse_integer,
    "cp_min_mps": _parse_number,
    "cp_max_mps": _parse_number,
    "ranges_m": _parse_lattice,
    "depths_m": _parse_lattice,
}


def _first_message(error: ValidationError) -> str:
    detail = error.errors()[0]
    inner = detail.get("ctx", {}).get("error")
    if isinstance(inner, Exception):
        return str(inner)
    return detail["msg"]


def _split_lines(text: str) -> dict[str, dict[str, _Entry]]:
    """按节收集 key -> (value, line_no)，顶层键放在 '' 节"""
    entries: dict[str, dict[str, _Entry]] = {"": {}}
    section = ""
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith(";"):
            continue

        section_match = SECTION_REGEX.match(raw_line)
        if section_match:
            section = section_match.group("name").strip().lower()
            if section not in SECTIONS:
                raise EnvFileError(f"unknown section [{section}]", line_no)
            if section in entries:
                raise EnvFileError(f"duplicate section [{section}]", line_no)
            entries[section] = {}
            continue

        match = LINE_KV_REGEX.match(raw_line)
        if not match:
            raise EnvFileError(f"cannot parse line '{stripped}'", line_no)
        key = match.group("key")
        value = match.group("value")

        allowed = (
            REQUIRED_TOP_KEYS + OPTIONAL_TOP_KEYS
            if section == ""
            else REQUIRED_SECTION_KEYS + OPTIONAL_SECTION_KEYS
        )
        if key not in allowed:
            where = "top level" if section == "" else f"[{section}]"
            raise EnvFileError(f"unknown key '{key}' at {where}", line_no)
        if key in entries[section]:
            raise EnvFileError(f"duplicate key '{key}'", line_no)
        if value == "":
            raise EnvFileError(f"empty value for '{key}'", line_no)
        entries[section][key] = (value, line_no)
    return entries


def _line_of(entries: dict[str, dict[str, _Entry]], key_path: Optional[str]) -> Optional[int]:
    if not key_path:
        return None
    if "." in key_path:
        section, key = key_path.split(".", 1)
    else:
        section, key = "", key_path
    # 缺省项（例如未写 alpha）没有行号
    entry = entries.get(section, {}).get(key)
    return entry[1] if entry else None


def _key_path_from_error(detail: dict[str, Any]) -> Optional[str]:
    inner = detail.get("ctx", {}).get("error")
    if isinstance(inner, SpecInvariantError) and inner.key:
        return inner.key
    loc = [str(part) for part in detail.get("loc", ())]
    if not loc:
        return None
    if loc[0] in SECTIONS and len(loc) > 1:
        return f"{loc[0]}.{loc[1]}"
    return loc[0]


def parse_env_file(text: str) -> EnvironmentSpec:
    """
    解析环境文件文本并完成全部校验

    Raises:
        EnvFileError: 缺键、未知键、格式错误或违反环境约束（尽量带行号）
    """
    entries = _split_lines(text)

    top: dict[str, Any] = {}
    for key in REQUIRED_TOP_KEYS:
        if key not in entries[""]:
            raise EnvFileError(f"missing required key '{key}'")
    for key, (value, line_no) in entries[""].items():
        top[key] = _TOP_CONVERTERS[key](value, line_no, key)

    layers: dict[str, LayerProfiles] = {}
    for section in SECTIONS:
        if section not in entries:
            raise EnvFileError(f"missing section [{section}]")
        fields: dict[str, Profile] = {}
        for key in REQUIRED_SECTION_KEYS:
            if key not in entries[section]:
                raise EnvFileError(f"missing required key '{key}' in [{section}]")
        for key, (value, line_no) in entries[section].items():
            fields[key] = _parse_profile(value, line_no, key)
        layers[section] = LayerProfiles(**fields)

    try:
        return EnvironmentSpec(**top, **layers)
    except ValidationError as e:
        detail = e.errors()[0]
        key_path = _key_path_from_error(detail)
        raise EnvFileError(_first_message(e), _line_of(entries, key_path)) from None


def load_env_file(path: str) -> EnvironmentSpec:
    """读取并解析环境文件（UTF-8）"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except FileNotFoundError:
        raise EnvFileError(f"environment file {path} does not exist") from None
    except UnicodeDecodeError as e:
        raise EnvFileError(f"environment file {path} is not valid UTF-8: {e.reason}") from None
    return parse_env_file(text)


def _format_profile(profile: Profile) -> str:
    if profile.kind == ProfileKind.TABULATED:
        return json.dumps([[z, v] for z, v in profile.table])
    if profile.name == "constant":
        return repr(profile.resolved_params()["value"])
    if not profile.params:
        return profile.name
    args = ", ".join(f"{k}={v!r}" for k, v in sorted(profile.params.items()))
    return f"{profile.name}({args})"


def dump_env_text(spec: EnvironmentSpec) -> str:
    """把 EnvironmentSpec 写回环境文件文本；parse_env_file(dump_env_text(s)) == s"""
    lines = [
        f"title = {spec.title}",
        f"freq_hz = {spec.freq_hz!r}",
        f"source_depth_m = {spec.source_depth_m!r}",
        f"h_m = {spec.h_m!r}",
        f"big_h_m = {spec.big_h_m!r}",
        f"bottom_bc = {spec.bottom_bc.value}",
        f"n_water = {spec.n_water}",
        f"n_bottom = {spec.n_bottom}",
        f"cp_min_mps = {spec.cp_min_mps!r}",
    ]
    if math.isfinite(spec.cp_max_mps):
        lines.append(f"cp_max_mps = {spec.cp_max_mps!r}")
    if spec.ranges_m is not None:
        lines.append(f"ranges_m = {spec.ranges_m.to_text()}")
    if spec.depths_m is not None:
        lines.append(f"depths_m = {spec.depths_m.to_text()}")

    for section in SECTIONS:
        layer: LayerProfiles = getattr(spec, section)
        lines.append("")
        lines.append(f"[{section}]")
        lines.append(f"ssp = {_format_profile(layer.ssp)}")
        lines.append(f"rho = {_format_profile(layer.rho)}")
        lines.append(f"alpha = {_format_profile(layer.alpha)}")
    return "\n".join(lines) + "\n"

"""
独立集成检查：用 envs/ 下的环境文件复现波数表并与参考值逐项比较。

流程：
1. 读取环境文件并覆盖频率 / 截断阶数
2. 求解简正波
3. 逐模态打印计算值、参考值与误差
4. 超出容差即返回非零
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent

import sys

if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from core.modal import solve_modes
from services.run_service import apply_overrides
from utils.env_lib import load_env_file

# (环境文件, 频率, N_w, N_b, 容差, {模态序号: 参考 kr})
CASES = [
    ("example1.env", 20.0, 10, 10, 1e-10, {1: 0.0776622489, 2: 0.0554124859}),
    (
        "example1.env", 50.0, 20, 20, 1e-10,
        {1: 0.2070699109, 2: 0.1997925591, 3: 0.1870354632,
         4: 0.1675516082, 5: 0.1385312147, 6: 0.0912925660},
    ),
    ("example2.env", 20.0, 12, 12, 1e-9, {1: 0.0822900069, 2: 0.0692656074, 3: 0.0291527460}),
    (
        "example2.env", 50.0, 20, 20, 1e-9,
        {1: 0.2088496309, 2: 0.2040692222, 3: 0.1941556223,
         4: 0.1782544335, 5: 0.1545281836, 6: 0.1183611217},
    ),
    (
        "example4.env", 20.0, 20, 20, 1e-9,
        {1: 0.0735028581 + 0.3759726294e-3j, 2: 0.0404098897 + 0.2375723752e-2j},
    ),
    (
        "example4.env", 50.0, 20, 20, 1e-9,
        {1: 0.2032961543 + 0.1455280251e-3j, 2: 0.1832016596 + 0.7180523083e-3j,
         3: 0.1634865836 + 0.4489227771e-2j, 4: 0.1419594443 + 0.2610178399e-2j,
         5: 0.1137157329 + 0.4726124780e-2j},
    ),
]

SLOW_CASES = [
    (
        "example5.env", 50.0, 1000, 1000, 1e-6,
        {1: 0.2093735621, 2: 0.2092424310, 3: 0.2091122288,
         70: 0.1948569442, 71: 0.1944647584, 72: 0.1940660923},
    ),
]


def run_case(env_dir: Path, case: tuple) -> bool:
    filename, freq, n_water, n_bottom, tol, expected = case
    env = apply_overrides(
        load_env_file(str(env_dir / filename)),
        freq_hz=freq, n_water=n_water, n_bottom=n_bottom,
    )
    started = time.perf_counter()
    modes = solve_modes(env)
    elapsed = time.perf_counter() - started
    print(f"[{env.title}] f={freq:g} Hz N_w={n_water} N_b={n_bottom}: {modes.n_modes} modes, {elapsed:.2f}s")

    ok = True
    for m, ref in expected.items():
        if m > modes.n_modes:
            print(f"  m={m}: missing")
            ok = False
            continue
        kr = modes.wavenumbers[m - 1]
        err = max(abs(kr.real - complex(ref).real), abs(kr.imag - complex(ref).imag))
        flag = "ok" if err <= tol else "FAIL"
        print(f"  m={m}: {kr.real:.10f}{kr.imag:+.10e}i  ref={complex(ref)}  err={err:.2e}  {flag}")
        ok = ok and err <= tol
    return ok


def run(args: argparse.Namespace) -> int:
    env_dir = Path(args.env_dir).resolve()
    cases = CASES + (SLOW_CASES if args.slow else [])
    failed = [c[0] for c in cases if not run_case(env_dir, c)]
    if failed:
        print(f"TABLES_RESULT=FAILED ({len(failed)} case(s))")
        return 1
    print("TABLES_RESULT=PASSED")
    return 0


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "--env-dir",
        default=str(PROJECT_ROOT / "envs"),
        help="环境文件目录",
    )
    parser.add_argument(
        "--slow",
        action="store_true",
        help="包含 N=1000 的大规模算例（数分钟）",
    )
    return parser.parse_args()


if __name__ == "__main__":
    args = parse_args()
    raise SystemExit(run(args))

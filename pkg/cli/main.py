"""
命令行前端

    python -m cli.main modes envs/example1.env --freq 50 --nw 20 --nb 20
    python -m cli.main field envs/example4.env --image --db-window 40:100
    python -m cli.main converge envs/example1.env --sweep 10:50:10

退出码：0 全部产物写出；1 求解/输入错误；2 用法错误
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from core.baselines import iso_reference
from core.errors import NormalModeError
from models.run_config import DEFAULT_SWEEP, Command, RunConfig
from services.run_service import COMMANDS, load_run_env
from utils.config import DB_WINDOW, OUTPUT_DIR
from utils.output_lib import parse_db_window

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def parse_sweep(text: str) -> tuple[int, ...]:
    """'10:50:10' 或 '10,20,40'"""
    try:
        if ":" in text:
            start, stop, step = (int(p) for p in text.split(":"))
            if step <= 0:
                raise ValueError
            return tuple(range(start, stop + 1, step))
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"sweep must be start:stop:step or a comma list, got '{text}'"
        ) from None


def _db_window_arg(text: str) -> tuple[float, float]:
    try:
        return parse_db_window(text)
    except NormalModeError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmode",
        description="两层海洋波导的 Chebyshev 配点简正波求解器",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="子命令")
    parser.add_argument("env", help="环境文件路径")
    parser.add_argument("--freq", type=float, default=None, help="覆盖频率 Hz")
    parser.add_argument("--nw", type=int, default=None, help="覆盖水体截断阶数")
    parser.add_argument("--nb", type=int, default=None, help="覆盖沉积层截断阶数")
    parser.add_argument("--cpmax", type=float, default=None, help="覆盖相速度上限 m/s")
    parser.add_argument("--out", default=OUTPUT_DIR, help="输出目录")
    parser.add_argument("--image", action="store_true", help="field 同时输出 PGM 灰度图")
    parser.add_argument(
        "--db-window",
        type=_db_window_arg,
        default=DB_WINDOW,
        help="PGM 的 dB 窗口 lo:hi",
    )
    parser.add_argument("--self", dest="self_reference", action="store_true", help="converge 使用自参考误差")
    parser.add_argument(
        "--sweep",
        type=parse_sweep,
        default=DEFAULT_SWEEP,
        help="converge 的总阶数：start:stop:step 或逗号列表",
    )
    parser.add_argument("--quiet", action="store_true", help="不打印阶段日志")
    return parser


def _first_message(error: ValidationError) -> str:
    detail = error.errors()[0]
    inner = detail.get("ctx", {}).get("error")
    return str(inner) if isinstance(inner, Exception) else detail["msg"]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        cfg = RunConfig(
            command=Command(args.command),
            env_path=args.env,
            output_dir=args.out,
            freq_hz=args.freq,
            n_water=args.nw,
            n_bottom=args.nb,
            cp_max_mps=args.cpmax,
            emit_image=args.image,
            db_window=args.db_window,
            self_reference=args.self_reference,
            sweep=args.sweep,
            quiet=args.quiet,
        )
    except ValidationError as e:
        print(f"nmode: error: {_first_message(e)}", file=sys.stderr)
        return EXIT_USAGE

    try:
        env = load_run_env(cfg)
        if cfg.command == Command.CONVERGE and not cfg.self_reference and iso_reference(env) is None:
            print(
                "nmode: error: no analytic oracle for this environment; pass --self",
                file=sys.stderr,
            )
            return EXIT_USAGE
        COMMANDS[cfg.command](cfg, env)
    except NormalModeError as e:
        print(f"nmode: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

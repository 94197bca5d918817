import os

from dotenv import load_dotenv

load_dotenv()


def _truthy(value: str) -> bool:
    return value.strip().lower() in ("true", "1", "yes", "on")


# 输出配置
OUTPUT_DIR = os.environ.get("NMODE_OUTPUT_DIR", "output")
SIG_DIGITS = int(os.environ.get("NMODE_SIG_DIGITS", "12"))
DB_WINDOW = os.environ.get("NMODE_DB_WINDOW", "40:100")

# 声场合成：factored = H0(a·r)·exp(-b·r)，exact = 复宗量 Hankel 函数
HANKEL_MODE = os.environ.get("NMODE_HANKEL_MODE", "factored").strip().lower()
FIELD_WORKERS = int(os.environ.get("NMODE_FIELD_WORKERS", "1"))

# 数值保护
L22_COND_LIMIT = float(os.environ.get("NMODE_L22_COND_LIMIT", "1e12"))
DEBUG_CHECKS = _truthy(os.environ.get("NMODE_DEBUG_CHECKS", "false"))
EIG_RESIDUAL_TOL = float(os.environ.get("NMODE_EIG_RESIDUAL_TOL", "1e-9"))

"""
启动命令行求解器（参数同 cli.main）
"""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())

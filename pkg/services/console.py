"""状态输出：结果走 stdout，带表情前缀的进度行走 stderr"""

import sys

from config import Config


def status(message: str, force: bool = False):
    """仅在 Config.VERBOSE 时输出"""
    if Config.VERBOSE or force:
        print(message, file=sys.stderr, flush=True)


def error(message: str):
    print(f"❌ {message}", file=sys.stderr, flush=True)

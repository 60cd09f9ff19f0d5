"""
报告文件输出 / Report File Output

所有输出文件先写入同目录临时文件再重命名，避免留下半成品。
Every output file is written to a temporary sibling first and then renamed
into place, so readers never see a partial file.
"""

import json
import os
import tempfile
from pathlib import Path

import numpy as np


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def atomic_write_text(path, text):
    """
    原子写入文本 / Write text atomically

    Args:
        path (str | Path): 目标路径 / Destination path
        text (str): 内容 / Content
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, data):
    """以缩进 JSON 原子写入 / Write indented JSON atomically"""
    return atomic_write_text(path, json.dumps(data, indent=2, ensure_ascii=False, default=_default) + "\n")


def write_csv(path, df):
    """原子写入 DataFrame / Write a DataFrame atomically"""
    return atomic_write_text(path, df.to_csv(index=False))

#!/usr/bin/env python3
"""
分析日志解析与解码 / Analytics Log Parsing and Decoding

解析设备分析日志中的 CMS 记录（"j,hexbits"），并用候选集合解码。
Parses CMS entries ("j,hexbits") of device analytics logs and decodes them
against a guess set.

Hex bit order is MSB first: bit i is bit (7 - i mod 8) of byte i // 8,
i.e. bit (3 - i mod 4) of hex digit i // 4. Short strings (including ones
ending in a '...' truncation marker) are zero-padded on the right to m bits.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd

from .attacks import GuessSet, cms_decode, hcms_decode
from .exceptions import ConfigError, MalformedRecord
from .report_io import write_csv, write_json
from .sketch_mech import CmsRecord, HcmsRecord

_HEX_DIGITS = "0123456789abcdefABCDEF"
_TRUNCATION_MARKERS = ("...", "…")
DECODE_MECHANISMS = ("cms", "hcms")


@dataclass
class AnalyticsRecord:
    """
    一条分析日志记录 / One analytics log record

    Attributes:
        key (str): 采集键 / Collection key
        parameters (dict): {epsilon, k, m}
        records (list): "j,hexbits" 字符串 / "j,hexbits" strings
    """

    key: str
    parameters: Dict = field(default_factory=dict)
    records: List[str] = field(default_factory=list)

    @property
    def epsilon(self):
        return float(self.parameters["epsilon"])

    @property
    def k(self):
        return int(self.parameters["k"])

    @property
    def m(self):
        return int(self.parameters["m"])

    def entries(self):
        """解析全部条目（遇错即抛出）/ Parse every entry, raising on the first bad one"""
        return [parse_entry(text, self.k, self.m) for text in self.records]


def hex_to_bits(hexbits, m):
    """
    MSB 优先的十六进制 → m 位向量 / MSB-first hex to an m-bit vector

    Raises:
        MalformedRecord: 非法字符或超过 m 位 / Invalid digit or more than m bits
    """
    text = hexbits.strip()
    for marker in _TRUNCATION_MARKERS:
        if text.endswith(marker):
            text = text[: -len(marker)]
    bad = [c for c in text if c not in _HEX_DIGITS]
    if bad:
        raise MalformedRecord(f"invalid hex digit '{bad[0]}' in '{hexbits}'")
    if len(text) > -(-m // 4):
        raise MalformedRecord(f"hex string encodes more than m={m} bits")
    nibbles = np.array([int(c, 16) for c in text], dtype=np.uint8)
    bits = ((nibbles[:, None] >> np.array([3, 2, 1, 0], dtype=np.uint8)) & 1).ravel()
    if bits[m:].any():
        raise MalformedRecord(f"hex string sets bits beyond m={m}")
    out = np.zeros(m, dtype=np.uint8)
    n = min(m, bits.size)
    out[:n] = bits[:n]
    return out


def bits_to_hex(bits):
    """m 位向量 → MSB 优先十六进制（右侧补零到整数个十六进制位）/ m-bit vector to MSB-first hex"""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    padded = np.zeros(-(-bits.size // 4) * 4, dtype=np.uint8)
    padded[: bits.size] = bits
    nibbles = padded.reshape(-1, 4) @ np.array([8, 4, 2, 1])
    return "".join(f"{int(v):x}" for v in nibbles)


def parse_entry(text, k, m):
    """
    解析一个 "j,hexbits" 条目 / Parse one "j,hexbits" entry

    Args:
        text (str): 条目文本 / Entry text
        k (int): 哈希数 / Hash count
        m (int): 位数 / Bit count

    Returns:
        CmsRecord

    Raises:
        MalformedRecord: 缺少逗号、j 越界或十六进制非法 / missing comma, j out of range or bad hex
    """
    if "," not in text:
        raise MalformedRecord(f"entry '{text}' has no comma")
    head, hexbits = text.split(",", 1)
    try:
        j = int(head.strip(), 10)
    except ValueError:
        raise MalformedRecord(f"hash index '{head}' is not a decimal integer")
    if not 0 <= j < k:
        raise MalformedRecord(f"hash index {j} outside [0, {k})")
    return CmsRecord(bits=hex_to_bits(hexbits, m), j=j)


def parse_hcms_entry(text, k, m):
    """
    解析一个 "j,l,y" 形式的 HCMS 条目 / Parse one HCMS entry of the form "j,l,y"
    """
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise MalformedRecord(f"HCMS entry '{text}' must have the form j,l,y")
    try:
        j, l, y = (int(p, 10) for p in parts)  # noqa: E741
    except ValueError:
        raise MalformedRecord(f"HCMS entry '{text}' holds a non-integer field")
    if not 0 <= j < k or not 0 <= l < m or y not in (-1, 1):
        raise MalformedRecord(f"HCMS entry '{text}' is out of range")
    return HcmsRecord(y=y, j=j, l=l)


def _record_from_obj(obj):
    if not isinstance(obj, dict):
        raise MalformedRecord("analytics record must be a JSON object")
    missing = [name for name in ("key", "parameters", "records") if name not in obj]
    if missing:
        raise MalformedRecord(f"analytics record is missing {', '.join(missing)}")
    params = obj["parameters"]
    if not isinstance(params, dict) or any(name not in params for name in ("epsilon", "k", "m")):
        raise MalformedRecord("parameters must hold epsilon, k and m")
    if not isinstance(obj["records"], list) or not all(isinstance(r, str) for r in obj["records"]):
        raise MalformedRecord("records must be a list of strings")
    return AnalyticsRecord(key=str(obj["key"]), parameters=dict(params), records=list(obj["records"]))


def parse_record(json_text, strict=True):
    """
    解析一条分析日志 JSON / Parse one analytics log JSON object

    Args:
        json_text (str): JSON 文本 / JSON text
        strict (bool): 为 True 时同时校验每个条目 / Also validate every entry when True

    Returns:
        AnalyticsRecord

    Raises:
        MalformedRecord: JSON 或字段非法 / Bad JSON or fields
    """
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as e:
        raise MalformedRecord(f"line {e.lineno}: {e.msg}")
    record = _record_from_obj(obj)
    if strict:
        record.entries()
    return record


def serialize(record):
    """AnalyticsRecord → JSON 文本 / AnalyticsRecord to JSON text"""
    return json.dumps(
        {"key": record.key, "parameters": record.parameters, "records": record.records},
        ensure_ascii=False,
    )


def encode_entry(cms_record):
    """CmsRecord → "j,hexbits" / CmsRecord to "j,hexbits" """
    return f"{cms_record.j},{bits_to_hex(cms_record.bits)}"


def load_log(log_path):
    """
    读取日志文件：单个 JSON 对象或对象数组 / Read a log file holding one JSON object or an array

    Returns:
        list: AnalyticsRecord 列表（未校验条目）/ AnalyticsRecords with entries unchecked
    """
    text = Path(log_path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{log_path} is not valid JSON: {e.msg}", line=e.lineno)
    objs = obj if isinstance(obj, list) else [obj]
    return [_record_from_obj(o) for o in objs]


def decode_log(log_path, guesses_path, out_path, mechanism="cms", i_own_this_log=False):
    """
    用候选集合解码日志中的每个条目 / Decode every log entry against a guess set

    单个条目格式错误时记录警告并继续。
    A malformed entry is logged and skipped; decoding continues with the rest.

    Args:
        log_path (str): 日志文件 / Log file
        guesses_path (str): 候选文件（UTF-8，每行一个）/ Guess file, UTF-8, one per line
        out_path (str): 输出 JSON / Output JSON
        mechanism (str): cms | hcms
        i_own_this_log (bool): 确认日志属于调用者 / Confirms the log belongs to the caller

    Returns:
        dict: 解码报告 / Decoded report
    """
    logger = logging.getLogger(__name__)
    if not i_own_this_log:
        raise ConfigError("refusing to decode a device log without --i-own-this-log")
    if mechanism not in DECODE_MECHANISMS:
        raise ConfigError(f"unknown decode mechanism '{mechanism}', expected one of {DECODE_MECHANISMS}")

    guesses = GuessSet.from_file(guesses_path)
    records = load_log(log_path)
    logger.info(f"Decoding {len(records)} log record(s) against {len(guesses)} guesses")

    decoded, errors, rows = {}, {}, []
    index = 0
    for record in records:
        for text in record.records:
            try:
                if mechanism == "cms":
                    entry = parse_entry(text, record.k, record.m)
                    plausible = cms_decode(entry, guesses, record.m)
                else:
                    entry = parse_hcms_entry(text, record.k, record.m)
                    plausible = hcms_decode(entry, guesses, record.m)
            except MalformedRecord as e:
                logger.warning(f"Record {index} skipped: {e}")
                errors[str(index)] = str(e)
                index += 1
                continue
            decoded[str(index)] = plausible
            rows.append({
                "record_index": index,
                "key": record.key,
                "hash_index": entry.j,
                "n_plausible": len(plausible),
                "plausible": " ".join(plausible),
            })
            index += 1

    report = {
        "mechanism": mechanism,
        "n_guesses": len(guesses),
        "decoded": decoded,
        "errors": errors,
    }
    out_path = Path(out_path)
    write_json(out_path, report)
    write_csv(out_path.with_suffix(".csv"), pd.DataFrame(
        rows, columns=["record_index", "key", "hash_index", "n_plausible", "plausible"]
    ))
    logger.info(f"Decoded {len(decoded)} entries, {len(errors)} malformed")
    return report

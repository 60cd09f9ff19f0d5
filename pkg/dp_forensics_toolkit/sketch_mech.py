#!/usr/bin/env python3
"""
离散本地差分隐私机制 / Discrete Local-DP Mechanisms

对称独热编码、CMS/HCMS 客户端与 OneBitHistogram，以及它们共享的
哈希、Hadamard 和 AES 内核。
Symmetric one-hot encoding, CMS/HCMS clients and OneBitHistogram, plus the
hashing, Hadamard and AES kernels they share with the decoders.

Encodings:
    hash_bucket(j, x, d) = int.from_bytes(SHA256(j as 8-byte BE || utf8(x))[:8], BE) mod d
    obh_bit(x, l)        = bit (7 - l % 8) of byte l // 8 of
                           AES128-ECB(key=SHA256(x)[:16], block=l as 16-byte BE)
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from Crypto.Cipher import AES

from .exceptions import OutOfDomain, PreconditionViolation

AES_BLOCK_BITS = 128


def _as_bytes(x):
    if isinstance(x, bytes):
        return x
    return str(x).encode("utf-8")


def keep_prob(epsilon):
    """
    随机响应的保留概率 e^ε/(e^ε+1) / Randomized-response keep probability e^ε/(e^ε+1)

    Evaluated as 1 / (1 + e^-ε) for ε ≥ 0 so that large ε does not overflow;
    the value equals e^ε/(e^ε+1) in binary64 up to one rounding.
    """
    if not math.isfinite(epsilon):
        raise PreconditionViolation(f"epsilon must be finite, got {epsilon}")
    if epsilon >= 0.0:
        return 1.0 / (1.0 + math.exp(-epsilon))
    e = math.exp(epsilon)
    return e / (e + 1.0)


@dataclass(frozen=True)
class SketchConfig:
    """
    草图机制参数 / Sketch mechanism parameters

    Attributes:
        epsilon (float): 隐私参数 / Privacy parameter
        d (int): 比特数 / Bit count
        k (int): 哈希函数个数 / Hash count
    """

    epsilon: float
    d: int
    k: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise PreconditionViolation(f"epsilon must be finite and > 0, got {self.epsilon}")
        if int(self.d) < 1:
            raise PreconditionViolation(f"bit count d must be >= 1, got {self.d}")
        if int(self.k) < 1:
            raise PreconditionViolation(f"hash count k must be >= 1, got {self.k}")

    @property
    def is_power_of_two(self):
        return self.d & (self.d - 1) == 0


@dataclass(frozen=True)
class CmsRecord:
    """CMS 客户端输出 / CMS client output"""

    bits: np.ndarray
    j: int


@dataclass(frozen=True)
class HcmsRecord:
    """HCMS 客户端输出 / HCMS client output"""

    y: int
    j: int
    l: int  # noqa: E741


@dataclass(frozen=True)
class ObhRecord:
    """OneBitHistogram 客户端输出 / OneBitHistogram client output"""

    y: int
    l: int  # noqa: E741


def _flip_mask(stream, n, p_keep):
    """每位以 p_keep 保留，返回需翻转的布尔掩码 / Boolean mask of bits to flip"""
    u = stream.uniform_unit_doubles(n)
    return ~(u < p_keep)


def randomize_bits(v, epsilon, stream):
    """
    逐位随机响应 / Per-bit randomized response

    Args:
        v (np.ndarray): 0/1 向量 / 0/1 vector
        epsilon (float): 每位的隐私参数 / Per-bit privacy parameter
        stream (RngStream): 随机流 / Random stream

    Returns:
        np.ndarray: uint8 向量 / uint8 vector
    """
    v = np.asarray(v, dtype=np.uint8)
    flip = _flip_mask(stream, v.size, keep_prob(epsilon))
    return np.where(flip, 1 - v, v).astype(np.uint8)


def one_hot(index, d):
    """0 基独热向量 / Zero-based one-hot vector"""
    v = np.zeros(int(d), dtype=np.uint8)
    v[int(index)] = 1
    return v


def sym_ohe(x, config, stream):
    """
    对称独热编码机制 / Symmetric one-hot-encoding mechanism

    Args:
        x (int): 1 基输入 / One-based input in [1, d]
        config (SketchConfig): 参数 / Parameters
        stream (RngStream): 随机流 / Random stream

    Returns:
        np.ndarray: 长度 d 的 uint8 比特向量 / uint8 bit vector of length d

    Raises:
        OutOfDomain: x 不在 [1, d] / x outside [1, d]
    """
    if not (1 <= int(x) <= config.d):
        raise OutOfDomain(f"symOHE input {x} outside [1, {config.d}]")
    return randomize_bits(one_hot(int(x) - 1, config.d), config.epsilon, stream)


def hash_bucket(j, x, d):
    """
    SHA256(j||x) 的桶索引 / Bucket index from SHA256(j||x)

    Args:
        j (int): 哈希索引 / Hash index
        x (bytes | str): 输入 / Input value
        d (int): 桶数 / Number of buckets

    Returns:
        int: [0, d) 内的桶 / Bucket in [0, d)
    """
    digest = hashlib.sha256(int(j).to_bytes(8, "big") + _as_bytes(x)).digest()
    return int.from_bytes(digest[:8], "big") % int(d)


def cms_client(x, config, stream):
    """
    CMS 客户端：哈希到桶后按 ε/2 逐位翻转
    CMS client: hash to a bucket, then flip each bit at ε/2

    Args:
        x (bytes | str): 输入 / Input
        config (SketchConfig): 参数 / Parameters
        stream (RngStream): 随机流 / Random stream

    Returns:
        CmsRecord: 比特与哈希索引 / Bits and hash index
    """
    j = stream.uniform_index(config.k)
    v = one_hot(hash_bucket(j, x, config.d), config.d)
    return CmsRecord(bits=randomize_bits(v, config.epsilon / 2.0, stream), j=j)


def hadamard_entry(l, h, d=None):  # noqa: E741
    """Sylvester Hadamard 矩阵元素 (-1)^popcount(l & h) / Sylvester Hadamard entry"""
    if d is not None and not (0 <= int(l) < d and 0 <= int(h) < d):
        raise OutOfDomain(f"Hadamard indices ({l}, {h}) outside [0, {d})")
    return -1 if bin(int(l) & int(h)).count("1") & 1 else 1


def hcms_client(x, config, stream):
    """
    Hadamard CMS 客户端 / Hadamard CMS client

    Args:
        x (bytes | str): 输入 / Input
        config (SketchConfig): 参数，d 须为2的幂 / Parameters, d must be a power of two
        stream (RngStream): 随机流 / Random stream

    Returns:
        HcmsRecord: (y, j, l)
    """
    if not config.is_power_of_two:
        raise PreconditionViolation(f"HCMS requires d to be a power of two, got {config.d}")
    j = stream.uniform_index(config.k)
    h = hash_bucket(j, x, config.d)
    l = stream.uniform_index(config.d)  # noqa: E741
    y = hadamard_entry(l, h, config.d)
    if not stream.uniform_unit_double() < keep_prob(config.epsilon):
        y = -y
    return HcmsRecord(y=y, j=j, l=l)


def obh_bit(x, l):  # noqa: E741
    """
    AES128(l; SHA256(x)) 的第 l 位 / Bit l of AES128(l; SHA256(x))

    Args:
        x (bytes | str): 输入 / Input
        l (int): 比特索引 / Bit index in [0, 128)

    Returns:
        int: 0 或 1 / 0 or 1

    Raises:
        OutOfDomain: l ≥ 128
    """
    l = int(l)  # noqa: E741
    if not (0 <= l < AES_BLOCK_BITS):
        raise OutOfDomain(f"bit index {l} outside [0, {AES_BLOCK_BITS})")
    key = hashlib.sha256(_as_bytes(x)).digest()[:16]
    block = AES.new(key, AES.MODE_ECB).encrypt(l.to_bytes(16, "big"))
    return (block[l // 8] >> (7 - l % 8)) & 1


def one_bit_histogram(x, config, stream):
    """
    OneBitHistogram 客户端 / OneBitHistogram client

    Raises:
        OutOfDomain: d > 128
    """
    if config.d > AES_BLOCK_BITS:
        raise OutOfDomain(f"OneBitHistogram requires d <= {AES_BLOCK_BITS}, got {config.d}")
    l = stream.uniform_index(config.d)  # noqa: E741
    y = obh_bit(x, l)
    if not stream.uniform_unit_double() < keep_prob(config.epsilon):
        y = 1 - y
    return ObhRecord(y=y, l=l)

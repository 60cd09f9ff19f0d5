#!/usr/bin/env python3
"""
确定性随机数流 / Deterministic Random Streams

基于 splitmix64 的可复现随机源，提供易受浮点攻击的采样器所依赖的
"32位无符号整数 → 双精度" 构造。
Reproducible splitmix64-based randomness with the exact raw-integer-to-float
constructions that the vulnerable samplers depend on.

Draw i (0-based) of a stream with seed s is
    finalize(s + (i + 1) * 0x9E3779B97F4A7C15) >> 32
so scalar and vectorised draws produce the same sequence.
"""

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_C1 = 0xBF58476D1CE4E5B9
_MIX_C2 = 0x94D049BB133111EB

U32_MAX = 2**32 - 1
U32_MAX_DOUBLE = float(U32_MAX)


def _finalize(z):
    """splitmix64 输出混合函数 / splitmix64 output mixing function"""
    z = ((z ^ (z >> 30)) * _MIX_C1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_C2) & MASK64
    return z ^ (z >> 31)


def splitmix64(x):
    """
    单步 splitmix64 混合 / One splitmix64 mixing step

    Args:
        x (int): 64位输入 / 64-bit input

    Returns:
        int: 混合后的64位整数 / Mixed 64-bit integer
    """
    return _finalize((int(x) + GOLDEN_GAMMA) & MASK64)


def _finalize_array(z):
    # uint64 arithmetic wraps modulo 2^64
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_C1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_C2)
    return z ^ (z >> np.uint64(31))


def derive_seed(master_seed, index):
    """
    为第 index 次运行派生独立种子 / Derive an independent seed for run `index`

    Args:
        master_seed (int): 主种子 / Master seed
        index (int): 运行编号 / Run index

    Returns:
        int: 派生的64位种子 / Derived 64-bit seed
    """
    return splitmix64((int(master_seed) & MASK64) ^ splitmix64(index))


class RngStream:
    """
    单一所有者的确定性随机流 / Single-owner deterministic random stream

    同一种子在任何平台上产生相同序列；不可在并发上下文间共享。
    Identical seeds give identical sequences on every platform; a stream must
    never be shared between concurrent contexts.
    """

    def __init__(self, seed=0):
        """
        Args:
            seed (int): 64位种子 / 64-bit seed
        """
        self.seed = int(seed) & MASK64
        self.counter = 0

    @classmethod
    def derive(cls, master_seed, index):
        """派生第 index 个独立流 / Derive the index-th independent stream"""
        return cls(derive_seed(master_seed, index))

    def __repr__(self):
        return f"RngStream(seed={self.seed:#018x}, counter={self.counter})"

    def next_u64(self):
        """下一个64位原始整数 / Next raw 64-bit integer"""
        self.counter += 1
        return _finalize((self.seed + self.counter * GOLDEN_GAMMA) & MASK64)

    def next_u32(self):
        """
        下一个32位无符号整数，在 [0, 2^32-1] 上均匀
        Next unsigned 32-bit integer, uniform over [0, 2^32 - 1]
        """
        return self.next_u64() >> 32

    def uniform_unit_double(self):
        """
        原始整数除以 2^32-1（双精度就近舍入），支撑集恰有 2^32 个点
        Raw integer divided by 2^32 - 1 in binary64; support has exactly 2^32 points
        """
        return self.next_u32() / U32_MAX_DOUBLE

    def signed_int31(self):
        """
        将32位原始比特按二进制补码解释，范围 [-2^31, 2^31-1]
        Two's-complement reinterpretation of the 32 raw bits, in [-2^31, 2^31 - 1]
        """
        raw = self.next_u32()
        return raw - 2**32 if raw >= 2**31 else raw

    # ------------------------------------------------------------------
    # 批量接口 / Bulk interface (same sequence as repeated scalar calls)
    # ------------------------------------------------------------------

    def next_u32_array(self, n):
        """
        批量抽取 n 个32位整数 / Draw n unsigned 32-bit integers at once

        Args:
            n (int): 抽取数量 / Number of draws

        Returns:
            np.ndarray: uint64 数组，值域 [0, 2^32-1] / uint64 array with values in [0, 2^32 - 1]
        """
        n = int(n)
        if n <= 0:
            return np.zeros(0, dtype=np.uint64)
        steps = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        z = np.uint64(self.seed) + steps * np.uint64(GOLDEN_GAMMA)
        self.counter += n
        return _finalize_array(z) >> np.uint64(32)

    def uniform_unit_doubles(self, n):
        """批量版 uniform_unit_double / Bulk uniform_unit_double"""
        return self.next_u32_array(n).astype(np.float64) / U32_MAX_DOUBLE

    def signed_int31_array(self, n):
        """批量版 signed_int31 / Bulk signed_int31"""
        raw = self.next_u32_array(n).astype(np.int64)
        return np.where(raw >= 2**31, raw - 2**32, raw)

    def seek(self, counter):
        """
        将流定位到指定计数 / Position the stream at a given draw count

        Bulk consumers overdraw and then seek back so that the stream ends
        exactly where the equivalent scalar loop would have left it.
        """
        self.counter = int(counter)

    def uniform_index(self, size):
        """
        在 [0, size) 中均匀抽取索引 / Uniform index in [0, size)

        Uses floor(u * size) with u = raw / 2^32; valid for size <= 2^32.
        """
        return (self.next_u32() * int(size)) >> 32

    def uniform_index_array(self, n, size):
        """批量版 uniform_index / Bulk uniform_index"""
        if int(size) > 2**32:
            raise ValueError(f"size must be <= 2^32, got {size}")
        return (self.next_u32_array(n) * np.uint64(size)) >> np.uint64(32)

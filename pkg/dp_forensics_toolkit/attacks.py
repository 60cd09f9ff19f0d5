#!/usr/bin/env python3
"""
攻击套件 / Attack Suite

浮点不可行性检验（拉普拉斯与 Marsaglia 高斯）、增强检验、输入重建、
草图解码器以及安全聚合上的成员推断。每个检验都可作为审计器的成员检验。
Floating-point infeasibility tests (Laplace and Marsaglia Gaussian), boosted
tests, input reconstruction, sketch decoders and membership inference on
secure aggregation. Every test plugs into the auditor as a MembershipTest.

The infeasibility tests re-run the exact kernels of float_mech, so a value
the sampler can emit for a candidate mean always reproduces bit for bit.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List

import numpy as np

from .exceptions import (
    ConfigError,
    DegenerateObservation,
    PreconditionViolation,
    SaturatedSample,
    ShapeMismatch,
)
from .float_mech import (
    R_DENOMINATOR,
    U_DENOMINATOR,
    laplace_cdf,
    laplace_inverse_cdf,
    marsaglia_valid,
    marsaglia_z,
)
from .randomness import U32_MAX, U32_MAX_DOUBLE
from .sketch_mech import hadamard_entry, hash_bucket, obh_bit

DEFAULT_WINDOW = 80
PRESCAN_WINDOW = 16
FULL_SCAN_CHUNK = 32
PRESCAN_CHUNK = 2048
GAUSS_RULES = ("no_match", "any_mismatch")
PRIO_RULES = ("first_bit", "both_bits")

# (2^31 - 1)^2 / (2^62 - 1): sum of squared U over R
_U_OVER_R = (U_DENOMINATOR * U_DENOMINATOR) / R_DENOMINATOR


@dataclass(frozen=True)
class MembershipTest:
    """
    成员推断检验 φ：报告 → {0, 1} / Membership test φ: report -> {0, 1}

    0 表示输入为 x0，1 表示输入为 x1。
    0 means the input was x0, 1 means it was x1.
    """

    predict: Callable
    label: str

    def __call__(self, report):
        return int(self.predict(report))


class GuessSet:
    """
    候选值集合（有序、无重复）/ Ordered, duplicate-free candidate set
    """

    def __init__(self, candidates):
        candidates = [c for c in candidates]
        if not candidates:
            raise ConfigError("guess set is empty")
        seen = set()
        for c in candidates:
            if c in seen:
                raise ConfigError(f"duplicate guess '{c}'")
            seen.add(c)
        self.candidates = tuple(candidates)

    @classmethod
    def from_file(cls, path):
        """
        从 UTF-8 文本文件加载，每行一个候选 / Load from a UTF-8 file, one candidate per line

        Raises:
            ConfigError: 文件为空 / The file holds no candidates
        """
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        candidates = [line.strip() for line in lines if line.strip()]
        if not candidates:
            raise ConfigError(f"guesses file {path} holds no candidates")
        return cls(candidates)

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __contains__(self, item):
        return item in self.candidates

    def __repr__(self):
        return f"GuessSet({len(self)} candidates)"


def _bits64(x):
    return int(np.float64(x).view(np.uint64))


# ---------------------------------------------------------------------------
# 拉普拉斯不可行性检验 / Laplace infeasibility test
# ---------------------------------------------------------------------------

def _laplace_grid_value(k, mu, lam):
    """第 k 个网格点的采样器输出 / Sampler output for raw integer k"""
    return mu + laplace_inverse_cdf(k / U32_MAX_DOUBLE, lam)


def on_laplace_grid(y, mu, lam):
    """
    y 是否为某个原始整数 k 的采样器输出 / Is y the sampler output for some raw k?

    k ↦ μ + F^{-1}(k / (2^32 - 1)) 在 [1, 2^32 - 2] 上单调不减，二分找到第一个
    输出 ≥ y 的 k 后按位比较。
    k -> μ + F^{-1}(k / (2^32 - 1)) is non-decreasing on [1, 2^32 - 2]; bisect
    for the first k whose output is >= y, then compare bitwise around it.
    k = 0 and k = 2^32 - 1 saturate and are redrawn by the sampler.
    """
    lo, hi = 1, U32_MAX - 1
    if not (_laplace_grid_value(lo, mu, lam) <= y <= _laplace_grid_value(hi, mu, lam)):
        return False
    while lo < hi:
        mid = (lo + hi) // 2
        if _laplace_grid_value(mid, mu, lam) < y:
            lo = mid + 1
        else:
            hi = mid
    target = _bits64(y)
    for k in range(max(1, lo - 2), min(U32_MAX - 1, lo + 2) + 1):
        if _bits64(_laplace_grid_value(k, mu, lam)) == target:
            return True
    return False


def phi_lap(y, mu, lam):
    """
    μ 是否不可行 / Is μ infeasible for observation y?

    先计算 μ + F^{-1}(F(y - μ)) 并与 y 按位比较；往返不一致时再在 2^32 点
    均匀网格上查找能产生 y 的原始整数，两者都失败才判定不可行。
    First recomputes μ + F^{-1}(F(y - μ)) and compares bitwise with y. When the
    round trip disagrees, the 2^32-point uniform grid is searched for a raw
    integer that yields y; μ is infeasible only when both fail. Honest
    outputs therefore always pass.

    Args:
        y (float): 观测值 / Observation
        mu (float): 候选均值 / Candidate mean
        lam (float): 尺度 / Scale

    Returns:
        bool: True 表示不可行 / True when infeasible
    """
    if lam <= 0:
        raise PreconditionViolation(f"lambda must be > 0, got {lam}")
    if not math.isfinite(y):
        return True
    try:
        back = mu + laplace_inverse_cdf(laplace_cdf(y - mu, lam), lam)
        if _bits64(back) == _bits64(y):
            return False
    except SaturatedSample:
        pass
    return not on_laplace_grid(y, mu, lam)


def boosted_lap_test(samples, mu, lam):
    """任一样本不可行即为 True / True if any sample is infeasible"""
    samples = list(samples)
    if not samples:
        raise PreconditionViolation("boosted test needs at least one sample")
    return any(phi_lap(y, mu, lam) for y in samples)


def reconstruct_laplace_input(samples, domain, lam):
    """
    返回所有可行候选 / Return every feasible candidate

    Args:
        samples (list): 同一输入的多个拉普拉斯样本 / Laplace samples of one input
        domain (iterable): 候选整数 / Candidate integers
        lam (float): 每个样本的尺度 / Per-sample scale

    Returns:
        set: 可行候选集合 / Set of feasible candidates
    """
    samples = list(samples)
    if not samples:
        raise PreconditionViolation("reconstruction needs at least one sample")
    return {mu for mu in domain if not boosted_lap_test(samples, float(mu), lam)}


# ---------------------------------------------------------------------------
# 高斯不可行性检验 / Gaussian infeasibility test
# ---------------------------------------------------------------------------

def estimate_source_pair(z1, z2):
    """
    由 (Z1, Z2) 估计生成它们的整数对 (V1, V2) / Estimate the integer pair behind (Z1, Z2)

    R = exp(-(Z1² + Z2²) / 2 · (2^31-1)² / (2^62-1)) gives V1² + V2²; the
    larger-magnitude coordinate is solved from the radius and the other from
    the ratio, which keeps |ratio| <= 1 and covers a zero coordinate.
    Both estimates are truncated toward zero.
    """
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    r = np.exp(-0.5 * (z1 * z1 + z2 * z2) * _U_OVER_R)
    sq = r * R_DENOMINATOR
    swap = np.abs(z2) > np.abs(z1)
    big = np.where(swap, z2, z1)
    small = np.where(swap, z1, z2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(big != 0.0, small / big, 0.0)
    v_big = np.sign(big) * np.sqrt(sq / (1.0 + ratio * ratio))
    v_small = v_big * ratio
    v_big = np.trunc(v_big).astype(np.int64)
    v_small = np.trunc(v_small).astype(np.int64)
    return np.where(swap, v_small, v_big), np.where(swap, v_big, v_small)


def _scan_window(v1, v2, bits1, bits2, mu1, mu2, sigma, half_width):
    """
    在 (2w+1)² 窗口中重放采样器 / Replay the sampler over a (2w+1)^2 window

    Returns:
        tuple: (每对是否存在匹配, 每对是否存在不匹配) / (any match, any mismatch) per pair
    """
    offsets = np.arange(-half_width, half_width + 1, dtype=np.int64)
    c1 = (v1[:, None, None] + offsets[None, :, None]) + np.zeros((1, 1, offsets.size), dtype=np.int64)
    c2 = (v2[:, None, None] + offsets[None, None, :]) + np.zeros((1, offsets.size, 1), dtype=np.int64)
    c1 = c1.reshape(len(v1), -1)
    c2 = c2.reshape(len(v2), -1)
    valid = marsaglia_valid(c1, c2)
    z1, z2 = marsaglia_z(np.where(valid, c1, 1), np.where(valid, c2, 1))
    out1 = (mu1[:, None] + sigma * z1).astype(np.float32).view(np.uint32)
    out2 = (mu2[:, None] + sigma * z2).astype(np.float32).view(np.uint32)
    hit = valid & (out1 == bits1[:, None]) & (out2 == bits2[:, None])
    miss = valid & ~hit
    return hit.any(axis=1), miss.any(axis=1)


def phi_gauss_pairs(y1, y2, mu, sigma2, k=DEFAULT_WINDOW, rule="no_match"):
    """
    向量化的逐对不可行性检验 / Vectorised per-pair infeasibility test

    no_match: 窗口内没有任何满足前置条件的候选能按位复现 (y1, y2) 时不可行。
    any_mismatch: 窗口内任一满足前置条件的候选不能复现时即不可行。
    no_match: infeasible when no in-precondition candidate in the window
    reproduces (y1, y2) bitwise. any_mismatch: infeasible when any
    in-precondition candidate fails to reproduce it.

    A PRESCAN_WINDOW scan settles most pairs; only the rest are scanned over
    the full window, which gives the same verdicts as scanning it directly.
    Observations that are not binary32 values, non-finite, or have
    z1 = z2 = 0 are infeasible.

    Args:
        y1, y2 (array-like): 观测对 / Observation pairs
        mu (float | array-like): 候选均值（标量或每坐标）/ Candidate mean, scalar or per pair coordinate
        sigma2 (float): 方差 / Variance
        k (int): 窗口半宽 / Window half-width
        rule (str): no_match | any_mismatch

    Returns:
        np.ndarray: 每对的布尔判定 / Boolean verdict per pair
    """
    if not sigma2 > 0:
        raise PreconditionViolation(f"sigma2 must be > 0, got {sigma2}")
    if int(k) < 0:
        raise PreconditionViolation(f"window k must be >= 0, got {k}")
    if rule not in GAUSS_RULES:
        raise PreconditionViolation(f"unknown rule '{rule}', expected one of {GAUSS_RULES}")
    k = int(k)
    sigma = math.sqrt(sigma2)

    y1 = np.atleast_1d(np.asarray(y1, dtype=np.float64))
    y2 = np.atleast_1d(np.asarray(y2, dtype=np.float64))
    if y1.shape != y2.shape:
        raise ShapeMismatch("y1 and y2 must have the same shape")
    mu1 = np.broadcast_to(np.asarray(mu, dtype=np.float64), y1.shape)
    mu2 = np.broadcast_to(np.asarray(mu, dtype=np.float64), y2.shape)
    if y1.size > PRESCAN_CHUNK:
        return np.concatenate([
            phi_gauss_pairs(y1[i:i + PRESCAN_CHUNK], y2[i:i + PRESCAN_CHUNK], mu1[i:i + PRESCAN_CHUNK],
                            sigma2, k=k, rule=rule)
            for i in range(0, y1.size, PRESCAN_CHUNK)
        ])

    verdict = np.zeros(y1.shape, dtype=bool)
    with np.errstate(invalid="ignore", over="ignore"):
        f1 = y1.astype(np.float32)
        f2 = y2.astype(np.float32)
    unreachable = (
        ~np.isfinite(y1) | ~np.isfinite(y2)
        | (f1.astype(np.float64) != y1) | (f2.astype(np.float64) != y2)
    )
    z1 = (y1 - mu1) / sigma
    z2 = (y2 - mu2) / sigma
    unreachable |= (z1 == 0.0) & (z2 == 0.0)
    verdict[unreachable] = True

    todo = np.flatnonzero(~unreachable)
    if todo.size == 0:
        return verdict
    v1, v2 = estimate_source_pair(z1[todo], z2[todo])
    bits1 = f1[todo].view(np.uint32)
    bits2 = f2[todo].view(np.uint32)
    m1, m2 = mu1[todo], mu2[todo]

    pre = min(PRESCAN_WINDOW, k)
    hit, miss = _scan_window(v1, v2, bits1, bits2, m1, m2, sigma, pre)
    settled = hit if rule == "no_match" else miss
    if rule == "any_mismatch":
        verdict[todo[miss]] = True
    if pre < k:
        rest = np.flatnonzero(~settled)
        for start in range(0, rest.size, FULL_SCAN_CHUNK):
            idx = rest[start:start + FULL_SCAN_CHUNK]
            hit_full, miss_full = _scan_window(
                v1[idx], v2[idx], bits1[idx], bits2[idx], m1[idx], m2[idx], sigma, k
            )
            if rule == "no_match":
                hit[idx] = hit_full
            else:
                verdict[todo[idx[miss_full]]] = True
    if rule == "no_match":
        verdict[todo[~hit]] = True
    return verdict


def phi_gauss(y1, y2, mu, sigma2, k=DEFAULT_WINDOW, rule="no_match", strict=False):
    """
    单对高斯不可行性检验 / Gaussian infeasibility test on one pair

    A pair with z1 = z2 = 0 is unreachable from the sampler and counts as
    infeasible; with strict=True it raises instead so that callers can
    exclude it from their rate accounting.

    Returns:
        bool: True 表示 μ 不可行 / True when μ is infeasible

    Raises:
        DegenerateObservation: strict=True 且 z1 = z2 = 0 / strict=True and z1 = z2 = 0
    """
    if strict and float(y1) - float(mu) == 0.0 and float(y2) - float(mu) == 0.0:
        raise DegenerateObservation(f"pair ({y1}, {y2}) sits exactly on the mean {mu}")
    return bool(phi_gauss_pairs([y1], [y2], mu, sigma2, k=k, rule=rule)[0])


def boosted_gauss_test(samples, mu, sigma2, k=DEFAULT_WINDOW, rule="no_match"):
    """
    对相邻样本对取 OR / OR of phi_gauss over consecutive pairs

    Args:
        samples (array-like): 偶数长度的 binary32 样本 / Even-length binary32 samples
        mu (float | array-like): 候选均值 / Candidate mean
        sigma2 (float): 方差 / Variance
        k (int): 窗口半宽 / Window half-width

    Returns:
        bool
    """
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size < 2 or samples.size % 2:
        raise PreconditionViolation(f"boosted Gaussian test needs an even length >= 2, got {samples.size}")
    mu = np.broadcast_to(np.asarray(mu, dtype=np.float64), samples.shape)
    return bool(
        phi_gauss_pairs(samples[0::2], samples[1::2], mu[0::2], sigma2, k=k, rule=rule).any()
    )


def dzk_leader_test(leader_share, payload_candidate, sigma_ss, k=DEFAULT_WINDOW, rule="no_match"):
    """
    针对 Prio++ 领导者份额的 DZK 攻击 / DZK attack on a Prio++ leader share

    隐含噪声 candidate - share 必须是缺陷高斯采样器 (均值0, σ_SS) 可达的输出；
    非 binary32 的值不可达。
    The implied noise candidate - share must be a reachable output of the
    flawed Gaussian sampler with mean 0 and σ_SS; values that are not binary32
    are unreachable.

    Returns:
        bool: True 表示该候选载荷不可行 / True when the candidate payload is infeasible
    """
    share = np.asarray(leader_share, dtype=np.float64).ravel()
    candidate = np.broadcast_to(np.asarray(payload_candidate, dtype=np.float64), share.shape)
    implied = candidate - share
    with np.errstate(invalid="ignore", over="ignore"):
        if np.any(implied.astype(np.float32).astype(np.float64) != implied):
            return True
    usable = implied[: implied.size - implied.size % 2]
    if usable.size < 2:
        return False
    return boosted_gauss_test(usable, 0.0, float(sigma_ss) ** 2, k=k, rule=rule)


# ---------------------------------------------------------------------------
# 草图解码器 / Sketch decoders
# ---------------------------------------------------------------------------

def cms_decode(record, guesses, d) -> List:
    """
    CMS 解码：保留 Y[Hash_j(g) mod d] = 1 的候选
    CMS decoder: keep guesses whose hashed bucket is set

    Args:
        record (CmsRecord): 客户端记录 / Client record
        guesses (GuessSet | iterable): 候选 / Candidates
        d (int): 比特数 / Bit count

    Returns:
        list: 可信候选（保持原顺序）/ Plausible candidates in guess order
    """
    bits = np.asarray(record.bits)
    if bits.size != int(d):
        raise ShapeMismatch(f"record has {bits.size} bits, expected {d}")
    return [g for g in guesses if bits[hash_bucket(record.j, g, d)] == 1]


def hcms_decode(record, guesses, d) -> List:
    """HCMS 解码：Hadamard 元素等于 y 的候选 / HCMS decoder: Hadamard entry equals y"""
    if int(d) & (int(d) - 1):
        raise PreconditionViolation(f"HCMS decoding requires d to be a power of two, got {d}")
    return [g for g in guesses if hadamard_entry(record.l, hash_bucket(record.j, g, d), d) == record.y]


def obh_plausible(record, guess):
    """AES128(l; SHA256(g))[l] == Y"""
    return obh_bit(guess, record.l) == record.y


def obh_decode(record, guesses) -> List:
    """OneBitHistogram 解码 / OneBitHistogram decoder"""
    return [g for g in guesses if obh_plausible(record, g)]


# ---------------------------------------------------------------------------
# 安全聚合上的成员推断 / Membership inference on secure aggregation
# ---------------------------------------------------------------------------

def prio_membership_test(y, rule="first_bit"):
    """
    由重建的 2 位 symOHE 输出预测输入 / Predict the input from a reconstructed 2-bit symOHE output

    first_bit: 当 y[0] = 1 时预测 X=1 (返回0)。
    both_bits: 仅当 y = (0, 1) 时预测 X=2 (返回1)，其余情况（含平局）预测 X=1。
    first_bit predicts X=1 (returns 0) iff y[0] = 1. both_bits predicts X=2
    (returns 1) only on y = (0, 1); every other pattern, ties included,
    resolves to X=1. A tie-break on y[0] alone would send (0, 0) to X=2;
    here (0, 0) goes to X=1, so only the pattern whose likelihood ratio is
    e^{2ε} predicts X=2.

    Raises:
        ShapeMismatch: 长度不为 2 / Length other than 2
    """
    y = np.asarray(y).ravel()
    if y.size != 2:
        raise ShapeMismatch(f"membership test expects a 2-bit vector, got length {y.size}")
    if rule == "first_bit":
        return 0 if int(y[0]) == 1 else 1
    if rule == "both_bits":
        return 1 if (int(y[0]), int(y[1])) == (0, 1) else 0
    raise PreconditionViolation(f"unknown rule '{rule}', expected one of {PRIO_RULES}")


def reconstruct_symohe_input(y, d=None):
    """
    symOHE 报告的置位位置（1 基）/ Set-bit positions (1-based) of a symOHE report

    ε 较大时真实输入几乎总是唯一候选。
    With large ε the true input is almost always the unique candidate.
    """
    y = np.asarray(y).ravel()
    if d is not None and y.size != int(d):
        raise ShapeMismatch(f"report has {y.size} bits, expected {d}")
    return {int(i) + 1 for i in np.flatnonzero(y)}


def dp_disabled_membership_test(payload, x0_index):
    """
    关闭本地 DP 时的成员推断：载荷等于 x0 的独热编码则返回 0
    Membership inference without local DP: 0 iff the payload is x0's one-hot vector
    """
    payload = np.asarray(payload).ravel()
    expected = np.zeros(payload.size, dtype=payload.dtype)
    expected[int(x0_index) - 1] = 1
    return 0 if np.array_equal(payload, expected) else 1

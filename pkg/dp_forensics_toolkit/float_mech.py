#!/usr/bin/env python3
"""
浮点噪声机制 / Floating-Point Noise Mechanisms

忠实复现存在浮点漏洞的拉普拉斯逆变换采样器与 Marsaglia 极坐标高斯采样器，
以及基于它们的拉普拉斯机制与高斯机制。
Faithful reimplementation of the floating-point-vulnerable inverse-transform
Laplace sampler and the Marsaglia polar Gaussian sampler, plus the Laplace
and Gaussian mechanisms built on top of them.

All arithmetic is binary64 with round-to-nearest-even and the evaluation
order written next to each formula; the Gaussian sampler casts to binary32
at the very end. Attacks in attacks.py reuse these kernels verbatim.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NonFiniteInput, PreconditionViolation, SaturatedSample

MARSAGLIA_R_LIMIT = 2**62 - 1
# binary64 constants; 2^62 - 1 rounds to 2^62
R_DENOMINATOR = float(2**62 - 1)
U_DENOMINATOR = float(2**31 - 1)
INT31_MIN = -(2**31)
INT31_MAX = 2**31 - 1


def _sign(x):
    """数学符号函数，sign(0) = 0 / Mathematical sign with sign(0) = 0"""
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class LaplaceParams:
    """
    拉普拉斯噪声参数 / Laplace noise parameters

    Attributes:
        mu (float): 均值（真实查询值）/ Mean, i.e. the true query value
        lam (float): 尺度 λ > 0 / Scale λ > 0
    """

    mu: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise PreconditionViolation(f"lambda must be finite and > 0, got {self.lam}")
        if not math.isfinite(self.mu):
            raise NonFiniteInput(f"mu must be finite, got {self.mu}")

    @classmethod
    def from_range(cls, mu, value_range, epsilon):
        """
        由查询范围和 ε 构造，λ = Δ/ε / Build from query range and ε with λ = Δ/ε

        Args:
            mu (float): 查询值 / Query value
            value_range (float): 敏感度 Δ / Sensitivity Δ
            epsilon (float): 隐私参数 / Privacy parameter
        """
        if not (math.isfinite(epsilon) and epsilon > 0.0):
            raise PreconditionViolation(f"epsilon must be finite and > 0, got {epsilon}")
        return cls(mu=float(mu), lam=float(value_range) / float(epsilon))


@dataclass(frozen=True)
class GaussParams:
    """
    高斯噪声参数 / Gaussian noise parameters

    Attributes:
        mu (float): 均值 / Mean
        sigma (float): 标准差 σ > 0 / Standard deviation σ > 0
        dim (int): 向量维度 d ≥ 1 / Vector dimension d >= 1
    """

    mu: float
    sigma: float
    dim: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise PreconditionViolation(f"sigma must be finite and > 0, got {self.sigma}")
        if int(self.dim) < 1:
            raise PreconditionViolation(f"dim must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class Float32Pair:
    """Marsaglia 采样器输出的一对 binary32 / One binary32 pair from the Marsaglia sampler"""

    y1: np.float32
    y2: np.float32


# ---------------------------------------------------------------------------
# 拉普拉斯 / Laplace
# ---------------------------------------------------------------------------

def laplace_inverse_cdf(u, lam):
    """
    拉普拉斯逆CDF，按公式顺序逐步计算
    Laplace inverse CDF, evaluated operation by operation as written:
        sign(1/2 - u) * λ * ln(1 - 2|u - 1/2|)
    i.e. ((sign * λ) * log(1 - (2 * abs(u - 0.5)))).

    Args:
        u (float): [0,1] 内的均匀值 / Uniform value in [0, 1]
        lam (float): 尺度 / Scale

    Returns:
        float: 拉普拉斯噪声 / Laplace noise

    Raises:
        SaturatedSample: u ∈ {0, 1} 时 ln(0) = -∞ / ln(0) = -inf at u in {0, 1}
    """
    inner = 1.0 - 2.0 * abs(u - 0.5)
    if inner <= 0.0:
        raise SaturatedSample(f"inverse CDF saturates at u={u!r}")
    return _sign(0.5 - u) * lam * math.log(inner)


def laplace_cdf(y, lam):
    """
    拉普拉斯CDF：1/2 (1 + sign(y)(1 - e^{-|y|/λ}))
    Laplace CDF evaluated as 0.5 * (1 + sign(y) * (1 - exp(-|y| / λ)))
    """
    return 0.5 * (1.0 + _sign(y) * (1.0 - math.exp(-abs(y) / lam)))


def sample_laplace(stream, params):
    """
    逆变换采样的拉普拉斯机制输出 μ + F^{-1}(U)
    Inverse-transform Laplace sample μ + F^{-1}(U)

    U 恰为 0 或 1 时重新抽取（概率 2^-31）
    U is redrawn when it is exactly 0 or 1 (probability 2^-31)

    Args:
        stream (RngStream): 随机流 / Random stream
        params (LaplaceParams): 参数 / Parameters

    Returns:
        float: 样本 / Sample
    """
    while True:
        u = stream.uniform_unit_double()
        try:
            return params.mu + laplace_inverse_cdf(u, params.lam)
        except SaturatedSample:
            continue


def number_randomizer(value, epsilon, value_range, stream):
    """
    NumberRandomizer：q(x) + Lap(Δ/ε) / NumberRandomizer: q(x) + Lap(Δ/ε)
    """
    return sample_laplace(stream, LaplaceParams.from_range(value, value_range, epsilon))


# ---------------------------------------------------------------------------
# Marsaglia 极坐标法 / Marsaglia polar method
# ---------------------------------------------------------------------------

def marsaglia_valid(v1, v2):
    """
    前置条件掩码：0 < v1² + v2² ≤ 2^62 - 1 且两者在 int32 范围内
    Precondition mask: 0 < v1^2 + v2^2 <= 2^62 - 1 with both in the int32 range
    """
    v1 = np.asarray(v1, dtype=np.int64)
    v2 = np.asarray(v2, dtype=np.int64)
    in_range = (v1 >= INT31_MIN) & (v1 <= INT31_MAX) & (v2 >= INT31_MIN) & (v2 <= INT31_MAX)
    v1c = np.clip(v1, INT31_MIN, INT31_MAX)
    v2c = np.clip(v2, INT31_MIN, INT31_MAX)
    sq = (v1c * v1c).astype(np.uint64) + (v2c * v2c).astype(np.uint64)
    return in_range & (sq > np.uint64(0)) & (sq <= np.uint64(MARSAGLIA_R_LIMIT))


def marsaglia_z(v1, v2):
    """
    标准正态对的向量化核 / Vectorised kernel for the standard-normal pair

    R = (v1² + v2²) / (2^62 - 1);  U_i = v_i / (2^31 - 1);
    Z_i = (U_i / sqrt(R)) * sqrt(-2 * log(R))

    The integer sum of squares is exact (uint64) and converted to binary64
    once. Callers must mask out pairs failing marsaglia_valid.

    Args:
        v1, v2 (array-like): 有符号整数 / Signed integers

    Returns:
        tuple: (z1, z2) binary64 数组 / binary64 arrays
    """
    v1 = np.asarray(v1, dtype=np.int64)
    v2 = np.asarray(v2, dtype=np.int64)
    sq = (v1 * v1).astype(np.uint64) + (v2 * v2).astype(np.uint64)
    r = sq.astype(np.float64) / R_DENOMINATOR
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.sqrt(-2.0 * np.log(r))
        root_r = np.sqrt(r)
        z1 = (v1.astype(np.float64) / U_DENOMINATOR / root_r) * radial
        z2 = (v2.astype(np.float64) / U_DENOMINATOR / root_r) * radial
    return z1, z2


def to_float32(mu, sigma, z):
    """μ + σZ 以 binary64 计算后舍入到 binary32 / μ + σZ in binary64, rounded to binary32"""
    return (mu + sigma * z).astype(np.float32)


def marsaglia_pair(v1, v2, mu, sigma):
    """
    Marsaglia 极坐标采样器的单次变换 / One transform of the Marsaglia polar sampler

    Args:
        v1, v2 (int): [-2^31, 2^31-1] 内的整数 / Integers in [-2^31, 2^31 - 1]
        mu (float): 均值 / Mean
        sigma (float): 标准差 / Standard deviation

    Returns:
        Float32Pair: (μ + σZ1, μ + σZ2) 舍入到 binary32 / rounded to binary32

    Raises:
        PreconditionViolation: v1 = v2 = 0 或 v1² + v2² > 2^62 - 1
    """
    if not bool(marsaglia_valid(v1, v2)):
        raise PreconditionViolation(
            f"marsaglia_pair requires 0 < v1^2 + v2^2 <= 2^62 - 1, got v1={v1}, v2={v2}"
        )
    z1, z2 = marsaglia_z(np.array([v1]), np.array([v2]))
    y1 = to_float32(float(mu), float(sigma), z1)[0]
    y2 = to_float32(float(mu), float(sigma), z2)[0]
    return Float32Pair(y1=y1, y2=y2)


def standard_normal_pairs(stream, n_pairs):
    """
    顺序抽取 n_pairs 个被接受的 (v1, v2) 提案并返回 Z 序列
    Draw n_pairs accepted (v1, v2) proposals in order and return the Z sequence

    Proposals are consumed strictly sequentially; rejected ones (outside the
    disc or at the origin) are skipped. The stream is left positioned right
    after the last accepted proposal.

    Args:
        stream (RngStream): 随机流 / Random stream
        n_pairs (int): 所需的对数 / Number of pairs required

    Returns:
        tuple: (z 数组长度 2*n_pairs, 提案总数) / (z array of length 2*n_pairs, proposals used)
    """
    accepted_v1, accepted_v2 = [], []
    have = 0
    proposals_used = 0
    while have < n_pairs:
        start = stream.counter
        batch = max(8, int((n_pairs - have) * 1.3) + 8)
        raw = stream.signed_int31_array(2 * batch)
        v1, v2 = raw[0::2], raw[1::2]
        valid = marsaglia_valid(v1, v2)
        positions = np.flatnonzero(valid)[: n_pairs - have]
        if len(positions) == 0:
            proposals_used += batch
            continue
        accepted_v1.append(v1[positions])
        accepted_v2.append(v2[positions])
        have += len(positions)
        if have >= n_pairs:
            last = int(positions[-1])
            stream.seek(start + 2 * (last + 1))
            proposals_used += last + 1
        else:
            proposals_used += batch
    v1 = np.concatenate(accepted_v1) if accepted_v1 else np.zeros(0, dtype=np.int64)
    v2 = np.concatenate(accepted_v2) if accepted_v2 else np.zeros(0, dtype=np.int64)
    z1, z2 = marsaglia_z(v1, v2)
    z = np.empty(2 * n_pairs, dtype=np.float64)
    z[0::2] = z1
    z[1::2] = z2
    return z, proposals_used


def sample_gaussian_vector(stream, params):
    """
    GaussianPRNG：d 个 binary32 高斯样本 / GaussianPRNG: d binary32 Gaussian samples

    奇数维时丢弃最后一对的第二个样本
    For odd d the second element of the final pair is discarded.

    Args:
        stream (RngStream): 随机流 / Random stream
        params (GaussParams): 参数 / Parameters

    Returns:
        np.ndarray: float32 向量 / float32 vector of length dim
    """
    dim = int(params.dim)
    z, _ = standard_normal_pairs(stream, (dim + 1) // 2)
    return to_float32(float(params.mu), float(params.sigma), z[:dim])


def clip_to_unit_ball(x):
    """
    X / max(1, ‖X‖) / Scale X into the unit L2 ball

    Raises:
        NonFiniteInput: 含 NaN/∞ / on NaN or infinity
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise PreconditionViolation("input must be a non-empty vector")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("input vector contains NaN or infinity")
    norm = float(np.linalg.norm(x))
    if norm > 1.0:
        return x / norm
    return x


def gaussian_mechanism(x, sigma, stream):
    """
    Prio++ 的高斯机制 X/max(1,‖X‖) + N(0, σ²I_d)
    Gaussian mechanism used by Prio++: X / max(1, ||X||) + N(0, σ² I_d)

    加法在 binary64 中进行，再舍入到 binary32（与采样器最终转换一致）
    The addition is done in binary64 and then rounded to binary32, matching
    the sampler's final cast.

    Args:
        x (array-like): 长度 d 的输入向量 / Input vector of length d
        sigma (float): 噪声标准差 / Noise standard deviation
        stream (RngStream): 随机流 / Random stream

    Returns:
        np.ndarray: float32 输出向量 / float32 output vector
    """
    clipped = clip_to_unit_ball(x)
    params = GaussParams(mu=0.0, sigma=float(sigma), dim=clipped.size)
    z, _ = standard_normal_pairs(stream, (params.dim + 1) // 2)
    return to_float32(clipped, params.sigma, z[: params.dim])

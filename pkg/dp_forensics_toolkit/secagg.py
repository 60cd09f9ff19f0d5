#!/usr/bin/env python3
"""
安全聚合模拟器 / Secure Aggregation Simulator

单进程模拟 Prio 风格的 客户端/领导者/辅助者 数据流：基于有限域的加性秘密分享、
Prio++ 的高斯秘密分享、逐方聚合，以及关闭本地差分隐私的配置。
Single-process simulation of the Prio-style client / leader / helper
dataflow: additive field secret sharing, Prio++ Gaussian secret sharing,
per-side aggregation and the configurations with local DP disabled.

Each role's view is an explicit value so that the colluding-endpoint view
(both shares at one server) is a first-class query via side="combined".
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from Crypto.Util.number import isPrime

from .exceptions import (
    NonFiniteInput,
    OutOfDomain,
    PayloadOutOfField,
    PreconditionViolation,
    ShapeMismatch,
)
from .float_mech import GaussParams, clip_to_unit_ball, gaussian_mechanism, sample_gaussian_vector
from .randomness import RngStream
from .sketch_mech import SketchConfig, one_hot, sym_ohe

MODES = ("prio_symohe", "prio_plusplus", "dp_disabled", "plusplus_dp_disabled")
FIELD_MODES = ("prio_symohe", "dp_disabled")
GAUSS_MODES = ("prio_plusplus", "plusplus_dp_disabled")
SIDES = ("leader", "helper", "combined")
GAUSS_RECONSTRUCT_TOL = 2.0**-20


@dataclass
class FieldShareBundle:
    """
    有限域份额对 / Pair of field-element shares

    Attributes:
        leader_share (np.ndarray): 领导者份额 / Leader share, int64 entries in [0, p)
        helper_share (np.ndarray): 辅助者份额 / Helper share, int64 entries in [0, p)
        p (int): 域素数 / Field prime
    """

    leader_share: np.ndarray
    helper_share: np.ndarray
    p: int

    @property
    def dim(self):
        return int(self.leader_share.size)


@dataclass
class GaussShareBundle:
    """
    Prio++ 高斯份额：(Y - V, seed) / Prio++ Gaussian shares (Y - V, seed)

    Attributes:
        leader_share (np.ndarray): binary64 向量 Y - V / binary64 vector Y - V
        helper_seed (int): 生成 V 的种子 / Seed that expands to V
        sigma_ss (float): 秘密分享标准差 / Secret-sharing standard deviation
    """

    leader_share: np.ndarray
    helper_seed: int
    sigma_ss: float

    @property
    def dim(self):
        return int(self.leader_share.size)


@dataclass
class SecAggConfig:
    """
    安全聚合模拟配置 / Secure aggregation simulation config

    Attributes:
        mode (str): prio_symohe | prio_plusplus | dp_disabled | plusplus_dp_disabled
        epsilon (float): symOHE 隐私参数（dp_disabled 忽略）/ symOHE ε (ignored when DP is off)
        d (int): 载荷维度 / Payload dimension
        p (int): 域素数 / Field prime
        sigma (float): Prio++ 本地高斯噪声 / Prio++ local Gaussian noise
        sigma_ss (float): 秘密分享噪声 / Secret-sharing noise
        n_clients (int): 客户端数量 / Number of clients
        inputs (list): 可选的客户端输入 / Optional per-client inputs
    """

    mode: str = "dp_disabled"
    epsilon: float = 1.0
    d: int = 2
    p: int = 2**31 - 1
    sigma: float = 1.0
    sigma_ss: float = 1.0
    n_clients: int = 10
    inputs: Optional[list] = None
    k: int = 80

    def __post_init__(self):
        if self.mode not in MODES:
            raise PreconditionViolation(f"unknown SecAgg mode '{self.mode}', expected one of {MODES}")
        if int(self.d) < 1:
            raise PreconditionViolation(f"d must be >= 1, got {self.d}")
        if int(self.n_clients) < 1:
            raise PreconditionViolation(f"n_clients must be >= 1, got {self.n_clients}")
        if self.mode in FIELD_MODES:
            if not (2 < int(self.p) <= 2**32 and isPrime(int(self.p))):
                raise PreconditionViolation(f"field prime must be an odd prime <= 2^32, got {self.p}")
            if int(self.p) <= int(self.n_clients):
                raise PreconditionViolation(
                    f"field prime {self.p} must exceed n_clients={self.n_clients}"
                )
        if self.mode == "prio_plusplus" and not (self.sigma_ss > 0 and math.isfinite(self.sigma_ss)):
            raise PreconditionViolation(f"sigma_ss must be > 0, got {self.sigma_ss}")
        if self.inputs is not None and len(self.inputs) != int(self.n_clients):
            raise PreconditionViolation(
                f"inputs has {len(self.inputs)} entries but n_clients={self.n_clients}"
            )


# ---------------------------------------------------------------------------
# 有限域秘密分享 / Field secret sharing
# ---------------------------------------------------------------------------

def field_share(payload, p, stream):
    """
    将载荷加性分享为两份 / Additively split a payload into two shares

    Args:
        payload (array-like): [0, p) 内的整数 / Integers in [0, p)
        p (int): 域素数 / Field prime
        stream (RngStream): 随机流 / Random stream

    Returns:
        FieldShareBundle: 领导者份额均匀分布 / Leader share uniform over the field

    Raises:
        PayloadOutOfField: 载荷元素越界 / Payload entry outside [0, p)
    """
    payload = np.asarray(payload, dtype=np.int64).ravel()
    if payload.size and (payload.min() < 0 or payload.max() >= p):
        raise PayloadOutOfField(f"payload entries must lie in [0, {p})")
    leader = stream.uniform_index_array(payload.size, p).astype(np.int64)
    helper = np.mod(payload - leader, p)
    return FieldShareBundle(leader_share=leader, helper_share=helper, p=int(p))


def field_reconstruct(bundle):
    """
    由两份重建载荷 / Reconstruct the payload from both shares

    Raises:
        ShapeMismatch: 份额长度不一致 / Shares differ in length
    """
    if bundle.leader_share.shape != bundle.helper_share.shape:
        raise ShapeMismatch(
            f"leader share {bundle.leader_share.shape} vs helper share {bundle.helper_share.shape}"
        )
    return np.mod(bundle.leader_share + bundle.helper_share, bundle.p)


def prio_client_submit(x, config, stream):
    """
    Prio 客户端提交 / Prio client submission

    prio_symohe 模式先运行 symOHE；dp_disabled 模式直接分享原始独热向量。
    prio_symohe runs symOHE first; dp_disabled shares the raw one-hot vector.

    Args:
        x (int): 1 基输入 / One-based input in [1, d]
        config (SecAggConfig): 配置 / Config
        stream (RngStream): 随机流 / Random stream

    Returns:
        FieldShareBundle
    """
    if not (1 <= int(x) <= config.d):
        raise OutOfDomain(f"client input {x} outside [1, {config.d}]")
    if config.mode == "prio_symohe":
        y = sym_ohe(int(x), SketchConfig(epsilon=config.epsilon, d=config.d), stream)
    elif config.mode == "dp_disabled":
        y = one_hot(int(x) - 1, config.d)
    else:
        raise PreconditionViolation(f"mode '{config.mode}' does not use field sharing")
    return field_share(y, config.p, stream)


# ---------------------------------------------------------------------------
# 高斯秘密分享 / Gaussian secret sharing
# ---------------------------------------------------------------------------

def gauss_expand(seed, sigma_ss, dim):
    """由种子展开 V / Expand V from its seed"""
    params = GaussParams(mu=0.0, sigma=sigma_ss, dim=dim)
    return sample_gaussian_vector(RngStream(seed), params)


def gauss_secret_share(y, sigma_ss, stream):
    """
    Prio++ 高斯秘密分享 / Prio++ Gaussian secret sharing

    V 由同一个存在浮点缺陷的 Marsaglia 采样器展开，领导者份额为
    float64(y) - float32(V)。
    V is expanded with the same flawed Marsaglia sampler; the leader share is
    float64(y) - float32(V).

    Args:
        y (array-like): 有限实向量 / Finite real vector
        sigma_ss (float): 秘密分享标准差 / Secret-sharing standard deviation
        stream (RngStream): 随机流 / Random stream

    Returns:
        GaussShareBundle
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput("payload contains NaN or infinity")
    if not (sigma_ss > 0 and math.isfinite(sigma_ss)):
        raise PreconditionViolation(f"sigma_ss must be > 0, got {sigma_ss}")
    seed = stream.next_u64()
    v = gauss_expand(seed, sigma_ss, y.size).astype(np.float64)
    return GaussShareBundle(leader_share=y - v, helper_seed=seed, sigma_ss=float(sigma_ss))


def gauss_reconstruct(bundle):
    """(Y - V) + V，仅在舍入误差内还原 Y / Recovers Y up to rounding"""
    v = gauss_expand(bundle.helper_seed, bundle.sigma_ss, bundle.dim).astype(np.float64)
    return bundle.leader_share + v


def plusplus_client_submit(x, config, stream):
    """
    Prio++ 客户端提交 / Prio++ client submission

    prio_plusplus 先运行本地高斯机制；plusplus_dp_disabled 只裁剪到单位球。
    prio_plusplus applies the local Gaussian mechanism first;
    plusplus_dp_disabled only clips to the unit ball.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != config.d:
        raise ShapeMismatch(f"client vector has length {x.size}, expected {config.d}")
    if config.mode == "prio_plusplus":
        y = gaussian_mechanism(x, config.sigma, stream)
    elif config.mode == "plusplus_dp_disabled":
        y = clip_to_unit_ball(x)
    else:
        raise PreconditionViolation(f"mode '{config.mode}' does not use Gaussian sharing")
    return gauss_secret_share(y, config.sigma_ss, stream)


def reconstruct(bundle):
    """按份额类型重建单个提交 / Reconstruct one submission of either share type"""
    if isinstance(bundle, FieldShareBundle):
        return field_reconstruct(bundle)
    return gauss_reconstruct(bundle)


# ---------------------------------------------------------------------------
# 聚合 / Aggregation
# ---------------------------------------------------------------------------

def aggregate(bundles, side="combined"):
    """
    按参与方累加份额 / Sum shares per side

    Args:
        bundles (list): 同类型、同形状的份额包，按客户端编号排序
                        / Homogeneous bundles ordered by client index
        side (str): leader | helper | combined

    Returns:
        np.ndarray: 域模式下为模 p 的和，高斯模式下为 binary64 和
                    / Sums mod p in field mode, binary64 sums in Gaussian mode

    Raises:
        ShapeMismatch: 空列表、类型或形状不一致 / Empty, mixed or misshapen bundles
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got '{side}'")
    if not bundles:
        raise ShapeMismatch("cannot aggregate an empty list of bundles")
    kind = type(bundles[0])
    dim = bundles[0].dim
    for b in bundles:
        if type(b) is not kind or b.dim != dim:
            raise ShapeMismatch("bundles must share one type and one dimension")

    if kind is FieldShareBundle:
        p = bundles[0].p
        if any(b.p != p for b in bundles):
            raise ShapeMismatch("bundles use different field primes")
        leader = np.zeros(dim, dtype=np.int64)
        helper = np.zeros(dim, dtype=np.int64)
        for b in bundles:
            if b.helper_share.shape != b.leader_share.shape:
                raise ShapeMismatch("leader and helper shares differ in shape")
            leader = np.mod(leader + b.leader_share, p)
            helper = np.mod(helper + b.helper_share, p)
        if side == "leader":
            return leader
        if side == "helper":
            return helper
        return np.mod(leader + helper, p)

    leader = np.zeros(dim, dtype=np.float64)
    helper = np.zeros(dim, dtype=np.float64)
    for b in bundles:
        leader = leader + b.leader_share
        helper = helper + gauss_expand(b.helper_seed, b.sigma_ss, dim).astype(np.float64)
    if side == "leader":
        return leader
    if side == "helper":
        return helper
    return leader + helper


@dataclass
class ClientView:
    """单个客户端在各方视图中的记录 / One client's entry across role views"""

    index: int
    raw_input: object
    payload: np.ndarray
    bundle: object
    reconstructed: np.ndarray = field(default=None)

    @property
    def exact(self):
        """
        合谋端是否还原出原始载荷 / Whether the colluding view recovers the raw payload

        Field payloads must match exactly; Gaussian shares are real numbers,
        so they are compared within GAUSS_RECONSTRUCT_TOL.
        """
        if isinstance(self.bundle, FieldShareBundle):
            return bool(np.array_equal(self.reconstructed, self.payload))
        return bool(np.allclose(self.reconstructed, self.payload, rtol=0.0, atol=GAUSS_RECONSTRUCT_TOL))


class SecAggSimulator:
    """
    客户端/领导者/辅助者 数据流模拟器 / Client, leader and helper dataflow simulator

    Every client i draws from RngStream.derive(master_seed, i), so the views
    do not depend on submission order.
    """

    DEFAULT_SECAGG_PARAMS = {
        "p": 2**31 - 1,      # 梅森素数 / Mersenne prime, fits a 64-bit multiply
        "sigma": 1.0,        # Prio++ 本地噪声 / Prio++ local noise
        "sigma_ss": 1.0,     # 秘密分享噪声 / Secret-sharing noise
        "n_clients": 10,
        "k": 80,             # DZK 攻击窗口 / DZK attack window
    }

    def __init__(self, config, master_seed=0):
        """
        Args:
            config (SecAggConfig): 模拟配置 / Simulation config
            master_seed (int): 主种子 / Master seed
        """
        self.config = config
        self.master_seed = int(master_seed)
        self.logger = logging.getLogger(__name__)

    def client_inputs(self) -> List:
        """
        每个客户端的原始输入 / Raw input of every client

        Field modes default to x_i = 1 + (i mod d); Gaussian modes alternate
        the zero vector and the unit vector 1/sqrt(d) by client parity.
        """
        cfg = self.config
        if cfg.inputs is not None:
            return list(cfg.inputs)
        if cfg.mode in FIELD_MODES:
            return [1 + (i % cfg.d) for i in range(cfg.n_clients)]
        unit = np.full(cfg.d, 1.0 / math.sqrt(cfg.d))
        zero = np.zeros(cfg.d)
        return [zero if i % 2 == 0 else unit for i in range(cfg.n_clients)]

    def submit(self, index, x):
        """客户端 index 提交 / Submission of client `index`"""
        stream = RngStream.derive(self.master_seed, index)
        if self.config.mode in FIELD_MODES:
            bundle = prio_client_submit(x, self.config, stream)
            payload = one_hot(int(x) - 1, self.config.d).astype(np.int64)
        else:
            bundle = plusplus_client_submit(x, self.config, stream)
            payload = clip_to_unit_ball(x)
        return ClientView(index=index, raw_input=x, payload=payload, bundle=bundle)

    def run(self):
        """
        运行所有客户端并聚合 / Run every client and aggregate

        Returns:
            dict: clients (ClientView 列表), leader/helper/combined 聚合
        """
        cfg = self.config
        self.logger.info(f"Simulating {cfg.n_clients} clients in mode {cfg.mode}")
        clients = []
        for i, x in enumerate(self.client_inputs()):
            view = self.submit(i, x)
            view.reconstructed = reconstruct(view.bundle)
            clients.append(view)

        bundles = [c.bundle for c in clients]
        exact = sum(c.exact for c in clients)
        self.logger.info(f"{exact}/{len(clients)} clients exactly reconstructed from the combined view")
        return {
            "clients": clients,
            "leader": aggregate(bundles, "leader"),
            "helper": aggregate(bundles, "helper"),
            "combined": aggregate(bundles, "combined"),
        }

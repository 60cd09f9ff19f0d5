#!/usr/bin/env python3
"""
贝叶斯 f-DP 审计器 / Bayesian f-DP Auditor

权衡曲线族、f-DP 与 (ε,δ)-DP 之间的共轭转换、基于 Beta 后验的拒绝检验，
以及端到端的 ε 下界估计。
Trade-off curve families, the conversion between f-DP and (ε, δ)-DP, Beta
posterior rejection tests and the end-to-end ε lower-bound estimator.

Normal CDF and quantile come from scipy.special (ndtr / ndtri).
"""

import concurrent.futures
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional

import numpy as np
import pandas as pd
from scipy import optimize
from scipy.special import ndtr, ndtri

from .exceptions import DegenerateSplit, PreconditionViolation, Unbounded
from .randomness import RngStream, derive_seed

FAMILIES = ("eps_delta", "gaussian", "laplace")

# 搜索上限；超出即视为饱和 / Search ceilings; reaching them flags saturation
THETA_MAX = {"gaussian": 32.0, "laplace": 32.0, "eps_delta": 64.0}
EPS_MAX = 64.0
EPS_TOL = 1e-6
THETA_TOL = 1e-6
DELTA_TOL = 1e-12
POSTERIOR_MARGIN = 1e-9
DEFAULT_MC_SAMPLES = 100_000

# 审计内部流的派生编号，远离运行编号 / Derivation indices kept apart from run indices
SPLIT_STREAM_INDEX = 2**64 - 1
MC_STREAM_INDEX = 2**64 - 2

_LOG_ALPHA_GRID = np.linspace(-300.0, 0.0, 601)


class TradeoffCurve:
    """
    权衡曲线族成员 / Member of a trade-off curve family

    eps_delta: f(α) = max(0, 1 - δ - e^θ α, e^-θ (1 - δ - α))
    gaussian:  f(α) = Φ(Φ^-1(1 - α) - θ)
    laplace:   f(α) = 1 - e^θ α            for α < e^-θ / 2
                      e^-θ / (4α)          for e^-θ / 2 <= α <= 1/2
                      e^-θ (1 - α)         for α > 1/2

    eval 和 complement 均支持 numpy 数组。
    eval and complement both accept numpy arrays.
    """

    def __init__(self, family, theta, delta=0.0):
        """
        Args:
            family (str): eps_delta | gaussian | laplace
            theta (float): ε（eps_delta）或平移 μ / ε for eps_delta, shift μ otherwise
            delta (float): eps_delta 的 δ / δ of the eps_delta family
        """
        if family not in FAMILIES:
            raise PreconditionViolation(f"unknown trade-off family '{family}', expected one of {FAMILIES}")
        if not theta >= 0:
            raise PreconditionViolation(f"family parameter must be >= 0, got {theta}")
        if not 0.0 <= delta <= 1.0:
            raise PreconditionViolation(f"delta must lie in [0, 1], got {delta}")
        self.family = family
        self.theta = float(theta)
        self.delta = float(delta)

    def __repr__(self):
        if self.family == "eps_delta":
            return f"TradeoffCurve(eps_delta, eps={self.theta:g}, delta={self.delta:g})"
        return f"TradeoffCurve({self.family}, mu={self.theta:g})"

    @staticmethod
    def _out(value, alpha):
        return float(value) if np.ndim(alpha) == 0 else value

    def eval(self, alpha):
        """β = f(α)"""
        a = np.asarray(alpha, dtype=np.float64)
        t = self.theta
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.family == "gaussian":
                value = ndtr(-ndtri(a) - t)
            elif self.family == "laplace":
                e = math.exp(-t)
                value = np.where(
                    a < e / 2.0,
                    1.0 - math.exp(t) * a,
                    np.where(a <= 0.5, e / (4.0 * a), e * (1.0 - a)),
                )
            else:
                d = self.delta
                value = np.maximum(0.0, np.maximum(1.0 - d - math.exp(t) * a, math.exp(-t) * (1.0 - d - a)))
        return self._out(value, alpha)

    __call__ = eval

    def complement(self, alpha):
        """1 - f(α)，对小 α 数值稳定 / 1 - f(α), computed stably for small α"""
        a = np.asarray(alpha, dtype=np.float64)
        t = self.theta
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.family == "gaussian":
                value = ndtr(ndtri(a) + t)
            elif self.family == "laplace":
                e = math.exp(-t)
                value = np.where(
                    a < e / 2.0,
                    math.exp(t) * a,
                    np.where(a <= 0.5, 1.0 - e / (4.0 * a), 1.0 - e * (1.0 - a)),
                )
            else:
                d = self.delta
                value = np.minimum(1.0, np.minimum(d + math.exp(t) * a, 1.0 - math.exp(-t) * (1.0 - d - a)))
        return self._out(value, alpha)


def f_eps_delta(eps, delta, alpha):
    """(ε, δ)-DP 的权衡函数 / Trade-off function of (ε, δ)-DP"""
    return TradeoffCurve("eps_delta", eps, delta).eval(alpha)


def f_gauss(mu, alpha):
    """N(0,1) 与 N(μ,1) 的权衡函数 / Trade-off between N(0,1) and N(μ,1)"""
    return TradeoffCurve("gaussian", mu).eval(alpha)


def f_laplace(mu, alpha):
    """Lap(0,1) 与 Lap(μ,1) 的权衡函数 / Trade-off between Lap(0,1) and Lap(μ,1)"""
    return TradeoffCurve("laplace", mu).eval(alpha)


# ---------------------------------------------------------------------------
# f-DP 与 (ε,δ)-DP 的转换 / Conversion between f-DP and (ε, δ)-DP
# ---------------------------------------------------------------------------

def _privacy_gap(curve, eps, alpha):
    return curve.complement(alpha) - np.asarray(alpha, dtype=np.float64) * math.exp(eps)


def delta_of_f(curve, eps):
    """
    δ_f(ε) = sup_α 1 - α e^ε - f(α)

    The objective is concave in α and hence unimodal in log10 α. A grid over
    log10 α in [-300, 0] brackets the maximum, bounded Brent refines it, and
    the endpoints α = 0 and α = 1 are checked explicitly.

    Args:
        curve (TradeoffCurve): 权衡曲线 / Trade-off curve
        eps (float): ε ≥ 0

    Returns:
        float: [0, 1] 内的 δ / δ clamped to [0, 1]
    """
    if eps < 0:
        raise PreconditionViolation(f"eps must be >= 0, got {eps}")
    values = _privacy_gap(curve, eps, 10.0 ** _LOG_ALPHA_GRID)
    i = int(np.argmax(values))
    lo = _LOG_ALPHA_GRID[max(i - 1, 0)]
    hi = _LOG_ALPHA_GRID[min(i + 1, _LOG_ALPHA_GRID.size - 1)]
    result = optimize.minimize_scalar(
        lambda t: -float(_privacy_gap(curve, eps, 10.0 ** t)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best = max(
        float(values[i]),
        -float(result.fun),
        float(_privacy_gap(curve, eps, 0.0)),
        float(_privacy_gap(curve, eps, 1.0)),
    )
    return min(1.0, max(0.0, best))


def eps_of_f(curve, delta, eps_max=EPS_MAX):
    """
    最小的 ε 使 δ_f(ε) ≤ δ / Smallest ε with δ_f(ε) <= δ

    δ_f is non-increasing in ε, so bisection on [0, eps_max] to EPS_TOL is
    well posed; δ = 0 is accepted for pure-ε families.

    Raises:
        Unbounded: δ_f(eps_max) > δ
    """
    if not 0.0 <= delta < 1.0:
        raise PreconditionViolation(f"delta must lie in [0, 1), got {delta}")
    if delta_of_f(curve, 0.0) <= delta + DELTA_TOL:
        return 0.0
    if delta_of_f(curve, eps_max) > delta + DELTA_TOL:
        raise Unbounded(f"{curve!r} needs eps > {eps_max} at delta={delta}")
    lo, hi = 0.0, float(eps_max)
    while hi - lo > EPS_TOL:
        mid = 0.5 * (lo + hi)
        if delta_of_f(curve, mid) <= delta + DELTA_TOL:
            hi = mid
        else:
            lo = mid
    return hi


def gaussian_claim_epsilon(sigma, sensitivity=1.0, delta=1e-5):
    """
    高斯机制宣称的 ε（μ = Δ/σ 的高斯权衡在 δ 处的转换）
    Advertised ε of a Gaussian mechanism: μ = Δ/σ converted at δ
    """
    return eps_of_f(TradeoffCurve("gaussian", float(sensitivity) / float(sigma)), delta)


def laplace_claim_epsilon(lam, sensitivity=1.0):
    """拉普拉斯机制宣称的 ε = Δ/λ / Advertised ε = Δ/λ of a Laplace mechanism"""
    return float(sensitivity) / float(lam)


def gaussian_mu_for_epsilon(eps, delta):
    """
    在 δ 处转换为 ε 的高斯平移 μ / Gaussian shift μ whose conversion at δ equals ε

    eps_of_f is strictly increasing in μ, so Brent's method on μ in
    [0, THETA_MAX] finds the unique root.
    """
    if eps <= 0:
        return 0.0

    def gap(mu):
        try:
            return eps_of_f(TradeoffCurve("gaussian", mu), delta) - eps
        except Unbounded:
            return EPS_MAX - eps

    return optimize.brentq(gap, 0.0, THETA_MAX["gaussian"], xtol=1e-9)


def claimed_curve(family, claimed_epsilon, delta=0.0):
    """
    宣称隐私保证对应的权衡曲线 / Trade-off curve of the advertised guarantee
    """
    if family == "gaussian":
        return TradeoffCurve("gaussian", gaussian_mu_for_epsilon(claimed_epsilon, delta))
    if family == "laplace":
        return TradeoffCurve("laplace", claimed_epsilon)
    return TradeoffCurve("eps_delta", claimed_epsilon, delta)


# ---------------------------------------------------------------------------
# 混淆矩阵与后验 / Confusion matrix and posterior
# ---------------------------------------------------------------------------

@dataclass
class ConfusionMatrix:
    """
    成员推断实验的混淆矩阵 / Confusion matrix of a membership experiment

    Positive means the secret input was x1.
    """

    tn: int = 0
    fp: int = 0
    fn: int = 0
    tp: int = 0

    @classmethod
    def from_predictions(cls, secret, predictions):
        s = np.asarray(secret, dtype=np.int64)
        p = np.asarray(predictions, dtype=np.int64)
        return cls(
            tn=int(np.sum((s == 0) & (p == 0))),
            fp=int(np.sum((s == 0) & (p == 1))),
            fn=int(np.sum((s == 1) & (p == 0))),
            tp=int(np.sum((s == 1) & (p == 1))),
        )

    def validate(self):
        if self.tn + self.fp < 1 or self.fn + self.tp < 1:
            raise DegenerateSplit(f"confusion matrix needs both classes, got {self}")

    @property
    def total(self):
        return self.tn + self.fp + self.fn + self.tp

    @property
    def fpr(self):
        return self.fp / max(1, self.tn + self.fp)

    @property
    def tpr(self):
        return self.tp / max(1, self.fn + self.tp)

    @property
    def fnr(self):
        return self.fn / max(1, self.fn + self.tp)

    @property
    def accuracy(self):
        return (self.tn + self.tp) / max(1, self.total)

    @property
    def balanced_accuracy(self):
        return 0.5 * (1.0 - self.fpr + self.tpr)

    def posterior_mean(self):
        """(α̂, β̂) under the Jeffreys Beta posteriors"""
        alpha = (0.5 + self.fp) / (1.0 + self.fp + self.tn)
        beta = (0.5 + self.fn) / (1.0 + self.fn + self.tp)
        return alpha, beta


def posterior_samples(confusion, mc_samples=DEFAULT_MC_SAMPLES, mc_seed=0):
    """
    从两个独立 Beta 后验抽取 (α, β) / Draw (α, β) from the two independent Beta posteriors

    α | FP, TN ~ Beta(1/2 + FP, 1/2 + TN);  β | FN, TP ~ Beta(1/2 + FN, 1/2 + TP)
    """
    confusion.validate()
    if int(mc_samples) < 10**4:
        raise PreconditionViolation(f"mc_samples must be >= 10^4, got {mc_samples}")
    rng = np.random.Generator(np.random.PCG64(int(mc_seed)))
    alpha = rng.beta(0.5 + confusion.fp, 0.5 + confusion.tn, size=int(mc_samples))
    beta = rng.beta(0.5 + confusion.fn, 0.5 + confusion.tp, size=int(mc_samples))
    return alpha, beta


def _band_probability(curve, alpha, beta):
    inside = (curve.eval(alpha) <= beta) & (beta <= curve.complement(1.0 - alpha))
    return float(np.mean(inside))


def posterior_p_f(confusion, curve, mc_samples=DEFAULT_MC_SAMPLES, mc_seed=0):
    """
    后验落在 f 的可行带内的概率 / Posterior probability of the band of f

    p(f) = P[f(α) <= β <= 1 - f(1 - α)] under the Beta posteriors.
    """
    alpha, beta = posterior_samples(confusion, mc_samples, mc_seed)
    return _band_probability(curve, alpha, beta)


def theta_star(family, confusion, gamma, mc_samples=DEFAULT_MC_SAMPLES, mc_seed=0, delta=0.0, theta_max=None):
    """
    被拒绝的最弱隐私声明 / Weakest rejected privacy claim

    f_θ is rejected when p(f_θ) <= γ and the posterior-mean point lies
    strictly below f_θ. Nothing is rejected unless the posterior puts at
    least 1 - γ of its mass strictly below the diagonal β = 1 - α, so a
    predictor without signal (for example a constant one) yields θ* = 0.
    One Beta sample set is reused for every θ so that rejection is monotone
    in θ and bisection is well posed.

    Returns:
        float: 最大的被拒绝 θ；无拒绝时为 0 / Largest rejected θ, 0 if none
    """
    if not 0.0 < gamma < 1.0:
        raise PreconditionViolation(f"gamma must lie in (0, 1), got {gamma}")
    theta_max = THETA_MAX[family] if theta_max is None else float(theta_max)
    alpha, beta = posterior_samples(confusion, mc_samples, mc_seed)
    alpha_hat, beta_hat = confusion.posterior_mean()

    if float(np.mean(beta < 1.0 - alpha)) < 1.0 - gamma:
        return 0.0

    def rejected(theta):
        curve = TradeoffCurve(family, theta, delta)
        if not beta_hat < curve.eval(alpha_hat) - POSTERIOR_MARGIN:
            return False
        return _band_probability(curve, alpha, beta) <= gamma

    if not rejected(0.0):
        return 0.0
    if rejected(theta_max):
        return theta_max
    lo, hi = 0.0, theta_max
    while hi - lo > THETA_TOL:
        mid = 0.5 * (lo + hi)
        if rejected(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# 审计报告与估计器 / Audit report and estimator
# ---------------------------------------------------------------------------

@dataclass
class AuditReport:
    """
    ε 下界审计报告 / ε lower-bound audit report

    to_dict() holds every field needed for a bit-exact replay; the timestamp
    is the only field that differs between replays.
    """

    eps_lb: float
    delta: float
    gamma: float
    family: str
    theta_star: float
    confusion: ConfusionMatrix
    n_runs: int
    master_seed: int
    mc_samples: int
    claimed_epsilon: Optional[float] = None
    saturated: bool = False
    mechanism: str = ""
    attack: str = ""
    timestamp: str = ""
    predictions: Optional[pd.DataFrame] = field(default=None, repr=False, compare=False)

    @property
    def verdict(self):
        if self.claimed_epsilon is not None and self.eps_lb > self.claimed_epsilon:
            return "VIOLATION"
        return "NO-VIOLATION"

    @property
    def is_violation(self):
        return self.verdict == "VIOLATION"

    def lower_bound_curve(self):
        """审计得到的权衡曲线 f_{θ*} / Audited trade-off curve f_{θ*}"""
        return TradeoffCurve(self.family, self.theta_star, self.delta if self.family == "eps_delta" else 0.0)

    def to_dict(self):
        c = self.confusion
        return {
            "eps_lb": self.eps_lb,
            "delta": self.delta,
            "gamma": self.gamma,
            "family": self.family,
            "theta_star": self.theta_star,
            "tn": c.tn,
            "fp": c.fp,
            "fn": c.fn,
            "tp": c.tp,
            "n_runs": self.n_runs,
            "master_seed": self.master_seed,
            "mc_samples": self.mc_samples,
            "verdict": self.verdict,
            "claimed_epsilon": self.claimed_epsilon,
            "saturated": self.saturated,
            "accuracy": c.accuracy,
            "fpr": c.fpr,
            "tpr": c.tpr,
            "mechanism": self.mechanism,
            "attack": self.attack,
            "timestamp": self.timestamp,
        }

    def replay_dict(self):
        d = self.to_dict()
        d.pop("timestamp")
        return d

    @classmethod
    def from_dict(cls, data):
        confusion = ConfusionMatrix(tn=data["tn"], fp=data["fp"], fn=data["fn"], tp=data["tp"])
        return cls(
            eps_lb=data["eps_lb"],
            delta=data["delta"],
            gamma=data["gamma"],
            family=data["family"],
            theta_star=data["theta_star"],
            confusion=confusion,
            n_runs=data["n_runs"],
            master_seed=data["master_seed"],
            mc_samples=data["mc_samples"],
            claimed_epsilon=data.get("claimed_epsilon"),
            saturated=data.get("saturated", False),
            mechanism=data.get("mechanism", ""),
            attack=data.get("attack", ""),
            timestamp=data.get("timestamp", ""),
        )


def draw_secret_bits(n, master_seed):
    """
    均匀抽取秘密比特 S ∈ {0,1}^n / Uniform secret bits S in {0, 1}^n

    A degenerate all-0 or all-1 draw is redrawn once from the same stream.

    Raises:
        DegenerateSplit: 两次都退化 / Both draws degenerate
    """
    stream = RngStream.derive(master_seed, SPLIT_STREAM_INDEX)
    for _ in range(2):
        bits = (stream.next_u32_array(n) >> np.uint64(31)).astype(np.int64)
        if 0 < bits.sum() < n:
            return bits
    raise DegenerateSplit(f"secret bit vector of length {n} is all-0 or all-1 twice in a row")


def _run_chunk(mechanism, test, inputs, indices, secret, master_seed):
    predictions = []
    for i in indices:
        report = mechanism(inputs[secret[i]], RngStream.derive(master_seed, int(i)))
        predictions.append(test(report))
    return predictions


def run_membership_experiment(mechanism, test, x0, x1, n, master_seed=0, threads=1):
    """
    运行 n 次机制并应用成员检验 / Run the mechanism n times and apply the test

    Run i uses RngStream.derive(master_seed, i); chunks run on a thread pool
    and are reassembled in index order, so results do not depend on threads.

    Returns:
        tuple: (secret bits, predictions) 两个 int 数组 / two int arrays
    """
    secret = draw_secret_bits(n, master_seed)
    inputs = (x0, x1)
    indices = np.arange(n)
    threads = max(1, int(threads))
    chunk_size = max(1, math.ceil(n / threads))
    chunks = [indices[i:i + chunk_size] for i in range(0, n, chunk_size)]

    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        future_to_chunk = {
            executor.submit(_run_chunk, mechanism, test, inputs, chunk, secret, master_seed): i
            for i, chunk in enumerate(chunks)
        }
        processed = [None] * len(chunks)
        for future in concurrent.futures.as_completed(future_to_chunk):
            processed[future_to_chunk[future]] = future.result()

    predictions = np.array([p for chunk in processed for p in chunk], dtype=np.int64)
    return secret, predictions


def _inputs_differ(x0, x1):
    if isinstance(x0, (str, bytes, int, float)) or isinstance(x1, (str, bytes, int, float)):
        return x0 != x1
    return not np.array_equal(np.asarray(x0), np.asarray(x1))


def audit_from_confusion(confusion, family, gamma, delta, master_seed, mc_samples=DEFAULT_MC_SAMPLES,
                         theta_max=None):
    """
    由混淆矩阵计算 θ* 与 ε 下界 / Compute θ* and the ε lower bound from a confusion matrix

    Returns:
        tuple: (theta_star, eps_lb, saturated)
    """
    mc_seed = derive_seed(master_seed, MC_STREAM_INDEX)
    theta_cap = THETA_MAX[family] if theta_max is None else float(theta_max)
    theta = theta_star(family, confusion, gamma, mc_samples, mc_seed, delta=delta, theta_max=theta_cap)
    saturated = theta >= theta_cap
    if theta == 0.0:
        return theta, 0.0, saturated
    curve = TradeoffCurve(family, theta, delta if family == "eps_delta" else 0.0)
    try:
        eps_lb = eps_of_f(curve, delta)
    except Unbounded:
        eps_lb, saturated = EPS_MAX, True
    return theta, eps_lb, saturated


def audit_epsilon_lb(mechanism, test, x0, x1, n, family, gamma=0.05, delta=0.0, master_seed=0,
                     mc_samples=DEFAULT_MC_SAMPLES, claimed_epsilon=None, threads=1,
                     mechanism_name="", theta_max=None):
    """
    端到端 (ε, δ)-DP 下界估计 / End-to-end (ε, δ)-DP lower-bound estimator

    Args:
        mechanism (callable): (input, stream) -> 机制报告 / mechanism report
        test (MembershipTest): 成员检验 / Membership test
        x0, x1: 两个相邻输入 / The two adjacent inputs
        n (int): 运行次数 ≥ 100 / Number of runs >= 100
        family (str): 权衡曲线族 / Trade-off family
        gamma (float): 显著性水平 / Significance level
        delta (float): 目标 δ / Target δ
        master_seed (int): 主种子 / Master seed
        mc_samples (int): 后验蒙特卡洛样本数 / Posterior Monte-Carlo samples
        claimed_epsilon (float): 宣称的 ε / Advertised ε
        threads (int): 线程数 / Worker threads

    Returns:
        AuditReport
    """
    logger = logging.getLogger(__name__)
    if int(n) < 100:
        raise PreconditionViolation(f"an audit needs n >= 100 runs, got {n}")
    if not _inputs_differ(x0, x1):
        raise PreconditionViolation("x0 and x1 must differ")
    if family not in FAMILIES:
        raise PreconditionViolation(f"unknown trade-off family '{family}'")

    logger.info(f"Running {n} mechanism runs with {threads} threads")
    secret, predictions = run_membership_experiment(mechanism, test, x0, x1, int(n), master_seed, threads)
    confusion = ConfusionMatrix.from_predictions(secret, predictions)
    logger.info(f"Confusion matrix: {confusion}")

    theta, eps_lb, saturated = audit_from_confusion(
        confusion, family, gamma, delta, master_seed, mc_samples, theta_max
    )
    if saturated:
        logger.warning(f"Estimate saturated the search range (theta*={theta})")

    rows = pd.DataFrame({
        "run_index": np.arange(int(n)),
        "secret_bit": secret,
        "prediction": predictions,
    })
    return AuditReport(
        eps_lb=eps_lb,
        delta=float(delta),
        gamma=float(gamma),
        family=family,
        theta_star=theta,
        confusion=confusion,
        n_runs=int(n),
        master_seed=int(master_seed),
        mc_samples=int(mc_samples),
        claimed_epsilon=claimed_epsilon,
        saturated=saturated,
        mechanism=mechanism_name,
        attack=getattr(test, "label", ""),
        timestamp=datetime.now().isoformat(timespec="seconds"),
        predictions=rows,
    )


def tradeoff_table(report, claimed, points=201):
    """
    审计曲线与宣称曲线的对照表 / Audited versus claimed trade-off table

    Args:
        report (AuditReport): 审计报告 / Audit report
        claimed (TradeoffCurve): 宣称曲线 / Claimed curve
        points (int): α 网格点数 / Number of α grid points

    Returns:
        pd.DataFrame: alpha, f_lb, f_claimed 三列 / columns alpha, f_lb, f_claimed
    """
    alpha = np.linspace(0.0, 1.0, int(points))
    return pd.DataFrame({
        "alpha": alpha,
        "f_lb": report.lower_bound_curve().eval(alpha),
        "f_claimed": claimed.eval(alpha),
    })

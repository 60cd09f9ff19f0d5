#!/usr/bin/env python3
"""
审计运行器 / Audit Runner

读取 JSON 配置，运行隐私审计、安全聚合模拟与复现实验，并写出 JSON 报告与
CSV 绘图数据。
Reads JSON configs, runs privacy audits, secure-aggregation simulations and
reproduction experiments, and writes JSON reports plus plot-ready CSV data.

Master seed precedence: --seed flag > config "master_seed" >
environment variable DP_FORENSICS_SEED > 0.
"""

import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd
from scipy.stats import binom

from . import attacks
from .auditor import (
    DEFAULT_MC_SAMPLES,
    FAMILIES,
    audit_epsilon_lb,
    claimed_curve,
    gaussian_claim_epsilon,
    laplace_claim_epsilon,
    tradeoff_table,
)
from .exceptions import ConfigError, ForensicsError
from .float_mech import (
    GaussParams,
    LaplaceParams,
    gaussian_mechanism,
    sample_gaussian_vector,
    sample_laplace,
)
from .randomness import RngStream
from .report_io import write_csv, write_json
from .secagg import (
    GAUSS_MODES,
    SecAggConfig,
    SecAggSimulator,
    field_reconstruct,
    gauss_secret_share,
    prio_client_submit,
)
from .sketch_mech import SketchConfig, cms_client, hcms_client, one_bit_histogram, sym_ohe

SEED_ENV_VAR = "DP_FORENSICS_SEED"


def resolve_master_seed(cli_seed=None, config_seed=None):
    """
    按优先级确定主种子 / Resolve the master seed by precedence

    --seed > config master_seed > $DP_FORENSICS_SEED > 0
    """
    if cli_seed is not None:
        return int(cli_seed)
    if config_seed is not None:
        return int(config_seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR}={env!r} is not an integer")
    return 0


def _line_of(text, key):
    """JSON 文本中键首次出现的行号 / Line of the first occurrence of a key in JSON text"""
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def load_json_config(path):
    """
    读取 JSON 配置 / Read a JSON config

    Returns:
        tuple: (dict, 原始文本 / raw text)

    Raises:
        ConfigError: 文件缺失或 JSON 非法（带行号）/ Missing file or bad JSON, with line number
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path.name}: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        raise ConfigError(f"{path.name}: top level must be a JSON object", line=1)
    return data, text


# ---------------------------------------------------------------------------
# 输入编码 / Input encoding
# ---------------------------------------------------------------------------

def resolve_vector(value, dim):
    """
    向量输入："zero"、"unit"（1/√d 向量）或数值列表
    Vector input: "zero", "unit" (the 1/sqrt(d) vector) or a list of numbers
    """
    if isinstance(value, str):
        if value == "zero":
            return np.zeros(int(dim))
        if value == "unit":
            return np.full(int(dim), 1.0 / math.sqrt(int(dim)))
        raise ConfigError(f"unknown vector input '{value}', expected zero, unit or a list")
    vec = np.asarray(value, dtype=np.float64).ravel()
    if vec.size != int(dim):
        raise ConfigError(f"vector input has length {vec.size}, expected {dim}")
    return vec


# ---------------------------------------------------------------------------
# 机制与攻击注册表 / Mechanism and attack registries
# ---------------------------------------------------------------------------

def _laplace_mechanism(params):
    lam = LaplaceParams.from_range(0.0, params.get("range", 1.0), params["epsilon"]).lam

    def run(x, stream):
        return sample_laplace(stream, LaplaceParams(mu=float(x), lam=lam))

    return run


def _gaussian_mechanism(params):
    sigma = float(params.get("sigma", 1.0))

    def run(x, stream):
        return gaussian_mechanism(x, sigma, stream)

    return run


def _gauss_share_mechanism(params):
    sigma_ss = float(params.get("sigma_ss", 1.0))

    def run(x, stream):
        return gauss_secret_share(x, sigma_ss, stream)

    return run


def _prio_mechanism(mode):
    def factory(params):
        config = SecAggConfig(
            mode=mode,
            epsilon=float(params.get("epsilon", 1.0)),
            d=int(params.get("d", 2)),
            p=int(params.get("p", SecAggSimulator.DEFAULT_SECAGG_PARAMS["p"])),
            n_clients=1,
        )

        def run(x, stream):
            # 合谋端同时持有两份份额 / The colluding endpoint holds both shares
            return field_reconstruct(prio_client_submit(int(x), config, stream))

        return run

    return factory


def _sketch_mechanism(client):
    def factory(params):
        config = SketchConfig(
            epsilon=float(params["epsilon"]),
            d=int(params.get("d", 128)),
            k=int(params.get("k", 1)),
        )

        def run(x, stream):
            return client(x, config, stream)

        return run

    return factory


MECHANISMS = {
    "laplace": _laplace_mechanism,
    "gaussian": _gaussian_mechanism,
    "prio_plusplus_share": _gauss_share_mechanism,
    "prio_symohe": _prio_mechanism("prio_symohe"),
    "prio_dp_disabled": _prio_mechanism("dp_disabled"),
    "sym_ohe": _sketch_mechanism(lambda x, c, s: sym_ohe(int(x), c, s)),
    "cms": _sketch_mechanism(cms_client),
    "hcms": _sketch_mechanism(hcms_client),
    "obh": _sketch_mechanism(one_bit_histogram),
}

VECTOR_MECHANISMS = ("gaussian", "prio_plusplus_share")


def _phi_lap_attack(params, mech_params, x0, x1):
    lam = LaplaceParams.from_range(0.0, mech_params.get("range", 1.0), mech_params["epsilon"]).lam
    mu = float(x0)
    return attacks.MembershipTest(lambda y: attacks.phi_lap(y, mu, lam), "phi_lap")


def _boosted_gauss_attack(params, mech_params, x0, x1):
    sigma2 = float(mech_params.get("sigma", 1.0)) ** 2
    k = int(params.get("k", attacks.DEFAULT_WINDOW))
    rule = params.get("rule", "no_match")
    mu = np.asarray(x0, dtype=np.float64)
    return attacks.MembershipTest(
        lambda y: attacks.boosted_gauss_test(y, mu, sigma2, k=k, rule=rule), "boosted_gauss"
    )


def _dzk_attack(params, mech_params, x0, x1):
    sigma_ss = float(mech_params.get("sigma_ss", 1.0))
    k = int(params.get("k", attacks.DEFAULT_WINDOW))
    candidate = np.asarray(x0, dtype=np.float64)
    return attacks.MembershipTest(
        lambda bundle: attacks.dzk_leader_test(bundle.leader_share, candidate, sigma_ss, k=k), "dzk_leader"
    )


def _prio_attack(params, mech_params, x0, x1):
    rule = params.get("rule", "first_bit")
    if rule not in attacks.PRIO_RULES:
        raise ConfigError(f"unknown prio rule '{rule}', expected one of {attacks.PRIO_RULES}")
    return attacks.MembershipTest(lambda y: attacks.prio_membership_test(y, rule), f"prio_{rule}")


def _dp_disabled_attack(params, mech_params, x0, x1):
    return attacks.MembershipTest(
        lambda payload: attacks.dp_disabled_membership_test(payload, int(x0)), "dp_disabled"
    )


def _decoder_attack(kind):
    # 当 x0 不在解码集合中时判定输入为 x1 / Predict x1 when x0 is not plausible
    def factory(params, mech_params, x0, x1):
        d = int(mech_params.get("d", 128))
        if kind == "cms":
            predict = lambda r: int(not attacks.cms_decode(r, [x0], d))  # noqa: E731
        elif kind == "hcms":
            predict = lambda r: int(not attacks.hcms_decode(r, [x0], d))  # noqa: E731
        else:
            predict = lambda r: int(not attacks.obh_plausible(r, x0))  # noqa: E731
        return attacks.MembershipTest(predict, f"{kind}_decoder")

    return factory


ATTACKS = {
    "phi_lap": _phi_lap_attack,
    "boosted_gauss": _boosted_gauss_attack,
    "dzk_leader": _dzk_attack,
    "prio_membership": _prio_attack,
    "dp_disabled": _dp_disabled_attack,
    "cms_decoder": _decoder_attack("cms"),
    "hcms_decoder": _decoder_attack("hcms"),
    "obh_decoder": _decoder_attack("obh"),
}


# ---------------------------------------------------------------------------
# 审计配置 / Audit configuration
# ---------------------------------------------------------------------------

@dataclass
class AuditConfig:
    """
    一次审计的完整描述 / Full description of one audit

    Attributes:
        mechanism (str): 已注册机制名 / Registered mechanism name
        attack (str): 已注册攻击名 / Registered attack name
        x0, x1: 两个输入 / The two inputs
        n (int): 运行次数 / Number of runs
        gamma, delta (float): 显著性与 δ / Significance and δ
        family (str): 权衡曲线族 / Trade-off family
        claimed_epsilon (float): 宣称的 ε（缺省时由机制参数推出）/ Advertised ε, derived when absent
        master_seed (int): 主种子 / Master seed
    """

    DEFAULT_AUDIT_PARAMS = {
        "n": 1000,
        "gamma": 0.05,
        "delta": 0.0,
        "family": "eps_delta",
        "mc_samples": DEFAULT_MC_SAMPLES,
        "threads": 4,
    }

    mechanism: str
    attack: str
    x0: object
    x1: object
    mechanism_params: Dict = field(default_factory=dict)
    attack_params: Dict = field(default_factory=dict)
    n: int = 1000
    gamma: float = 0.05
    delta: float = 0.0
    family: str = "eps_delta"
    claimed_epsilon: Optional[float] = None
    master_seed: Optional[int] = None
    mc_samples: int = DEFAULT_MC_SAMPLES
    threads: int = 4
    name: str = "audit"

    @classmethod
    def from_dict(cls, data, text=""):
        """
        由字典构建并校验 / Build and validate from a dict

        Raises:
            ConfigError: 带行号的校验错误 / Validation error anchored to a line
        """
        params = dict(cls.DEFAULT_AUDIT_PARAMS)
        params.update(data)
        for key in ("mechanism", "attack", "x0", "x1"):
            if key not in params:
                raise ConfigError(f"missing required field '{key}'")

        mechanism = params["mechanism"]
        if isinstance(mechanism, dict):
            mech_name, mech_params = mechanism.get("name"), {k: v for k, v in mechanism.items() if k != "name"}
        else:
            mech_name, mech_params = mechanism, dict(params.get("mechanism_params", {}))
        attack = params["attack"]
        if isinstance(attack, dict):
            attack_name, attack_params = attack.get("name"), {k: v for k, v in attack.items() if k != "name"}
        else:
            attack_name, attack_params = attack, dict(params.get("attack_params", {}))

        if mech_name not in MECHANISMS:
            raise ConfigError(f"unknown mechanism '{mech_name}'", line=_line_of(text, "mechanism"))
        if attack_name not in ATTACKS:
            raise ConfigError(f"unknown attack '{attack_name}'", line=_line_of(text, "attack"))
        if params["family"] not in FAMILIES:
            raise ConfigError(f"unknown family '{params['family']}'", line=_line_of(text, "family"))
        if int(params["n"]) < 100:
            raise ConfigError(f"n must be >= 100, got {params['n']}", line=_line_of(text, "n"))
        if not 0.0 < float(params["gamma"]) < 1.0:
            raise ConfigError(f"gamma must lie in (0, 1), got {params['gamma']}", line=_line_of(text, "gamma"))

        x0, x1 = params["x0"], params["x1"]
        if mech_name in VECTOR_MECHANISMS:
            dim = int(mech_params.get("dim", 1000))
            x0, x1 = resolve_vector(x0, dim), resolve_vector(x1, dim)

        return cls(
            mechanism=mech_name,
            attack=attack_name,
            x0=x0,
            x1=x1,
            mechanism_params=mech_params,
            attack_params=attack_params,
            n=int(params["n"]),
            gamma=float(params["gamma"]),
            delta=float(params["delta"]),
            family=params["family"],
            claimed_epsilon=None if params.get("claimed_epsilon") is None else float(params["claimed_epsilon"]),
            master_seed=params.get("master_seed"),
            mc_samples=int(params["mc_samples"]),
            threads=int(params["threads"]),
            name=str(params.get("name", "audit")),
        )

    @classmethod
    def from_file(cls, path):
        data, text = load_json_config(path)
        try:
            return cls.from_dict(data, text)
        except ForensicsError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e))

    def resolved_claim(self):
        """
        宣称的 ε：显式给出或由机制参数推出
        Advertised ε: explicit, or derived from the mechanism parameters
        """
        if self.claimed_epsilon is not None:
            return self.claimed_epsilon
        p = self.mechanism_params
        if self.mechanism == "laplace":
            lam = LaplaceParams.from_range(0.0, p.get("range", 1.0), p["epsilon"]).lam
            return laplace_claim_epsilon(lam, p.get("range", 1.0))
        if self.mechanism in VECTOR_MECHANISMS:
            sigma = p.get("sigma", p.get("sigma_ss", 1.0))
            return gaussian_claim_epsilon(sigma, p.get("sensitivity", 1.0), self.delta or 1e-5)
        if "epsilon" in p:
            return float(p["epsilon"])
        return None

    def build(self):
        """实例化机制与攻击 / Instantiate the mechanism and the attack"""
        mechanism = MECHANISMS[self.mechanism](self.mechanism_params)
        test = ATTACKS[self.attack](self.attack_params, self.mechanism_params, self.x0, self.x1)
        return mechanism, test


class AuditRunner:
    """
    审计流程：配置 → 运行 → 报告 / Audit workflow: config, runs, reports

    Outputs next to the report path:
        <stem>.json              AuditReport
        <stem>_predictions.csv   run_index, secret_bit, prediction
        <stem>_tradeoff.csv      alpha, f_lb, f_claimed
        <stem>.log               run log
    """

    def __init__(self, config, out_path, seed=None, threads=None, mc_samples=None):
        """
        Args:
            config (AuditConfig): 审计配置 / Audit config
            out_path (str): 报告 JSON 路径 / Report JSON path
            seed (int): 命令行种子（最高优先级）/ Seed from the command line, highest precedence
            threads (int): 覆盖配置中的线程数 / Overrides the configured threads
            mc_samples (int): 覆盖后验样本数 / Overrides the posterior sample count
        """
        self.config = config
        self.out_path = Path(out_path)
        self.master_seed = resolve_master_seed(seed, config.master_seed)
        self.threads = threads or config.threads
        self.mc_samples = mc_samples or config.mc_samples
        self.log_file = self.out_path.with_suffix(".log")
        self.logger = logging.getLogger(__name__)

    def log(self, message, level="INFO"):
        """
        带时间戳的日志，同时写入运行日志文件 / Timestamped log line, also appended to the run log

        Args:
            message (str): 日志信息 / Log message
            level (str): 日志级别 / Log level
        """
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        print(f"[{timestamp}] {level}: {message}")
        self.log_file.parent.mkdir(parents=True, exist_ok=True)
        with open(self.log_file, "a", encoding="utf-8") as f:
            f.write(f"[{timestamp}] {level}: {message}\n")

    def run(self):
        """
        运行审计并写出全部输出 / Run the audit and write every output

        Returns:
            AuditReport
        """
        cfg = self.config
        self.log(f"🚀 Audit '{cfg.name}': mechanism={cfg.mechanism}, attack={cfg.attack}")
        self.log(f"🔢 n={cfg.n}, family={cfg.family}, gamma={cfg.gamma}, delta={cfg.delta}, seed={self.master_seed}")

        claim = cfg.resolved_claim()
        mechanism, test = cfg.build()
        started = time.perf_counter()
        report = audit_epsilon_lb(
            mechanism,
            test,
            cfg.x0,
            cfg.x1,
            cfg.n,
            cfg.family,
            gamma=cfg.gamma,
            delta=cfg.delta,
            master_seed=self.master_seed,
            mc_samples=self.mc_samples,
            claimed_epsilon=claim,
            threads=self.threads,
            mechanism_name=cfg.mechanism,
        )
        elapsed = time.perf_counter() - started

        c = report.confusion
        self.log(f"📊 TN={c.tn} FP={c.fp} FN={c.fn} TP={c.tp} accuracy={c.accuracy:.4f}")
        self.log(f"📐 theta*={report.theta_star:.6f} eps_lb={report.eps_lb:.4f} claimed={claim}")
        if report.saturated:
            self.log("⚠️ Estimate saturated the search range", "WARNING")
        self.log(f"⏱️ Runtime {elapsed:.1f}s")

        stem = self.out_path.with_suffix("")
        write_json(self.out_path, report.to_dict())
        write_csv(f"{stem}_predictions.csv", report.predictions)
        if claim is not None:
            curve = claimed_curve(cfg.family, claim, cfg.delta)
            write_csv(f"{stem}_tradeoff.csv", tradeoff_table(report, curve))
        self.log(f"📤 Report saved to {self.out_path}")

        if report.is_violation:
            self.log(f"🚨 VIOLATION: eps_lb={report.eps_lb:.4f} > claimed {claim}", "WARNING")
        else:
            self.log(f"✅ NO-VIOLATION: eps_lb={report.eps_lb:.4f}")
        return report


def run_audit(config_path, out_path=None, seed=None, threads=None, mc_samples=None):
    """
    读取配置并运行审计 / Load a config and run the audit

    Returns:
        tuple: (AuditReport, 报告路径 / report path)
    """
    config = AuditConfig.from_file(config_path)
    out_path = out_path or Path("results") / f"{Path(config_path).stem}_report.json"
    report = AuditRunner(config, out_path, seed=seed, threads=threads, mc_samples=mc_samples).run()
    return report, Path(out_path)


# ---------------------------------------------------------------------------
# 安全聚合模拟 / Secure aggregation simulation
# ---------------------------------------------------------------------------

def secagg_config_from_dict(data, text=""):
    """由字典构建 SecAggConfig / Build a SecAggConfig from a dict"""
    params = dict(SecAggSimulator.DEFAULT_SECAGG_PARAMS)
    params.update({k: v for k, v in data.items() if k not in ("master_seed", "name")})
    try:
        return SecAggConfig(**params)
    except TypeError as e:
        raise ConfigError(f"unexpected SecAgg field: {e}")
    except ForensicsError as e:
        raise ConfigError(str(e), line=_line_of(text, "mode"))


def dzk_summary(clients, config):
    """
    领导者视图上的 DZK 攻击摘要 / DZK attack summary over the leader view

    For every client, tests whether the leader share is consistent with a
    zero shared value; a share flagged infeasible reveals a nonzero one.
    With local noise on (prio_plusplus) no shared value is zero.
    """
    rows = []
    zero = np.zeros(config.d)
    for c in clients:
        flagged = attacks.dzk_leader_test(c.bundle.leader_share, zero, config.sigma_ss, k=config.k)
        shared = np.asarray(c.reconstructed, dtype=np.float64)
        rows.append({"client": c.index, "shared_zero": bool(np.all(shared == 0.0)),
                     "shared_norm": float(np.linalg.norm(shared)), "flagged_nonzero": bool(flagged)})
    df = pd.DataFrame(rows)
    zero_rows = df[df["shared_zero"]]
    other_rows = df[~df["shared_zero"]]
    summary = {
        "clients": len(df),
        "flagged_nonzero": int(df["flagged_nonzero"].sum()),
        "false_flag_rate": float(zero_rows["flagged_nonzero"].mean()) if len(zero_rows) else None,
        "detection_rate": float(other_rows["flagged_nonzero"].mean()) if len(other_rows) else None,
    }
    if len(zero_rows) and len(other_rows):
        summary["balanced_accuracy"] = 0.5 * (1.0 - summary["false_flag_rate"] + summary["detection_rate"])
    return summary, df


def simulate_secagg(config_path, out_path, seed=None):
    """
    运行安全聚合模拟并写出各方视图 / Run the SecAgg simulation and write each role's view

    Returns:
        dict: 视图报告 / Views report
    """
    logger = logging.getLogger(__name__)
    data, text = load_json_config(config_path)
    config = secagg_config_from_dict(data, text)
    master_seed = resolve_master_seed(seed, data.get("master_seed"))
    result = SecAggSimulator(config, master_seed=master_seed).run()
    clients = result["clients"]

    views = {
        "mode": config.mode,
        "n_clients": config.n_clients,
        "d": config.d,
        "master_seed": master_seed,
        "leader_view": result["leader"],
        "helper_view": result["helper"],
        "combined_view": result["combined"],
        "clients": [
            {"index": c.index, "reconstructed": c.reconstructed, "exact_recovery": c.exact}
            for c in clients
        ],
        "exact_recovery_rate": sum(c.exact for c in clients) / len(clients),
    }
    if config.mode in GAUSS_MODES:
        summary, df = dzk_summary(clients, config)
        views["dzk_attack"] = summary
        write_csv(Path(out_path).with_suffix(".csv"), df)
        logger.info(f"DZK summary: {summary}")
    write_json(out_path, views)
    return views


# ---------------------------------------------------------------------------
# 复现实验 / Reproduction experiments
# ---------------------------------------------------------------------------

def experiment_lap_accuracy(params, master_seed):
    """φ_Lap 单样本平衡准确率随 ε 的变化 / Single-sample φ_Lap balanced accuracy over ε"""
    trials = int(params.get("trials", 10000))
    offset = float(params.get("offset", 1.0))
    rows = []
    for e_index, eps in enumerate(params.get("epsilons", [0.5, 1.0, 2.0, 4.0])):
        lam = LaplaceParams.from_range(0.0, params.get("range", 1.0), eps).lam
        stream = RngStream.derive(master_seed, e_index)
        fp = sum(attacks.phi_lap(sample_laplace(stream, LaplaceParams(0.0, lam)), 0.0, lam) for _ in range(trials))
        tp = sum(attacks.phi_lap(sample_laplace(stream, LaplaceParams(offset, lam)), 0.0, lam) for _ in range(trials))
        rows.append({"epsilon": eps, "fpr": fp / trials, "tpr": tp / trials,
                     "balanced_accuracy": 0.5 * (1.0 - fp / trials + tp / trials)})
    return pd.DataFrame(rows)


def experiment_age_reconstruction(params, master_seed):
    """多样本年龄重建 / Multi-sample age reconstruction"""
    trials = int(params.get("trials", 10000))
    m = int(params.get("samples", 5))
    low, high = params.get("domain", [0, 100])
    domain = range(int(low), int(high) + 1)
    lam = LaplaceParams.from_range(0.0, params.get("range", 100.0), params.get("epsilon", 0.2)).lam
    rows = []
    for t in range(trials):
        stream = RngStream.derive(master_seed, t)
        age = int(low) + stream.uniform_index(len(domain))
        samples = [sample_laplace(stream, LaplaceParams(float(age), lam)) for _ in range(m)]
        feasible = attacks.reconstruct_laplace_input(samples, domain, lam)
        rows.append({"trial": t, "age": age, "n_feasible": len(feasible),
                     "contains_true": age in feasible, "exact": feasible == {age}})
    return pd.DataFrame(rows)


def experiment_symohe_hamming(params, master_seed):
    """symOHE 输出与独热编码的汉明距离 / Hamming distance of symOHE outputs from the one-hot input"""
    trials = int(params.get("trials", 10000))
    d = int(params.get("d", 10000))
    rows = []
    for eps, threshold in params.get("cases", [[6.0, 30], [8.0, 5]]):
        config = SketchConfig(epsilon=float(eps), d=d)
        flip = 1.0 / (math.exp(float(eps)) + 1.0)
        hits = 0
        for t in range(trials):
            stream = RngStream.derive(master_seed, t)
            x = 1 + stream.uniform_index(d)
            y = sym_ohe(x, config, stream)
            distance = int(y.sum()) - 2 * int(y[x - 1]) + 1
            hits += distance <= threshold
        rows.append({"epsilon": eps, "threshold": threshold, "empirical": hits / trials,
                     "binomial_reference": float(binom.cdf(threshold, d, flip))})
    return pd.DataFrame(rows)


def experiment_cms_retention(params, master_seed):
    """CMS 解码器保留真实输入的比例 / Rate at which the CMS decoder retains the true input"""
    trials = int(params.get("trials", 10000))
    config = SketchConfig(epsilon=float(params.get("epsilon", 4.0)), d=int(params.get("d", 1024)),
                          k=int(params.get("k", 65536)))
    guesses = attacks.GuessSet.from_file(params["guesses"])
    candidates = list(guesses)
    rows = []
    for t in range(trials):
        stream = RngStream.derive(master_seed, t)
        x = candidates[stream.uniform_index(len(candidates))]
        decoded = attacks.cms_decode(cms_client(x, config, stream), guesses, config.d)
        rows.append({"trial": t, "input": x, "retained": x in decoded, "n_decoded": len(decoded)})
    return pd.DataFrame(rows)


def experiment_gauss_pairs(params, master_seed):
    """φ_Gauss 逐对误报率与检出率 / Per-pair φ_Gauss false-positive and detection rates"""
    pairs = int(params.get("pairs", 100000))
    dim = int(params.get("dim", 1000))
    offset = float(params.get("offset", 1.0 / math.sqrt(dim)))
    sigma = float(params.get("sigma", 1.0))
    k = int(params.get("k", attacks.DEFAULT_WINDOW))
    rule = params.get("rule", "no_match")
    rows = []
    for label, mu, index in (("honest", 0.0, 0), ("shifted", offset, 1)):
        y = sample_gaussian_vector(RngStream.derive(master_seed, index), GaussParams(mu, sigma, 2 * pairs))
        flags = attacks.phi_gauss_pairs(y[0::2], y[1::2], 0.0, sigma * sigma, k=k, rule=rule)
        rows.append({"case": label, "pairs": pairs, "infeasible_rate": float(flags.mean())})
    return pd.DataFrame(rows)


EXPERIMENTS = {
    "lap_accuracy": experiment_lap_accuracy,
    "age_reconstruction": experiment_age_reconstruction,
    "symohe_hamming": experiment_symohe_hamming,
    "cms_retention": experiment_cms_retention,
    "gauss_pairs": experiment_gauss_pairs,
}


def _summarize(name, df):
    if name == "age_reconstruction":
        return {"exact_rate": float(df["exact"].mean()), "contains_true_rate": float(df["contains_true"].mean()),
                "mean_feasible": float(df["n_feasible"].mean())}
    if name == "cms_retention":
        return {"retention_rate": float(df["retained"].mean()), "mean_decoded": float(df["n_decoded"].mean())}
    return {"rows": df.to_dict(orient="records")}


def run_experiment(config_path, out_path, seed=None):
    """
    运行一个复现实验 / Run one reproduction experiment

    Returns:
        dict: 实验摘要 / Experiment summary
    """
    data, text = load_json_config(config_path)
    name = data.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment '{name}', expected one of {sorted(EXPERIMENTS)}",
                          line=_line_of(text, "experiment"))
    params = dict(data)
    if "guesses" in params and not Path(params["guesses"]).is_absolute():
        params["guesses"] = str(Path(config_path).parent / params["guesses"])
    master_seed = resolve_master_seed(seed, data.get("master_seed"))
    df = EXPERIMENTS[name](params, master_seed)
    summary = {"experiment": name, "master_seed": master_seed, **_summarize(name, df)}
    write_json(out_path, summary)
    write_csv(Path(out_path).with_suffix(".csv"), df)
    return summary

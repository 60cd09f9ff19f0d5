#!/usr/bin/env python3

import sys
import logging
import argparse
from pathlib import Path

sys.path.append(str(Path(__file__).parent))

from dp_forensics_toolkit.exceptions import ForensicsError
from dp_forensics_toolkit.audit_runner import run_audit, run_experiment, simulate_secagg
from dp_forensics_toolkit.log_parser import DECODE_MECHANISMS, decode_log

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


def cmd_audit(args):
    print("🚀 Differential Privacy Audit")
    print("=" * 70)
    print(f"📥 Config: {args.config}")
    if args.seed is not None:
        print(f"🎲 Master seed: {args.seed}")
    print(f"🧵 Parallel threads: {args.threads or 'from config'}")
    print("=" * 70)

    report, report_path = run_audit(
        args.config, args.out, seed=args.seed, threads=args.threads, mc_samples=args.mc_samples
    )
    print(f"\n📤 Report: {report_path}")
    print(f"📐 eps_lb = {report.eps_lb:.4f} (claimed {report.claimed_epsilon})")
    if report.is_violation:
        print("🚨 VIOLATION detected")
        return EXIT_VIOLATION
    print("✅ NO-VIOLATION")
    return EXIT_OK


def cmd_decode(args):
    print("🔍 Analytics Log Decoder")
    print("=" * 70)
    print(f"📥 Log: {args.log}")
    print(f"📥 Guesses: {args.guesses}")
    print(f"🔧 Mechanism: {args.mechanism}")
    print("=" * 70)

    report = decode_log(args.log, args.guesses, args.out, mechanism=args.mechanism,
                        i_own_this_log=args.i_own_this_log)
    print(f"\n📊 Decoded entries: {len(report['decoded'])}, malformed: {len(report['errors'])}")
    print(f"📤 Report: {args.out}")
    return EXIT_OK


def cmd_simulate(args):
    print("🔄 Secure Aggregation Simulation")
    print("=" * 70)
    print(f"📥 Config: {args.config}")
    print("=" * 70)

    views = simulate_secagg(args.config, args.out, seed=args.seed)
    print(f"\n📊 Mode: {views['mode']}, clients: {views['n_clients']}")
    print(f"🔓 Exact recovery rate: {views['exact_recovery_rate']:.2%}")
    if "dzk_attack" in views:
        print(f"🎯 DZK attack: {views['dzk_attack']}")
    print(f"📤 Views: {args.out}")
    return EXIT_OK


def cmd_experiment(args):
    print("🧪 Reproduction Experiment")
    print("=" * 70)
    print(f"📥 Config: {args.config}")
    print("=" * 70)

    summary = run_experiment(args.config, args.out, seed=args.seed)
    print(f"\n📊 {summary['experiment']}:")
    for key, value in summary.items():
        if key not in ("experiment", "rows"):
            print(f"   {key}: {value}")
    for row in summary.get("rows", []):
        print(f"   {row}")
    print(f"📤 Summary: {args.out}")
    return EXIT_OK


COMMANDS = {
    "audit": cmd_audit,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
}


def build_parser():
    parser = argparse.ArgumentParser(
        description="差分隐私取证工具 / Differential privacy forensics toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例 / Usage Examples:
  python run_dp_audit.py audit --config data/configs/fig4.json --out results/fig4.json
  python run_dp_audit.py audit --config data/configs/fig5.json --seed 7 --out results/fig5.json
  python run_dp_audit.py decode --log my_log.json --guesses data/guesses/emoji_152.txt \\
      --mechanism cms --out results/decoded.json --i-own-this-log
  python run_dp_audit.py simulate --config data/configs/secagg_dp_off.json --out results/views.json
  python run_dp_audit.py experiment --config data/configs/age_reconstruction.json --out results/age.json

退出码 / Exit codes:
  0 = NO-VIOLATION / success, 1 = error, 2 = VIOLATION

环境变量 / Environment:
  DP_FORENSICS_SEED  未给出 --seed 且配置中无 master_seed 时的默认种子
                     Default master seed when neither --seed nor the config sets one
        """
    )
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="详细日志与错误堆栈 / Debug logging and tracebacks")
    sub = parser.add_subparsers(dest="command", required=True)

    audit = sub.add_parser("audit", help="运行隐私审计 / Run a privacy audit")
    audit.add_argument("--config", required=True, help="审计配置 JSON / Audit config JSON")
    audit.add_argument("--out", required=True, help="报告 JSON 路径 / Report JSON path")
    audit.add_argument("--seed", type=int, default=None, help="主种子 / Master seed")
    audit.add_argument("--threads", type=int, default=None,
                       help="并行线程数 / Number of parallel threads (default: from config)")
    audit.add_argument("--mc-samples", type=int, default=None,
                       help="后验蒙特卡洛样本数 / Posterior Monte-Carlo samples (default: 100000)")

    decode = sub.add_parser("decode", help="解码分析日志 / Decode an analytics log")
    decode.add_argument("--log", required=True, help="日志 JSON / Log JSON")
    decode.add_argument("--guesses", required=True, help="候选文件，每行一个 / Guess file, one per line")
    decode.add_argument("--mechanism", choices=DECODE_MECHANISMS, default="cms",
                        help="草图类型 / Sketch type (default: cms)")
    decode.add_argument("--out", required=True, help="输出 JSON / Output JSON")
    decode.add_argument("--i-own-this-log", action="store_true",
                        help="确认日志来自自己的设备 / Confirm the log comes from your own device")

    simulate = sub.add_parser("simulate", help="安全聚合模拟 / Secure aggregation simulation")
    simulate.add_argument("--config", required=True, help="SecAgg 配置 JSON / SecAgg config JSON")
    simulate.add_argument("--out", required=True, help="视图 JSON / Views JSON")
    simulate.add_argument("--seed", type=int, default=None, help="主种子 / Master seed")

    experiment = sub.add_parser("experiment", help="复现实验 / Reproduction experiment")
    experiment.add_argument("--config", required=True, help="实验配置 JSON / Experiment config JSON")
    experiment.add_argument("--out", required=True, help="摘要 JSON / Summary JSON")
    experiment.add_argument("--seed", type=int, default=None, help="主种子 / Master seed")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except ForensicsError as e:
        print(f"❌ {args.command} failed: {e}")
    except Exception as e:
        print(f"❌ {args.command} failed: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

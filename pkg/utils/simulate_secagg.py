#!/usr/bin/env python3
"""
安全聚合模拟工具 / Secure Aggregation Simulation Tool

运行 Prio / Prio++ 数据流并输出领导者、辅助者与合谋视图
Runs the Prio / Prio++ dataflow and writes the leader, helper and colluding views
"""

import sys
import argparse
import logging
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from dp_forensics_toolkit.audit_runner import simulate_secagg


def main():
    """主函数 / Main function"""

    parser = argparse.ArgumentParser(
        description="安全聚合模拟器 / Secure aggregation simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例 / Usage Examples:
  python simulate_secagg.py ../data/configs/secagg_dp_off.json views.json
  python simulate_secagg.py ../data/configs/prio_plusplus.json views.json --seed 3

支持模式 / Supported modes:
  prio_symohe           symOHE 本地随机化后有限域分享 / symOHE then field shares
  dp_disabled           原始独热向量有限域分享 / raw one-hot field shares
  prio_plusplus         本地高斯机制后高斯秘密分享 / local Gaussian then Gaussian shares
  plusplus_dp_disabled  裁剪后高斯秘密分享 / clipped vector, Gaussian shares
        """
    )

    parser.add_argument("config_file", help="SecAgg 配置 JSON / SecAgg config JSON")
    parser.add_argument("output_file", help="输出视图 JSON / Output views JSON")
    parser.add_argument("--seed", type=int, default=None, help="主种子 / Master seed")
    parser.add_argument("--verbose", "-v", action="store_true",
                       help="详细输出 / Verbose output")

    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        print("🔄 Secure Aggregation Simulator")
        print("=" * 50)
        print(f"📥 Config: {args.config_file}")

        views = simulate_secagg(args.config_file, args.output_file, seed=args.seed)

        print(f"📤 Output file: {args.output_file}")
        print(f"📋 Mode: {views['mode']}, clients: {views['n_clients']}, d: {views['d']}")
        print(f"🔓 Exact recovery: {views['exact_recovery_rate']:.2%}")
        if "dzk_attack" in views:
            print(f"🎯 DZK attack summary:")
            for key, value in views["dzk_attack"].items():
                print(f"   {key}: {value}")

        print(f"\n🎉 Simulation completed successfully!")

    except Exception as e:
        print(f"❌ Simulation failed: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
复现实验工具 / Reproduction Experiment Tool

运行单个攻击统计实验并写出 JSON 摘要与 CSV 明细
Runs one attack-statistics experiment and writes a JSON summary plus CSV rows
"""

import sys
import argparse
import logging
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from dp_forensics_toolkit.audit_runner import EXPERIMENTS, run_experiment


def main():
    """主函数 / Main function"""

    parser = argparse.ArgumentParser(
        description="攻击统计复现实验 / Attack statistics reproduction experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
使用示例 / Usage Examples:
  python run_experiment.py ../data/configs/age_reconstruction.json age.json
  python run_experiment.py ../data/configs/symohe_hamming.json hamming.json --seed 11

可用实验 / Available experiments:
  {', '.join(sorted(EXPERIMENTS))}
        """
    )

    parser.add_argument("config_file", help="实验配置 JSON / Experiment config JSON")
    parser.add_argument("output_file", help="摘要 JSON / Summary JSON")
    parser.add_argument("--seed", type=int, default=None, help="主种子 / Master seed")
    parser.add_argument("--verbose", "-v", action="store_true",
                       help="详细输出 / Verbose output")

    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        print("🧪 Reproduction Experiment")
        print("=" * 50)
        print(f"📥 Config: {args.config_file}")

        summary = run_experiment(args.config_file, args.output_file, seed=args.seed)

        print(f"📤 Output file: {args.output_file}")
        print(f"📋 Experiment: {summary['experiment']} (seed {summary['master_seed']})")
        for key, value in summary.items():
            if key == "rows":
                for row in value:
                    print(f"   {row}")
            elif key not in ("experiment", "master_seed"):
                print(f"   {key}: {value}")

        print(f"\n🎉 Experiment completed successfully!")

    except Exception as e:
        print(f"❌ Experiment failed: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()

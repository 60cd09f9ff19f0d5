#!/usr/bin/env python3
"""
分析日志解码工具 / Analytics Log Decoder Tool

用候选集合解码设备分析日志中的 CMS/HCMS 条目
Decodes CMS/HCMS entries of a device analytics log against a guess set
"""

import sys
import argparse
import logging
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from dp_forensics_toolkit.log_parser import DECODE_MECHANISMS, decode_log


def main():
    """主函数 / Main function"""

    parser = argparse.ArgumentParser(
        description="分析日志解码器 / Analytics log decoder",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用示例 / Usage Examples:
  python decode_log.py my_log.json ../data/guesses/emoji_152.txt decoded.json --i-own-this-log
  python decode_log.py my_log.json guesses.txt decoded.json --mechanism hcms --i-own-this-log

功能说明 / Function Description:
  对每个 "j,hexbits" 条目保留所有哈希桶位被置位的候选值：
  Keeps, for every "j,hexbits" entry, each guess whose hashed bucket is set:

  ✅ JSON 报告 / JSON report: 条目序号 → 候选列表 / entry index -> plausible guesses
  ✅ CSV 表格 / CSV table: record_index, key, hash_index, n_plausible, plausible

  只能解码自己设备的日志，必须传入 --i-own-this-log。
  Only decode logs from your own device; --i-own-this-log is required.
        """
    )

    parser.add_argument("log_file", help="日志 JSON 文件 / Log JSON file")
    parser.add_argument("guesses_file", help="候选文件（UTF-8，每行一个）/ Guess file, UTF-8, one per line")
    parser.add_argument("output_file", help="输出 JSON 文件 / Output JSON file")
    parser.add_argument("--mechanism", choices=DECODE_MECHANISMS, default="cms",
                       help="草图类型 / Sketch type (default: cms)")
    parser.add_argument("--i-own-this-log", action="store_true",
                       help="确认日志来自自己的设备 / Confirm the log comes from your own device")
    parser.add_argument("--verbose", "-v", action="store_true",
                       help="详细输出 / Verbose output")

    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        print("🔍 Analytics Log Decoder")
        print("=" * 50)
        print(f"📥 Log file: {args.log_file}")
        print(f"📥 Guesses: {args.guesses_file}")

        report = decode_log(args.log_file, args.guesses_file, args.output_file,
                            mechanism=args.mechanism, i_own_this_log=args.i_own_this_log)

        print(f"📤 Output file: {args.output_file}")
        print(f"📋 Decoded entries: {len(report['decoded'])}")
        if report["errors"]:
            print(f"⚠️ Malformed entries: {len(report['errors'])}")
        if args.verbose:
            for index, plausible in report["decoded"].items():
                print(f"   #{index}: {len(plausible)} plausible - {' '.join(plausible[:10])}")

        print(f"\n🎉 Decoding completed successfully!")

    except Exception as e:
        print(f"❌ Decoding failed: {e}")
        if args.verbose:
            import traceback
            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""
安装测试脚本 / Installation Test Script

测试差分隐私取证工具包的安装和依赖
Test the installation and dependencies of the DP Forensics Toolkit
"""

import sys
from pathlib import Path

ROOT = Path(__file__).parent

def check_python_dependencies():
    """测试Python依赖 / Test Python dependencies"""
    print("🔍 Testing Python dependencies...")

    # 导入名 → 安装名 / import name -> distribution name
    required_packages = {
        'numpy': 'numpy',
        'pandas': 'pandas',
        'scipy': 'scipy',
        'Crypto': 'pycryptodome',
        'pytest': 'pytest',
    }
    missing_packages = []

    for module, package in required_packages.items():
        try:
            __import__(module)
            print(f"   ✅ {package}")
        except ImportError:
            print(f"   ❌ {package} - Missing")
            missing_packages.append(package)

    return len(missing_packages) == 0, missing_packages

def check_crypto_backend():
    """测试 AES 与素数检验 / Test AES and the primality check"""
    print("\n🔍 Testing crypto backend...")

    try:
        from Crypto.Cipher import AES
        from Crypto.Util.number import isPrime
        block = AES.new(bytes(16), AES.MODE_ECB).encrypt(bytes(16))
        ok = len(block) == 16 and isPrime(2**31 - 1)
        print(f"   {'✅' if ok else '❌'} AES-128 / isPrime")
        return ok
    except ImportError as e:
        print(f"   ❌ pycryptodome unavailable: {e}")
        return False

def check_toolkit_import():
    """测试工具包导入 / Test toolkit import"""
    print("\n🔍 Testing toolkit import...")

    try:
        from dp_forensics_toolkit import AuditRunner, RngStream, TradeoffCurve, audit_epsilon_lb, decode_log
        print("   ✅ All toolkit modules imported successfully")
        return True
    except ImportError as e:
        print(f"   ❌ Import failed: {e}")
        return False

def check_file_structure():
    """测试文件结构 / Test file structure"""
    print("\n🔍 Testing file structure...")

    required_files = [
        'run_dp_audit.py',
        'dp_forensics_toolkit/__init__.py',
        'dp_forensics_toolkit/randomness.py',
        'dp_forensics_toolkit/float_mech.py',
        'dp_forensics_toolkit/sketch_mech.py',
        'dp_forensics_toolkit/secagg.py',
        'dp_forensics_toolkit/attacks.py',
        'dp_forensics_toolkit/auditor.py',
        'dp_forensics_toolkit/log_parser.py',
        'dp_forensics_toolkit/audit_runner.py',
        'utils/__init__.py',
        'utils/decode_log.py',
        'utils/simulate_secagg.py',
        'utils/run_experiment.py',
        'data/guesses/emoji_152.txt',
        'data/fig9_record.json',
        'data/configs/fig4.json',
        'requirements.txt',
        'environment.yml',
        'README.md'
    ]

    missing_files = []

    for file_path in required_files:
        if (ROOT / file_path).exists():
            print(f"   ✅ {file_path}")
        else:
            print(f"   ❌ {file_path} - Missing")
            missing_files.append(file_path)

    return len(missing_files) == 0, missing_files

# pytest 入口 / pytest entry points

def test_python_dependencies():
    ok, missing = check_python_dependencies()
    assert ok, f"missing packages: {missing}"

def test_crypto_backend():
    assert check_crypto_backend()

def test_toolkit_import():
    assert check_toolkit_import()

def test_file_structure():
    ok, missing = check_file_structure()
    assert ok, f"missing files: {missing}"

def main():
    """主测试函数 / Main test function"""
    print("🧪 DP Forensics Toolkit - Installation Test")
    print("=" * 60)

    all_tests_passed = True

    # 测试文件结构 / Test file structure
    files_ok, missing_files = check_file_structure()
    if not files_ok:
        all_tests_passed = False

    # 测试Python依赖 / Test Python dependencies
    deps_ok, missing_deps = check_python_dependencies()
    if not deps_ok:
        all_tests_passed = False

    # 测试加密后端 / Test crypto backend
    if not check_crypto_backend():
        all_tests_passed = False

    # 测试工具包导入 / Test toolkit import
    import_ok = check_toolkit_import()
    if not import_ok:
        all_tests_passed = False

    # 总结 / Summary
    print("\n" + "=" * 60)
    if all_tests_passed:
        print("🎉 All tests passed! Installation is complete and ready to use.")
    else:
        print("❌ Some tests failed. Please check the issues above.")

        if missing_files:
            print(f"\n📁 Missing files: {', '.join(missing_files)}")

        if missing_deps:
            print(f"\n🐍 Missing Python packages: {', '.join(missing_deps)}")
            print("   Install with: pip install " + " ".join(missing_deps))

    print("=" * 60)
    return all_tests_passed

if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)

#!/usr/bin/env python3
"""
差分隐私取证工具包安装脚本 / DP Forensics Toolkit Setup Script
"""

from setuptools import setup, find_packages
from pathlib import Path

# 读取README文件 / Read README file
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding='utf-8')

# 读取requirements文件 / Read requirements file
requirements = []
if (this_directory / "requirements.txt").exists():
    requirements = (this_directory / "requirements.txt").read_text().strip().split('\n')
    requirements = [req.strip() for req in requirements if req.strip() and not req.startswith('#')]

setup(
    name="dp-forensics",
    version="1.0.0",
    author="DP Forensics Team",
    description="差分隐私实现的取证与审计工具包 / Forensics and auditing toolkit for deployed differential privacy",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["examples", "examples.*"]),
    py_modules=["run_dp_audit"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Security :: Cryptography",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "dp-audit=run_dp_audit:main",
            "decode-log=utils.decode_log:main",
            "simulate-secagg=utils.simulate_secagg:main",
            "run-experiment=utils.run_experiment:main",
        ],
    },
    include_package_data=True,
    package_data={
        "": ["*.json", "*.txt", "*.md"],
    },
    keywords="differential privacy auditing floating point secure aggregation",
)

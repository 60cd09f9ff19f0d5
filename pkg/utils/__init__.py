"""
Utility Scripts for the DP Forensics Toolkit
Independent command-line tools for specific tasks
"""

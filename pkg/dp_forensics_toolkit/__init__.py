"""
差分隐私取证工具包 / Differential Privacy Forensics Toolkit

Floating-point DP samplers, sketch mechanisms and secure aggregation,
together with the attacks on them and an f-DP lower-bound auditor.
"""

from .randomness import RngStream
from .float_mech import LaplaceParams, GaussParams, sample_laplace, sample_gaussian_vector, gaussian_mechanism
from .sketch_mech import SketchConfig, sym_ohe, cms_client, hcms_client, one_bit_histogram
from .secagg import SecAggConfig, SecAggSimulator
from .attacks import MembershipTest, GuessSet, phi_lap, phi_gauss, boosted_gauss_test
from .auditor import TradeoffCurve, ConfusionMatrix, AuditReport, audit_epsilon_lb
from .audit_runner import AuditConfig, AuditRunner, run_audit, simulate_secagg, run_experiment
from .log_parser import AnalyticsRecord, parse_record, decode_log

__version__ = "1.0.0"
__author__ = "DP Forensics Team"

__all__ = [
    'RngStream',
    'LaplaceParams',
    'GaussParams',
    'sample_laplace',
    'sample_gaussian_vector',
    'gaussian_mechanism',
    'SketchConfig',
    'sym_ohe',
    'cms_client',
    'hcms_client',
    'one_bit_histogram',
    'SecAggConfig',
    'SecAggSimulator',
    'MembershipTest',
    'GuessSet',
    'phi_lap',
    'phi_gauss',
    'boosted_gauss_test',
    'TradeoffCurve',
    'ConfusionMatrix',
    'AuditReport',
    'audit_epsilon_lb',
    'AuditConfig',
    'AuditRunner',
    'run_audit',
    'simulate_secagg',
    'run_experiment',
    'AnalyticsRecord',
    'parse_record',
    'decode_log',
]

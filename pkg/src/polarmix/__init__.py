"""Polar codes over prime fields with arbitrary mixing kernels."""
from .channel import ChannelModel, capacity, parse_channel, posteriors, transmit
from .code import CodeSpec
from .construction import (
    ErasureProfile,
    IndexScore,
    bruteforce_entropy_profile,
    construct_code,
    erasure_profile,
    erasure_step,
    load_code,
    save_code,
)
from .decoder import DecodeOutcome, decode_fast, decode_genie, decode_reference
from .errors import *  # noqa: F401,F403
from .kernel import G2, Kernel, MixingReport, check_mixing, find_lower_reduction, find_upper_reduction
from .polarlab import (
    JointDistribution,
    cond_entropy,
    l2_uniform_gap,
    local_polarization_report,
    polarization_stats,
    verify_entropy_inequalities,
)
from .transform import encode, encode_fast, encode_reference, polar_transform_fast

__version__ = "0.1.0"

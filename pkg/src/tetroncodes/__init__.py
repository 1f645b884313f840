"""Majorana fermionic codes on tetrons: construction, decoding, scheduling
and Monte Carlo simulation."""

from .decoder import BpOsdDecoder, DecoderConfig, build_decoder_graph
from .factory import build_fermion_code
from .fermion import FermionCode, b_to_f, load_code, min_logical_weight, save_code, verify_code
from .majorana import MajoranaOp, TetronLayout, commutes, multiply, tetron_op
from .noise import NoiseModel, channel_probs, physical_error_rate
from .scheduler import Schedule, schedule, verify_schedule

__version__ = "0.1.0"

__all__ = [
    "BpOsdDecoder",
    "DecoderConfig",
    "FermionCode",
    "MajoranaOp",
    "NoiseModel",
    "Schedule",
    "TetronLayout",
    "b_to_f",
    "build_decoder_graph",
    "build_fermion_code",
    "channel_probs",
    "commutes",
    "load_code",
    "min_logical_weight",
    "multiply",
    "physical_error_rate",
    "save_code",
    "schedule",
    "tetron_op",
    "verify_code",
    "verify_schedule",
]

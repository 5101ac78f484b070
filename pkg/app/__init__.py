"""
Lattice Network Coding - App Module
Exposes the algebra, coding and simulation components for the command
line and the HTTP API.
"""

from app.cfwd import (
    ChannelVector,
    CoeffVector,
    LatticeScheme,
    computation_rate,
    decode_combination,
    mmse_alpha,
    select_coefficients,
)
from app.data_models import DecoderConfig, ExperimentConfig, SignalCodeConfig
from app.ffield import FieldElem, FieldSpec, sigma, sigma_inv, solve_linear
from app.gint import GaussInt, factor, gcd, is_prime
from app.lattice import Lattice, LatticePartition, build_partition, index, is_vector_space, phi, phi_inv
from app.netsim import baseline_qam, run_trial, throughput_curve, throughput_gap_db
from app.sigcode import SignalCode, encode_th, generator_matrix, stack_decode
from app.snf import GMatrix, smith_normal_form

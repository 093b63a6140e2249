"""Exact finite-blocklength error bounds for discrete memoryless channels.

Typical use::

    >>> import fblbounds as fb
    >>> engine = fb.BoundEngine(fb.bsc(0.1))
    >>> res = engine.bound(fb.BoundQuery(n=100, rate=0.3, variant="converse_J"))
"""
from .channel import (Channel, ChannelError, InfeasibleCostError, bsc, capacity,
                      conditional_entropy, divergence, divergence_cond, entropy,
                      functional_J, functional_underline_I, joint_functionals,
                      mean_cost, mutual_info, output_distribution, validate_channel)
from .typeclass import (ConditionalType, InputType, LogCount, count_conditional_types,
                        enumerate_conditional_types, enumerate_input_types, eta, kappa,
                        log_cond_type_class_size, log_type_class_size, nu)
from .spectrum import Spectrum, build_spectrum, cond_type_log_prob, tail_prob
from .bounds import (VARIANTS, BoundEngine, BoundQuery, BoundResult,
                     achievability_upper_bound, code_converse_rhs, converse_lower_bound,
                     random_coding_bound, sweep)
from .codesim import (Codebook, Decoder, SimResult, check_meta_converse,
                      check_random_coding, estimate_error, exact_error,
                      generate_codebook, mmi_decode, threshold_decode, wilson_interval)
from .channelfile import dump_channel, load_channel, parse_channel

__version__ = "0.1.0"

"""Space-time block codes with partial interference cancellation group
decoding: diagonal-layer and three-layer encoders, ML/ZF/PIC/PIC-SIC/SIC
detectors, numerical full-diversity criteria and a Monte Carlo BER engine.
"""

from .codes import (
    CodeSpec,
    GroupingScheme,
    SHIPPED_CODES,
    design1_rate,
    design1_spec,
    design2_rate,
    design2_spec,
    dispersion_set,
    encode,
    get_code,
    grouping,
    rate,
)
from .constellation import Constellation, bits_to_symbols, make_qam, symbols_to_bits
from .detect import (
    DecodeResult,
    RankDeficientError,
    SearchSpaceError,
    ml_decode,
    pic_group_decode,
    pic_sic_group_decode,
    sic_symbolwise_decode,
    zf_decode,
)
from .diversity import check_difference_rank, check_group_independence, check_sic_independence
from .equivch import EquivalentChannel, build_for, design1_closed_form, design2_closed_form
from .rotation import CyclotomicParams, RotationMatrix, cyclotomic_rotation, default_params, planar_rotation_2x2
from .sim import BerRecord, SimConfig, compute_mu, estimate_diversity_slope, run_ber

__all__ = [name for name in dir() if not name.startswith("_")]

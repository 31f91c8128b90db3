"""Design, factorization and processing with short symmetric multiwavelet banks."""

from .polymat import LaurentMatrix, lm_det, lm_mul, lm_paraconj
from .design import SimpleDesignParams, solve_simple_product_filter, sa1_product_filter
from .msf import (
    BauerState,
    InadmissibleFilterError,
    bauer_fixed_point,
    bauer_iterate,
    bauer_truncated_cholesky,
    extract_factors,
    spectral_factor,
    verify_factorization,
)
from .completion import SymmetryError, complete, orthogonal_complement, symmetric_completion
from .mwt import MultiwaveletSystem, cascade_eval, haar, load_system, quantized_sa1, sa1, save_system
from .transform import (
    PrePostPair,
    WaveletPyramid,
    WaveletPyramid2D,
    dmwt_forward_1d,
    dmwt_forward_2d,
    dmwt_inverse_1d,
    dmwt_inverse_2d,
    haar_prepost,
)
from .lifting import dyadic_approx, gram_defect, lift_forward, lift_inverse, sa1_lifting_plan
from .denoise import NoiseModel, ShrinkRule, denoise_image, universal_threshold, vector_shrink
from .metrics import CGModel, coding_gain, psnr, sup_error

__version__ = "0.1.0"

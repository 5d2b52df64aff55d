"""
Математические сервисы пакета
"""

from .stability import check_semistable, require_semistable
from .intersect import common_zeros, reflection_pair, multiplicity, fulton_reduce
from .factorization import fejer_riesz
from .agler import canonical_system, verify_agler, realize, intertwine
from .gram import gram_model
from .boundary import regularity_ladder, vanishing_order, bottom_form_check
from .ideal import generators, dim_P, membership, linfty_multiplier
from .oracle import l2_quadrature, fourier_report, resultant_multiplicity
from .analysis import analyze

__all__ = [
    'check_semistable',
    'require_semistable',
    'common_zeros',
    'reflection_pair',
    'multiplicity',
    'fulton_reduce',
    'fejer_riesz',
    'canonical_system',
    'verify_agler',
    'realize',
    'intertwine',
    'gram_model',
    'regularity_ladder',
    'vanishing_order',
    'bottom_form_check',
    'generators',
    'dim_P',
    'membership',
    'linfty_multiplier',
    'l2_quadrature',
    'fourier_report',
    'resultant_multiplicity',
    'analyze',
]

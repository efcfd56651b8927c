"""Numerical toolkit for atomic measures, their Fourier transforms, plateau test
functions and growth diagnostics, plus factories for measures whose transforms
are tempered while the measures are not."""

from .atomic import (
    AtomicMeasure,
    BlockMeasure,
    BudgetExceeded,
    DensityBlock,
    ProductMeasure,
    Window,
    convolve,
    hahn_jordan,
    restrict,
    total_variation,
    translate,
)
from .fourier import ft_any, ft_eval, ft_product_eval, sup_norm_estimate
from .schwartz import PlateauSchwartz, annular_bump, cutoff_bump, separation_function, smooth_step
from .temperedness import dyadic_profile, growth_test, slow_increase_partial

__version__ = "0.1.0"

"""Exact distribution of <psi|A|psi> over Haar-random pure states."""

from .analysis import (CLTReport, ConcentrationReport, clt_diagnostics, levy_compare,
                       number_operator_tail, rescaled_density)
from .errors import (DegenerateLaw, HaarLawError, InvalidArgument, InvalidSpectrum, NoDensity,
                     PrecisionExceeded, RequiresNonDegenerate, TooLarge)
from .exact_law import (LawCoefficients, PointMassLaw, cdf, char_fn, compile_law, density,
                        identity_check, integrate, mgf, sf)
from .moments import (MomentReport, central_cumulants, cumulants, moments_compact,
                      moments_fidelity, moments_permutation, moments_quadrature)
from .montecarlo import GoFReport, SampleSet, ks_test, sample
from .precision import PrecisionPolicy
from .spectrum import Spectrum, SpectrumKind, build_spectrum, from_pairs, generate

__version__ = "0.1.0"

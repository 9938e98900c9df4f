"""sfft-dt: sparse FFT by downsampling in time.

The input is downsampled so that subsequent FFTs run on length-O(K)
sequences; the aliasing this causes in each frequency bin is undone by
closed-form per-bin decoding (exactly sparse spectra) or by a pruned
compressive-sensing solve (generally sparse spectra).
"""

from ._kernels import BACKEND, using_compiled
from .exact import (EstimateResult, ExactConfig, SolverTrace,
                    estimate_sparsity_and_solve, solve_iterative,
                    solve_noniterative)
from .general import (CollisionEstimate, GeneralConfig, SensingMatrix,
                      draw_shifts, estimate_collisions, prune_columns,
                      sensing_matrix, solve_general, subspace_pursuit)
from .signals import (ExactSparseSpec, MixtureSpec, gen_exact, gen_mixture,
                      mixture_for_snr, sigma_off_for_snr)
from .spectral import (AliasedSpectrum, DownsampleView, SparseSpectrum,
                       SyndromeSet, aliased_values, downsample, fft,
                       forward_dft_oracle, snr, syndromes_for_bin,
                       synthesize, transform_view)
from .syndrome import (DecodedBin, DegenerateBranch, IllConditioned,
                       NearSingular, PolyCoefficients, decode_bin,
                       root_to_location, roots_closed_form,
                       solve_coefficients, solve_values)

__version__ = "0.1.0"

__all__ = [
    "AliasedSpectrum", "BACKEND", "CollisionEstimate", "DecodedBin",
    "DegenerateBranch", "DownsampleView", "EstimateResult", "ExactConfig",
    "ExactSparseSpec", "GeneralConfig", "IllConditioned", "MixtureSpec",
    "NearSingular", "PolyCoefficients", "SensingMatrix", "SolverTrace",
    "SparseSpectrum", "SyndromeSet", "aliased_values", "decode_bin",
    "downsample", "draw_shifts", "estimate_collisions",
    "estimate_sparsity_and_solve", "fft", "forward_dft_oracle", "gen_exact",
    "gen_mixture", "mixture_for_snr", "prune_columns", "root_to_location",
    "roots_closed_form", "sensing_matrix", "sigma_off_for_snr", "snr",
    "solve_coefficients", "solve_general", "solve_iterative",
    "solve_noniterative", "solve_values", "subspace_pursuit",
    "syndromes_for_bin", "synthesize", "transform_view", "using_compiled",
]

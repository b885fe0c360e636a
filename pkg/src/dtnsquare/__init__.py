"""Square-root Dirichlet-to-Neumann maps on circulant layered networks.

Submodules:

* :mod:`~dtnsquare.circulant` -- circulant algebra, spectra, principal square roots
* :mod:`~dtnsquare.network` -- the cylinder network and its DtN map by several routes
* :mod:`~dtnsquare.contfrac` -- the continued fraction identity and coefficient recovery
* :mod:`~dtnsquare.continuum` -- Fourier-multiplier DtN map of the unit disc
* :mod:`~dtnsquare.cli` -- command-line reports and exports
"""

from .circulant import (
    Circulant,
    SymCirculant,
    adjacency_B,
    check_bbt_identity,
    mat_op,
    max_norm,
    minus_laplacian,
    spectrum,
    sqrt_psd,
)
from .contfrac import (
    ContFracCoeffs,
    OddEvenRational,
    beta_rational,
    conjecture_coeffs,
    eval_beta,
    lambda_points,
    line_check,
    real_terms,
    recover_coeffs,
    verify_conjecture,
)
from .continuum import (
    FourierFunction,
    discrete_vs_continuous,
    dtn_continuous,
    minus_second_derivative,
    verify_continuum_identity,
)
from .network import (
    CylinderNetwork,
    DtNMap,
    Provenance,
    Termination,
    dtn_fixed_point,
    dtn_infinite_closed_form,
    dtn_per_mode,
    dtn_truncated,
    verify_theorem41,
)

__version__ = "0.1.0"

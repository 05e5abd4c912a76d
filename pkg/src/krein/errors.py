"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI and
reports can record *why* something failed without parsing messages.
"""


class KreinError(Exception):
    code = "krein_error"


class DimensionMismatchError(KreinError, ValueError):
    code = "dimension_mismatch"


class InvalidParamsError(KreinError, ValueError):
    code = "invalid_params"


class BadDimensionError(KreinError, ValueError):
    code = "bad_dimension"


class MuInSpectrumError(KreinError):
    code = "mu_in_spectrum"

    def __init__(self, mu, sigma_min):
        self.mu = mu
        self.sigma_min = sigma_min
        super().__init__(f"mu={mu!r} is (numerically) in the spectrum of A22; sigma_min={sigma_min:.3e}")


class NotDiagonalizableError(KreinError):
    code = "not_diagonalizable_or_ill_conditioned"


class BranchCutError(KreinError):
    code = "spectrum_touches_branch_cut"


class GapTooSmallError(KreinError):
    code = "gap_too_small"


class CoordinateDegenerateError(KreinError):
    code = "coordinate_degenerate"


class GNormTooLargeError(KreinError):
    code = "g_norm_too_large"


class NoConvergenceError(KreinError):
    code = "no_convergence"

    def __init__(self, message, best_K=None, best_residual=None, iterations=None):
        super().__init__(message)
        self.best_K = best_K
        self.best_residual = best_residual
        self.iterations = iterations


class ContractionViolatedError(KreinError):
    code = "contraction_violated"


class NoStabilizationError(KreinError):
    code = "no_stabilization"


class OneMinusKGSingularError(KreinError):
    code = "one_minus_kg_singular"


class ResidualTooLargeError(KreinError):
    code = "residual_too_large"


class SpectrumInHalfPlaneError(KreinError):
    code = "spectrum_in_halfplane"

    def __init__(self, eigenvalue, boundary):
        self.eigenvalue = eigenvalue
        self.boundary = boundary
        super().__init__(f"eigenvalue {eigenvalue!r} has real part >= {boundary!r}")


class OverflowAtLargeTError(KreinError):
    code = "overflow_at_large_t"


class Alpha0InSpectrumError(KreinError):
    code = "alpha0_in_spectrum"

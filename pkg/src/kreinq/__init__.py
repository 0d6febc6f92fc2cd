"""Self-adjoint extensions through Krein-type resolvent formulas, at matrix scale."""
from .errors import *  # noqa: F401,F403
from .krein_extension import (KreinResolvent, LambdaHatValue, ReconstructedOperator, ResidualEntry, SampleSpec,
                              VerificationReport, compare_spectrum, identity_suite, krein_resolvent, lambda_hat,
                              reconstruct_operator, spectrum_aq_via_q, verify_first_resolvent_identity,
                              verify_main_theorem)
from .models import (FamilyRecipe, ModelRecipe, generate, lattice_delta, oracle_reconstruct, pinned_two_level,
                     singular_family_model)
from .operator_model import (ExtensionModel, GammaValue, ModelConfig, build_model, check_gamma_identities, gamma,
                             resolvent0, spectrum0)
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .weyl_q import (AlphaType, Perturbed, ProjectorTheta, QFamily, QValue, VWType, WeylValue, ZQLabel, ZQScanResult,
                     build_q, check_m1, check_m2, check_q_axioms, check_weyl_axioms, in_zq, scan_zq, weyl)

__version__ = "0.1.0"

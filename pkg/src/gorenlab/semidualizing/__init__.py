"""Semidualizing modules, the Bass class, C-projectives and complete PC-resolutions."""
from .certify import (BassReport, CProjectiveResult, SemidualizingError, SemidualizingReport,
                      TotCRefReport, bass_membership, c_power, check_semidualizing, is_C_projective,
                      is_totally_C_reflexive, require_semidualizing)
from .completepc import (CompletePCResolution, PCVerification, PrecoverVerdict, build_complete_PC,
                         canonical_complete_PC, check_precover, hom_complex_failures,
                         splice_complete_PC, unit_perturbation, verify_complete_PC)
from .maps import (BaseChangeReport, BaseChangeRow, biduality_map, evaluation_map,
                   ext_base_change_check, homothety_map, tensor_evaluation)

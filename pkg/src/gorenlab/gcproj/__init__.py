"""G_C-projective modules, dimensions and resolutions."""
from .gcpd import (COMPLETE_PC_WINDOW, GcPdReport, GcProjectiveResult, SyzygyCheck, gc_pd,
                   is_gc_projective)
from .minimal import (MinimalityVerdict, MinimalProperReport, SummandWitness,
                      build_minimal_proper_gc_resolution, detect_C_summand_in_image, is_minimal_PC,
                      minimal_PC_resolution, minimized_k_resolution, residue_functional,
                      split_c_projective_sequence, trim_approximation)
from .strict import (GcApproximation, ProperCheckReport, RelativeTable, StrictGcResolution,
                     dual_embedding, relative_cohomology, strict_gc_resolution, verify_proper)

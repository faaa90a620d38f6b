"""Finite-dimensional commutative algebras, their modules, and module constructions."""
from .algebra import (AlgebraError, FiniteAlgebra, LocalStructure, build_monomial_quotient,
                      explicit_algebra, ground_field_algebra, ideal_powers, product_algebra)
from .constructions import (ExactnessVerdict, IsoResult, Pushout, ShortExactSequence, Verdict,
                            dual_sequence, exactness_check, find_isomorphism, induced_cokernel_map,
                            joint_image_rank, pushout)
from .functors import HomModule, TensorModule, hom_module, postcompose, precompose, tensor_hom, tensor_module
from .modules import (DirectSum, FdModule, FreeModule, ModuleError, ModuleHom, PowerModule, Quotient,
                      character_module, cokernel, corestrict, direct_sum, direct_sum_hom, free_module,
                      ideal_module, identity, image, k_dual, kernel, multiplication_map, power_module,
                      quotient, quotient_by_ideal, reduced_basis, regular_module, residue_field,
                      submodule, subobject, twisted, zero_hom, zero_module)
from .presentation import (Presentation, generators_of_submodule, hom_block_matrix, maximal_ideal_span,
                           minimal_generators, presentation, residues, rmatrix_to_k, tensor_block_matrix)
from .product import component_hom, components, decompose, inflate

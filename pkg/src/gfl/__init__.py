"""Divided powers, flag modules and Crabb-Hubbuck morphisms over finite fields."""

from .fields import (FieldElement, FieldSpec, binom_mod_p, bracket, default_field, frobenius, inv,
                     mul, parse_field, seq_bracket)
from .linalg import MatrixFq, compose, is_injective, kernel_basis, rank, tensor
from .gamma import (GammaElement, TensorElement, bar_gamma_kernel, coproduct, divided_power_of_vector,
                    gamma_basis, gamma_map, product, tilde_gamma_kernel, verschiebung_p,
                    verschiebung_q)
from .flags import (FlagCanonical, canonicalize, enumerate_flags, flag_count, flag_diag, flag_map,
                    truncate)
from .chmorph import (CriterionReport, SeqS, delta_s, eta_stab, phi_constant, phi_line, phi_seq,
                      psi_s, qk_dim, restriction_test, ring_of_lines_dim)
from .harness import (SweepConfig, run_lemma_battery, run_ring_of_lines, run_stabilization,
                      run_theorem_sweep, run_tightness)
from ._kernels import backend

__version__ = "0.1.0"

"""Belief propagation on tree-like neighborhoods versus exact local estimators."""

from .bp import MessageTrace, Verdict, message_sign, run_bp, run_bp_on_tree
from .channels import BEC, BIAWGN, BSC, likelihood, parse_channel
from .counterexamples import build_section2_code, build_section3_code, find_witness
from .estimators import BitwiseMAPDecoder, SumProductDecoder
from .gf2 import (Codebook, SubCodebook, dual_basis, enumerate_codewords, implicit_constraints,
                  project, row_reduce)
from .ml_oracle import Decision, global_map, local_ml, tree_local_ml
from .tanner import DirectedEdge, from_matrix, local_check_matrix, unroll, variable_index_set

__version__ = "0.1.0"

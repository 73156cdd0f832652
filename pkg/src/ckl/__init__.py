"""Verification workbench for common knowledge logic."""

from .formula import AgentSet, parse, to_text, expand, e_power
from .kripke import Frame, KripkeModel, evaluate, is_ckl_frame, rtc, valid_in_frame
from .algebra import FiniteModalAlgebra, complex_algebra, is_ckl_algebra, is_mh_algebra
from .cofinite import SAlgebra, SElem, no_glb_witness
from .proof import check_proof, check_script, is_tautology, parse_proof

__version__ = "0.1.0"

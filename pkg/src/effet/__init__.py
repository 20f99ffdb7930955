"""Finite-model workbench for a set-based type-and-effect system over the computational lambda calculus."""
from .config import ModelConfig, build_config, load_config
from .finset import FinFn, FinSetObj, limits
from .grading import GradedFamily, check_commutative, image_fixpoint
from .syntax import parse_term, parse_type, print_term, print_type
from .typecheck import check, infer, judge

__all__ = [
    "FinFn", "FinSetObj", "GradedFamily", "ModelConfig", "build_config", "check", "check_commutative",
    "image_fixpoint", "infer", "judge", "limits", "load_config", "parse_term", "parse_type", "print_term",
    "print_type",
]

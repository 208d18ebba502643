"""Binary image reconstruction from line sums plus per-block counts."""

from .model import (
    BinaryImage,
    BlockType,
    GrayImage,
    Instance,
    ValidationError,
    VerificationReport,
    classify_block,
    degrade,
    make_exact_instance,
    perturb_instance,
    random_image,
    validate_instance,
    verify_solution,
)
from .formats import (
    FormatError,
    parse_instance,
    read_gray,
    read_image,
    write_gray,
    write_image,
    write_instance,
)
from .solver import StripCase, StripPermutation, check_unique, classify_strip, properize, solve_dr
from .switches import (
    SwitchMove,
    TVValue,
    all_switches,
    apply_switch,
    find_switch,
    has_reversed_switch,
    reduce,
    tv,
    tv_descend,
)
from .hardness import (
    BoardSpec,
    OneInThreeInstance,
    build_board,
    embed_assignment,
    extract_assignment,
    gen_sat_instance,
    lift_instance,
    parse_sat,
    write_sat,
)
from .oracle import SearchBudget, constrained_solve, oracle_count, oracle_solve

__all__ = [
    "BinaryImage",
    "BlockType",
    "BoardSpec",
    "FormatError",
    "GrayImage",
    "Instance",
    "OneInThreeInstance",
    "SearchBudget",
    "StripCase",
    "StripPermutation",
    "SwitchMove",
    "TVValue",
    "ValidationError",
    "VerificationReport",
    "all_switches",
    "apply_switch",
    "build_board",
    "check_unique",
    "classify_block",
    "classify_strip",
    "constrained_solve",
    "degrade",
    "embed_assignment",
    "extract_assignment",
    "find_switch",
    "gen_sat_instance",
    "has_reversed_switch",
    "lift_instance",
    "make_exact_instance",
    "oracle_count",
    "oracle_solve",
    "parse_instance",
    "parse_sat",
    "perturb_instance",
    "properize",
    "random_image",
    "read_gray",
    "read_image",
    "reduce",
    "solve_dr",
    "tv",
    "tv_descend",
    "validate_instance",
    "verify_solution",
    "write_gray",
    "write_image",
    "write_instance",
    "write_sat",
]

__version__ = "0.1.0"

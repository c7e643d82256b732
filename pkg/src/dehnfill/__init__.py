"""Semi-deciding isomorphism of marked groups with Dehn fillings."""

from .budget import BudgetConfig
from .core import characteristic_core
from .errors import DehnFillError, ParseError
from .filling import FillingResult, characteristic_filling, dehn_filling
from .groupfile import load_group, parse_group_file, serialize_group
from .invariants import abelianization, fingerprint, marked_fingerprint, smith_normal_form
from .iso import compare, disprove_step, search_isomorphism, verify_certificate, verify_witness
from .presentation import MarkedGroup, PeripheralRecord, Presentation, canonical_digest
from .wordproblem import decide_word

__all__ = [
    "BudgetConfig", "characteristic_core", "DehnFillError", "ParseError",
    "FillingResult", "characteristic_filling", "dehn_filling",
    "load_group", "parse_group_file", "serialize_group",
    "abelianization", "fingerprint", "marked_fingerprint", "smith_normal_form",
    "compare", "disprove_step", "search_isomorphism", "verify_certificate", "verify_witness",
    "MarkedGroup", "PeripheralRecord", "Presentation", "canonical_digest", "decide_word",
]

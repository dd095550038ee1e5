"""Acceptance checks for the full pipeline."""
from .acceptance import CRITERIA, CriterionResult, g2_bracket, run_acceptance, run_criterion

"""
Shared machinery for rewriting formal sums of words to normal form.

Each algebra supplies a ``step`` callback: given a word it returns None if
the word is already normal, otherwise the combination that replaces it.
"""

import logging
from typing import Callable, Dict, Hashable, Mapping, Optional, Sequence, TypeVar

from src.algebra.errors import RewriteLimitExceeded
from src.algebra.fp_core import accumulate
from src.utils.config import get_settings

logger = logging.getLogger(__name__)

W = TypeVar("W", bound=Hashable)
Step = Callable[[W], Optional[Mapping[W, int]]]

STRATEGIES = ("leftmost", "rightmost")


def normalize(terms: Mapping[W, int], step: Step, p: int,
              label: str = "rewrite", limit: Optional[int] = None) -> Dict[W, int]:
    """
    Apply ``step`` until every surviving word is normal.

    Raises RewriteLimitExceeded once more than ``limit`` rewrites were
    performed (default: PARTITION_OPS_REWRITE_LIMIT).
    """
    limit = limit if limit is not None else get_settings().rewrite_limit
    pending: Dict[W, int] = {}
    for word, coeff in terms.items():
        accumulate(pending, word, coeff, p)
    done: Dict[W, int] = {}
    steps = 0
    while pending:
        word, coeff = pending.popitem()
        replacement = step(word)
        if replacement is None:
            accumulate(done, word, coeff, p)
            continue
        steps += 1
        if steps > limit:
            raise RewriteLimitExceeded(f"{label}: more than {limit} rewrite steps")
        for new_word, new_coeff in replacement.items():
            accumulate(pending, new_word, new_coeff * coeff, p)
    if steps:
        logger.debug("%s: %d steps, %d normal terms", label, steps, len(done))
    return done


def pick_pair(bad_positions: Sequence[int], strategy: str) -> Optional[int]:
    """Choose which rewritable adjacent pair to expand first."""
    if not bad_positions:
        return None
    if strategy == "leftmost":
        return bad_positions[0]
    if strategy == "rightmost":
        return bad_positions[-1]
    raise ValueError(f"unknown rewriting strategy {strategy!r}; use one of {STRATEGIES}")


def splice(letters: tuple, position: int, expansion: Mapping[tuple, int]) -> Dict[tuple, int]:
    """Replace letters[position:position + 2] by each word of an expansion."""
    prefix, suffix = letters[:position], letters[position + 2:]
    return {prefix + middle + suffix: coeff for middle, coeff in expansion.items()}

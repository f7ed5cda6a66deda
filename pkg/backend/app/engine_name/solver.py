"""
solver.py - Search followed by reduction, as the CLI runs it.
"""

import logging
from typing import Optional

from app.core.composition import Composition, Repository, Request
from app.engine_name.reduction import reduce_until_fixpoint
from app.engine_name.search import find_composition

logger = logging.getLogger(__name__)


def solve_name(repo: Repository, req: Request, use_scores: bool = True,
               reduce: bool = True, max_rounds: Optional[int] = None) -> Optional[Composition]:
    comp = find_composition(repo, req, use_scores=use_scores)
    if comp is None or not reduce:
        return comp
    reduced = reduce_until_fixpoint(repo, req, comp, use_scores=use_scores, max_rounds=max_rounds)
    logger.info(f"Name search: {len(comp)} calls, {len(reduced)} after reduction")
    return reduced

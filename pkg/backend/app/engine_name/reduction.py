"""
reduction.py - Drops services that teach nothing later calls need.

A service stays only if it outputs at least one parameter that earlier kept
services did not provide and that a later service or the goal still requires.
"""

import logging
from collections import Counter
from typing import Optional

from app.core.composition import Composition, Repository, Request, validate_composition
from app.core.errors import InvalidCompositionError
from app.engine_name.search import find_composition

logger = logging.getLogger(__name__)


def reduce_composition(repo: Repository, req: Request, comp: Composition) -> Composition:
    """One reduction pass (forward count, then forward sweep).

    Raises:
        InvalidCompositionError: ``comp`` does not answer ``req``
    """
    report = validate_composition(repo, req, comp)
    if not report.valid:
        raise InvalidCompositionError("Cannot reduce an invalid composition")

    # Pass 1: how many calls still ahead need each parameter.
    pending = Counter()
    for name in comp.calls:
        pending.update(repo[name].inputs)

    # Pass 2: keep a call only if it is the first provider of something needed.
    provided = set(req.init)
    kept = []
    for name in comp.calls:
        svc = repo[name]
        pending.subtract(svc.inputs)
        useful = any(
            p not in provided and (pending[p] > 0 or p in req.goal)
            for p in svc.outputs
        )
        if useful:
            kept.append(name)
            provided |= svc.outputs

    removed = len(comp) - len(kept)
    if removed:
        logger.debug(f"Reduction removed {removed} services")
    return Composition.sequential(kept)


def reduce_until_fixpoint(repo: Repository, req: Request, comp: Composition,
                          use_scores: bool = True, max_rounds: Optional[int] = None) -> Composition:
    """Alternate reduction and a search restricted to the kept services.

    Stops when a round removes nothing; at most ``max_rounds`` rounds
    (default |R|).
    """
    rounds = max_rounds or max(len(repo), 1)
    for _ in range(rounds):
        reduced = reduce_composition(repo, req, comp)
        if len(reduced) == len(comp):
            return reduced
        subrepo = {name: repo[name] for name in reduced.calls}
        rebuilt = find_composition(subrepo, req, use_scores=use_scores)
        comp = rebuilt if rebuilt is not None and len(rebuilt) <= len(reduced) else reduced
    return comp

"""
online_gen.py - Scenario generator for the online engine.

Per query: a main chain x1..xk, and for one member xj a planted stand-in
path (y1, y2) producing exactly xj's outputs and/or a longer path z1..
regenerating the goal from what precedes xj. Modes cycle over the queries so
every repair branch is exercised: swap to a backup, recompute a backup,
re-solve.
"""

import logging
from typing import Dict, List, Tuple

from app.genbench.config import GenConfig, GroundTruth, phase_rngs, pick, set_size

logger = logging.getLogger(__name__)

PHASES = ("queries", "planted", "noise")
MODES = ("both", "type1", "type2", "none")


class _Fresh:
    """Unique parameter names inside one query's pool."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.count = 0

    def take(self, n: int) -> List[str]:
        out = [f"{self.prefix}{self.count + i}" for i in range(n)]
        self.count += n
        return out


def _inputs(rng, pool: List[str], anchor: List[str], upper: int) -> List[str]:
    """Nonempty subset of ``pool`` holding at least one ``anchor`` parameter."""
    chosen = set(pick(rng, pool, set_size(rng, upper)))
    if anchor and not chosen & set(anchor):
        chosen.add(anchor[int(rng.integers(0, len(anchor)))])
    return sorted(chosen)


def _op_register(name: str, ins: List[str], outs: List[str]) -> Dict:
    return {"op": "register_service", "name": name, "in": sorted(ins), "out": sorted(outs)}


def _expected_backups(mode: str, j: int, k: int) -> Dict[str, int]:
    """Backup kind the engine must find per main member (1-based indexes)."""
    member = lambda m: f"x{m}"  # noqa: E731
    expected: Dict[str, int] = {}
    if mode in ("both", "type1"):
        expected[member(j)] = 1
    if mode in ("both", "type2"):
        first = j + 1 if mode == "both" else j
        for m in range(first, k):
            expected[member(m)] = 2
        expected[member(k)] = 1
    return expected


def generate_online_scenario(cfg: GenConfig) -> Tuple[List[Dict], GroundTruth]:
    rng = phase_rngs(cfg.seed, PHASES)
    upper = cfg.pars_per_service
    k = max(3, cfg.num_ws_in_solution)

    registers: List[Dict] = []
    finds: List[Dict] = []
    repairs: List[Dict] = []
    queries: Dict[str, Dict] = {}

    for qi in range(cfg.query_count):
        qid = f"q{qi}"
        mode = MODES[qi % len(MODES)]
        fresh = _Fresh(f"{qid}_p")
        r = rng["queries"]

        init = fresh.take(set_size(r, upper))
        produced: List[List[str]] = []
        main: List[Tuple[str, List[str], List[str]]] = []
        for i in range(1, k + 1):
            pool = sorted(set(init).union(*produced))
            ins = _inputs(r, pool, produced[-1] if produced else [], upper)
            outs = fresh.take(set_size(r, upper))
            produced.append(outs)
            main.append((f"{qid}_x{i}", ins, outs))
        goal = pick(r, produced[-1], set_size(r, len(produced[-1])))

        p = rng["planted"]
        j = int(p.integers(1, k))
        before = sorted(set(init).union(*produced[: j - 1]))
        anchor = produced[j - 2] if j > 1 else []
        planted: List[Tuple[str, List[str], List[str]]] = []
        if mode in ("both", "type1"):
            z1 = fresh.take(set_size(p, upper))
            planted.append((f"{qid}_y1", _inputs(p, before, anchor, upper), z1))
            planted.append((f"{qid}_y2", _inputs(p, z1, z1, upper), list(produced[j - 1])))
        if mode in ("both", "type2"):
            length = k - j + 2
            ins = _inputs(p, before, anchor, upper)
            for m in range(1, length + 1):
                outs = list(goal) + fresh.take(1) if m == length else fresh.take(set_size(p, upper))
                planted.append((f"{qid}_z{m}", ins, outs))
                ins = _inputs(p, outs, outs, upper)

        for name, ins, outs in main + planted:
            registers.append(_op_register(name, ins, outs))
        finds.append({"op": "find_composition", "id": qid, "known": sorted(init), "required": sorted(goal)})

        expected_events: List[str] = []
        if mode in ("both", "type2"):
            repairs.append({"op": "remove_service", "name": f"{qid}_x{j}"})
            expected_events.append("swapped_to_backup")
        elif mode == "type1":
            repairs.append({"op": "detect_service_down", "name": f"{qid}_y1"})
            expected_events.append("backup_recomputed")
        else:
            name, ins, outs = main[j - 1]
            repairs.append({"op": "remove_service", "name": name})
            repairs.append(_op_register(f"{name}_restored", ins, outs))
            expected_events += ["request_lost", "solved"]

        queries[qid] = {
            "mode": mode,
            "main": [name for name, _, _ in main],
            "member": f"{qid}_x{j}",
            "backups": {f"{qid}_{m}": kind for m, kind in _expected_backups(mode, j, k).items()},
            "events": expected_events,
        }

    noise_params = [f"n{i}" for i in range(cfg.num_parameters)]
    noise_count = max(0, cfg.num_web_services - len(registers))
    n = rng["noise"]
    for idx in range(noise_count):
        outs = pick(n, noise_params, set_size(n, upper))
        rest = [q for q in pick(n, noise_params, 2 * upper) if q not in set(outs)]
        ins = rest[: set_size(n, upper)] or [noise_params[-1]]
        registers.append(_op_register(f"noise{idx}", ins, [o for o in outs if o not in ins]))

    stream = registers + finds + repairs
    truth = GroundTruth(model="online", seed=cfg.seed, queries=queries)
    logger.info(f"Generated online scenario: {len(registers)} services, {len(finds)} queries")
    return stream, truth

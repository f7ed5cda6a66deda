"""
rel_gen.py - Staged generator for relational instances.

Knowledge grows in stages K0, K1, ... Ks. Every stage adds objects, each
linked by a random relation to an anchor object that already existed.
Between two consecutive stages sits a layer of services: each service
consumes anchors from Ki (plus a few other known objects) together with the
relations holding among them, and produces some of the new objects of Ki+1
with their links. The query knows K0 and asks for objects of the last stage.

Every real object gets its own concept from a pool of ``numParameters``
concepts, so bindings are unambiguous while the pool lasts.

A planted rule comes with a twin service doing the same job at the price of
one more call; the goal asks for the derived relation, so either of them can
supply it.
Noise services live on their own concepts and relations and never reach
the goal.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.genbench.config import GenConfig, GroundTruth, phase_rngs, pick, set_size
from app.genbench.name_gen import _labels

logger = logging.getLogger(__name__)

PHASES = ("knowledge", "layers", "rules", "noise", "query", "order")
ROOT = "Thing"
NOISE_ROOT = "NoiseObject"
NOISE_INPUTS = 2

Triple = Tuple[str, str, str]


@dataclass
class _Knowledge:
    """Real objects and triples, each tagged with the stage that created it."""
    concept: Dict[str, str] = field(default_factory=dict)
    stage_of: Dict[str, int] = field(default_factory=dict)
    triples: List[Triple] = field(default_factory=list)
    triple_stage: List[int] = field(default_factory=list)
    link_of: Dict[str, Triple] = field(default_factory=dict)

    def objects(self, stage: int) -> List[str]:
        return [o for o, s in self.stage_of.items() if s <= stage]

    def triples_among(self, names, stage: int) -> List[Triple]:
        names = set(names)
        return [t for t, s in zip(self.triples, self.triple_stage)
                if s <= stage and t[1] in names and t[2] in names]


class _ConceptPool:
    """Hands out distinct concepts until the pool runs dry, then repeats."""

    def __init__(self, rng: np.random.Generator, size: int):
        self.names = _labels("C", size)
        self.order = [self.names[i] for i in rng.permutation(size)]
        self.rng = rng
        self.taken = 0
        self.reused = 0

    def take(self) -> str:
        if self.taken < len(self.order):
            self.taken += 1
            return self.order[self.taken - 1]
        self.reused += 1
        return self.names[int(self.rng.integers(0, len(self.names)))]


class _StageBuilder:
    def __init__(self, cfg: GenConfig, rng: Dict[str, np.random.Generator]):
        self.cfg = cfg
        self.rng = rng
        self.K = _Knowledge()
        self.pool = _ConceptPool(rng["knowledge"], cfg.num_parameters)
        self.relations = _labels("rel", cfg.relation_count)

    def new_object(self, stage: int) -> str:
        oid = f"o{len(self.K.concept)}"
        self.K.concept[oid] = self.pool.take()
        self.K.stage_of[oid] = stage
        return oid

    def link(self, anchor: str, obj: str, stage: int) -> Optional[Triple]:
        if not self.relations:
            return None
        rk = self.rng["knowledge"]
        rel = self.relations[int(rk.integers(0, len(self.relations)))]
        triple = (rel, anchor, obj) if rk.random() < 0.5 else (rel, obj, anchor)
        self.K.triples.append(triple)
        self.K.triple_stage.append(stage)
        self.K.link_of[obj] = triple
        return triple

    def typed(self, names: List[str]) -> List[Dict]:
        return [{"name": n, "type": self.K.concept[n]} for n in names]

    def seed_stage(self) -> List[str]:
        rk = self.rng["knowledge"]
        seeds = [self.new_object(0) for _ in range(set_size(rk, self.cfg.pars_per_service))]
        for idx in range(1, len(seeds)):
            self.link(seeds[int(rk.integers(0, idx))], seeds[idx], 0)
        return seeds

    def layer_service(self, name: str, stage: int) -> Dict:
        """One service between K[stage] and K[stage + 1]."""
        rs = self.rng["layers"]
        pars = self.cfg.pars_per_service
        known = self.K.objects(stage)
        outputs = [self.new_object(stage + 1) for _ in range(set_size(rs, pars))]
        anchors = [known[int(rs.integers(0, len(known)))] for _ in outputs]
        effects = [self.link(a, o, stage + 1) for a, o in zip(anchors, outputs)]

        inputs = list(dict.fromkeys(anchors))
        want = max(len(inputs), set_size(rs, pars))
        extra = [o for o in pick(rs, known, pars) if o not in inputs]
        inputs += extra[: want - len(inputs)]

        atoms = self.K.triples_among(inputs, stage) + [t for t in effects if t is not None]
        return {
            "name": name,
            "in": self.typed(inputs),
            "out": self.typed(outputs),
            "rel": [list(t) for t in atoms],
        }


def _service_counts(cfg: GenConfig) -> Tuple[int, int, int]:
    """Split numWebServices into (layer services, rule twins, noise services)."""
    twins = cfg.planted_rules if cfg.relation_count > 0 else 0
    noise = int(round(cfg.num_web_services * cfg.noise_ratio / (1.0 + cfg.noise_ratio)))
    layer = cfg.num_web_services - noise - twins
    if layer < cfg.stage_count:
        layer = cfg.stage_count
        noise = cfg.num_web_services - layer - twins
    if noise < 0:
        raise ValueError(f"numWebServices={cfg.num_web_services} cannot hold {cfg.stage_count} stages "
                         f"and {twins} planted rules")
    return layer, twins, noise


def _per_stage(rng: np.random.Generator, total: int, stages: int) -> List[int]:
    counts = [1] * stages
    for _ in range(total - stages):
        counts[int(rng.integers(0, stages))] += 1
    return counts


def _plant_rules(builder: _StageBuilder, count: int) -> Tuple[List[Dict], List[Dict], List[Dict], List[Tuple[int, Triple]]]:
    """Rules, their twin services, receipt concepts and (stage, derived triple) pairs.

    A twin consumes ``rel(a, b)`` and issues a receipt ``w`` below b's concept
    with ``derived(a, w)``. The rule derives ``derived(a, b)`` directly, and
    the goal accepts either b or a receipt.
    """
    rr = builder.rng["rules"]
    K = builder.K
    chosen = pick(rr, list(range(len(K.triples))), count)
    rules, twins, receipts, derived = [], [], [], []
    for k, idx in enumerate(chosen):
        rel, a, b = K.triples[idx]
        stage = min(K.triple_stage[idx], builder.cfg.stage_count - 1)
        target = f"derived{k}"
        receipt = f"Receipt{k}"
        rules.append({"name": f"derive{k}", "params": ["X", "Y"],
                      "pre": [[rel, "X", "Y"]], "eff": [[target, "X", "Y"]]})
        receipts.append({"name": receipt, "parent": K.concept[b]})
        twins.append({"name": f"link{k}", "in": builder.typed([a, b]),
                      "out": [{"name": "receipt", "type": receipt}],
                      "rel": [[rel, a, b], [target, a, "receipt"]]})
        derived.append((stage, (target, a, b)))
    return rules, twins, receipts, derived


def _noise(rng: np.random.Generator, count: int, cfg: GenConfig) -> Tuple[List[Dict], List[Dict], List[str]]:
    """Noise services, their concepts and relation names."""
    kinds = max(2, count)
    concepts = [{"name": NOISE_ROOT, "parent": ROOT}]
    concepts += [{"name": f"Noise{k}", "parent": NOISE_ROOT} for k in range(kinds)]
    relations = [f"noise{r}" for r in range(max(cfg.relation_count, 1))]
    kind_names = [f"Noise{k}" for k in range(kinds)]
    services = []
    for name in _labels("noise", count):
        ins = pick(rng, kind_names, set_size(rng, min(NOISE_INPUTS, cfg.pars_per_service)))
        outs = pick(rng, kind_names, set_size(rng, cfg.pars_per_service))
        rel = relations[int(rng.integers(0, len(relations)))]
        services.append({
            "name": name,
            "in": [{"name": f"m{i}", "type": t} for i, t in enumerate(ins)],
            "out": [{"name": f"w{i}", "type": t} for i, t in enumerate(outs)],
            "rel": [[rel, "m0", "w0"]],
        })
    return services, concepts, relations


def _query(builder: _StageBuilder, seeds: List[str], derived: List[Tuple[int, Triple]]) -> Dict:
    """Known: all of K0. Required: some last-stage objects, a few of their links, derived relations."""
    rq = builder.rng["query"]
    K = builder.K
    last = [o for o, s in K.stage_of.items() if s == builder.cfg.stage_count]
    required = pick(rq, last, set_size(rq, min(builder.cfg.pars_per_service, len(last))))
    required_rel: List[Triple] = []
    for obj in list(required):
        triple = K.link_of.get(obj)
        if triple is not None and rq.random() < 0.5:
            required_rel.append(triple)
            required += [n for n in (triple[1], triple[2]) if n not in required]
    for _, triple in derived:
        required_rel.append(triple)
        required += [n for n in (triple[1], triple[2]) if n not in required]
    return {
        "known": builder.typed(seeds),
        "required": builder.typed(required),
        "knownRel": [list(t) for t in K.triples_among(seeds, 0)],
        "requiredRel": [list(t) for t in required_rel],
    }


def generate_relational_instance(cfg: GenConfig) -> Tuple[Dict, GroundTruth]:
    """Staged relational instance with ``numWebServices`` services in total.

    Raises:
        ValueError: when the repository is too small for one service per stage
            plus the planted rules.
    """
    rng = phase_rngs(cfg.seed, PHASES)
    layer_count, twin_count, noise_count = _service_counts(cfg)
    per_stage = _per_stage(rng["layers"], layer_count, cfg.stage_count)

    builder = _StageBuilder(cfg, rng)
    seeds = builder.seed_stage()
    stages: List[List[Dict]] = []
    for stage, count in enumerate(per_stage):
        stages.append([builder.layer_service(f"stage{stage}_{k}", stage) for k in range(count)])

    rules, twins, receipts, derived = _plant_rules(builder, twin_count)
    for twin, (stage, _) in zip(twins, derived):
        stages[stage].append(twin)
    # Fewer triples than planted rules; pad the repository with noise.
    noise_count += twin_count - len(twins)

    concepts = [{"name": ROOT, "parent": None}]
    concepts += [{"name": c, "parent": ROOT} for c in builder.pool.names]
    concepts += receipts
    relations = [{"name": r} for r in builder.relations]
    relations += [{"name": r["eff"][0][0]} for r in rules]
    query = _query(builder, seeds, derived)

    noise_services: List[Dict] = []
    if noise_count:
        noise_services, noise_concepts, noise_rels = _noise(rng["noise"], noise_count, cfg)
        concepts += noise_concepts
        relations += [{"name": r} for r in noise_rels]
        query["known"].append({"name": "n0", "type": "Noise0"})

    real = [svc for layer in stages for svc in layer]
    everything = real + noise_services
    services = [everything[i] for i in rng["order"].permutation(len(everything))]

    if builder.pool.reused:
        logger.warning(f"numParameters={cfg.num_parameters} is below the {len(builder.K.concept)} objects "
                       f"generated; {builder.pool.reused} concepts are shared and bindings may be ambiguous")

    instance = {
        "model": "relational",
        "taxonomy": {"concepts": concepts, "instances": []},
        "relations": relations,
        "rules": rules,
        "services": services,
        "query": query,
    }
    truth = GroundTruth(
        model="relational",
        seed=cfg.seed,
        planted=[svc["name"] for svc in real],
        stages=[[svc["name"] for svc in layer] for layer in stages],
        rules=[r["name"] for r in rules],
    )
    logger.info(f"Generated relational instance: {cfg.stage_count} stages, {len(real)} staged services, "
                f"{len(rules)} rules, {len(noise_services)} noise services, {len(builder.K.concept)} objects")
    return instance, truth

"""Proof search for relative termination.

The YES side runs the dominance fast path, the preprocessing of duplicating
base rules and then the processor strategy on the canonical ADP problem,
switching to the classical DP pipeline once a problem is derelatified. The NO
side searches for a relative loop. Both run at the same time under one
deadline and the first definitive answer wins.
"""

from __future__ import annotations

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, fields, replace
from typing import List, Mapping, Optional, Tuple

from reladp.adp import AdpProblem, canonical_adp_problem
from reladp.classic import (
    DpProblem,
    classic_dg_processor,
    classic_reduction_pair,
    describe_pairs,
    dominance_fast_path,
    drp1,
    drp2,
    drp2_selection,
    greedy_partition,
    remove_pairs,
)
from reladp.errors import ConfigError, ProverTimeout
from reladp.graph import decompose, graph_params
from reladp.limits import Deadline
from reladp.orders import (
    RPP,
    RULE_REMOVAL,
    claimed_comparisons,
    find_reduction_pair,
    plain_problem,
    preprocess,
    rpp_processor,
    rule_removal_processor,
    sample_check,
)
from reladp.proof import FORMATS, NOT_SN, SN, UNKNOWN, ProofNode
from reladp.rewriting import LoopWitness, find_relative_loop, replay_witness
from reladp.trs import RelativeTrs, dominates, is_duplicating

log = logging.getLogger(__name__)

YES = "YES"
NO = "NO"
MAYBE = "MAYBE"
EXIT_CODES = {YES: 0, NO: 1, MAYBE: 2}

DG = "dg"
DRP1 = "drp1"
DRP2 = "drp2"
PROCESSORS = (DG, DRP1, RPP, RULE_REMOVAL, DRP2)
DEFAULT_STRATEGY = PROCESSORS

SEED_ENV = "RELADP_SEED"


@dataclass(frozen=True)
class ProverConfig:
    timeout_seconds: Optional[float] = 60.0
    max_coeff: int = 2
    loop_depth: int = 6
    loop_term_size: int = 30
    seed_depth: int = 2
    max_seeds: int = 200
    loop_search: bool = True
    fast_path: bool = True
    strategy: Tuple[str, ...] = DEFAULT_STRATEGY
    proof_format: str = "text"
    samples: int = 200
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "strategy", tuple(self.strategy))
        for name in ("max_coeff", "loop_depth", "loop_term_size", "max_seeds", "samples"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.seed_depth, bool) or not isinstance(self.seed_depth, int) or self.seed_depth < 0:
            raise ConfigError(f"seed_depth must be a natural number, got {self.seed_depth!r}")
        if self.timeout_seconds is not None and (
            isinstance(self.timeout_seconds, bool)
            or not isinstance(self.timeout_seconds, (int, float))
            or self.timeout_seconds <= 0
        ):
            raise ConfigError(f"timeout_seconds must be positive, got {self.timeout_seconds!r}")
        if not self.strategy:
            raise ConfigError("strategy must name at least one processor")
        unknown = [s for s in self.strategy if s not in PROCESSORS]
        if unknown:
            raise ConfigError(f"unknown processors {unknown}; choose from {', '.join(PROCESSORS)}")
        if self.proof_format not in FORMATS:
            raise ConfigError(f"unknown proof format {self.proof_format!r}")

    @classmethod
    def from_mapping(cls, data: Optional[Mapping] = None) -> "ProverConfig":
        data = dict(data or {})
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown prover settings: {', '.join(sorted(unknown))}")
        return cls(**data)

    def with_env_seed(self, environ: Mapping[str, str] = os.environ) -> "ProverConfig":
        raw = environ.get(SEED_ENV)
        if raw is None or not raw.strip():
            return self
        try:
            return replace(self, seed=int(raw))
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def trs_summary(trs: RelativeTrs) -> str:
    taken = {f.name for f in trs.signature}
    rules = [r.show("->", taken) for r in trs.main] + [r.show("->=", taken) for r in trs.base]
    return "{" + "; ".join(rules) + "}"


def _same(a, b) -> bool:
    return set(a.main) == set(b.main) and set(a.base) == set(b.base)


class _Solver:
    """Recursive processor application; every node checks the deadline."""

    def __init__(self, config: ProverConfig, deadline: Deadline):
        self.config = config
        self.deadline = deadline

    def _verified(self, result, comparisons) -> bool:
        violations = sample_check(result.interpretation, comparisons, self.config.samples, seed=self.config.seed)
        if violations:
            left, right, point = violations[0]
            log.warning("orientation rejected: %s vs %s fails at %s", left, right, point)
            return False
        return True

    # -- ADP problems ---------------------------------------------------------

    def solve(self, problem: AdpProblem) -> ProofNode:
        summary = problem.show()
        if not problem.main:
            return ProofNode.leaf("sn", summary, SN, reason="no main ADPs")
        failed: List[str] = []
        try:
            self.deadline.check()
            for name in self.config.strategy:
                node = getattr(self, "_" + name.replace("-", "_"))(problem, summary)
                if node is not None:
                    log.info("%s applied to %s", name, summary)
                    if failed:
                        node.params["failed"] = failed
                    return node
                log.info("%s not applicable to %s", name, summary)
                failed.append(name)
        except ProverTimeout as exc:
            log.warning("proof search stopped: %s", exc)
            return ProofNode.leaf("timeout", summary, UNKNOWN, reason=f"search stopped ({exc})", failed=failed)
        return ProofNode.leaf("unknown", summary, UNKNOWN, reason="no processor applies", failed=failed)

    def _dg(self, problem, summary):
        d = decompose(problem)
        if len(d.problems) == 1 and _same(d.problems[0], problem):
            return None
        params = graph_params(d.graph, d.components + d.lassos)
        nodes = params["nodes"]
        children = [self.solve(p) for p in d.problems]
        return ProofNode.inner(
            DG,
            summary,
            children,
            graph=params,
            components=["{" + "; ".join(nodes[n] for n in sorted(c)) + "}" for c in d.components],
            lassos=["{" + "; ".join(nodes[n] for n in sorted(q)) + "}" for q in d.lassos],
        )

    def _drp1(self, problem, summary):
        dp = drp1(problem)
        if dp is None:
            return None
        return ProofNode.inner(DRP1, summary, [self.solve_classic(dp)], pairs=describe_pairs(dp.pairs))

    def _orientation_node(self, problem, summary, mode, apply):
        result = find_reduction_pair(problem, self.config.max_coeff, mode, self.deadline)
        if result is None or not result.strict:
            return None
        if not self._verified(result, claimed_comparisons(problem, result)):
            return None
        taken = {f.name for f in problem.signature}
        child = self.solve(apply(problem, result))
        return ProofNode.inner(
            mode,
            summary,
            [child],
            interpretation=result.interpretation.lines(taken),
            strict=[problem.adps[i].show(taken) for i in sorted(result.strict)],
            max_coeff=result.max_coeff,
        )

    def _rpp(self, problem, summary):
        return self._orientation_node(problem, summary, RPP, rpp_processor)

    def _rule_removal(self, problem, summary):
        return self._orientation_node(problem, summary, RULE_REMOVAL, rule_removal_processor)

    def _drp2(self, problem, summary):
        selection = drp2_selection(problem)
        if not selection:
            return None
        taken = {f.name for f in problem.signature}
        child = self.solve(drp2(problem, selection))
        return ProofNode.inner(DRP2, summary, [child], selected=[problem.base[j].show(taken) for j in selection])

    # -- ordinary DP problems -------------------------------------------------

    def solve_classic(self, problem: DpProblem) -> ProofNode:
        summary = problem.show()
        if not problem.pairs:
            return ProofNode.leaf("sn", summary, SN, reason="no dependency pairs")
        try:
            self.deadline.check()
            subs = classic_dg_processor(problem)
            if not (len(subs) == 1 and set(subs[0].pairs) == set(problem.pairs)):
                children = [self.solve_classic(s) for s in subs]
                sccs = ["{" + "; ".join(describe_pairs(s.pairs)) + "}" for s in subs]
                return ProofNode.inner("classic-dg", summary, children, sccs=sccs)
            result = classic_reduction_pair(problem, self.config.max_coeff, self.deadline)
        except ProverTimeout as exc:
            log.warning("classical proof search stopped: %s", exc)
            return ProofNode.leaf("timeout", summary, UNKNOWN, reason=f"search stopped ({exc})")
        if result is not None:
            comparisons = [(r.lhs, r.rhs, False) for r in problem.rules]
            comparisons += [(p.lhs, p.rhs, i in result.strict) for i, p in enumerate(problem.pairs)]
            if self._verified(result, comparisons):
                child = self.solve_classic(remove_pairs(problem, result.strict))
                return ProofNode.inner(
                    "classic-rpp",
                    summary,
                    [child],
                    interpretation=result.interpretation.lines(),
                    strict=describe_pairs(problem.pairs[i] for i in sorted(result.strict)),
                    max_coeff=result.max_coeff,
                )
        return ProofNode.leaf(
            "unknown", summary, UNKNOWN, reason="no classical processor applies", failed=["classic-dg", "classic-rpp"]
        )


def _fast_path(trs, solver, summary):
    dp = dominance_fast_path(trs)
    if dp is None:
        return None
    if not any(is_duplicating(r) for r in trs.base) and dominates(trs.main, trs.base):
        condition = "R= is non-duplicating and dominated by R"
    else:
        ra, rb = greedy_partition(trs)
        condition = f"R= split into {len(ra)} rule(s) joining R and {len(rb)} non-duplicating dominated rule(s)"
    return ProofNode.inner("dominance", summary, [solver.solve_classic(dp)], condition=condition, pairs=describe_pairs(dp.pairs))


def _prove_sn(trs, config, deadline):
    solver = _Solver(config, deadline)
    summary = trs_summary(trs)
    notes = {}
    try:
        if config.fast_path:
            fast = _fast_path(trs, solver, summary)
            if fast is not None:
                if fast.verdict == SN:
                    return ProofNode.inner("relative termination", summary, [fast])
                notes["fast_path"] = "dominance fast path did not finish the proof"
        pre = preprocess(trs, config.max_coeff, deadline)
    except ProverTimeout as exc:
        return ProofNode.leaf("timeout", summary, UNKNOWN, reason=f"search stopped ({exc})")

    problem = canonical_adp_problem(pre.trs)
    node = ProofNode.inner(
        "chain-criterion", trs_summary(pre.trs), [solver.solve(problem)], adps=problem.show()
    )
    if pre.removed or pre.moved:
        params = {
            "removed": [str(r) for r in pre.removed],
            "moved": [str(r) for r in pre.moved],
        }
        if pre.orientation is not None:
            if not solver._verified(pre.orientation, claimed_comparisons(plain_problem(trs), pre.orientation)):
                return ProofNode.leaf("unknown", summary, UNKNOWN, reason="preprocessing orientation rejected")
            params["interpretation"] = pre.orientation.interpretation.lines()
        node = ProofNode.inner("dup-preprocess", summary, [node], **params)
    return ProofNode.inner("relative termination", summary, [node], **notes)


def _search_loop(trs, config, deadline):
    witness = find_relative_loop(
        trs, config.loop_depth, config.loop_term_size, config.seed_depth, config.max_seeds, deadline
    )
    if witness is not None and not replay_witness(trs, witness):
        log.warning("discarding a loop witness that does not replay")
        return None
    return witness


def loop_proof(trs: RelativeTrs, witness: LoopWitness) -> ProofNode:
    summary = trs_summary(trs)
    leaf = ProofNode.leaf(
        "loop",
        summary,
        NOT_SN,
        reason="a main rule can be applied infinitely often",
        witness=witness.lines(),
    )
    return ProofNode.inner("relative termination", summary, [leaf])


class _ResultCell:
    """Holds the first definitive answer; later offers are ignored."""

    def __init__(self):
        self._lock = threading.Lock()
        self.value: Optional[Tuple[str, ProofNode]] = None

    def offer(self, verdict: str, node: ProofNode) -> bool:
        with self._lock:
            if self.value is not None:
                return False
            self.value = (verdict, node)
            return True


def prove(trs: RelativeTrs, config: ProverConfig = ProverConfig()) -> Tuple[str, ProofNode]:
    """Decide relative termination of trs within the configured bounds.

    Returns YES, NO or MAYBE together with the proof tree; on MAYBE the tree
    is the partial proof of the YES side.
    """
    deadline = Deadline(config.timeout_seconds)
    cell = _ResultCell()
    with ThreadPoolExecutor(max_workers=2, thread_name_prefix="reladp") as pool:
        try:
            proof = pool.submit(_prove_sn, trs, config, deadline)
            futures = [proof]
            if config.loop_search:
                futures.append(pool.submit(_search_loop, trs, config, deadline))
            for future in as_completed(futures):
                if future is proof:
                    node = future.result()
                    if node.verdict == SN and cell.offer(YES, node):
                        deadline.cancel()
                else:
                    witness = future.result()
                    if witness is not None and cell.offer(NO, loop_proof(trs, witness)):
                        deadline.cancel()
            partial = proof.result()
        finally:
            deadline.cancel()
    if cell.value is None:
        log.info("no definitive answer for %s", trs_summary(trs))
        return MAYBE, partial
    log.info("answer %s for %s", cell.value[0], trs_summary(trs))
    return cell.value

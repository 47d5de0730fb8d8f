"""Executable verification of the matched-pair construction's properties.

Each lemma of the construction becomes a check on a concrete structure:
uniqueness and restriction of witnesses, functionality/injectivity and
membership preservation of the matching, ordinal preservation, level
extension, totality under the surrogate axioms, and the final isomorphism.
Ill-founded or non-extensional inputs make the whole chain not-applicable
with the offending witness, since the witness predicate presupposes both.

Corpus mode generates scrambled universes and independent random pairs,
halting with the reproducing seed on any unexpected verdict.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from . import axioms as axioms_mod
from . import hf
from . import iso as iso_mod
from .axioms import SamplingBudget
from .errors import DualMemError, LevelExtensionError
from .structure import (
    DualStructure,
    Permutation,
    build_v_universe,
    dual_structure,
    random_dual_structure,
    scramble,
)

LEMMA_NAMES = (
    "witness-uniqueness",
    "witness-restriction",
    "partner-functionality",
    "membership-preservation",
    "ordinal-preservation",
    "level-extension",
    "totality",
    "isomorphism",
)

Witness = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class LemmaVerdict:
    status: str  # "pass" | "fail" | "n/a"
    witness: Witness = ()

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass(frozen=True)
class SuiteConfig:
    uniqueness_closure_bound: int = 4
    exhaustive_pair_bound: int = 16  # full pair-table up to this domain size
    budget: SamplingBudget = field(default_factory=SamplingBudget)


@dataclass(frozen=True)
class SuiteReport:
    lemmas: dict[str, LemmaVerdict]
    corpus: str | None = None
    elapsed: float = 0.0  # in-memory only; never rendered

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(name for name, v in self.lemmas.items() if v.status == "fail")

    @property
    def all_ok(self) -> bool:
        return not self.failures


def render_suite(report: SuiteReport) -> str:
    lines = []
    for name in LEMMA_NAMES:
        if name not in report.lemmas:
            continue
        v = report.lemmas[name]
        parts = [f"lemma {name} {v.status}"]
        parts.extend(f"{k}={val}" for k, val in v.witness)
        lines.append(" ".join(parts))
    if report.corpus is not None:
        lines.append(report.corpus)
    return "\n".join(lines) + "\n"


def _na(reason: str, *extra: tuple[str, str]) -> LemmaVerdict:
    return LemmaVerdict("n/a", (("reason", reason),) + extra)


def _all_na(reason: str, *extra: tuple[str, str]) -> dict[str, LemmaVerdict]:
    return {name: _na(reason, *extra) for name in LEMMA_NAMES}


def run_suite(s: DualStructure, config: SuiteConfig | None = None) -> SuiteReport:
    """Run every lemma check that applies to the given structure."""
    config = config or SuiteConfig()
    start = time.perf_counter()

    for tag in (1, 2):
        cycle = s.relation(tag).find_cycle()
        if cycle is not None:
            witness = (("tag", str(tag)), ("cycle", ">".join(map(str, cycle))))
            return SuiteReport(_all_na("ill-founded", *witness), elapsed=time.perf_counter() - start)
    for tag in (1, 2):
        dc = hf.collapse_domain(s.relation(tag), tag)
        if dc.duplicate_groups:
            group = ",".join(map(str, dc.duplicate_groups[0]))
            witness = (("tag", str(tag)), ("collapse-duplicates", group))
            return SuiteReport(_all_na("non-extensional", *witness), elapsed=time.perf_counter() - start)

    lemmas: dict[str, LemmaVerdict] = {}
    matched = _matched_pairs(s)
    lemmas["witness-uniqueness"] = _check_uniqueness(s, config)
    lemmas["witness-restriction"] = _check_restriction(s, matched)
    lemmas["partner-functionality"] = _check_functionality(s, matched, config)
    lemmas["membership-preservation"] = _check_membership_preservation(s, matched)
    lemmas["ordinal-preservation"] = _check_ordinal_preservation(s, matched)
    lemmas["level-extension"] = _check_level_extension(s, matched)

    gate = axioms_mod.full_report(s, config.budget, schema_mode="semantic")
    if not gate.semantic_pass:
        failing = _first_semantic_failure(gate)
        lemmas["totality"] = _na("axioms", *failing)
    else:
        lemmas["totality"] = _check_totality(s)
    lemmas["isomorphism"] = _check_isomorphism(s)
    return SuiteReport(lemmas, elapsed=time.perf_counter() - start)


def _first_semantic_failure(report: axioms_mod.FullReport) -> Witness:
    for tag in sorted(report.by_tag):
        for axiom in sorted(report.by_tag[tag].verdicts):
            v = report.by_tag[tag].verdicts[axiom]
            if v.status == "fail":
                return (("tag", str(tag)), ("axiom", axiom))
    return ()


def _matched_pairs(s: DualStructure) -> tuple[tuple[int, int], ...]:
    pairs = []
    for x in range(s.domain_size):
        f = iso_mod._candidate_map(s, x)
        if f is not None:
            pairs.append((x, f[x]))
    return tuple(pairs)


def _check_uniqueness(s: DualStructure, config: SuiteConfig) -> LemmaVerdict:
    """Brute-force witness counting on pairs with small closures on both sides."""
    bound = config.uniqueness_closure_bound
    tc1 = {x: sorted(iso_mod.transitive_closure(s.e1, x, include_self=True)) for x in range(s.domain_size)}
    tc2 = {y: sorted(iso_mod.transitive_closure(s.e2, y, include_self=True)) for y in range(s.domain_size)}
    for x in range(s.domain_size):
        if len(tc1[x]) > bound:
            continue
        for y in range(s.domain_size):
            if len(tc2[y]) > bound:
                continue
            expected = 1 if iso_mod.matches(s, x, y) else 0
            count = count_witnesses_brute(s, x, y)
            if count != expected:
                return LemmaVerdict(
                    "fail",
                    (("x", str(x)), ("y", str(y)), ("witnesses", str(count)), ("expected", str(expected))),
                )
    return LemmaVerdict("pass")


def count_witnesses_brute(s: DualStructure, x: int, y: int) -> int:
    """Count all maps from the e1 closure of x into the e2 closure of y
    satisfying the witness conditions, checked from the definitions."""
    dom = sorted(iso_mod.transitive_closure(s.e1, x, include_self=True))
    cod = sorted(iso_mod.transitive_closure(s.e2, y, include_self=True))
    count = 0
    for values in itertools.product(cod, repeat=len(dom)):
        f = dict(zip(dom, values))
        if f[x] != y:
            continue
        if iso_mod.is_witness(s, x, y, f):
            count += 1
    return count


def _check_restriction(s: DualStructure, matched) -> LemmaVerdict:
    for x, y in matched:
        w = iso_mod.build_witness(s, x, y)
        f = w.as_dict()
        for child in sorted(s.e1.members(x)):
            sub = iso_mod.build_witness(s, child, f[child])
            if sub is None:
                return LemmaVerdict("fail", (("x", str(x)), ("child", str(child)), ("reason", "no-witness")))
            expected = {t: f[t] for t in iso_mod.transitive_closure(s.e1, child, include_self=True)}
            if sub.as_dict() != expected:
                return LemmaVerdict("fail", (("x", str(x)), ("child", str(child)), ("reason", "not-restriction")))
    return LemmaVerdict("pass")


def _check_functionality(s: DualStructure, matched, config: SuiteConfig) -> LemmaVerdict:
    if s.domain_size <= config.exhaustive_pair_bound:
        graph = {(x, y) for x in range(s.domain_size) for y in range(s.domain_size) if iso_mod.matches(s, x, y)}
    else:
        graph = set(matched)
    by_x: dict[int, list[int]] = {}
    by_y: dict[int, list[int]] = {}
    for x, y in sorted(graph):
        by_x.setdefault(x, []).append(y)
        by_y.setdefault(y, []).append(x)
    for x, ys in by_x.items():
        if len(ys) > 1:
            return LemmaVerdict("fail", (("x", str(x)), ("ys", ",".join(map(str, ys)))))
    for y, xs in by_y.items():
        if len(xs) > 1:
            return LemmaVerdict("fail", (("y", str(y)), ("xs", ",".join(map(str, xs)))))
    return LemmaVerdict("pass")


def _check_membership_preservation(s: DualStructure, matched) -> LemmaVerdict:
    for (x, y), (x2, y2) in itertools.product(matched, repeat=2):
        if s.contains(1, x, x2) != s.contains(2, y, y2):
            return LemmaVerdict("fail", (("x", str(x)), ("x2", str(x2)), ("y", str(y)), ("y2", str(y2))))
    return LemmaVerdict("pass")


def _check_ordinal_preservation(s: DualStructure, matched) -> LemmaVerdict:
    for x, y in matched:
        if iso_mod.is_ordinal(s.e1, x) != iso_mod.is_ordinal(s.e2, y):
            return LemmaVerdict("fail", (("x", str(x)), ("y", str(y))))
    return LemmaVerdict("pass")


def _check_level_extension(s: DualStructure, matched) -> LemmaVerdict:
    """Extend each matched ordinal pair whose levels exist; check agreement."""
    partner = dict(matched)
    eligible = 0
    for x, y in matched:
        if not (iso_mod.is_ordinal(s.e1, x) and iso_mod.is_ordinal(s.e2, y)):
            continue
        lev1 = iso_mod.internal_level(s, 1, x)
        lev2 = iso_mod.internal_level(s, 2, y)
        if lev1.element is None or lev2.element is None:
            continue
        eligible += 1
        w = iso_mod.build_witness(s, x, y)
        try:
            wider = iso_mod.extend_to_level(s, w)
        except LevelExtensionError as exc:
            return LemmaVerdict(
                "fail", (("ordinal", str(x)), ("kind", exc.kind), ("witness", str(exc.witness)))
            )
        if not iso_mod.restriction_agrees(w, wider):
            return LemmaVerdict("fail", (("ordinal", str(x)), ("kind", "restriction-disagrees")))
        for u, v in wider.pairs:
            if partner.get(u) != v:
                return LemmaVerdict(
                    "fail", (("ordinal", str(x)), ("kind", "global-disagrees"), ("witness", str(u)))
                )
    if eligible == 0:
        return _na("no-level-pairs")
    return LemmaVerdict("pass")


def _check_totality(s: DualStructure) -> LemmaVerdict:
    result = iso_mod.global_isomorphism(s)
    if isinstance(result, iso_mod.IsoCertificate):
        return LemmaVerdict("pass")
    e1 = str(result.unmatched_e1[0][0]) if result.unmatched_e1 else "-"
    e2 = str(result.unmatched_e2[0][0]) if result.unmatched_e2 else "-"
    return LemmaVerdict("fail", (("case", result.case), ("e1", e1), ("e2", e2)))


def _check_isomorphism(s: DualStructure) -> LemmaVerdict:
    result = iso_mod.global_isomorphism(s)
    if isinstance(result, iso_mod.FailureDiagnostic):
        e1 = str(result.unmatched_e1[0][0]) if result.unmatched_e1 else "-"
        e2 = str(result.unmatched_e2[0][0]) if result.unmatched_e2 else "-"
        return LemmaVerdict("fail", (("case", result.case), ("e1", e1), ("e2", e2)))
    if not iso_mod.verify_certificate(s, result):
        return LemmaVerdict("fail", (("case", "certificate-rejected"),))
    return LemmaVerdict("pass")


# -- corpus -----------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusConfig:
    """Corpus parameters; sizes are level indices for scrambled universes
    and domain sizes for independent random pairs."""

    sizes: tuple[int, ...] = (3, 4)
    count: int = 100
    seed: int = 0
    kinds: tuple[str, ...] = ("scrambled",)
    suite: SuiteConfig = field(default_factory=SuiteConfig)


def run_corpus(config: CorpusConfig) -> SuiteReport:
    """Aggregate suite over generated structures; halts on the reproducing seed.

    Scrambled universes must pass every applicable lemma. Independent random
    pairs must pass the conditional lemmas, and their isomorphism verdict must
    coincide with collapse-image equality (both outcomes are counted).
    """
    start = time.perf_counter()
    combined: dict[str, LemmaVerdict] = {}
    items = 0
    iso_pass = 0
    iso_fail = 0
    for kind in config.kinds:
        for size_index in config.sizes:
            for i in range(config.count):
                seed = config.seed + i
                if kind == "scrambled":
                    base = build_v_universe(size_index)
                    s = scramble(base, Permutation.random(base.domain_size, seed))
                elif kind == "random-pair":
                    s = random_dual_structure(size_index, seed)
                else:
                    raise DualMemError(f"unknown corpus kind {kind!r}")
                report = run_suite(s, config.suite)
                items += 1
                repro = (("kind", kind), ("size", str(size_index)), ("seed", str(seed)))
                iso_verdict = report.lemmas["isomorphism"]
                if iso_verdict.status == "pass":
                    iso_pass += 1
                elif iso_verdict.status == "fail":
                    iso_fail += 1
                for name, v in report.lemmas.items():
                    expected_ok = v.status != "fail"
                    if kind == "random-pair" and name in ("totality", "isomorphism"):
                        expected_ok = True  # counted, cross-checked below
                    if not expected_ok:
                        combined[name] = LemmaVerdict("fail", v.witness + repro)
                        corpus_line = _corpus_line(config, items, iso_pass, iso_fail)
                        return SuiteReport(_fill(combined), corpus_line, time.perf_counter() - start)
                if kind == "random-pair" and iso_verdict.status != "n/a":
                    same_images = (
                        hf.collapse_domain(s.e1, 1).image() == hf.collapse_domain(s.e2, 2).image()
                    )
                    if same_images != (iso_verdict.status == "pass"):
                        combined["isomorphism"] = LemmaVerdict(
                            "fail", (("reason", "oracle-disagrees"),) + repro
                        )
                        corpus_line = _corpus_line(config, items, iso_pass, iso_fail)
                        return SuiteReport(_fill(combined), corpus_line, time.perf_counter() - start)
                for name, v in report.lemmas.items():
                    if kind == "random-pair" and name in ("totality", "isomorphism"):
                        continue  # counted in the corpus line, not aggregated
                    if name not in combined or combined[name].status == "n/a":
                        if v.status != "n/a":
                            combined[name] = LemmaVerdict(v.status)
                        else:
                            combined.setdefault(name, _na("never-applicable"))
    corpus_line = _corpus_line(config, items, iso_pass, iso_fail)
    return SuiteReport(_fill(combined), corpus_line, time.perf_counter() - start)


def _fill(combined: dict[str, LemmaVerdict]) -> dict[str, LemmaVerdict]:
    return {name: combined.get(name, _na("never-applicable")) for name in LEMMA_NAMES}


def _corpus_line(config: CorpusConfig, items: int, iso_pass: int, iso_fail: int) -> str:
    seeds = f"{config.seed}..{config.seed + config.count - 1}" if config.count else "-"
    sizes = ",".join(map(str, config.sizes))
    kinds = ",".join(config.kinds)
    return (
        f"corpus seeds={seeds} sizes={sizes} kinds={kinds} "
        f"items={items} iso-pass={iso_pass} iso-fail={iso_fail}"
    )


# -- counterexample gallery ----------------------------------------------------------

GALLERY_BUDGET = SamplingBudget(bounded_depth=4, bounded_cap=60)


@dataclass(frozen=True)
class GalleryItem:
    name: str
    structure: DualStructure
    expected_summary: str


def gallery_summary(s: DualStructure, budget: SamplingBudget = GALLERY_BUDGET) -> str:
    """The stored-and-reproduced account of one gallery item.

    Two axiom lines (failing axiom names per tag), one line per failing
    schema row with its witness, then the full suite report.
    """
    report = axioms_mod.full_report(s, budget, schema_mode="bounded")
    lines = []
    for tag in (1, 2):
        rows = report.by_tag[tag].verdicts
        failing = [name for name in sorted(rows) if rows[name].status == "fail"]
        lines.append(f"axioms{tag} " + (",".join(failing) if failing else "pass"))
    for tag in (1, 2):
        rows = report.by_tag[tag].verdicts
        for name in ("separation-schema", "replacement-schema"):
            if rows[name].status == "fail":
                toks = " ".join(f"{k}={v}" for k, v in rows[name].witness)
                lines.append(f"schema {tag} {name} {toks}")
    return "".join(line + "\n" for line in lines) + render_suite(run_suite(s))


def _chain_vs_v3() -> DualStructure:
    # e1: a four-link membership chain; e2: the third level, numbered so the
    # two-element set sits at id 2.
    return dual_structure(
        4,
        [(0, 1), (1, 2), (2, 3)],
        [(0, 1), (0, 2), (1, 2), (1, 3)],
    )


def _equal_extensions() -> DualStructure:
    # e2 gives ids 2 and 3 the same member-set.
    return dual_structure(
        4,
        [(0, 1), (1, 2), (0, 3), (1, 3)],
        [(0, 1), (1, 2), (1, 3)],
    )


def _membership_cycle() -> DualStructure:
    # e1 is the third level plus a back edge closing the cycle 0, 1, 3, 0.
    return dual_structure(
        4,
        [(0, 1), (1, 2), (0, 3), (1, 3), (3, 0)],
        [(0, 1), (1, 2), (0, 3), (1, 3)],
    )


def _schema_gap() -> DualStructure:
    # Rigid extensional DAGs of equal size, not isomorphic; on the e2 side the
    # definable subset "nonempty members of id 4" has no realizer.
    return dual_structure(
        5,
        [(0, 1), (1, 2), (0, 3), (1, 3), (2, 4)],
        [(0, 1), (1, 2), (0, 3), (1, 3), (0, 4), (1, 4), (2, 4)],
    )


_GALLERY_BUILDERS = (
    ("chain-vs-v3", _chain_vs_v3),
    ("equal-extensions", _equal_extensions),
    ("membership-cycle", _membership_cycle),
    ("schema-gap", _schema_gap),
)

# Golden summaries, reproduced bit-exactly by gallery_summary on a fresh run.
EXPECTED_SUMMARIES: dict[str, str] = {
    "chain-vs-v3": (
        "axioms1 pairing,power-set\n"
        "axioms2 pass\n"
        "lemma witness-uniqueness pass\n"
        "lemma witness-restriction pass\n"
        "lemma partner-functionality pass\n"
        "lemma membership-preservation pass\n"
        "lemma ordinal-preservation pass\n"
        "lemma level-extension pass\n"
        "lemma totality n/a reason=axioms tag=1 axiom=pairing\n"
        "lemma isomorphism fail case=both-directions-fail e1=3 e2=2\n"
    ),
    "equal-extensions": (
        "axioms1 pass\n"
        "axioms2 extensionality,pairing,power-set\n"
        "lemma witness-uniqueness n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma witness-restriction n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma partner-functionality n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma membership-preservation n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma ordinal-preservation n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma level-extension n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma totality n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
        "lemma isomorphism n/a reason=non-extensional tag=2 collapse-duplicates=2,3\n"
    ),
    "membership-cycle": (
        "axioms1 foundation,replacement-schema,separation-schema,separation-semantic,union\n"
        "axioms2 pass\n"
        "schema 1 separation-schema instance=separation-apply-1 assign=u:0,g:0,a:0\n"
        "schema 1 replacement-schema instance=replacement-pointwise-1 assign=g:0,L:0,K:0\n"
        "lemma witness-uniqueness n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma witness-restriction n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma partner-functionality n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma membership-preservation n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma ordinal-preservation n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma level-extension n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma totality n/a reason=ill-founded tag=1 cycle=0>3>0\n"
        "lemma isomorphism n/a reason=ill-founded tag=1 cycle=0>3>0\n"
    ),
    "schema-gap": (
        "axioms1 pairing,power-set,replacement-semantic\n"
        "axioms2 pairing,power-set,replacement-semantic,separation-schema,separation-semantic\n"
        "schema 2 separation-schema instance=bounded:3 filter=p_in1_w assign=p:1,a:4\n"
        "lemma witness-uniqueness pass\n"
        "lemma witness-restriction pass\n"
        "lemma partner-functionality pass\n"
        "lemma membership-preservation pass\n"
        "lemma ordinal-preservation pass\n"
        "lemma level-extension pass\n"
        "lemma totality n/a reason=axioms tag=1 axiom=pairing\n"
        "lemma isomorphism fail case=both-directions-fail e1=4 e2=4\n"
    ),
}


def counterexample_gallery() -> tuple[GalleryItem, ...]:
    """Fixed, seed-free negative instances, each with its stored summary."""
    return tuple(
        GalleryItem(name, build(), EXPECTED_SUMMARIES[name]) for name, build in _GALLERY_BUILDERS
    )

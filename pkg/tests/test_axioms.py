import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualmem import (
    Permutation,
    SamplingBudget,
    build_v_universe,
    check_schema_battery,
    dual_structure,
    full_report,
    render_report,
    scramble,
    tamper,
)
from dualmem.axioms import (
    check_extensionality,
    check_foundation,
    check_pairing,
    check_power_set,
    check_replacement_semantic,
    check_schema_bounded,
    check_separation_semantic,
    check_union,
    parse_report,
)
from dualmem.structure import apply_permutation, random_dual_structure


class TestExtensionality:
    def test_universe_passes(self, v3):
        assert check_extensionality(v3, 1).passed

    def test_tampered_fails_with_pair(self, v3):
        broken = tamper(v3, "break-extensionality", 2)
        verdict = check_extensionality(broken, 1)
        assert verdict.status == "fail"
        a, b = (int(v) for _, v in verdict.witness)
        assert broken.e1.members(a) == broken.e1.members(b)

    def test_single_element_passes(self):
        assert check_extensionality(dual_structure(1, [], []), 1).passed


class TestFoundation:
    def test_universe_passes(self, v4):
        assert check_foundation(v4, 1).passed

    def test_cycle_tamper_fails_with_cycle(self, v3):
        broken = tamper(v3, "add-cycle", 3)
        verdict = check_foundation(broken, 1)
        assert verdict.status == "fail"
        assert "cycle" in dict(verdict.witness)

    def test_self_loop(self):
        s = dual_structure(1, [(0, 0)], [])
        verdict = check_foundation(s, 1)
        assert verdict.status == "fail"
        assert dict(verdict.witness)["cycle"] == "0>0"


class TestClosureAxioms:
    def test_universe_passes_all_three(self, v4):
        assert check_pairing(v4, 1).passed
        assert check_union(v4, 1).passed
        assert check_power_set(v4, 1).passed

    def test_single_element_pairing_passes(self):
        # height-bounded form: no witness of rank 1 is demanded at height 0,
        # so the one-point universe is (correctly) the first cumulative level
        assert check_pairing(dual_structure(1, [], []), 1).passed

    def test_chain_pairing_fails_at_first_pair(self, chain3):
        verdict = check_pairing(chain3, 1)
        assert verdict.status == "fail"
        assert dict(verdict.witness)["a"] == "0"
        assert dict(verdict.witness)["b"] == "1"

    def test_missing_witness_reverifies(self, chain3):
        target = {int(t) for t in dict(check_pairing(chain3, 1).witness)["target"].split(",")}
        assert all(chain3.e1.members(x) != target for x in range(3))

    def test_union_on_chain_passes(self, chain3):
        assert check_union(chain3, 1).passed

    def test_power_set_fails_on_chain(self, chain3):
        assert check_power_set(chain3, 1).status == "fail"


class TestSeparationSemantic:
    def test_universe_exhaustive(self, v4):
        verdict = check_separation_semantic(v4, 1)
        assert verdict.passed and verdict.mode == "exhaustive"

    def test_chain_passes(self, chain3):
        assert check_separation_semantic(chain3, 1).passed

    def test_missing_subset_fails(self):
        # the third level with the set {{}} removed: {1} below {0,1} has no home
        s = dual_structure(3, [(0, 1), (0, 2), (1, 2)], [])
        verdict = check_separation_semantic(s, 1)
        assert verdict.status == "fail"
        witness = dict(verdict.witness)
        assert witness["a"] == "2" and witness["subset"] == "1"

    def test_sampled_mode_recorded(self):
        big = dual_structure(22, [(i, 21) for i in range(21)], [])
        budget = SamplingBudget(seed=5, samples=8)
        verdict = check_separation_semantic(big, 1, budget)
        assert verdict.status == "fail"
        assert verdict.mode == "sampled:8,seed=5"


class TestReplacementSemantic:
    def test_universe_passes(self, v3):
        verdict = check_replacement_semantic(v3, 1)
        assert verdict.passed and verdict.mode == "exhaustive"

    def test_fails_when_image_missing(self):
        # 0, 1={0}, 2={1}, 3={2}, 4={0,1}: the image {1,2} of the pair {0,1}
        # under 0->1, 1->2 is below the height but unrealized
        s = dual_structure(5, [(0, 1), (1, 2), (2, 3), (0, 4), (1, 4)], [])
        verdict = check_replacement_semantic(s, 1)
        assert verdict.status == "fail"
        witness = dict(verdict.witness)
        image = {int(v) for v in witness["image"].split(",")}
        assert all(s.e1.members(x) != image for x in range(5))
        assert all(int(pair.split(":")[0]) in s.e1.members(int(witness["a"])) for pair in witness["map"].split(","))

    def test_skipped_on_cycle(self):
        s = dual_structure(2, [(0, 1), (1, 0)], [])
        assert check_replacement_semantic(s, 1).status == "skipped"


class TestSchemaChecks:
    def test_battery_all_pass_on_scrambled(self, scrambled_v4):
        verdicts = check_schema_battery(scrambled_v4)
        assert all(v.passed for v in verdicts.values())

    def test_skipped_above_domain_limit(self):
        big = dual_structure(40, [], [])
        verdicts = check_schema_battery(big, SamplingBudget(schema_domain_limit=16))
        assert all(v.status == "skipped" for v in verdicts.values())

    def test_bounded_localizes_schema_gap(self):
        from dualmem.lemmas import _schema_gap

        verdicts = check_schema_bounded(_schema_gap(), SamplingBudget(bounded_depth=4, bounded_cap=60))
        assert verdicts["bounded-separation-1"].passed
        gap = verdicts["bounded-separation-2"]
        assert gap.status == "fail"
        assert dict(gap.witness)["filter"] == "p_in1_w"


class TestFullReport:
    def test_scrambled_universe_all_pass(self, scrambled_v4):
        report = full_report(scrambled_v4)
        assert report.all_pass

    def test_targeted_tamper_failures(self, v3):
        for kind, axiom in (("add-cycle", "foundation"), ("break-extensionality", "extensionality")):
            report = full_report(tamper(v3, kind, 4), schema_mode="semantic")
            assert report.by_tag[1].verdicts[axiom].status == "fail"
            assert report.by_tag[2].all_pass

    def test_text_round_trip(self, scrambled_v4, chain3):
        for s in (scrambled_v4, chain3, tamper(build_v_universe(3), "add-cycle", 1)):
            text = render_report(full_report(s))
            assert render_report(parse_report(text)) == text

    def test_lines_sorted_by_tag_then_axiom(self, v3):
        lines = render_report(full_report(v3)).splitlines()
        keys = [(int(l.split()[0]), l.split()[1]) for l in lines]
        assert keys == sorted(keys)

    @given(seed=st.integers(0, 60))
    @settings(max_examples=20, deadline=None)
    def test_verdict_pattern_permutation_invariant(self, seed):
        s = random_dual_structure(6, seed)
        p = Permutation.random(6, seed + 1)
        moved = dual_structure(
            6, apply_permutation(s.e1, p).edges, apply_permutation(s.e2, p).edges
        )
        a = full_report(s, schema_mode="semantic")
        b = full_report(moved, schema_mode="semantic")
        for tag in (1, 2):
            for axiom, verdict in a.by_tag[tag].verdicts.items():
                assert verdict.status == b.by_tag[tag].verdicts[axiom].status

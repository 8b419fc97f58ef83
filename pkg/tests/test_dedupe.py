from __future__ import annotations

import random

import pytest

from stpa_workbench.core import (
    CausalFactor,
    Component,
    ComponentKind,
    ControlAction,
    Loss,
    Model,
    Phase,
    Requirement,
    ScenarioType,
    UcaStatus,
    UnsafeControlAction,
)
from stpa_workbench.ids import ArtifactId, UcaId
from stpa_workbench.priority import dedupe_requirements, normalize_requirement_text

ORG = ComponentKind.ORGANIZATION


def requirements_model(texts: list[str], stakeholders: list[set[str]] | None = None) -> Model:
    """One UCA with len(texts) requirements hanging off a single CF."""
    uca = UnsafeControlAction(
        id=UcaId("Ph1", 1, 1, 1),
        context="ctx",
        linked_losses=frozenset({"L1"}),
        status=UcaStatus.CONFIRMED,
    )
    cf = CausalFactor(
        ArtifactId(uca.id, "CF", 1), "cause", "process-model-flaw", ScenarioType.TYPE_A
    )
    all_stakeholders = sorted({s for group in (stakeholders or []) for s in group} | {"A"})
    if stakeholders is None:
        stakeholders = [{"A"} for _ in texts]
    reqs = tuple(
        Requirement(
            ArtifactId(uca.id, "RQ", i + 1),
            text,
            frozenset({cf.id}),
            frozenset(stakeholders[i]),
        )
        for i, text in enumerate(texts)
    )
    return Model(
        losses=(Loss("L1", "loss", 1),),
        phases=(Phase("Ph1", "t"),),
        components=tuple(Component(c, c, ORG) for c in all_stakeholders)
        + (Component("B", "B", ComponentKind.MACHINE),),
        control_actions=(ControlAction(1, "act", "A", "B", "Ph1"),),
        ucas=(uca,),
        causal_factors=(cf,),
        requirements=reqs,
    )


def rq(n: int) -> ArtifactId:
    return ArtifactId(UcaId("Ph1", 1, 1, 1), "RQ", n)


class TestNormalization:
    def test_case_and_whitespace_collapse(self):
        model = requirements_model(["Close  the Loop", "close the loop "])
        result = dedupe_requirements(model)
        assert result.distinct_count == 1
        assert set(result.groups) == {rq(1)}
        assert result.groups[rq(1)] == (rq(1), rq(2))

    def test_normalizer(self):
        assert normalize_requirement_text("  A   B\tc ") == "a b c"

    def test_distinct_texts_stay_apart(self):
        model = requirements_model(["alpha", "beta", "gamma"])
        assert dedupe_requirements(model).distinct_count == 3

    def test_merge_decls_join_groups(self):
        model = requirements_model(["alpha", "beta", "gamma"])
        result = dedupe_requirements(model, [(rq(1), rq(3))])
        assert result.distinct_count == 2
        assert result.representative_of[rq(3)] == rq(1)

    def test_unknown_merge_id_rejected(self):
        model = requirements_model(["alpha"])
        with pytest.raises(KeyError):
            dedupe_requirements(model, [(rq(1), rq(9))])

    def test_representative_is_lexicographically_smallest(self):
        model = requirements_model(["same text", "same text", "same text"])
        result = dedupe_requirements(model)
        rep = next(iter(result.groups))
        assert str(rep) == min(str(r) for r in result.groups[rep])


class TestAllocationCounts:
    def test_three_distinct_four_allocations(self):
        # one requirement allocated to two stakeholders: 3 distinct, 4 allocations
        model = requirements_model(
            ["alpha", "beta", "gamma"],
            stakeholders=[{"Reg"}, {"Vert", "Nats"}, {"Op"}],
        )
        result = dedupe_requirements(model)
        assert result.distinct_count == 3
        assert result.allocation_count == 4
        assert result.allocations_per_stakeholder == {"Reg": 1, "Vert": 1, "Nats": 1, "Op": 1}

    def test_merged_group_unions_stakeholders(self):
        model = requirements_model(
            ["same", "same"],
            stakeholders=[{"Reg"}, {"Vert"}],
        )
        result = dedupe_requirements(model)
        assert result.distinct_count == 1
        assert result.allocation_count == 2


# ---------------------------------------------------------------------------
# Brute-force oracle: pairwise transitive closure, no union-find
# ---------------------------------------------------------------------------

def oracle_partition(texts, merge_pairs):
    n = len(texts)
    groups = [{i} for i in range(n)]

    def joined(i, j):
        return normalize_requirement_text(texts[i]) == normalize_requirement_text(texts[j]) or (
            (i, j) in merge_pairs or (j, i) in merge_pairs
        )

    changed = True
    while changed:
        changed = False
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                if any(joined(i, j) for i in groups[a] for j in groups[b]):
                    groups[a] |= groups[b]
                    del groups[b]
                    changed = True
                    break
            if changed:
                break
    return {frozenset(g) for g in groups}


@pytest.mark.parametrize("seed", range(10))
def test_partition_matches_oracle_on_random_instances(seed):
    rng = random.Random(seed)
    for _ in range(10):
        n = rng.randint(1, 50)
        vocabulary = [f"requirement text {k}" for k in range(max(2, n // 2))]
        texts = [rng.choice(vocabulary) for _ in range(n)]
        merge_pairs = {
            (rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n // 3))
        }
        model = requirements_model(texts)
        result = dedupe_requirements(
            model, [(rq(a + 1), rq(b + 1)) for a, b in sorted(merge_pairs)]
        )
        ours = {
            frozenset(member.number - 1 for member in group)
            for group in result.groups.values()
        }
        assert ours == oracle_partition(texts, merge_pairs)


def test_partition_is_disjoint_and_covering():
    rng = random.Random(99)
    texts = [rng.choice(["a", "b", "c", "d"]) for _ in range(30)]
    result = dedupe_requirements(requirements_model(texts))
    seen = []
    for group in result.groups.values():
        seen.extend(group)
    assert sorted(seen) == sorted(rq(i + 1) for i in range(30))


def test_partition_invariant_under_input_order():
    texts = ["x", "y", "x", "z", "y"]
    forward = dedupe_requirements(requirements_model(texts))
    backward_model = requirements_model(texts)
    backward = dedupe_requirements(
        backward_model.with_(requirements=tuple(reversed(backward_model.requirements)))
    )
    assert forward.groups == backward.groups

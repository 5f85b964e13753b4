"""Unification op semantics, script replay, diff, and preview."""

import json
import random
from pathlib import Path

import pytest

from helpers import oracle_concepts, random_context, toy_context
from schemalattice.context import build_context
from schemalattice.errors import (
    EmptyResultError,
    InvalidOpError,
    TargetExistsError,
    UnknownNameError,
)
from schemalattice.ingest import write_cxt
from schemalattice.lattice import build_lattice, enumerate_concepts, labels
from schemalattice.transform import (
    MergeAttributes,
    MergeObjects,
    RenameAttribute,
    RenameObject,
    ReplaceFields,
    TransformScript,
    apply_op,
    apply_script,
    diff_contexts,
    dump_script,
    op_to_dict,
    parse_op,
    parse_script,
    preview,
)

DATA = Path(__file__).parent / "data"


def toy_script():
    return parse_script((DATA / "toy_script.json").read_text())


class TestMergeAttributes:
    def test_toy_two_merges_reach_four_concepts(self, toy):
        ctx, _ = apply_op(toy, MergeAttributes(("time", "timestamp"), "time"))
        ctx, _ = apply_op(ctx, MergeAttributes(("serviceName", "name", "path"), "name"))
        lat = build_lattice(ctx)
        assert len(lat.concepts) == 4
        root = lat.concepts[lat.top_index]
        assert set(ctx.attribute_names(root.intent)) == {"name", "time"}

    def test_target_column_is_union(self):
        ctx = build_context(
            ["Login", "Audit", "Batch"],
            ["usr", "user", "username", "duration"],
            [
                ("Login", "usr"),
                ("Audit", "user"),
                ("Batch", "username"),
                ("Batch", "duration"),
            ],
        )
        merged, warnings = apply_op(
            ctx, MergeAttributes(("usr", "user", "username"), "user")
        )
        assert merged.attributes == ("user", "duration")
        assert merged.cols[0] == 0b111
        assert warnings == []

    def test_target_placed_at_first_source_position(self, toy):
        merged, _ = apply_op(
            toy, MergeAttributes(("serviceName", "name", "path"), "name")
        )
        assert merged.attributes == (
            "time",
            "timestamp",
            "used",
            "max",
            "name",
            "duration",
        )

    def test_existing_target_outside_sources_is_absorbed(self):
        # one structure already uses the target name: still a plain union
        ctx = build_context(
            ["g1", "g2", "g3"],
            ["statType", "type", "typRAZ"],
            [("g1", "statType"), ("g2", "type"), ("g3", "typRAZ")],
        )
        merged, warnings = apply_op(ctx, MergeAttributes(("statType", "typRAZ"), "type"))
        assert merged.attributes == ("type",)
        assert merged.cols[0] == 0b111
        assert warnings == []

    def test_collapsed_incidence_warning(self):
        ctx = build_context(
            ["g1", "g2"],
            ["type", "statType"],
            [("g1", "type"), ("g1", "statType"), ("g2", "statType")],
        )
        merged, warnings = apply_op(ctx, MergeAttributes(("type", "statType"), "type"))
        assert len(warnings) == 1
        assert warnings[0].kind == "collapsed_incidences"
        assert warnings[0].count == 1
        assert merged.attributes == ("type",)

    def test_extent_never_shrinks(self):
        rng = random.Random(606)
        for _ in range(60):
            ctx, _ = random_context(rng, max_objects=7, max_attributes=8)
            if ctx.n_attributes < 2:
                continue
            k = rng.randint(2, ctx.n_attributes)
            sources = tuple(rng.sample(list(ctx.attributes), k))
            union = 0
            for s in sources:
                union |= ctx.cols[ctx.attribute_index(s)]
            merged, _ = apply_op(ctx, MergeAttributes(sources, sources[0]))
            target_col = merged.cols[merged.attribute_index(sources[0])]
            assert target_col == union
            assert merged.n_objects == ctx.n_objects
            assert merged.n_attributes == ctx.n_attributes - (len(sources) - 1)

    def test_unknown_source_rejected(self, toy):
        with pytest.raises(UnknownNameError):
            apply_op(toy, MergeAttributes(("time", "nope"), "time"))

    def test_structural_invariants(self):
        with pytest.raises(InvalidOpError):
            MergeAttributes((), "x")
        with pytest.raises(InvalidOpError):
            MergeAttributes(("a", "a"), "x")
        with pytest.raises(InvalidOpError):
            MergeAttributes(("a",), "")


class TestAscent:
    def test_instance_triple_ascends_to_root(self):
        ctx = build_context(
            ["Machine", "Tomcat", "logs", "traces"],
            [
                "instanceType",
                "instanceCode",
                "_time",
                "cpu",
                "threads",
                "typeInstance",
                "codeInstance",
                "@timestamp",
                "message",
                "spanId",
            ],
            [
                ("Machine", "instanceType"),
                ("Machine", "instanceCode"),
                ("Machine", "_time"),
                ("Machine", "cpu"),
                ("Tomcat", "instanceType"),
                ("Tomcat", "instanceCode"),
                ("Tomcat", "_time"),
                ("Tomcat", "threads"),
                ("logs", "typeInstance"),
                ("logs", "codeInstance"),
                ("logs", "@timestamp"),
                ("logs", "message"),
                ("traces", "typeInstance"),
                ("traces", "codeInstance"),
                ("traces", "@timestamp"),
                ("traces", "spanId"),
            ],
        )
        for op in (
            MergeAttributes(("typeInstance", "instanceType"), "instanceType"),
            MergeAttributes(("codeInstance", "instanceCode"), "instanceCode"),
            MergeAttributes(("@timestamp", "_time"), "timestamp"),
        ):
            ctx, _ = apply_op(ctx, op)
        for name in ("timestamp", "instanceType", "instanceCode"):
            assert ctx.cols[ctx.attribute_index(name)] == ctx.all_objects
        lat = build_lattice(ctx)
        lab = labels(ctx, lat)
        for name in ("timestamp", "instanceType", "instanceCode"):
            assert lab.attribute_introducer[ctx.attribute_index(name)] == lat.top_index

    def test_merged_introducer_never_deeper_than_sources(self):
        rng = random.Random(808)
        checked = 0
        while checked < 60:
            ctx, _ = random_context(rng, max_objects=7, max_attributes=8)
            if ctx.n_attributes < 2 or ctx.n_objects == 0:
                continue
            k = rng.randint(2, min(3, ctx.n_attributes))
            sources = tuple(rng.sample(list(ctx.attributes), k))
            lat = build_lattice(ctx)
            lab = labels(ctx, lat)
            before = min(
                lat.layers[lab.attribute_introducer[ctx.attribute_index(s)]]
                for s in sources
            )
            merged, _ = apply_op(ctx, MergeAttributes(sources, sources[0]))
            lat2 = build_lattice(merged)
            lab2 = labels(merged, lat2)
            after = lat2.layers[
                lab2.attribute_introducer[merged.attribute_index(sources[0])]
            ]
            assert after <= before
            checked += 1


class TestRename:
    def test_rename_attribute(self, toy):
        renamed, warnings = apply_op(toy, RenameAttribute("path", "filePath"))
        assert warnings == []
        assert "filePath" in renamed.attributes
        assert renamed.rows == toy.rows

    def test_identity_rename_is_noop(self, toy):
        renamed, warnings = apply_op(toy, RenameAttribute("path", "path"))
        assert renamed == toy
        assert warnings == []

    def test_rename_collision(self, toy):
        with pytest.raises(TargetExistsError):
            apply_op(toy, RenameAttribute("path", "name"))

    def test_rename_object(self, toy):
        renamed, _ = apply_op(toy, RenameObject("Storage", "Disk"))
        assert renamed.objects == ("Disk", "DBTablespace", "ServiceCall")
        with pytest.raises(TargetExistsError):
            apply_op(toy, RenameObject("Storage", "ServiceCall"))


class TestMergeObjects:
    def test_rows_unioned(self, toy):
        merged, warnings = apply_op(
            toy, MergeObjects(("Storage", "DBTablespace"), "Volumes")
        )
        assert merged.objects == ("Volumes", "ServiceCall")
        expected = toy.rows[0] | toy.rows[1]
        assert merged.rows[0] == expected
        # time, used, max shared by both source structures
        assert warnings[0].kind == "collapsed_incidences"
        assert warnings[0].count == 3

    def test_unknown_source(self, toy):
        with pytest.raises(UnknownNameError):
            apply_op(toy, MergeObjects(("Storage", "Nope"), "X"))


class TestReplaceFields:
    def resources_context(self):
        return build_context(
            ["Machine", "JVM"],
            [
                "swapUsed",
                "swapMax",
                "swapUsedRatio",
                "ramUsed",
                "ramMax",
                "ramUsedRatio",
                "heapUsed",
                "heapMax",
                "heapUsedRatio",
                "instanceCode",
            ],
            [
                ("Machine", "swapUsed"),
                ("Machine", "swapMax"),
                ("Machine", "swapUsedRatio"),
                ("Machine", "ramUsed"),
                ("Machine", "ramMax"),
                ("Machine", "ramUsedRatio"),
                ("Machine", "instanceCode"),
                ("JVM", "heapUsed"),
                ("JVM", "heapMax"),
                ("JVM", "heapUsedRatio"),
                ("JVM", "instanceCode"),
            ],
        )

    def test_resources_consolidation(self):
        ctx = self.resources_context()
        ctx, _ = apply_op(ctx, MergeObjects(("Machine", "JVM"), "Resources"))
        specific = [
            "swapUsed",
            "swapMax",
            "swapUsedRatio",
            "ramUsed",
            "ramMax",
            "ramUsedRatio",
            "heapUsed",
            "heapMax",
            "heapUsedRatio",
        ]
        ctx, warnings = apply_op(
            ctx,
            ReplaceFields(
                "Resources",
                remove=tuple(specific),
                add=("type", "used", "max", "usedRatio"),
            ),
        )
        assert set(ctx.attributes) == {"instanceCode", "type", "used", "max", "usedRatio"}
        row = ctx.rows[ctx.object_index("Resources")]
        assert set(ctx.attribute_names(row)) == {
            "instanceCode",
            "type",
            "used",
            "max",
            "usedRatio",
        }
        assert any(w.kind == "pruned_attributes" and w.count == 9 for w in warnings)

    def test_new_columns_appended_in_order(self, toy):
        ctx, _ = apply_op(toy, ReplaceFields("Storage", add=("zz", "aa")))
        assert ctx.attributes[-2:] == ("zz", "aa")
        assert toy.n_objects == ctx.n_objects

    def test_no_prune_keeps_ghost_columns(self):
        ctx = build_context(["g"], ["a", "b"], [("g", "a"), ("g", "b")])
        pruned, _ = apply_op(ctx, ReplaceFields("g", remove=("a",)))
        assert pruned.attributes == ("b",)
        kept, _ = apply_op(ctx, ReplaceFields("g", remove=("a",)), prune=False)
        assert kept.attributes == ("a", "b")
        assert kept.cols[0] == 0

    def test_removing_everything_rejected(self):
        ctx = build_context(["g"], ["a"], [("g", "a")])
        with pytest.raises(EmptyResultError):
            apply_op(ctx, ReplaceFields("g", remove=("a",)))

    def test_unknown_names_rejected(self, toy):
        with pytest.raises(UnknownNameError):
            apply_op(toy, ReplaceFields("Nope", remove=("time",)))
        with pytest.raises(UnknownNameError):
            apply_op(toy, ReplaceFields("Storage", remove=("nope",)))


class TestApplyScript:
    def test_empty_script_is_identity(self, toy):
        ctx, report = apply_script(toy, TransformScript(()))
        assert ctx == toy
        assert report.outcomes == ()
        assert report.stats_before == report.stats_after

    def test_toy_script(self, toy):
        ctx, report = apply_script(toy, toy_script())
        assert [o.status for o in report.outcomes] == ["applied", "applied"]
        assert report.stats_before.concept_count == 7
        assert report.stats_after.concept_count == 4
        assert report.stats_after.attribute_count == 5

    def test_rejected_op_aborts_by_default(self, toy):
        script = TransformScript(
            (
                MergeAttributes(("time", "timestamp"), "time"),
                RenameAttribute("ghost", "spirit"),
                RenameAttribute("used", "consumed"),
            )
        )
        ctx, report = apply_script(toy, script)
        assert [o.status for o in report.outcomes] == ["applied", "rejected", "skipped"]
        assert "op 1" in report.outcomes[1].reason
        assert "used" in ctx.attributes  # third op never ran

    def test_skip_mode_continues(self, toy):
        script = TransformScript(
            (
                RenameAttribute("ghost", "spirit"),
                RenameAttribute("used", "consumed"),
            )
        )
        ctx, report = apply_script(toy, script, on_error="skip")
        assert [o.status for o in report.outcomes] == ["rejected", "applied"]
        assert "consumed" in ctx.attributes

    def test_deterministic_output_bytes(self, toy):
        script = toy_script()
        out1, _ = apply_script(toy, script)
        out2, _ = apply_script(toy, script)
        assert write_cxt(out1) == write_cxt(out2)

    def test_replay_equivalence(self):
        rng = random.Random(91)
        for _ in range(20):
            ctx, _ = random_context(rng, max_objects=6, max_attributes=7)
            if ctx.n_attributes < 3:
                continue
            names = list(ctx.attributes)
            s1 = TransformScript((MergeAttributes(tuple(names[:2]), names[0]),))
            s2 = TransformScript((RenameAttribute(names[2], "renamed_field"),))
            combined = TransformScript(s1.ops + s2.ops)
            mid, _ = apply_script(ctx, s1)
            via_two, _ = apply_script(mid, s2)
            via_one, _ = apply_script(ctx, combined)
            assert via_two == via_one


class TestDiff:
    def test_identity_diff_empty(self, toy):
        diff = diff_contexts(toy, toy)
        assert diff.empty

    def test_toy_unification_diff(self, toy):
        after, _ = apply_script(toy, toy_script())
        diff = diff_contexts(toy, after)
        assert diff.attributes_removed == ("path", "serviceName", "timestamp")
        assert diff.attributes_added == ()
        assert diff.introducer_layer_changes["time"] == (1, 0)
        assert diff.introducer_layer_changes["name"] == (1, 0)

    def test_pure_rename_detected(self, toy):
        after, _ = apply_op(toy, RenameAttribute("path", "filePath"))
        diff = diff_contexts(toy, after)
        assert diff.attributes_renamed == (("path", "filePath"),)
        assert diff.attributes_removed == ()
        assert diff.attributes_added == ()

    def test_resources_diff_reports_added_fields(self):
        ctx = TestReplaceFields().resources_context()
        mid, _ = apply_op(ctx, MergeObjects(("Machine", "JVM"), "Resources"))
        after, _ = apply_op(
            mid,
            ReplaceFields(
                "Resources",
                remove=tuple(a for a in ctx.attributes if a != "instanceCode"),
                add=("type", "used", "max", "usedRatio"),
            ),
        )
        diff = diff_contexts(ctx, after)
        assert set(diff.attributes_added) == {"type", "used", "max", "usedRatio"}
        assert "swapUsed" in diff.attributes_removed
        assert "ramMax" in diff.attributes_removed
        assert diff.objects_added == ("Resources",)
        assert set(diff.objects_removed) == {"JVM", "Machine"}


class TestPreview:
    def test_noop_rename_zero_delta(self, toy):
        report, delta = preview(toy, RenameAttribute("path", "path"))
        assert report.outcomes[0].status == "applied"
        assert delta is not None and delta.zero

    def test_first_toy_merge_delta(self, toy):
        report, delta = preview(toy, MergeAttributes(("time", "timestamp"), "time"))
        assert report.outcomes[0].status == "applied"
        # oracle-verified: the first merge reshapes the lattice but keeps
        # all seven concepts; `time` ascends to the root
        assert delta.concept_count_before == 7
        assert delta.concept_count_after == 7
        assert delta.introducer_layer_changes["time"] == (1, 0)

    def test_preview_does_not_mutate(self, toy):
        before = toy
        preview(toy, MergeAttributes(("time", "timestamp"), "time"))
        assert toy == before

    def test_unknown_attribute_rejected(self, toy):
        report, delta = preview(toy, MergeAttributes(("time", "ghost"), "time"))
        assert report.outcomes[0].status == "rejected"
        assert delta is None


class TestScriptSerialization:
    def test_round_trip(self):
        script = toy_script()
        assert parse_script(dump_script(script)) == script
        assert script.author == "tests"

    def test_all_op_kinds_round_trip(self):
        ops = (
            MergeAttributes(("a", "b"), "a", "n1"),
            RenameAttribute("a", "b", "n2"),
            RenameObject("g", "h"),
            MergeObjects(("g", "h"), "k"),
            ReplaceFields("g", ("a",), ("b", "c")),
        )
        for op in ops:
            assert parse_op(op_to_dict(op)) == op

    def test_malformed_ops_rejected(self):
        with pytest.raises(InvalidOpError):
            parse_op({"op": "explode"})
        with pytest.raises(InvalidOpError):
            parse_op({"op": "merge_attributes", "target": "x"})
        with pytest.raises(InvalidOpError):
            parse_script("{not json")
        with pytest.raises(InvalidOpError):
            parse_script('{"ops": 3}')

#!/usr/bin/env python3
"""Generate the synthetic monitoring-lake fixture under tests/data/lake/.

The fixture models a two-store lake: 16 InfluxDB measurements and 16
Elasticsearch indexes, 190 distinct raw field names, plus the unification
script that consolidates them to 88. The layout is engineered so that the
initial lattice has 44 concepts at height 4 and the consolidated one 72 at
height 6, with the coverage curve crossing 75% at k=25 and 80% at k=34.

Key structural rules:
  * every store's structures share that store's id/timestamp triple;
  * apart from eight deliberate cross-store name collisions, every raw
    field name is unique to one structure (this pins the initial lattice
    to top + 2 store concepts + 8 collision concepts + 32 structures +
    bottom = 44 concepts at height 4);
  * consolidated names nest: type > used > {max, usedRatio}, giving the
    final lattice its height-6 chain through the Resources structure.

Run from the repo root:  python3 scripts/gen_lake_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "lake"

INFLUX_TRIPLE = ["instanceType", "instanceCode", "_time"]
ES_TRIPLE = ["typeInstance", "codeInstance", "@timestamp"]

# Machine and JVM carry only the store triple plus their resource trios;
# the script folds both into the new Resources structure.
MACHINE_FIELDS = [
    "cpuLoad",
    "swapUsed",
    "swapMax",
    "swapUsedRatio",
    "ramUsed",
    "ramMax",
    "ramUsedRatio",
]
JVM_FIELDS = [
    "threadsNb",
    "heapUsed",
    "heapMax",
    "heapUsedRatio",
    "nonHeapUsed",
    "nonHeapMax",
    "nonHeapUsedRatio",
]

# Consolidated vocabulary: which final field names each structure ends up
# with (beyond the unified triple). "Resources" is created by the script.
MENU: dict[str, dict] = {
    # InfluxDB measurements
    "Storage": {"kind": "influx", "menu": ["code", "used", "max", "usedRatio"]},
    "DBTablespace": {"kind": "influx", "menu": ["code", "type", "used", "max", "usedRatio"]},
    "Cache": {"kind": "influx", "menu": ["code", "type", "used", "count"]},
    "GC": {"kind": "influx", "menu": ["code", "type", "duration", "count"]},
    "Tomcat": {"kind": "influx", "menu": ["user", "count", "status"]},
    "DBSession": {"kind": "influx", "menu": ["user", "status"]},
    "PausedIndex": {"kind": "influx", "menu": ["code", "status"]},
    "WaitingDoc": {"kind": "influx", "menu": ["code", "count"]},
    "CurrentJob": {"kind": "influx", "menu": ["code", "user", "duration", "status"]},
    "IndexSize": {"kind": "influx", "menu": ["code", "sizeBytes"]},
    "ThreadPool": {"kind": "influx", "menu": ["code", "count", "threshold"]},
    "Queue": {"kind": "influx", "menu": ["code", "type", "count", "threshold"]},
    "Batch": {
        "kind": "influx",
        "menu": ["code", "type", "user", "duration", "status", "startTimestamp", "endTimestamp"],
    },
    "Network": {"kind": "influx", "menu": ["code", "count", "status"]},
    # Elasticsearch indexes
    "logs": {"kind": "es", "menu": ["user", "message", "severity", "component", "host"]},
    "traces": {
        "kind": "es",
        "menu": ["user", "duration", "component", "host", "startTimestamp", "endTimestamp"],
    },
    "requests": {"kind": "es", "menu": ["user", "status", "host", "sizeBytes"]},
    "alerts": {"kind": "es", "menu": ["type", "severity", "threshold", "component", "status"]},
    "deployments": {"kind": "es", "menu": ["code", "version", "user", "status", "duration"]},
    "exports": {"kind": "es", "menu": ["code", "user", "count", "sizeBytes"]},
    "imports": {"kind": "es", "menu": ["user", "count", "sizeBytes", "status"]},
    "userSessions": {"kind": "es", "menu": ["user", "duration"]},
    "searches": {"kind": "es", "menu": ["user", "duration"]},
    "notifications": {"kind": "es", "menu": ["user", "status", "count", "message", "component"]},
    "audit": {"kind": "es", "menu": ["user", "type", "component"], "fat": True},
    "incidents": {"kind": "es", "menu": ["severity", "status", "component"], "fat": True},
    "documents": {"kind": "es", "menu": ["code", "type", "sizeBytes", "version"], "fat": True},
    "emails": {"kind": "es", "menu": ["user", "status"], "fat": True},
    "metricsRollup": {"kind": "es", "menu": ["type", "count", "startTimestamp", "endTimestamp"], "fat": True},
    "jobsHistory": {
        "kind": "es",
        "menu": ["code", "user", "duration", "status"],
        "fat": True,
    },
}

# The eight deliberate cross-store collisions: (final name, influx carrier,
# es carrier, raw shared name). Everything else is structure-specific.
PAIRS = [
    ("user", "Tomcat", "emails", "usr"),
    ("code", "PausedIndex", "documents", "indexName"),
    ("type", "Queue", "metricsRollup", "statType"),
    ("count", "WaitingDoc", "notifications", "itemsNb"),
    ("duration", "CurrentJob", "traces", "duration"),
    ("status", "CurrentJob", "requests", "state"),
    ("sizeBytes", "IndexSize", "requests", "bytes"),
    ("threshold", "ThreadPool", "alerts", "threshold"),
]

# Raw per-structure spellings of each consolidated name. One entry per
# carrier except where a PAIRS row substitutes the shared spelling.
VARIANTS: dict[tuple[str, str], str] = {
    ("Storage", "code"): "storageName",
    ("DBTablespace", "code"): "tablespaceName",
    ("Cache", "code"): "cacheName",
    ("GC", "code"): "nameGC",
    ("WaitingDoc", "code"): "idxCode",
    ("CurrentJob", "code"): "jobName",
    ("IndexSize", "code"): "luceneIndex",
    ("ThreadPool", "code"): "poolName",
    ("Queue", "code"): "queueName",
    ("Batch", "code"): "batchName",
    ("Network", "code"): "ifaceName",
    ("deployments", "code"): "moduleName",
    ("exports", "code"): "serviceCode",
    ("jobsHistory", "code"): "jobCode",
    ("GC", "type"): "gcType",
    ("DBTablespace", "type"): "spaceType",
    ("Cache", "type"): "cacheType",
    ("Batch", "type"): "typTrace",
    ("alerts", "type"): "alertKind",
    ("audit", "type"): "auditType",
    ("documents", "type"): "mimeType",
    ("DBSession", "user"): "usrCode",
    ("CurrentJob", "user"): "launchedBy",
    ("Batch", "user"): "launcher",
    ("logs", "user"): "user",
    ("traces", "user"): "userId",
    ("requests", "user"): "remoteUser",
    ("deployments", "user"): "deployedBy",
    ("exports", "user"): "requestedBy",
    ("imports", "user"): "uploadedBy",
    ("userSessions", "user"): "login",
    ("searches", "user"): "searcher",
    ("notifications", "user"): "recipient",
    ("audit", "user"): "username",
    ("jobsHistory", "user"): "owner",
    ("Storage", "used"): "usedSpace",
    ("DBTablespace", "used"): "usedBytes",
    ("Cache", "used"): "cacheUsed",
    ("Storage", "max"): "maxSpace",
    ("DBTablespace", "max"): "maxBytes",
    ("Storage", "usedRatio"): "usedSpaceRatio",
    ("DBTablespace", "usedRatio"): "usedBytesRatio",
    ("GC", "count"): "callsNb",
    ("Cache", "count"): "hitNb",
    ("Tomcat", "count"): "sessionNb",
    ("ThreadPool", "count"): "activeNb",
    ("Queue", "count"): "depth",
    ("Network", "count"): "packetNb",
    ("exports", "count"): "rowNb",
    ("imports", "count"): "lineNb",
    ("metricsRollup", "count"): "sampleNb",
    ("Tomcat", "status"): "serverState",
    ("Batch", "status"): "batchState",
    ("DBSession", "status"): "sessionState",
    ("PausedIndex", "status"): "pauseFlag",
    ("Network", "status"): "linkState",
    ("alerts", "status"): "ackState",
    ("deployments", "status"): "deployState",
    ("imports", "status"): "importState",
    ("emails", "status"): "deliveryState",
    ("incidents", "status"): "incidentState",
    ("jobsHistory", "status"): "exitStatus",
    ("notifications", "status"): "readFlag",
    ("GC", "duration"): "gcTime",
    ("Batch", "duration"): "runTime",
    ("deployments", "duration"): "rolloutTime",
    ("userSessions", "duration"): "sessionLength",
    ("searches", "duration"): "searchTime",
    ("jobsHistory", "duration"): "elapsedMs",
    ("exports", "sizeBytes"): "fileSize",
    ("imports", "sizeBytes"): "payloadSize",
    ("documents", "sizeBytes"): "docLength",
    ("logs", "severity"): "level",
    ("alerts", "severity"): "criticality",
    ("incidents", "severity"): "impact",
    ("logs", "component"): "loggerName",
    ("traces", "component"): "serviceName",
    ("alerts", "component"): "emitter",
    ("audit", "component"): "entity",
    ("incidents", "component"): "affectedModule",
    ("notifications", "component"): "channel",
    ("logs", "host"): "hostname",
    ("traces", "host"): "nodeName",
    ("requests", "host"): "serverHost",
    ("Queue", "threshold"): "maxDepth",
    ("logs", "message"): "message",
    ("notifications", "message"): "body",
    ("deployments", "version"): "releaseTag",
    ("documents", "version"): "revision",
    ("Batch", "startTimestamp"): "startedAt",
    ("metricsRollup", "startTimestamp"): "windowStart",
    ("traces", "startTimestamp"): "spanStart",
    ("Batch", "endTimestamp"): "endedAt",
    ("metricsRollup", "endTimestamp"): "windowEnd",
    ("traces", "endTimestamp"): "spanEnd",
}

# Index-specific long-tail fields kept by the consolidation (11 per fat
# index). The audit ones sort first alphabetically, which is what lets the
# coverage curve clear 80% by k=34.
SINGLES = {
    "audit": [
        "audAction",
        "audBefore",
        "audAfter",
        "audReason",
        "audScreen",
        "audSession",
        "audTable",
        "audKey",
        "audOrigin",
        "audChannel",
        "audBatch",
    ],
    "documents": [
        "docPages",
        "docLanguage",
        "docOcrState",
        "docChecksum",
        "docFolder",
        "docAuthor",
        "docTitle",
        "docKeywords",
        "docExpiry",
        "docSource",
        "docFormat",
    ],
    "emails": [
        "emlSubject",
        "emlSender",
        "emlReplyTo",
        "emlBounceNb",
        "emlOpenedAt",
        "emlTemplate",
        "emlQueueId",
        "emlSmtpCode",
        "emlAttachNb",
        "emlCampaign",
        "emlPriority",
    ],
    "incidents": [
        "incAssignee",
        "incResolution",
        "incEscalated",
        "incSlaBreach",
        "incRootCause",
        "incTicketRef",
        "incClosedBy",
        "incReopenNb",
        "incCategory",
        "incContact",
        "incPostMortem",
    ],
    "jobsHistory": [
        "jhTrigger",
        "jhRetryNb",
        "jhLogPath",
        "jhNodePool",
        "jhCpuSec",
        "jhMemPeak",
        "jhArgsHash",
        "jhParentJob",
        "jhSpoolSize",
        "jhPartition",
        "jhPriority",
        "jhQueue",
    ],
    "metricsRollup": [
        "mrWindow",
        "mrGranularity",
        "mrMetricKey",
        "mrAggFn",
        "mrSourceNb",
        "mrLagMs",
        "mrPartial",
        "mrVariance",
        "mrP95",
        "mrP99",
        "mrOverflowNb",
    ],
}

RESOURCE_REMOVE = MACHINE_FIELDS + JVM_FIELDS
RESOURCE_ADD = ["type", "used", "max", "usedRatio"]


def pair_lookup() -> dict[tuple[str, str], str]:
    shared = {}
    for final, influx_s, es_s, raw in PAIRS:
        shared[(influx_s, final)] = raw
        shared[(es_s, final)] = raw
    return shared


def raw_fields(structure: str) -> list[str]:
    """Raw (pre-consolidation) field names of one structure, triple last."""
    shared = pair_lookup()
    spec = MENU[structure]
    fields = []
    for final in spec["menu"]:
        key = (structure, final)
        if key in shared:
            fields.append(shared[key])
        else:
            fields.append(VARIANTS[key])
    fields.extend(SINGLES.get(structure, []))
    return fields


def merge_sources(final: str) -> list[str]:
    """Every raw spelling of one consolidated name, deduplicated."""
    seen = []
    for structure, spec in MENU.items():
        if final in spec["menu"]:
            raw = pair_lookup().get((structure, final), VARIANTS.get((structure, final)))
            if raw not in seen:
                seen.append(raw)
    return seen


def build_script() -> dict:
    ops = []

    def merge(sources, target, note):
        ops.append(
            {"op": "merge_attributes", "sources": sources, "target": target, "note": note}
        )

    # top-down: the two store triples become one shared triple
    merge(["typeInstance", "instanceType"], "instanceType", "same notion in both stores")
    merge(["codeInstance", "instanceCode"], "instanceCode", "same notion in both stores")
    merge(["@timestamp", "_time"], "timestamp", "event creation instant")
    # top-down: user identifiers sit high in the lattice already
    merge(merge_sources("user"), "user", "user identifier variants")
    # bottom-up: names specific to single structures but naming one notion
    merge(merge_sources("code"), "code", "monitored component identifier")
    merge(merge_sources("type"), "type", "kind of the described component")
    merge(merge_sources("status"), "status", "component or run state")
    merge(merge_sources("count"), "count", "generic cardinality metric")
    merge(merge_sources("duration"), "duration", "elapsed time of a run or span")
    merge(merge_sources("sizeBytes"), "sizeBytes", "payload or volume size")
    merge(merge_sources("severity"), "severity", "importance level")
    merge(merge_sources("component"), "component", "emitting component")
    merge(merge_sources("host"), "host", "machine or client host")
    merge(merge_sources("threshold"), "threshold", "alerting limit")
    merge(merge_sources("message"), "message", "human readable text")
    merge(merge_sources("version"), "version", "artifact revision")
    merge(merge_sources("startTimestamp"), "startTimestamp", "interval start")
    merge(merge_sources("endTimestamp"), "endTimestamp", "interval end")
    merge(merge_sources("used"), "used", "consumed quantity of a resource")
    merge(merge_sources("max"), "max", "capacity of a resource")
    merge(merge_sources("usedRatio"), "usedRatio", "consumption ratio")
    # restructuring: fold the two resource-style structures into one
    ops.append(
        {
            "op": "merge_objects",
            "sources": ["Machine", "JVM"],
            "target": "Resources",
            "note": "host and JVM resource gauges describe the same notion",
        }
    )
    ops.append(
        {
            "op": "replace_fields",
            "object": "Resources",
            "remove": RESOURCE_REMOVE,
            "add": RESOURCE_ADD,
            "note": "one row per resource kind, generic gauge fields",
        }
    )
    return {
        "ops": ops,
        "metadata": {"author": "fixture-generator", "created_at": "2026-08-10T00:00:00Z"},
    }


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "es").mkdir(exist_ok=True)

    measurements = []
    for name, spec in MENU.items():
        if spec["kind"] != "influx":
            continue
        measurements.append(
            {
                "name": name,
                "tags": ["instanceType", "instanceCode"],
                "fields": ["_time"] + raw_fields(name),
                "group_path": ["Copilote", "metrics"],
            }
        )
    measurements.append(
        {
            "name": "Machine",
            "tags": ["instanceType", "instanceCode"],
            "fields": ["_time"] + MACHINE_FIELDS,
            "group_path": ["Copilote", "metrics"],
        }
    )
    measurements.append(
        {
            "name": "JVM",
            "tags": ["instanceType", "instanceCode"],
            "fields": ["_time"] + JVM_FIELDS,
            "group_path": ["Copilote", "metrics"],
        }
    )
    (OUT / "influx_schema.json").write_text(
        json.dumps({"measurements": measurements}, indent=2) + "\n"
    )

    for name, spec in MENU.items():
        if spec["kind"] != "es":
            continue
        properties = {field: {"type": "keyword"} for field in ES_TRIPLE}
        for field in raw_fields(name):
            properties[field] = {"type": "keyword"}
        doc = {"mappings": {"properties": properties}}
        (OUT / "es" / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")

    (OUT / "script.json").write_text(json.dumps(build_script(), indent=2) + "\n")
    print(f"wrote fixture under {OUT}")


if __name__ == "__main__":
    main()

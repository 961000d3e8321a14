"""Ingestion, persistence and presets.

Wire formats
  membership CSV : header member_id,group_id[,timestamp]; string ids
  colors CSV     : header entity_id,kind,color with kind in {member, group}
                   and color in {red, blue}
  snapshot JSONL : one {"section": ...} record per line (meta, member,
                   group, edge) -- diffable and byte-stable
  series CSV     : bin_lo,bin_hi,ratio,support
  reports        : JSON with sorted keys

Presets replicate the published ingestion windows: "qq" keeps groups of size
at most 100; "whatsapp" keeps 52 <= size < 165.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import (BLUE, RED, BipartiteNetwork, GrowthParams, Tallies,
                   UnipartiteNetwork, Variant, recount)
from .errors import IngestError
from .metrics import RatioSeries, TailRatioSeries, color_groups_by_ratio

PRESETS = {
    "qq": {"min_size": 1, "max_size": 100},
    "whatsapp": {"min_size": 52, "max_size": 164},
}

_COLOR_NAMES = {"red": RED, "blue": BLUE}
_COLOR_LABELS = {RED: "red", BLUE: "blue"}


@dataclass(frozen=True)
class MembershipRecord:
    member_id: str
    group_id: str
    timestamp: int | None = None


@dataclass(frozen=True)
class ColorRecord:
    entity_id: str
    kind: str        # "member" | "group"
    color: int

    def label(self):
        return _COLOR_LABELS[self.color]


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dump_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      default=_json_default)


# ---------------------------------------------------------------------------
# CSV readers

def read_membership_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["member_id", "group_id"]:
            raise IngestError("expected header member_id,group_id[,timestamp]", line=1)
        has_ts = len(header) >= 3 and header[2].strip() == "timestamp"
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2 or not row[0].strip() or not row[1].strip():
                raise IngestError("membership row needs member_id and group_id",
                                  line=lineno)
            ts = None
            if has_ts and len(row) >= 3 and row[2].strip():
                try:
                    ts = int(row[2])
                except ValueError:
                    raise IngestError(f"bad timestamp {row[2]!r}", line=lineno)
            records.append(MembershipRecord(row[0].strip(), row[1].strip(), ts))
    return records


def read_colors_csv(path):
    out = []
    seen = set()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["entity_id", "kind", "color"]:
            raise IngestError("expected header entity_id,kind,color", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 3:
                raise IngestError("color row needs entity_id,kind,color", line=lineno)
            eid, kind, color = (c.strip() for c in row[:3])
            if kind not in ("member", "group"):
                raise IngestError(f"unknown kind {kind!r}", line=lineno)
            if color not in _COLOR_NAMES:
                raise IngestError(f"unknown color {color!r}", line=lineno)
            if (eid, kind) in seen:
                raise IngestError(f"duplicate color record for {kind} {eid!r}",
                                  line=lineno)
            seen.add((eid, kind))
            out.append(ColorRecord(eid, kind, _COLOR_NAMES[color]))
    return out


# ---------------------------------------------------------------------------
# Ingest

def ingest(membership_csv, colors_csv=None, preset: str | None = None,
           ratio_threshold: float | None = None) -> BipartiteNetwork:
    """Build a network from a membership table.

    Memberships are ordered by timestamp (stable on ties / when absent);
    dense ids follow first appearance, the first member of a group is its
    creator.  Member colors come from the colors file, or are inferred from
    given group colors by the joined-share rule (red iff the member's share
    of red-group joins strictly exceeds the overall red-group share).  Group
    colors come from the colors file or from the member-share coloring.
    """
    records = read_membership_csv(membership_csv)
    if not records:
        raise IngestError("no membership rows")
    if preset is not None:
        if preset not in PRESETS:
            raise IngestError(f"unknown preset {preset!r}; "
                              f"available: {sorted(PRESETS)}")
        window = PRESETS[preset]
    else:
        window = None

    if any(rec.timestamp is not None for rec in records):
        records = sorted(records,
                         key=lambda rec: rec.timestamp if rec.timestamp is not None else 0)

    dropped = 0
    if window:
        from collections import Counter
        sizes = Counter(rec.group_id for rec in records)
        good = {g for g, s in sizes.items()
                if window["min_size"] <= s <= window["max_size"]}
        dropped = len(sizes) - len(good)
        records = [rec for rec in records if rec.group_id in good]
        if not records:
            raise IngestError("preset filter removed every group")

    member_ids: dict[str, int] = {}
    group_ids: dict[str, int] = {}
    edge_member = np.empty(len(records), np.int64)
    edge_group = np.empty(len(records), np.int64)
    creators = []
    birth_steps = []
    for i, rec in enumerate(records):
        m = member_ids.setdefault(rec.member_id, len(member_ids))
        g = group_ids.get(rec.group_id)
        if g is None:
            g = group_ids[rec.group_id] = len(group_ids)
            creators.append(m)
            birth_steps.append(i + 1)
        edge_member[i] = m
        edge_group[i] = g

    n_members = len(member_ids)
    n_groups = len(group_ids)
    member_color = np.full(n_members, -1, np.int8)
    group_color = np.full(n_groups, -1, np.int8)
    if colors_csv is not None:
        for rec in read_colors_csv(colors_csv):
            table = member_ids if rec.kind == "member" else group_ids
            idx = table.get(rec.entity_id)
            if idx is None:
                continue  # colors for filtered-out entities are fine
            (member_color if rec.kind == "member" else group_color)[idx] = rec.color

    have_members = (member_color >= 0).all()
    have_groups = (group_color >= 0).all()
    if not have_members and not have_groups:
        raise IngestError("member colors are required, or group colors from "
                          "which to infer them")
    if not have_members:
        # joined-share rule against the overall red-group share
        overall = (group_color == RED).sum() / n_groups
        red_joins = np.bincount(edge_member,
                                weights=(group_color[edge_group] == RED),
                                minlength=n_members)
        joins = np.bincount(edge_member, minlength=n_members)
        member_color = np.where(red_joins / joins > overall, RED, BLUE).astype(np.int8)

    network = BipartiteNetwork(
        member_color=member_color,
        member_degree=np.bincount(edge_member, minlength=n_members).astype(np.int64),
        group_color=np.where(group_color >= 0, group_color, BLUE).astype(np.int8),
        group_size=np.bincount(edge_group, minlength=n_groups).astype(np.int64),
        group_creator=np.asarray(creators, np.int64),
        group_birth_step=np.asarray(birth_steps, np.int64),
        edge_member=edge_member, edge_group=edge_group, tallies=Tallies(),
        meta={"source": str(membership_csv), "preset": preset,
              "dropped_groups": dropped, "version": __version__},
    )
    network.tallies = recount(network)
    if not have_groups:
        network = color_groups_by_ratio(network, threshold=ratio_threshold)
    return network


# ---------------------------------------------------------------------------
# Snapshots

def save_snapshot(network, path) -> None:
    """Write a JSONL snapshot (bipartite or unipartite)."""
    with open(path, "w") as fh:
        if isinstance(network, BipartiteNetwork):
            fh.write(_dump_json({"section": "meta",
                                 "data": {**network.meta, "type": "bipartite",
                                          "version": __version__}}) + "\n")
            for i in range(network.n_members):
                fh.write(_dump_json({"section": "member", "id": i,
                                     "color": _COLOR_LABELS[int(network.member_color[i])]})
                         + "\n")
            for g in range(network.n_groups):
                fh.write(_dump_json({
                    "section": "group", "id": g,
                    "color": _COLOR_LABELS[int(network.group_color[g])],
                    "creator": int(network.group_creator[g]),
                    "birth_step": int(network.group_birth_step[g])}) + "\n")
            for i in range(network.t):
                fh.write(_dump_json({"section": "edge",
                                     "member": int(network.edge_member[i]),
                                     "group": int(network.edge_group[i]),
                                     "step": i + 1}) + "\n")
        elif isinstance(network, UnipartiteNetwork):
            fh.write(_dump_json({"section": "meta",
                                 "data": {**network.meta, "type": "unipartite",
                                          "version": __version__}}) + "\n")
            for i in range(network.n_members):
                fh.write(_dump_json({"section": "member", "id": i,
                                     "color": _COLOR_LABELS[int(network.member_color[i])]})
                         + "\n")
            for i in range(network.n_edges):
                fh.write(_dump_json({"section": "link",
                                     "a": int(network.edge_a[i]),
                                     "b": int(network.edge_b[i]),
                                     "step": i + 1}) + "\n")
        else:
            raise TypeError(f"cannot snapshot {type(network).__name__}")


def load_snapshot(path):
    """Read back a JSONL snapshot written by save_snapshot."""
    meta = {}
    members = []
    groups = []
    edges = []
    links = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"bad JSON: {exc}", line=lineno)
            section = rec.get("section")
            if section == "meta":
                meta = rec["data"]
            elif section == "member":
                members.append((rec["id"], _COLOR_NAMES[rec["color"]]))
            elif section == "group":
                groups.append((rec["id"], _COLOR_NAMES[rec["color"]],
                               rec["creator"], rec["birth_step"]))
            elif section == "edge":
                edges.append((rec["member"], rec["group"]))
            elif section == "link":
                links.append((rec["a"], rec["b"]))
            else:
                raise IngestError(f"unknown section {section!r}", line=lineno)
    members.sort()
    member_color = np.array([c for _, c in members], np.int8)
    if meta.get("type") == "unipartite":
        edge_a = np.array([a for a, _ in links], np.int64)
        edge_b = np.array([b for _, b in links], np.int64)
        if len(edge_a) and (edge_a == edge_b).any():
            raise IngestError("self-loops are not allowed in one-mode networks")
        degree = (np.bincount(edge_a, minlength=len(members))
                  + np.bincount(edge_b, minlength=len(members)))
        return UnipartiteNetwork(member_color, degree.astype(np.int64),
                                 edge_a, edge_b, meta=meta)
    groups.sort()
    edge_member = np.array([m for m, _ in edges], np.int64)
    edge_group = np.array([g for _, g in edges], np.int64)
    network = BipartiteNetwork(
        member_color=member_color,
        member_degree=np.bincount(edge_member, minlength=len(members)).astype(np.int64),
        group_color=np.array([c for _, c, _, _ in groups], np.int8),
        group_size=np.bincount(edge_group, minlength=len(groups)).astype(np.int64),
        group_creator=np.array([cr for _, _, cr, _ in groups], np.int64),
        group_birth_step=np.array([b for _, _, _, b in groups], np.int64),
        edge_member=edge_member, edge_group=edge_group,
        tallies=Tallies(), meta=meta)
    network.tallies = recount(network)
    return network


def load_network(path):
    """Sniff the format: .jsonl snapshots, otherwise membership CSV (with an
    optional sibling <stem>.colors.csv)."""
    p = str(path)
    if p.endswith(".jsonl"):
        return load_snapshot(p)
    import os
    stem = p[:-4] if p.endswith(".csv") else p
    colors = stem + ".colors.csv"
    return ingest(p, colors_csv=colors if os.path.exists(colors) else None)


# ---------------------------------------------------------------------------
# Exports

def export_membership_csv(network: BipartiteNetwork, path) -> None:
    """Membership table plus a <stem>.colors.csv sidecar, round-trippable
    through ingest()."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["member_id", "group_id", "timestamp"])
        for i in range(network.t):
            w.writerow([f"m{int(network.edge_member[i])}",
                        f"g{int(network.edge_group[i])}", i + 1])
    stem = str(path)
    stem = stem[:-4] if stem.endswith(".csv") else stem
    with open(stem + ".colors.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["entity_id", "kind", "color"])
        for i in range(network.n_members):
            w.writerow([f"m{i}", "member", _COLOR_LABELS[int(network.member_color[i])]])
        for g in range(network.n_groups):
            w.writerow([f"g{g}", "group", _COLOR_LABELS[int(network.group_color[g])]])


def export_series_csv(series, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(series, RatioSeries):
            w.writerow(["bin_lo", "bin_hi", "ratio", "support"])
            for row in series.rows():
                w.writerow(row)
        elif isinstance(series, TailRatioSeries):
            w.writerow(["k", "top_red", "top_blue", "ratio"])
            for k, tr, tb, ratio in series.rows():
                w.writerow([k, tr, tb, "inf" if ratio == float("inf") else ratio])
        else:  # generic (header, rows) pair or iterable of tuples
            header, rows = series
            w.writerow(header)
            for row in rows:
                w.writerow(row)


def export_columns_csv(path, header, rows) -> None:
    export_series_csv((header, rows), path)


def export_report_json(report: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(report, sort_keys=True, indent=2,
                            default=_json_default) + "\n")


def export(obj, path, fmt: str) -> None:
    """Single entry point: networks as 'jsonl' or 'csv', series as 'csv',
    reports as 'json'."""
    if fmt == "jsonl":
        save_snapshot(obj, path)
    elif fmt == "csv":
        if isinstance(obj, BipartiteNetwork):
            export_membership_csv(obj, path)
        else:
            export_series_csv(obj, path)
    elif fmt == "json":
        export_report_json(obj, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# Params files (flat key=value, mirroring the CLI flags)

def read_params_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise IngestError(f"expected key=value, got {line!r}", line=lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


def params_from_mapping(mapping: dict) -> GrowthParams:
    kwargs = {}
    for key in ("alpha", "eta", "r", "xi", "rho_p_red", "rho_p_blue",
                "rho_u_red", "rho_u_blue"):
        if key in mapping and mapping[key] is not None:
            kwargs[key] = float(mapping[key])
    variant = mapping.get("variant")
    if variant:
        kwargs["variant"] = Variant(variant) if not isinstance(variant, Variant) else variant
    rho = mapping.get("rho")
    if rho is not None:
        v = kwargs.get("variant", Variant.GSHM)
        ctor = {Variant.SHM_SELECTIVE_ON_RICH: GrowthParams.shm_selective_on_rich,
                Variant.SHM_SELECTIVE_ON_EQUAL_CHANCE: GrowthParams.shm_selective_on_equal_chance,
                Variant.SHM_GENERAL: GrowthParams.shm_general}.get(v)
        if ctor is None:
            raise IngestError("a single rho needs an SHM variant")
        return ctor(kwargs["alpha"], kwargs["eta"], kwargs["r"], kwargs["xi"],
                    float(rho))
    return GrowthParams(**kwargs)

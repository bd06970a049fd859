"""Result serialization: CSV tables, lossless JSON records, traffic exports."""
from __future__ import annotations

import csv
import json
import xml.etree.ElementTree as ET
from typing import Sequence

from .harness import (AlgorithmResult, NetworkSummary, TrialRecord,
                      metric_values)
from .metrics import MetricsReport
from .netmodel import Network, Request, node_label, node_xy
from .scheduler import RoutingOutcome, RoutingParams, ScheduleTable

TRIAL_COLUMNS = ("seed", "algorithm", "k", "l_max", "alpha", "beta",
                 "F", "F_min", "U_ave", "U_var", "gamma", "J_req", "J_path",
                 "flags")

#: utilization classes per threshold: u < 0.3 low, 0.3 <= u <= 0.7 mid, u > 0.7 high
CLASS_LOW, CLASS_MID, CLASS_HIGH = "low", "mid", "high"

#: drawn edge width is proportional to utilization
WIDTH_SCALE = 5.0


def utilization_class(u: float) -> str:
    if u < 0.3:
        return CLASS_LOW
    if u <= 0.7:
        return CLASS_MID
    return CLASS_HIGH


# ---------------------------------------------------------------- CSV tables

def trial_rows(records: Sequence[TrialRecord]) -> list[dict]:
    rows = []
    for rec in records:
        for name in rec.results:
            metrics = metric_values(rec, name)
            row = {"seed": rec.seed, "algorithm": name, "k": rec.params.k,
                   "l_max": rec.params.l_max, "alpha": rec.params.alpha,
                   "beta": rec.params.beta}
            row.update(metrics)
            row["flags"] = "|".join(rec.results[name].report.flags)
            rows.append(row)
    return rows


def write_csv(rows: Sequence[dict], columns: Sequence[str], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_trial_csv(records: Sequence[TrialRecord], path: str) -> None:
    write_csv(trial_rows(records), TRIAL_COLUMNS, path)


def aggregate_rows(agg: dict[str, dict[str, tuple[float, float]]],
                   n: int, extra: dict | None = None) -> list[dict]:
    rows = []
    for name, stats in agg.items():
        row = dict(extra or {})
        row.update({"algorithm": name, "n": n})
        for metric, (mean, stderr) in stats.items():
            row[f"{metric}_mean"] = mean
            row[f"{metric}_stderr"] = stderr
        rows.append(row)
    return rows


def write_table_csv(rows: Sequence[dict], path: str) -> None:
    """CSV for heterogeneous experiment tables; columns from the first row."""
    if not rows:
        raise ValueError("refusing to write an empty results table")
    write_csv(rows, list(rows[0].keys()), path)


# ------------------------------------------------------- lossless JSON records

def _encode_pathkey(key: tuple[int, int]) -> str:
    return f"{key[0]}:{key[1]}"


def _decode_pathkey(text: str) -> tuple[int, int]:
    r, l = text.split(":")
    return int(r), int(l)


def _encode_edge(edge: tuple[int, int]) -> str:
    return f"{edge[0]}-{edge[1]}"


def _decode_edge(text: str) -> tuple[int, int]:
    u, v = text.split("-")
    return int(u), int(v)


def outcome_to_dict(outcome: RoutingOutcome) -> dict:
    data = {
        "algorithm": outcome.algorithm,
        "flows": {_encode_pathkey(k): v for k, v in sorted(outcome.flows.items())},
        "lengths": {_encode_pathkey(k): v for k, v in sorted(outcome.lengths.items())},
        "path_edges": {_encode_pathkey(k): [_encode_edge(e) for e in edges]
                       for k, edges in sorted(outcome.path_edges.items())},
    }
    if outcome.schedule is not None:
        data["schedule"] = {
            "allocations": {_encode_edge(e): {_encode_pathkey(k): v
                                              for k, v in sorted(alloc.items())}
                            for e, alloc in sorted(outcome.schedule.allocations.items())},
            "desired": None if outcome.schedule.desired is None else
                       {_encode_pathkey(k): v
                        for k, v in sorted(outcome.schedule.desired.items())},
        }
    return data


def outcome_from_dict(data: dict) -> RoutingOutcome:
    schedule = None
    if "schedule" in data:
        raw = data["schedule"]
        schedule = ScheduleTable(
            allocations={_decode_edge(e): {_decode_pathkey(k): v
                                           for k, v in alloc.items()}
                         for e, alloc in raw["allocations"].items()},
            desired=None if raw["desired"] is None else
                    {_decode_pathkey(k): v for k, v in raw["desired"].items()})
    return RoutingOutcome(
        algorithm=data["algorithm"],
        flows={_decode_pathkey(k): v for k, v in data["flows"].items()},
        lengths={_decode_pathkey(k): v for k, v in data["lengths"].items()},
        path_edges={_decode_pathkey(k): tuple(_decode_edge(e) for e in edges)
                    for k, edges in data["path_edges"].items()},
        schedule=schedule)


def report_to_dict(report: MetricsReport) -> dict:
    return {
        "throughput": report.throughput,
        "min_flow": report.min_flow,
        "utilization": {_encode_edge(e): u for e, u in sorted(report.utilization.items())},
        "u_ave": report.u_ave,
        "u_var": report.u_var,
        "stretch_per_request": {str(r): g for r, g in sorted(report.stretch_per_request.items())},
        "stretch": report.stretch,
        "jain_requests": report.jain_requests,
        "jain_paths": report.jain_paths,
        "jain_paths_normalized": report.jain_paths_normalized,
        "demand_satisfied": {str(r): ok for r, ok in sorted(report.demand_satisfied.items())},
        "flags": list(report.flags),
    }


def report_from_dict(data: dict) -> MetricsReport:
    return MetricsReport(
        throughput=data["throughput"],
        min_flow=data["min_flow"],
        utilization={_decode_edge(e): u for e, u in data["utilization"].items()},
        u_ave=data["u_ave"],
        u_var=data["u_var"],
        stretch_per_request={int(r): g for r, g in data["stretch_per_request"].items()},
        stretch=data["stretch"],
        jain_requests=data["jain_requests"],
        jain_paths=data["jain_paths"],
        jain_paths_normalized=data["jain_paths_normalized"],
        demand_satisfied={int(r): ok for r, ok in data["demand_satisfied"].items()},
        flags=tuple(data["flags"]))


def record_to_dict(record: TrialRecord) -> dict:
    return {
        "seed": record.seed,
        "params": {"k": record.params.k, "l_max": record.params.l_max,
                   "alpha": record.params.alpha, "beta": record.params.beta,
                   "f_min": record.params.f_min},
        "requests": [{"id": r.id, "source": r.source, "terminal": r.terminal,
                      "demand": r.demand, "weight": r.weight}
                     for r in record.requests],
        "network": vars(record.network).copy(),
        "results": {name: {"outcome": outcome_to_dict(res.outcome),
                           "report": report_to_dict(res.report),
                           "schedule_seconds": res.schedule_seconds}
                    for name, res in record.results.items()},
        "stage_seconds": dict(record.stage_seconds),
        "reason": record.reason,
    }


def record_from_dict(data: dict) -> TrialRecord:
    return TrialRecord(
        seed=data["seed"],
        params=RoutingParams(**data["params"]),
        requests=tuple(Request(**r) for r in data["requests"]),
        network=NetworkSummary(**data["network"]),
        results={name: AlgorithmResult(outcome_from_dict(res["outcome"]),
                                       report_from_dict(res["report"]),
                                       res["schedule_seconds"])
                 for name, res in data["results"].items()},
        stage_seconds=dict(data["stage_seconds"]),
        reason=data["reason"])


def write_records_json(records: Sequence[TrialRecord], path: str,
                       provenance: dict[str, str] | None = None) -> None:
    payload = {"records": [record_to_dict(r) for r in records]}
    if provenance is not None:
        payload["config_provenance"] = provenance
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_records_json(path: str) -> list[TrialRecord]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return [record_from_dict(d) for d in payload["records"]]


# ------------------------------------------------------------- traffic export

def _edge_traffic(outcome: RoutingOutcome, net: Network) -> list[dict]:
    caps = {e.key: e for e in net.edges}
    usage = outcome.edge_usage()
    breakdown: dict[tuple[int, int], dict[str, int]] = {}
    for key, flow in sorted(outcome.flows.items()):
        if flow <= 0:
            continue
        for e in outcome.path_edges[key]:
            breakdown.setdefault(e, {})[_encode_pathkey(key)] = flow
    rows = []
    for e in sorted(caps):
        state = caps[e]
        used = usage.get(e, 0)
        row = {"u": e[0], "v": e[1], "capacity": state.capacity,
               "active": state.active, "flow": used}
        if used > 0:
            u_val = used / state.capacity
            row["utilization"] = u_val
            row["class"] = utilization_class(u_val)
            row["width"] = WIDTH_SCALE * u_val
            row["flows"] = breakdown.get(e, {})
        rows.append(row)
    return rows


def export_traffic_json(outcome: RoutingOutcome, net: Network, path: str) -> None:
    nodes = []
    for n in range(net.node_count):
        x, y = node_xy(n, net.cols)
        nodes.append({"id": n, "x": x, "y": y, "label": node_label(n, net.cols)})
    payload = {"algorithm": outcome.algorithm, "rows": net.rows, "cols": net.cols,
               "nodes": nodes, "edges": _edge_traffic(outcome, net)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

_GRAPHML_KEYS = (
    ("node", "x", "double"), ("node", "y", "double"), ("node", "label", "string"),
    ("edge", "capacity", "int"), ("edge", "active", "boolean"),
    ("edge", "flow", "int"), ("edge", "utilization", "double"),
    ("edge", "class", "string"), ("edge", "width", "double"),
)


def export_traffic_graphml(outcome: RoutingOutcome, net: Network, path: str) -> None:
    """Graph-description export loadable by standard GraphML viewers.

    Utilized edges carry a utilization value, a low/mid/high class, and a
    width proportional to u; unused and inactive edges carry no class and are
    drawn with zero width.
    """
    ET.register_namespace("", _GRAPHML_NS)
    root = ET.Element(f"{{{_GRAPHML_NS}}}graphml")
    for domain, name, kind in _GRAPHML_KEYS:
        ET.SubElement(root, f"{{{_GRAPHML_NS}}}key",
                      {"id": f"{domain[0]}_{name}", "for": domain,
                       "attr.name": name, "attr.type": kind})
    graph = ET.SubElement(root, f"{{{_GRAPHML_NS}}}graph",
                          {"id": outcome.algorithm or "traffic",
                           "edgedefault": "undirected"})

    def data(parent, key, value):
        el = ET.SubElement(parent, f"{{{_GRAPHML_NS}}}data", {"key": key})
        el.text = str(value)

    for n in range(net.node_count):
        x, y = node_xy(n, net.cols)
        el = ET.SubElement(graph, f"{{{_GRAPHML_NS}}}node", {"id": f"n{n}"})
        data(el, "n_x", float(x))
        data(el, "n_y", float(y))
        data(el, "n_label", node_label(n, net.cols))
    for i, row in enumerate(_edge_traffic(outcome, net)):
        el = ET.SubElement(graph, f"{{{_GRAPHML_NS}}}edge",
                           {"id": f"e{i}", "source": f"n{row['u']}",
                            "target": f"n{row['v']}"})
        data(el, "e_capacity", row["capacity"])
        data(el, "e_active", "true" if row["active"] else "false")
        data(el, "e_flow", row["flow"])
        if row["flow"] > 0:
            data(el, "e_utilization", row["utilization"])
            data(el, "e_class", row["class"])
            data(el, "e_width", row["width"])
        else:
            data(el, "e_width", 0.0)
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)

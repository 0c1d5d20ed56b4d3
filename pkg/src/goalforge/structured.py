"""Parsing of structured provider output.

Providers are instructed to answer with a fenced JSON document; real models
wrap it in prose, so extraction is tolerant about the surroundings and
strict about the fields inside.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .errors import SchemaViolation, Unparseable

SCHEMAS = ("AnnotationDoc", "KgDoc", "NewGoalsDoc")

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\n(.*?)```", re.S)


def _brace_candidates(raw: str) -> list[str]:
    """Balanced-brace spans starting at each top-level '{'."""
    spans = []
    depth = 0
    start = None
    in_str = False
    escape = False
    for i, ch in enumerate(raw):
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0 and start is not None:
                    spans.append(raw[start : i + 1])
                    start = None
    return spans


def extract_json_object(raw: str) -> dict[str, Any]:
    """First JSON object found in raw text, preferring fenced blocks."""
    candidates: list[str] = []
    for block in _FENCE_RE.findall(raw):
        candidates.append(block.strip())
    candidates.append(raw.strip())
    candidates.extend(_brace_candidates(raw))
    for cand in candidates:
        try:
            obj = json.loads(cand)
        except (json.JSONDecodeError, ValueError):
            continue
        if isinstance(obj, dict):
            return obj
    raise Unparseable("no JSON object found in provider output")


def _require(obj: dict, key: str, kind: type, path: str) -> Any:
    if key not in obj:
        raise SchemaViolation(f"{path}.{key}" if path else key, "required field missing")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise SchemaViolation(f"{path}.{key}" if path else key, "expected integer, got boolean")
    if not isinstance(value, kind):
        raise SchemaViolation(f"{path}.{key}" if path else key, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _nonempty_str(obj: dict, key: str, path: str) -> str:
    value = _require(obj, key, str, path)
    if not value.strip():
        raise SchemaViolation(f"{path}.{key}" if path else key, "must be non-empty")
    return value


def _validate_annotation(doc: dict) -> dict:
    out: dict[str, Any] = {
        "title": _nonempty_str(doc, "title", ""),
        "description": _require(doc, "description", str, ""),
        "core_value": _require(doc, "core_value", str, ""),
    }
    key_words = _require(doc, "key_words", list, "")
    if not key_words:
        raise SchemaViolation("key_words", "must be non-empty")
    for i, kw in enumerate(key_words):
        if not isinstance(kw, str) or not kw.strip():
            raise SchemaViolation(f"key_words[{i}]", "expected non-empty string")
    out["key_words"] = [kw.strip() for kw in key_words]

    qa = _require(doc, "qa", list, "")
    if len(qa) != 5:
        raise SchemaViolation("qa", f"expected exactly 5 question/answer pairs, got {len(qa)}")
    pairs = []
    for i, item in enumerate(qa):
        if isinstance(item, dict):
            pairs.append((_nonempty_str(item, "question", f"qa[{i}]"), _require(item, "answer", str, f"qa[{i}]")))
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            pairs.append((str(item[0]), str(item[1])))
        else:
            raise SchemaViolation(f"qa[{i}]", "expected question/answer object")
    out["qa"] = pairs

    sdg_types = _require(doc, "sdg_types", list, "")
    if not sdg_types:
        raise SchemaViolation("sdg_types", "must be non-empty")
    tags: set[int] = set()
    for i, tag in enumerate(sdg_types):
        if isinstance(tag, bool) or not isinstance(tag, int):
            raise SchemaViolation(f"sdg_types[{i}]", f"expected integer, got {type(tag).__name__}")
        if not 1 <= tag <= 17:
            raise SchemaViolation(f"sdg_types[{i}]", f"value {tag} outside 1..17")
        tags.add(tag)
    out["sdg_types"] = tags
    return out


def _validate_kg(doc: dict) -> dict:
    nodes = _require(doc, "nodes", list, "")
    if not nodes:
        raise SchemaViolation("nodes", "must be non-empty")
    out_nodes = []
    for i, node in enumerate(nodes):
        if not isinstance(node, dict):
            raise SchemaViolation(f"nodes[{i}]", "expected object")
        node_id = _nonempty_str(node, "id", f"nodes[{i}]").strip()
        order = _require(node, "order", int, f"nodes[{i}]")
        if order < 1:
            raise SchemaViolation(f"nodes[{i}].order", f"order {order} must be positive")
        details = node.get("details", "")
        if not isinstance(details, str):
            raise SchemaViolation(f"nodes[{i}].details", "expected string")
        out_nodes.append({"id": node_id, "order": order, "details": details})

    links = _require(doc, "links", list, "") if "links" in doc else []
    out_links = []
    for i, link in enumerate(links):
        if not isinstance(link, dict):
            raise SchemaViolation(f"links[{i}]", "expected object")
        source = _nonempty_str(link, "source", f"links[{i}]").strip()
        target = _nonempty_str(link, "target", f"links[{i}]").strip()
        relation = link.get("relation", "")
        if not isinstance(relation, str):
            raise SchemaViolation(f"links[{i}].relation", "expected string")
        # Referential integrity (source/target among nodes) is deferred to
        # the graph builder's validate-and-repair pass.
        out_links.append({"source": source, "target": target, "relation": relation})
    return {"nodes": out_nodes, "links": out_links}


def _validate_new_goals(doc: dict) -> dict:
    results = _require(doc, "results", list, "")
    if not results:
        raise SchemaViolation("results", "must be non-empty")
    out = []
    for i, item in enumerate(results):
        path = f"results[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, "expected object")
        goal = _nonempty_str(item, "goal", path)
        sub_goals = _require(item, "sub_goals", list, path)
        if not sub_goals:
            raise SchemaViolation(f"{path}.sub_goals", "must be non-empty")
        out_subs = []
        for j, sub in enumerate(sub_goals):
            spath = f"{path}.sub_goals[{j}]"
            if not isinstance(sub, dict):
                raise SchemaViolation(spath, "expected object")
            code = _nonempty_str(sub, "code", spath)
            descr = _require(sub, "description", str, spath)
            indicators = _require(sub, "indicators", list, spath)
            if not indicators:
                raise SchemaViolation(f"{spath}.indicators", "every sub-goal needs at least one indicator")
            out_inds = []
            for k, ind in enumerate(indicators):
                ipath = f"{spath}.indicators[{k}]"
                if not isinstance(ind, dict):
                    raise SchemaViolation(ipath, "expected object")
                out_inds.append({
                    "code": _nonempty_str(ind, "code", ipath),
                    "description": _require(ind, "description", str, ipath),
                })
            out_subs.append({"code": code, "description": descr, "indicators": out_inds})
        source = item.get("source", [])
        if isinstance(source, str):
            source = [source]
        if not isinstance(source, list) or not all(isinstance(s, str) for s in source):
            raise SchemaViolation(f"{path}.source", "expected string or list of strings")
        description = item.get("description", "")
        if not isinstance(description, str):
            raise SchemaViolation(f"{path}.description", "expected string")
        out.append({
            "goal": goal, "sub_goals": out_subs, "source": source, "description": description,
        })
    return {"results": out}


_VALIDATORS = {
    "AnnotationDoc": _validate_annotation,
    "KgDoc": _validate_kg,
    "NewGoalsDoc": _validate_new_goals,
}


def parse_structured(raw: str, schema: str) -> dict:
    """Extract and validate one structured document from provider output."""
    if not raw:
        raise Unparseable("empty provider output")
    if schema not in _VALIDATORS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    return _VALIDATORS[schema](extract_json_object(raw))


def serialize(doc: dict) -> str:
    """Canonical fenced form of a structured document (round-trips through
    parse_structured)."""
    return "```json\n" + json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False, default=list) + "\n```"

"""Goal catalog: the 17 goals with targets, indicators, search keywords, and
historical indicator-change counts.

Loaded once from tabular sources (see docs/data-formats.md) and immutable
afterwards, so it is safe to share across worker threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import MissingGoal, ParseError

GOAL_NUMBERS = range(1, 18)


@dataclass(frozen=True)
class SdgIndicator:
    code: str
    description: str


@dataclass(frozen=True)
class SdgTarget:
    code: str
    description: str
    indicators: tuple[SdgIndicator, ...] = ()


@dataclass(frozen=True)
class SdgGoal:
    number: int
    title: str
    targets: tuple[SdgTarget, ...] = ()
    keywords: tuple[str, ...] = ()
    indicator_change_count: int = 0

    def label(self) -> str:
        return f"{self.number}. {self.title}"


@dataclass(frozen=True)
class Catalog:
    goals: tuple[SdgGoal, ...]
    _by_number: dict[int, SdgGoal] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_number", {g.number: g for g in self.goals})

    def goal(self, number: int) -> SdgGoal:
        try:
            return self._by_number[number]
        except KeyError:
            raise MissingGoal(number) from None

    def change_counts(self) -> dict[int, int]:
        return {g.number: g.indicator_change_count for g in self.goals}

    def keyword_goals(self) -> dict[str, set[int]]:
        """Map each normalized keyword to the goals that list it."""
        out: dict[str, set[int]] = {}
        for g in self.goals:
            for kw in g.keywords:
                out.setdefault(kw, set()).add(g.number)
        return out


def _normalize_keywords(raw: Iterable[str]) -> tuple[str, ...]:
    seen: list[str] = []
    for kw in raw:
        norm = kw.strip().lower()
        if norm and norm not in seen:
            seen.append(norm)
    return tuple(seen)


def _read_rows(path: Path, expected: list[str]) -> list[dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in expected if c not in header]
            if missing:
                raise ParseError(f"{path.name}: missing columns {missing}", line=1)
            return list(reader)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def load_catalog(
    goal_source: Path,
    keyword_source: Path,
    changes_source: Path | None = None,
) -> Catalog:
    """Build the catalog from goal/keyword tables plus the optional
    indicator-change reference table. Raises MissingGoal unless goals 1..17
    are all covered by the goal source."""
    goal_rows = _read_rows(goal_source, ["goal_number", "goal_title", "target_code", "target_text"])

    titles: dict[int, str] = {}
    targets: dict[int, dict[str, dict]] = {}
    for lineno, row in enumerate(goal_rows, start=2):
        try:
            number = int(row["goal_number"])
        except (TypeError, ValueError):
            raise ParseError("goal_number is not an integer", line=lineno, field="goal_number")
        if number not in GOAL_NUMBERS:
            raise ParseError(f"goal_number {number} outside 1..17", line=lineno, field="goal_number")
        title = (row["goal_title"] or "").strip()
        if not title:
            raise ParseError("empty goal title", line=lineno, field="goal_title")
        if titles.setdefault(number, title) != title:
            raise ParseError(f"conflicting titles for goal {number}", line=lineno, field="goal_title")

        tcode = (row["target_code"] or "").strip()
        if not tcode.startswith(f"{number}."):
            raise ParseError(f"target code {tcode!r} does not belong to goal {number}", line=lineno, field="target_code")
        entry = targets.setdefault(number, {}).setdefault(
            tcode, {"description": (row["target_text"] or "").strip(), "indicators": []}
        )
        icode = (row.get("indicator_code") or "").strip()
        if icode:
            if not icode.startswith(tcode + "."):
                raise ParseError(
                    f"indicator code {icode!r} does not belong to target {tcode}",
                    line=lineno, field="indicator_code",
                )
            entry["indicators"].append(SdgIndicator(icode, (row.get("indicator_text") or "").strip()))

    for number in GOAL_NUMBERS:
        if number not in titles or not targets.get(number):
            raise MissingGoal(number)

    keyword_rows = _read_rows(keyword_source, ["goal_number", "keyword"])
    keywords: dict[int, list[str]] = {n: [] for n in GOAL_NUMBERS}
    for lineno, row in enumerate(keyword_rows, start=2):
        try:
            number = int(row["goal_number"])
        except (TypeError, ValueError):
            raise ParseError("goal_number is not an integer", line=lineno, field="goal_number")
        if number in keywords:
            keywords[number].append(row["keyword"] or "")

    changes: dict[int, int] = {n: 0 for n in GOAL_NUMBERS}
    if changes_source is not None:
        for lineno, row in enumerate(_read_rows(changes_source, ["goal_number", "change_count"]), start=2):
            try:
                changes[int(row["goal_number"])] = int(row["change_count"])
            except (TypeError, ValueError, KeyError):
                raise ParseError("bad change-count row", line=lineno)
            if changes[int(row["goal_number"])] < 0:
                raise ParseError("change_count must be non-negative", line=lineno, field="change_count")

    goals = tuple(
        SdgGoal(
            number=n,
            title=titles[n],
            targets=tuple(
                SdgTarget(code, data["description"], tuple(data["indicators"]))
                for code, data in sorted(targets[n].items())
            ),
            keywords=_normalize_keywords(keywords[n]),
            indicator_change_count=changes[n],
        )
        for n in GOAL_NUMBERS
    )
    return Catalog(goals=goals)


def _resource(name: str) -> Path:
    return Path(str(resources.files("goalforge").joinpath("resources", name)))


def load_default_catalog() -> Catalog:
    """Catalog from the tables shipped with the package."""
    return load_catalog(
        _resource("sdg_goals.csv"),
        _resource("sdg_keywords.csv"),
        _resource("indicator_changes.csv"),
    )

"""Event-log ingestion: parsing, identity resolution, bot and outlier
filtering, and quarterly alignment.

The cleaning pipeline is a fixed sequence, each step pure and individually
exposed:

    parse_events -> resolve_identities -> filter_bots -> remove_outliers_iqr
        -> align_quarters

``clean_events`` chains the last four and reports per-stage removal counts
so a run can account for every dropped record.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

ACTIONS = (
    "commit",
    "pull_request_open",
    "pull_request_merged",
    "pull_request_review_APPROVED",
    "pull_request_review_COMMENTED",
    "pull_request_review_DISMISSED",
    "issue_opened",
    "issue_comment",
)

STAGES = ("sandbox", "incubating", "graduated")

DEFAULT_BOT_PATTERNS = ("*[bot]", "*-bot", "dependabot*", "renovate*")

CSV_HEADER = ("contributor", "repo", "action", "count", "timestamp", "stage")


class SchemaError(ValueError):
    """File-level violation: bad header, unknown format, or too many bad rows."""


@dataclass(frozen=True)
class EventRecord:
    contributor_id: str
    repo_id: str
    action: str
    count: int
    timestamp: datetime
    stage: str


@dataclass(frozen=True)
class RowError:
    row: int  # 1-based data row number
    message: str


@dataclass
class IdentityMap:
    """Alias -> canonical id mapping, closed under composition.

    Canonical ids map to themselves, so applying the map twice equals
    applying it once.
    """

    canonical: dict[str, str] = field(default_factory=dict)
    evidence: dict[str, str] = field(default_factory=dict)  # merged alias -> how

    def resolve(self, alias: str) -> str:
        return self.canonical.get(alias, alias)


@dataclass
class CleanDataset:
    records: list[EventRecord]
    labels: list[str]  # quarter label per record, aligned with records
    windows: list[str]  # min..max quarter, inclusive, strictly increasing
    retention_ratio: float = 1.0

    def records_in(self, window: str) -> list[EventRecord]:
        return [r for r, lab in zip(self.records, self.labels) if lab == window]


# -- timestamp and quarter handling -----------------------------------------

def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp to an aware UTC datetime."""
    ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


def quarter_label(ts: datetime) -> str:
    return f"{ts.year}Q{(ts.month - 1) // 3 + 1}"


def quarter_key(label: str) -> tuple[int, int]:
    year, q = label.split("Q")
    return int(year), int(q)


def quarter_index(label: str) -> int:
    year, q = quarter_key(label)
    return year * 4 + (q - 1)


def quarter_range(first: str, last: str) -> list[str]:
    """All quarter labels from ``first`` to ``last`` inclusive."""
    lo, hi = quarter_index(first), quarter_index(last)
    if hi < lo:
        raise ValueError(f"quarter range reversed: {first} > {last}")
    return [f"{i // 4}Q{i % 4 + 1}" for i in range(lo, hi + 1)]


# -- parsing -----------------------------------------------------------------

def _record_from_fields(fields: dict, row: int,
                        study_range: Optional[tuple[datetime, datetime]]) -> EventRecord:
    action = fields["action"]
    if action not in ACTIONS:
        raise ValueError(f"unknown action {action!r}")
    stage = fields["stage"]
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    count = int(fields["count"])
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    ts = parse_rfc3339(str(fields["timestamp"]))
    if study_range is not None and not (study_range[0] <= ts <= study_range[1]):
        raise ValueError(f"timestamp {fields['timestamp']} outside study range")
    return EventRecord(
        contributor_id=str(fields["contributor"]),
        repo_id=str(fields["repo"]),
        action=action,
        count=count,
        timestamp=ts,
        stage=stage,
    )


def parse_events(path: str | Path, format: str = "csv", *,
                 max_error_ratio: float = 0.02,
                 study_range: Optional[tuple[datetime, datetime]] = None,
                 ) -> tuple[list[EventRecord], list[RowError]]:
    """Parse an exported event log.

    Malformed rows are collected into the returned error list rather than
    silently dropped. A ``SchemaError`` is raised only when the file itself
    is unusable: wrong header or keys, or an error ratio above
    ``max_error_ratio``.
    """
    path = Path(path)
    records: list[EventRecord] = []
    errors: list[RowError] = []
    rows = 0

    if format == "csv":
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file") from None
            if tuple(h.strip() for h in header) != CSV_HEADER:
                raise SchemaError(
                    f"{path}: header {header!r} does not match {list(CSV_HEADER)!r}")
            for row_no, row in enumerate(reader, start=1):
                rows += 1
                if len(row) != len(CSV_HEADER):
                    errors.append(RowError(row_no, f"expected {len(CSV_HEADER)} fields, got {len(row)}"))
                    continue
                try:
                    records.append(_record_from_fields(dict(zip(CSV_HEADER, row)), row_no, study_range))
                except (ValueError, KeyError) as exc:
                    errors.append(RowError(row_no, str(exc)))
    elif format == "jsonl":
        with path.open() as fh:
            for row_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                rows += 1
                try:
                    obj = json.loads(line)
                    missing = [k for k in CSV_HEADER if k not in obj]
                    if missing:
                        raise ValueError(f"missing keys {missing}")
                    records.append(_record_from_fields(obj, row_no, study_range))
                except (ValueError, KeyError) as exc:
                    errors.append(RowError(row_no, str(exc)))
    else:
        raise SchemaError(f"unknown format {format!r} (expected 'csv' or 'jsonl')")

    if rows and len(errors) / rows > max_error_ratio:
        raise SchemaError(
            f"{path}: {len(errors)}/{rows} malformed rows exceeds cap {max_error_ratio:.1%}")
    return records, errors


# -- identity resolution -----------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs, O(len(a) * len(b))."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """Normalized Levenshtein similarity in [0, 1] on lowercased names."""
    a, b = a.lower(), b.lower()
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def resolve_identities(records: Sequence[EventRecord],
                       email_index: Optional[dict[str, str]] = None,
                       similarity_threshold: float = 0.9,
                       ) -> tuple[list[EventRecord], IdentityMap]:
    """Merge aliases of the same person and rewrite records to canonical ids.

    Aliases sharing an exact email merge first; remaining pairs merge when
    their normalized Levenshtein similarity reaches the threshold. Both
    passes go through a union-find, so the result does not depend on the
    order records arrive in. The canonical id of a merged group is its
    lexicographically smallest alias.
    """
    if not 0 < similarity_threshold <= 1:
        raise ValueError("similarity_threshold must be in (0, 1]")
    aliases = sorted({r.contributor_id for r in records})
    uf = _UnionFind(aliases)
    evidence: dict[str, str] = {}

    if email_index:
        by_email: dict[str, list[str]] = {}
        for alias in aliases:
            email = email_index.get(alias)
            if email:
                by_email.setdefault(email.lower(), []).append(alias)
        for group in by_email.values():
            for other in group[1:]:
                if uf.union(group[0], other):
                    evidence[other] = "email_exact"

    for i, a in enumerate(aliases):
        for b in aliases[i + 1:]:
            if uf.find(a) == uf.find(b):
                continue
            if name_similarity(a, b) >= similarity_threshold:
                uf.union(a, b)
                evidence[max(a, b)] = "username_similarity"

    imap = IdentityMap()
    for alias in aliases:
        root = uf.find(alias)
        imap.canonical[alias] = root
        if alias != root and alias in evidence:
            imap.evidence[alias] = evidence[alias]
    resolved = [
        r if imap.resolve(r.contributor_id) == r.contributor_id
        else EventRecord(imap.resolve(r.contributor_id), r.repo_id, r.action,
                         r.count, r.timestamp, r.stage)
        for r in records
    ]
    return resolved, imap


# -- bot filtering -----------------------------------------------------------

def _glob_match(name: str, pattern: str) -> bool:
    # Only * and ? are wildcards; brackets are literal so '*[bot]' matches
    # names that literally end in '[bot]'.
    regex = "".join(
        ".*" if ch == "*" else "." if ch == "?" else re.escape(ch)
        for ch in pattern
    )
    return re.fullmatch(regex, name) is not None


def filter_bots(records: Sequence[EventRecord],
                name_patterns: Sequence[str] = DEFAULT_BOT_PATTERNS,
                activity_rate_cap: float = 500.0,
                ) -> tuple[list[EventRecord], set[str]]:
    """Drop automation accounts.

    A contributor is removed iff its id matches a pattern or its mean daily
    action count (total actions over the inclusive day span it was active)
    exceeds ``activity_rate_cap``.
    """
    if not name_patterns:
        raise ValueError("name_patterns must be non-empty")
    totals: dict[str, int] = {}
    first: dict[str, datetime] = {}
    last: dict[str, datetime] = {}
    for r in records:
        cid = r.contributor_id
        totals[cid] = totals.get(cid, 0) + r.count
        if cid not in first or r.timestamp < first[cid]:
            first[cid] = r.timestamp
        if cid not in last or r.timestamp > last[cid]:
            last[cid] = r.timestamp

    removed: set[str] = set()
    for cid, total in totals.items():
        if any(_glob_match(cid, pat) for pat in name_patterns):
            removed.add(cid)
            continue
        span_days = (last[cid].date() - first[cid].date()).days + 1
        if total / span_days > activity_rate_cap:
            removed.add(cid)
    kept = [r for r in records if r.contributor_id not in removed]
    return kept, removed


# -- outlier removal ---------------------------------------------------------

def remove_outliers_iqr(records: Sequence[EventRecord], k: float = 1.5,
                        ) -> tuple[list[EventRecord], set[str]]:
    """Remove contributors whose total action count is an IQR outlier.

    Quartiles use linear interpolation between order statistics. With fewer
    than 4 contributors the quartiles are unstable and this is a no-op.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    totals: dict[str, int] = {}
    for r in records:
        totals[r.contributor_id] = totals.get(r.contributor_id, 0) + r.count
    if len(totals) < 4:
        return list(records), set()
    values = np.array(sorted(totals.values()), dtype=float)
    q1, q3 = np.percentile(values, [25.0, 75.0], method="linear")
    iqr = q3 - q1
    lo, hi = q1 - k * iqr, q3 + k * iqr
    removed = {cid for cid, total in totals.items() if not lo <= total <= hi}
    kept = [r for r in records if r.contributor_id not in removed]
    return kept, removed


# -- quarterly alignment -----------------------------------------------------

def align_quarters(records: Sequence[EventRecord]) -> CleanDataset:
    """Label every record with its calendar quarter.

    The window list spans the min to max quarter inclusive, so quarters with
    no events still appear (as empty windows) in downstream time series.
    """
    if not records:
        raise ValueError("no records to align")
    labels = [quarter_label(r.timestamp) for r in records]
    windows = quarter_range(min(labels, key=quarter_index),
                            max(labels, key=quarter_index))
    return CleanDataset(records=list(records), labels=labels, windows=windows)


# -- composite pipeline ------------------------------------------------------

def clean_events(records: Sequence[EventRecord],
                 email_index: Optional[dict[str, str]] = None,
                 similarity_threshold: float = 0.9,
                 bot_patterns: Sequence[str] = DEFAULT_BOT_PATTERNS,
                 activity_rate_cap: float = 500.0,
                 iqr_k: float = 1.5,
                 ) -> tuple[CleanDataset, dict]:
    """Run the full cleaning sequence and account for every removal.

    Returns the aligned dataset plus a provenance dict with counts removed
    at each stage and the overall retention ratio.
    """
    initial = len(records)
    resolved, imap = resolve_identities(records, email_index, similarity_threshold)
    after_bots, bot_ids = filter_bots(resolved, bot_patterns, activity_rate_cap)
    after_outliers, outlier_ids = remove_outliers_iqr(after_bots, iqr_k)
    dataset = align_quarters(after_outliers)
    dataset.retention_ratio = len(after_outliers) / initial if initial else 1.0
    provenance = {
        "records_in": initial,
        "aliases_merged": sum(1 for a, c in imap.canonical.items() if a != c),
        "bot_contributors_removed": sorted(bot_ids),
        "records_removed_bots": len(resolved) - len(after_bots),
        "outlier_contributors_removed": sorted(outlier_ids),
        "records_removed_outliers": len(after_bots) - len(after_outliers),
        "records_out": len(after_outliers),
        "retention_ratio": dataset.retention_ratio,
    }
    return dataset, provenance


def write_clean_jsonl(dataset: CleanDataset, path: str | Path) -> None:
    """Cleaned dataset as JSONL, one record per line, with its window label."""
    with Path(path).open("w") as fh:
        for r, label in zip(dataset.records, dataset.labels):
            fh.write(json.dumps({
                "contributor": r.contributor_id,
                "repo": r.repo_id,
                "action": r.action,
                "count": r.count,
                "timestamp": r.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
                "stage": r.stage,
                "window": label,
            }, sort_keys=True) + "\n")


def read_clean_jsonl(path: str | Path) -> CleanDataset:
    records, errors = parse_events(path, format="jsonl", max_error_ratio=0.0)
    if errors:
        raise SchemaError(f"{path}: {errors[0].message}")
    return align_quarters(records)

"""Per-column signal scoring, ranked signal tables and top-k accuracy."""
from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ColumnMapMismatch, EmptyReferenceSet, FileError, SchemaError
from .stats import rank_sum, ratios, welch_t

TABLE_COLUMNS = ("rank", "readcode", "description", "n_before", "n_after",
                 "r1", "r2_percent", "p_value")
METADATA_KEYS = ("drug", "level", "method", "window_days", "group_size", "N", "g", "alpha")


class Method(enum.Enum):
    TTEST = "ttest"
    RANKSUM = "ranksum"
    RATIO = "ratio"


@dataclass(frozen=True)
class SignalRow:
    rank: int
    code: str
    n_before: int
    n_after: int
    r1: float
    r2_percent: float
    p_value: float
    method: Method
    description: Optional[str] = None


@dataclass
class SignalTable:
    rows: list[SignalRow]
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    @property
    def codes(self) -> list[str]:
        return [r.code for r in self.rows]


@dataclass(frozen=True)
class ReferenceAdrSet:
    """Known-ADR code prefixes; a table code matches when it starts with one."""
    entries: frozenset
    label: str = ""

    def __post_init__(self):
        for prefix in self.entries:
            if not 1 <= len(prefix) <= 7:
                raise ValueError(f"reference prefix {prefix!r} must have 1-7 characters")

    def matches(self, code: str) -> bool:
        return any(code.startswith(p) for p in self.entries)


@dataclass(frozen=True)
class _Scored:
    code: str
    n_before: int
    n_after: int
    r1: float
    r2_percent: float
    ttest_p: float
    p_value: float


def _score_columns(x, y, a, b, method):
    if not (x.codes == y.codes == a.codes == b.codes):
        raise ColumnMapMismatch("X, Y, A and B must share one column map")
    if x.counts.shape != y.counts.shape:
        raise ColumnMapMismatch("X and Y differ in shape")
    population = a.shape[0]
    n_before = a.column_sums()
    n_after = b.column_sums()
    scored = []
    for j, code in enumerate(a.codes):
        nb, na = int(n_before[j]), int(n_after[j])
        if na == 0:
            continue
        ratio = ratios(nb, na, population)
        tt = welch_t(x.counts[:, j], y.counts[:, j]).p_value
        if method is Method.RANKSUM:
            p = rank_sum(x.counts[:, j], y.counts[:, j]).p_value
        else:
            p = tt
        scored.append(_Scored(code, nb, na, ratio.r1, ratio.r2_percent, tt, p))
    return scored


def detect(x, y, a, b, method=Method.TTEST, alpha=0.05, top_k=20,
           descriptions=None, metadata=None) -> SignalTable:
    """Score every event column and return the ranked top-k signal table.

    ``ttest`` and ``ranksum`` order by ascending p, then descending r1, then
    code. ``ratio`` keeps columns with t-test p < alpha and orders by
    descending r1, then descending n_after, then code. Columns with no
    exposed occurrences are never reported.
    """
    method = Method(method)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    scored = _score_columns(x, y, a, b, method)
    if method is Method.RATIO:
        pool = [s for s in scored if s.ttest_p < alpha]
        pool.sort(key=lambda s: (-s.r1, -s.n_after, s.code))
    else:
        pool = sorted(scored, key=lambda s: (s.p_value, -s.r1, s.code))
    descriptions = descriptions or {}
    rows = [
        SignalRow(rank, s.code, s.n_before, s.n_after, s.r1, s.r2_percent, s.p_value,
                  method, descriptions.get(s.code))
        for rank, s in enumerate(pool[:top_k], start=1)
    ]
    meta = dict(metadata or {})
    meta.setdefault("method", method.value)
    meta.setdefault("N", a.shape[0])
    meta.setdefault("g", x.n_groups)
    meta.setdefault("group_size", x.group_size)
    meta.setdefault("alpha", alpha)
    return SignalTable(rows, meta)


def evaluate_topk(table: SignalTable, reference: ReferenceAdrSet, k: int = 20) -> float:
    """Share of the first k rows that hit a reference prefix, over k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not reference.entries:
        raise EmptyReferenceSet("reference ADR set is empty")
    hits = sum(1 for row in table.rows[:k] if reference.matches(row.code))
    return hits / k


def load_reference(path, label=None) -> ReferenceAdrSet:
    """One code prefix per line; blank lines and ``#`` comments are ignored."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read reference set {path}: {exc}") from exc
    entries = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if len(line) > 7 or " " in line:
            raise SchemaError(f"invalid reference prefix {line!r}", path, lineno)
        entries.add(line)
    ref = ReferenceAdrSet(frozenset(entries), label or path.stem)
    if not ref.entries:
        raise EmptyReferenceSet(f"{path}: no reference prefixes")
    return ref


# -- serialisation -----------------------------------------------------------

def _fmt_meta(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_tsv(table: SignalTable) -> str:
    """Render the table as TSV with ``# key=value`` metadata header lines."""
    buf = io.StringIO()
    for key in METADATA_KEYS:
        if key in table.metadata:
            buf.write(f"# {key}={_fmt_meta(table.metadata[key])}\n")
    for key in sorted(set(table.metadata) - set(METADATA_KEYS)):
        buf.write(f"# {key}={_fmt_meta(table.metadata[key])}\n")
    buf.write("\t".join(TABLE_COLUMNS) + "\n")
    for r in table.rows:
        desc = (r.description or "").replace("\t", " ")
        buf.write(f"{r.rank}\t{r.code}\t{desc}\t{r.n_before}\t{r.n_after}\t"
                  f"{r.r1:.2f}\t{r.r2_percent:.2f}\t{r.p_value:.5e}\n")
    return buf.getvalue()


def to_json(table: SignalTable) -> str:
    payload = {
        "metadata": table.metadata,
        "rows": [
            {"rank": r.rank, "readcode": r.code, "description": r.description,
             "n_before": r.n_before, "n_after": r.n_after, "r1": r.r1,
             "r2_percent": r.r2_percent, "p_value": r.p_value}
            for r in table.rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _coerce_meta(value):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def parse_tsv(text: str, source="<table>") -> SignalTable:
    meta = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = _coerce_meta(value.strip())
            continue
        fields = line.split("\t")
        if not header_seen:
            if tuple(fields) != TABLE_COLUMNS:
                raise SchemaError("bad signal table header", source, lineno)
            header_seen = True
            continue
        if len(fields) != len(TABLE_COLUMNS):
            raise SchemaError(f"expected {len(TABLE_COLUMNS)} fields", source, lineno)
        try:
            rows.append(SignalRow(
                rank=int(fields[0]), code=fields[1], description=fields[2] or None,
                n_before=int(fields[3]), n_after=int(fields[4]), r1=float(fields[5]),
                r2_percent=float(fields[6]), p_value=float(fields[7]),
                method=Method(meta.get("method", "ttest"))))
        except ValueError as exc:
            raise SchemaError(str(exc), source, lineno) from exc
    if not header_seen:
        raise SchemaError("missing signal table header", source)
    return SignalTable(rows, meta)


def parse_json(text: str, source="<table>") -> SignalTable:
    try:
        payload = json.loads(text)
        meta = payload.get("metadata", {})
        method = Method(meta.get("method", "ttest"))
        rows = [SignalRow(int(r["rank"]), r["readcode"], int(r["n_before"]), int(r["n_after"]),
                          float(r["r1"]), float(r["r2_percent"]), float(r["p_value"]),
                          method, r.get("description"))
                for r in payload["rows"]]
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise SchemaError(f"invalid JSON signal table: {exc}", source) from exc
    return SignalTable(rows, meta)


def read_table(path) -> SignalTable:
    """Read a TSV or JSON signal table (format sniffed from content)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read signal table {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        return parse_json(text, path)
    return parse_tsv(text, path)


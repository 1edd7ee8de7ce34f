"""Deterministic synthetic cohort generator with planted ADR signals.

Writes ``patients.csv``, ``therapy.csv`` and ``medical.csv`` in the ingest
schemas plus ``truth.txt`` listing the planted codes.

Per patient the generator draws a prescription series for the study drug,
then background events: for every code and every ``window_days`` slot of the
patient's observation range ``[p_1 - 2W, p_M + 2W)`` the code occurs once
with probability ``base_event_rate``. Inside each exposure window
``[p_l, min(p_l + W, p_{l+1}))`` the occurrence odds of a planted code are
multiplied by its configured multiplier.

All randomness comes from :class:`SplitMix64`, so a given config and seed
produce byte-identical files on any platform.
"""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, IoError
from .readcode import Readcode, parse_readcode

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_FAMILY_LETTERS = "ABCDEFGHJKLMNPQRSTUVWXYZ"
_FAMILY_CHILDREN = ("1.00", "2.00", "1100", "..00")


class SplitMix64:
    """Counter-based SplitMix64 stream; output i is ``mix(seed + i * golden)``."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_uint64(self, n: int) -> np.ndarray:
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(_GOLDEN)
        self.state = (self.state + n * _GOLDEN) & _MASK64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def random(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on [0, 1)."""
        return (self.next_uint64(n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def integers(self, low: int, high: int, n: int) -> np.ndarray:
        """``n`` integers uniform on the closed range [low, high]."""
        span = high - low + 1
        return low + np.minimum((self.random(n) * span).astype(np.int64), span - 1)


def code_universe(n_codes: int) -> list[Readcode]:
    """Deterministic code universe in families of level-3/4/5 siblings."""
    if n_codes > len(_FAMILY_LETTERS) * 100 * len(_FAMILY_CHILDREN):
        raise InvalidConfig(f"n_codes={n_codes} exceeds the synthetic code universe")
    codes = []
    family = 0
    while len(codes) < n_codes:
        prefix = f"{_FAMILY_LETTERS[family // 100]}{family % 100:02d}"
        for child in _FAMILY_CHILDREN:
            if len(codes) == n_codes:
                break
            codes.append(parse_readcode(prefix + child))
        family += 1
    return codes


def _parse_range(value):
    if isinstance(value, str):
        lo, sep, hi = value.partition("-")
        value = (int(lo), int(hi if sep else lo))
    lo, hi = value
    return int(lo), int(hi)


def _parse_planted(value):
    if isinstance(value, str):
        items = []
        for part in value.split(","):
            part = part.strip()
            if not part:
                continue
            code, sep, mult = part.partition(":")
            if not sep:
                raise InvalidConfig(f"planted entry {part!r} must be CODE:MULTIPLIER")
            items.append((code.strip(), float(mult)))
        value = items
    return tuple((str(c), float(m)) for c, m in value)


@dataclass(frozen=True)
class SynthConfig:
    n_patients: int = 2000
    n_codes: int = 200
    drug_code: str = "D1"
    study_span_days: int = 730
    base_event_rate: float = 0.02
    prescriptions_per_patient: tuple = (1, 6)
    planted: tuple = ()
    seed: int = 0
    window_days: int = 60
    start_date: dt.date = dt.date(2010, 1, 1)
    other_drug_code: str = "D2"
    other_drug_fraction: float = 0.2
    late_registration_fraction: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "prescriptions_per_patient",
                           _parse_range(self.prescriptions_per_patient))
        object.__setattr__(self, "planted", _parse_planted(self.planted))
        if isinstance(self.start_date, str):
            object.__setattr__(self, "start_date", dt.date.fromisoformat(self.start_date))

    def validate(self):
        if self.n_patients < 0 or self.n_codes < 1:
            raise InvalidConfig("n_patients must be >= 0 and n_codes >= 1")
        if self.window_days < 1 or self.study_span_days <= self.window_days:
            raise InvalidConfig("study_span_days must exceed window_days >= 1")
        lo, hi = self.prescriptions_per_patient
        if not 1 <= lo <= hi:
            raise InvalidConfig("prescriptions_per_patient must satisfy 1 <= low <= high")
        for name in ("base_event_rate", "other_drug_fraction", "late_registration_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1]")
        if not self.drug_code or self.drug_code == self.other_drug_code:
            raise InvalidConfig("drug_code must be non-empty and differ from other_drug_code")
        universe = set(code_universe(self.n_codes))
        for code, mult in self.planted:
            if code not in universe:
                raise InvalidConfig(f"planted code {code!r} is not in the generated universe")
            if not (mult >= 0 and math.isfinite(mult)):
                raise InvalidConfig(f"planted multiplier for {code} must be finite and >= 0")
        if len({c for c, _ in self.planted}) != len(self.planted):
            raise InvalidConfig("planted codes must be distinct")
        if not 0 <= self.seed <= _MASK64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")


def choose_planted(n_codes: int, n_planted: int, multiplier: float, seed: int = 0):
    """Pick ``n_planted`` codes from distinct families, deterministically by seed."""
    universe = code_universe(n_codes)
    n_families = math.ceil(n_codes / len(_FAMILY_CHILDREN))
    if n_planted > n_families:
        raise InvalidConfig(f"cannot plant {n_planted} codes in {n_families} families")
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    order = np.argsort(rng.random(n_families), kind="stable")[:n_planted]
    picks = []
    for fam in sorted(order.tolist()):
        members = universe[fam * len(_FAMILY_CHILDREN):(fam + 1) * len(_FAMILY_CHILDREN)]
        k = int(rng.integers(0, len(members) - 1, 1)[0])
        picks.append((str(members[k]), float(multiplier)))
    return tuple(picks)


_CONFIG_KEYS = {f.name for f in fields(SynthConfig)}
_INT_KEYS = {"n_patients", "n_codes", "study_span_days", "seed", "window_days"}
_FLOAT_KEYS = {"base_event_rate", "other_drug_fraction", "late_registration_fraction"}


def config_from_mapping(values: dict, base: SynthConfig | None = None) -> SynthConfig:
    """Build a config from string/number values keyed by field name."""
    kwargs = {}
    for key, raw in values.items():
        if key not in _CONFIG_KEYS:
            raise InvalidConfig(f"unknown config key {key!r}")
        try:
            if key in _INT_KEYS:
                raw = int(raw, 0) if isinstance(raw, str) else int(raw)
            elif key in _FLOAT_KEYS:
                raw = float(raw)
        except ValueError as exc:
            raise InvalidConfig(f"bad value for {key}: {raw!r}") from exc
        kwargs[key] = raw
    try:
        return replace(base or SynthConfig(), **kwargs)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc


def load_config(path) -> SynthConfig:
    """Read a flat ``key=value`` file (``#`` comments allowed)."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidConfig(f"{path}:{lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return config_from_mapping(values)


@dataclass
class SynthSummary:
    files: dict
    planted: tuple
    n_patients: int
    n_prescriptions: int
    n_events: int
    extra: dict = field(default_factory=dict)


def _exposure_windows(days, window):
    ends = [min(p + window, nxt) for p, nxt in zip(days, days[1:])] + [days[-1] + window]
    return [(p, e) for p, e in zip(days, ends) if e > p]


def _simulate_patient(cfg, rng, codes, planted_idx, planted_mult):
    W = cfg.window_days
    span = cfg.study_span_days
    lo, hi = cfg.prescriptions_per_patient
    n_rx = int(rng.integers(lo, hi, 1)[0])
    first = int(rng.integers(W, span - 1, 1)[0])
    gaps = rng.integers(7, 150, max(n_rx - 1, 1))
    days = [first]
    for gap in gaps[: n_rx - 1].tolist():
        if days[-1] + gap >= span:
            break
        days.append(days[-1] + gap)

    u_reg, u_late, u_other = rng.random(3).tolist()
    if u_late < cfg.late_registration_fraction:
        registration = first - int(u_reg * 365)
    else:
        registration = first - 365 - int(u_reg * 2000)
    other = []
    if u_other < cfg.other_drug_fraction:
        other = sorted(rng.integers(0, span - 1, 2).tolist())

    n_codes = len(codes)
    obs_start = days[0] - 2 * W
    obs_end = days[-1] + 2 * W
    n_slots = math.ceil((obs_end - obs_start) / W)
    occur = rng.random(n_slots * n_codes).reshape(n_slots, n_codes) < cfg.base_event_rate
    offsets = rng.integers(0, W - 1, n_slots * n_codes).reshape(n_slots, n_codes)
    slot_idx, code_idx = np.nonzero(occur)
    ev_days = obs_start + slot_idx * W + offsets[slot_idx, code_idx]
    keep = ev_days < obs_end
    events = list(zip(ev_days[keep].tolist(), code_idx[keep].tolist()))

    if planted_idx:
        drop = set()
        extra = []
        for start, end in _exposure_windows(days, W):
            length = end - start
            u = rng.random(3 * len(planted_idx)).reshape(len(planted_idx), 3)
            p0 = 1.0 - (1.0 - cfg.base_event_rate) ** (length / W)
            for k, (c, mult) in enumerate(zip(planted_idx, planted_mult)):
                if p0 <= 0.0 or mult == 1.0:
                    continue
                if p0 >= 1.0:
                    target = 1.0 if mult > 0 else 0.0
                else:
                    odds = p0 / (1.0 - p0) * mult
                    target = odds / (1.0 + odds)
                u_add, u_pos, u_drop = u[k]
                if target > p0:
                    if u_add < (target - p0) / (1.0 - p0):
                        extra.append((start + min(int(u_pos * length), length - 1), c))
                elif u_drop < 1.0 - target / p0:
                    drop.add((start, end, c))
        if drop:
            events = [(d, c) for d, c in events
                      if not any(s <= d < e and c == dc for s, e, dc in drop)]
        events.extend(extra)
    events.sort()
    return days, registration, other, events


def generate(config: SynthConfig, out_dir) -> SynthSummary:
    """Write the synthetic CSV tables and truth file into ``out_dir``."""
    config.validate()
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    codes = code_universe(config.n_codes)
    index = {c: i for i, c in enumerate(codes)}
    planted_idx = [index[c] for c, _ in config.planted]
    planted_mult = [m for _, m in config.planted]
    rng = SplitMix64(config.seed)
    origin = config.start_date.toordinal()

    def iso(day):
        return dt.date.fromordinal(origin + day).isoformat()

    paths = {name: out_dir / f"{name}.csv" for name in ("patients", "therapy", "medical")}
    paths["truth"] = out_dir / "truth.txt"
    n_rx = n_ev = 0
    try:
        with paths["patients"].open("w", newline="", encoding="utf-8") as fp, \
                paths["therapy"].open("w", newline="", encoding="utf-8") as ft, \
                paths["medical"].open("w", newline="", encoding="utf-8") as fm:
            wp = csv.writer(fp, lineterminator="\n")
            wt = csv.writer(ft, lineterminator="\n")
            wm = csv.writer(fm, lineterminator="\n")
            wp.writerow(["patient_id", "registration_date"])
            wt.writerow(["patient_id", "drug_code", "prescription_date"])
            wm.writerow(["patient_id", "readcode", "event_date"])
            for i in range(config.n_patients):
                pid = f"P{i:06d}"
                days, reg, other, events = _simulate_patient(
                    config, rng, codes, planted_idx, planted_mult)
                wp.writerow([pid, iso(reg)])
                rx = [(d, config.drug_code) for d in days] + \
                     [(d, config.other_drug_code) for d in other]
                for d, drug in sorted(rx):
                    wt.writerow([pid, drug, iso(d)])
                n_rx += len(rx)
                for d, c in events:
                    wm.writerow([pid, codes[c], iso(d)])
                n_ev += len(events)
        paths["truth"].write_text("".join(f"{c}\n" for c, _ in config.planted), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write synthetic data to {out_dir}: {exc}") from exc
    return SynthSummary({k: str(v) for k, v in paths.items()},
                        tuple(c for c, _ in config.planted),
                        config.n_patients, n_rx, n_ev)

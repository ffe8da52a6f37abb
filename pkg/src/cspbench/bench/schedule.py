"""Maintenance scheduling instances.

A unit has a capacity (MW), belongs to one plant and one area, and needs
one or more maintenances of given durations (weeks). Maintenances of the
same unit are done in the listed order without overlap. Constraints:

* a maintenance lies completely inside the horizon,
* per plant, at most ``plant_limit`` units are in maintenance in any week,
* per area, at most ``area_limit`` MW are in maintenance in any week,
* a unit is never in maintenance during one of its prohibited weeks,
* fixed maintenances start on their given week.

The objective is the minimal weekly reserve: total capacity minus the
capacity in maintenance minus the peak load of the week, minimized over
weeks and maximized over schedules.

The text format (sections may appear in any order after HORIZON)::

    HORIZON 12
    UNITS
    % id plant area capacity durations...
    1 1 1 120 3
    2 1 2 80 2 1
    3 2 2 60
    LIMITS
    PLANT 1 2
    AREA 1 200
    PROHIBITED
    1 5
    FIXED
    % unit maintenance-index start
    2 1 4
    PEAKS
    100 120 130 ...

``%`` starts a comment. A comment of the form ``% key = value`` carries
instance metadata (generator profile, seed, retries) and is read back.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from cspbench.bench.rng import SplitMix64


class ScheduleFormatError(ValueError):
    def __init__(self, message, line=0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class Unit:
    id: int
    plant: int
    area: int
    capacity: int
    durations: tuple


@dataclass
class Maintenance:
    id: int        # 1-based position in ScheduleInstance.maintenances
    unit: int
    index: int     # 1-based among the unit's maintenances
    duration: int


@dataclass
class ScheduleInstance:
    horizon: int
    units: list
    plant_limit: dict
    area_limit: dict
    prohibited: set = field(default_factory=set)   # (unit, week)
    fixed: dict = field(default_factory=dict)      # (unit, index) -> start
    peaks: list = field(default_factory=list)      # peaks[w - 1]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    @property
    def maintenances(self) -> list:
        out = []
        for u in self.units:
            for i, d in enumerate(u.durations, 1):
                out.append(Maintenance(len(out) + 1, u.id, i, d))
        return out

    @property
    def total_capacity(self) -> int:
        return sum(u.capacity for u in self.units)

    def unit(self, uid):
        for u in self.units:
            if u.id == uid:
                return u
        raise KeyError(uid)

    def weeks(self):
        return range(1, self.horizon + 1)

    def allowed_starts(self, m: Maintenance, ignore_fixed: bool = False) -> list:
        """Start weeks that fit the horizon, avoid prohibited weeks and (unless
        ``ignore_fixed``) match a fixed start."""
        fixed = None if ignore_fixed else self.fixed.get((m.unit, m.index))
        out = []
        for s in range(1, self.horizon - m.duration + 2):
            if fixed is not None and s != fixed:
                continue
            if any((m.unit, w) in self.prohibited for w in range(s, s + m.duration)):
                continue
            out.append(s)
        return out

    def validate(self):
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        ids = [u.id for u in self.units]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate unit id")
        for u in self.units:
            if u.durations and min(u.durations) < 1:
                raise ValueError(f"unit {u.id} has a duration below 1")
            if sum(u.durations) > self.horizon:
                raise ValueError(f"unit {u.id} needs more weeks than the horizon")
            if u.capacity < 0:
                raise ValueError(f"unit {u.id} has negative capacity")
            if u.plant not in self.plant_limit or u.area not in self.area_limit:
                raise ValueError(f"unit {u.id} lacks a plant or area limit")
        if len(self.peaks) != self.horizon:
            raise ValueError(f"expected {self.horizon} peaks, got {len(self.peaks)}")
        for (uid, w) in self.prohibited:
            if uid not in ids or not 1 <= w <= self.horizon:
                raise ValueError(f"bad prohibition ({uid}, {w})")
        for (uid, i), s in self.fixed.items():
            if uid not in ids or not 1 <= i <= len(self.unit(uid).durations):
                raise ValueError(f"bad fixed maintenance ({uid}, {i})")
            d = self.unit(uid).durations[i - 1]
            if not 1 <= s <= self.horizon - d + 1:
                raise ValueError(f"fixed start {s} of ({uid}, {i}) leaves the horizon")
            if any((uid, w) in self.prohibited for w in range(s, s + d)):
                raise ValueError(f"fixed start of ({uid}, {i}) hits a prohibited week")


# -- text format --------------------------------------------------------------

def write_schedule(inst: ScheduleInstance) -> str:
    lines = []
    for k, v in sorted(inst.meta.items()):
        lines.append(f"% {k} = {v}")
    lines.append(f"HORIZON {inst.horizon}")
    lines.append("UNITS")
    for u in inst.units:
        lines.append(" ".join(map(str, (u.id, u.plant, u.area, u.capacity, *u.durations))))
    lines.append("LIMITS")
    lines += [f"PLANT {p} {v}" for p, v in sorted(inst.plant_limit.items())]
    lines += [f"AREA {a} {v}" for a, v in sorted(inst.area_limit.items())]
    lines.append("PROHIBITED")
    lines += [f"{u} {w}" for u, w in sorted(inst.prohibited)]
    lines.append("FIXED")
    lines += [f"{u} {i} {s}" for (u, i), s in sorted(inst.fixed.items())]
    lines.append("PEAKS")
    for i in range(0, len(inst.peaks), 13):
        lines.append(" ".join(map(str, inst.peaks[i:i + 13])))
    return "\n".join(lines) + "\n"


def read_schedule(text: str) -> ScheduleInstance:
    horizon = None
    section = None
    units, plim, alim, proh, fixed, peaks = [], {}, {}, set(), {}, []
    sections = {"UNITS", "LIMITS", "PROHIBITED", "FIXED", "PEAKS"}
    meta = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("%")
        line = line.strip()
        m = _META.match(comment)
        if m:
            v = m.group(2).strip()
            meta[m.group(1)] = int(v) if v.lstrip("-").isdigit() else v
        if not line:
            continue
        parts = line.split()
        if parts[0] == "HORIZON":
            if len(parts) != 2:
                raise ScheduleFormatError("expected 'HORIZON <weeks>'", ln)
            horizon = _int(parts[1], ln)
            continue
        if parts[0] in sections and len(parts) == 1:
            section = parts[0]
            continue
        nums = None if section == "LIMITS" else [_int(p, ln) for p in parts]
        if section == "UNITS":
            if len(nums) < 4:
                raise ScheduleFormatError("unit line needs id plant area capacity [durations]", ln)
            units.append(Unit(nums[0], nums[1], nums[2], nums[3], tuple(nums[4:])))
        elif section == "LIMITS":
            if len(parts) != 3 or parts[0] not in ("PLANT", "AREA"):
                raise ScheduleFormatError("expected 'PLANT <id> <units>' or 'AREA <id> <MW>'", ln)
            (plim if parts[0] == "PLANT" else alim)[_int(parts[1], ln)] = _int(parts[2], ln)
        elif section == "PROHIBITED":
            if len(nums) != 2:
                raise ScheduleFormatError("expected '<unit> <week>'", ln)
            proh.add(tuple(nums))
        elif section == "FIXED":
            if len(nums) != 3:
                raise ScheduleFormatError("expected '<unit> <index> <start>'", ln)
            fixed[(nums[0], nums[1])] = nums[2]
        elif section == "PEAKS":
            peaks += nums
        else:
            raise ScheduleFormatError(f"unexpected line {line!r}", ln)
    if horizon is None:
        raise ScheduleFormatError("missing HORIZON")
    try:
        return ScheduleInstance(horizon, units, plim, alim, proh, fixed, peaks, meta)
    except ValueError as e:
        raise ScheduleFormatError(str(e)) from None


_META = re.compile(r"^\s*([A-Za-z_]\w*)\s*=(.*)$")


def _int(s, ln):
    try:
        return int(s)
    except ValueError:
        raise ScheduleFormatError(f"expected an integer, found {s!r}", ln) from None


# -- generation ---------------------------------------------------------------

@dataclass
class Profile:
    units: int
    horizon: int
    twice: int            # units with two maintenances
    durations: tuple      # (lo, hi)
    capacity: tuple       # (lo, hi) MW
    plants: int
    areas: int
    prohibited: int
    fixed: int
    peak: tuple           # peak load as a fraction of total capacity (lo, hi)


PROFILES = {
    "scaled": Profile(8, 12, 0, (1, 3), (20, 120), 3, 2, 4, 2, (0.2, 0.45)),
    # 40 units, 16 of them maintained twice: 56 maintenances over 52 weeks.
    "paper": Profile(40, 52, 16, (1, 5), (100, 900), 8, 4, 40, 5, (0.45, 0.65)),
}


def gen_schedule(profile: str = "scaled", seed: int = 0) -> ScheduleInstance:
    """Random instance that is feasible by construction.

    A random witness schedule is drawn first; limits are raised to at least
    what the witness needs, prohibitions avoid the witness and fixed starts
    are taken from it. The witness is not stored.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    pr = PROFILES[profile]
    rng = SplitMix64(seed)
    retries = 0
    while True:
        inst = _attempt(pr, rng)
        if inst is not None:
            inst.meta.update(profile=profile, seed=seed, retries=retries)
            return inst
        retries += 1


def _attempt(pr: Profile, rng: SplitMix64):
    H = pr.horizon
    twice = set(rng.randint(1, pr.units) for _ in range(pr.twice))
    while len(twice) < pr.twice:
        twice.add(rng.randint(1, pr.units))
    units = []
    for uid in range(1, pr.units + 1):
        n = 2 if uid in twice else 1
        durs = tuple(rng.randint(*pr.durations) for _ in range(n))
        units.append(Unit(uid, rng.randint(1, pr.plants), rng.randint(1, pr.areas),
                          rng.randint(*pr.capacity), durs))
    # witness: sequential maintenances per unit
    witness = {}
    for u in units:
        t = 1
        for i, d in enumerate(u.durations, 1):
            slack = H - t + 1 - sum(u.durations[i - 1:])
            if slack < 0:
                return None
            s = t + rng.randint(0, min(slack, H // max(1, len(u.durations))))
            witness[(u.id, i)] = s
            t = s + d
    busy = {(u.id, w) for u in units for i, d in enumerate(u.durations, 1)
            for w in range(witness[(u.id, i)], witness[(u.id, i)] + d)}
    need_p, need_a = {}, {}
    for w in range(1, H + 1):
        for p in range(1, pr.plants + 1):
            c = sum(1 for u in units if u.plant == p and (u.id, w) in busy)
            need_p[p] = max(need_p.get(p, 0), c)
        for a in range(1, pr.areas + 1):
            c = sum(u.capacity for u in units if u.area == a and (u.id, w) in busy)
            need_a[a] = max(need_a.get(a, 0), c)
    plim = {p: max(need_p[p], rng.randint(1, 2)) for p in range(1, pr.plants + 1)}
    alim = {}
    for a in range(1, pr.areas + 1):
        caps = sorted((u.capacity for u in units if u.area == a), reverse=True)
        drawn = sum(caps[:2]) if caps else 0
        alim[a] = max(need_a[a], drawn * rng.randint(60, 100) // 100)
    proh = set()
    tries = 0
    while len(proh) < pr.prohibited and tries < 50 * pr.prohibited:
        tries += 1
        cell = (rng.randint(1, pr.units), rng.randint(1, H))
        if cell not in busy:
            proh.add(cell)
    keys = sorted(witness)
    rng.shuffle(keys)
    fixed = {k: witness[k] for k in keys[:pr.fixed]}
    total = sum(u.capacity for u in units)
    lo, hi = pr.peak
    peaks = []
    for w in range(1, H + 1):
        season = 0.5 + 0.5 * math.cos(2 * math.pi * (w - 1) / H)
        frac = lo + (hi - lo) * season
        jitter = rng.randint(-3, 3) / 100
        peaks.append(max(0, int(total * (frac + jitter))))
    return ScheduleInstance(H, units, plim, alim, proh, fixed, peaks)


def toy_schedule() -> ScheduleInstance:
    """Two units (10 and 20 MW), two weeks, peak 5; unit 1 needs one week."""
    return ScheduleInstance(2, [Unit(1, 1, 1, 10, (1,)), Unit(2, 1, 1, 20, ())], {1: 1}, {1: 30},
                            peaks=[5, 5])

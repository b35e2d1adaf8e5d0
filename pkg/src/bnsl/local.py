"""Per-node learners: Markov blanket and neighbourhood backends.

Markov blanket backends (``gs``, ``iamb``, ``inter-iamb``) grow a candidate
set and shrink away false positives; neighbourhood backends (``mmpc``,
``si-hiton-pc``) search for separating subsets and keep only candidates no
subset can separate.

All heuristic choices are deterministic: candidates are scanned in name
order, association ranking breaks ties by statistic magnitude then name,
and separating subsets are enumerated by increasing size and name-
lexicographically within a size. Whitelisted nodes are forced members and
never tested for removal; blacklisted nodes are never tested at all; start
nodes seed the candidate set but remain removable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .citests import CiTest
from .graph import _pair

MB_BACKENDS = ("gs", "iamb", "inter-iamb")
NBR_BACKENDS = ("mmpc", "si-hiton-pc")


@dataclass(frozen=True)
class LocalLearnConfig:
    """Settings for one local learning call."""

    backend: str
    alpha: float = 0.01
    start: frozenset[str] = frozenset()
    whitelist: frozenset[str] = frozenset()
    blacklist: frozenset[str] = frozenset()
    max_condition_size: int | None = None

    def validate(self, target: str) -> None:
        if self.backend not in MB_BACKENDS + NBR_BACKENDS:
            raise ValueError(f"unknown backend: {self.backend!r}")
        if self.whitelist & self.blacklist:
            raise ValueError("whitelist and blacklist overlap")
        if self.start & self.blacklist:
            raise ValueError("start set and blacklist overlap")
        for name, group in (("start", self.start), ("whitelist", self.whitelist), ("blacklist", self.blacklist)):
            if target in group:
                raise ValueError(f"target {target!r} may not appear in the {name} set")
        if self.max_condition_size is not None and self.max_condition_size < 0:
            raise ValueError("max_condition_size must be non-negative")


class SepsetTable:
    """Separating sets found during learning, keyed by unordered pair.

    A value of ``None`` marks a pair for which an exhaustive search found no
    separating set ("none found"); any recorded set witnessed an independent
    test outcome for its pair.
    """

    def __init__(self) -> None:
        self._entries: dict[tuple[str, str], frozenset[str] | None] = {}

    def record(self, x: str, y: str, sepset: frozenset[str] | None) -> None:
        self._entries[_pair(x, y)] = sepset

    def has(self, x: str, y: str) -> bool:
        return _pair(x, y) in self._entries

    def get(self, x: str, y: str) -> frozenset[str] | None:
        return self._entries[_pair(x, y)]

    def merge_first_wins(self, other: "SepsetTable") -> None:
        """Adopt entries from ``other`` for pairs not already present."""
        for pair, sepset in other._entries.items():
            self._entries.setdefault(pair, sepset)

    def items(self) -> Iterator[tuple[tuple[str, str], frozenset[str] | None]]:
        return iter(sorted(self._entries.items()))

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self):
        return f"SepsetTable({len(self._entries)} pairs)"


def subsets_in_order(pool: Iterable[str], cap: int | None = None) -> Iterator[frozenset[str]]:
    """All subsets of ``pool`` by increasing size, name-lexicographic within
    a size, optionally capped at ``cap`` elements. Includes the empty set."""
    pool = sorted(pool)
    top = len(pool) if cap is None else min(cap, len(pool))
    for size in range(top + 1):
        for combo in combinations(pool, size):
            yield frozenset(combo)


class _Recorder:
    """Remembers the most recent independence witness per partner node."""

    def __init__(self, target: str):
        self.target = target
        self.witness: dict[str, frozenset[str]] = {}

    def note(self, v: str, sepset: frozenset[str]) -> None:
        self.witness[v] = sepset

    def fragment(self, members: frozenset[str]) -> SepsetTable:
        table = SepsetTable()
        for v, sepset in self.witness.items():
            if v not in members:
                table.record(self.target, v, sepset)
        return table


def learn_mb(
    data, target: str, cfg: LocalLearnConfig, test: CiTest
) -> tuple[frozenset[str], SepsetTable]:
    """Learn the Markov blanket of ``target`` with a grow-shrink backend.

    Returns the candidate blanket and the separating sets recorded for
    excluded candidates.
    """
    cfg.validate(target)
    if cfg.backend not in MB_BACKENDS:
        raise ValueError(f"backend {cfg.backend!r} does not learn Markov blankets")
    names = _resolve_names(data, target, cfg)
    recorder = _Recorder(target)
    if cfg.backend == "gs":
        members = _grow_shrink(names, target, cfg, test, recorder)
    else:
        members = _iamb(names, target, cfg, test, recorder, interleave=cfg.backend == "inter-iamb")
    members = frozenset(members)
    return members, recorder.fragment(members)


def learn_nbr(
    data,
    target: str,
    cfg: LocalLearnConfig,
    test: CiTest,
    mb: Iterable[str] | None = None,
) -> tuple[frozenset[str], SepsetTable]:
    """Learn the neighbourhood (parents and children) of ``target``.

    ``mb`` optionally restricts the candidate pool to a precomputed Markov
    blanket. Returns the candidate neighbourhood and, for every rejected
    candidate, the separating set that excluded it.
    """
    cfg.validate(target)
    if cfg.backend not in NBR_BACKENDS:
        raise ValueError(f"backend {cfg.backend!r} does not learn neighbourhoods")
    names = _resolve_names(data, target, cfg, within=mb)
    recorder = _Recorder(target)
    if cfg.backend == "mmpc":
        members = _mmpc(names, target, cfg, test, recorder)
    else:
        members = _si_hiton_pc(names, target, cfg, test, recorder)
    members = frozenset(members)
    return members, recorder.fragment(members)


def _resolve_names(data, target: str, cfg: LocalLearnConfig, within=None) -> list[str]:
    """Eligible candidate names in canonical (name) order."""
    all_names = set(data.names)
    for name in (target, *cfg.start, *cfg.whitelist, *cfg.blacklist):
        if name not in all_names:
            raise ValueError(f"unknown variable: {name!r}")
    pool = all_names if within is None else set(within) & all_names
    pool = pool - {target} - cfg.blacklist
    # Forced and seeded members take part even when outside the restriction.
    pool |= cfg.start | cfg.whitelist
    return sorted(pool)


def _grow_shrink(names, target, cfg, test, recorder) -> set[str]:
    cmb = set(cfg.whitelist) | set(cfg.start)
    changed = True
    while changed:
        changed = False
        for v in names:
            if v in cmb:
                continue
            cond = frozenset(cmb)
            out = test.test(target, v, cond)
            if out.independent:
                recorder.note(v, cond)
            else:
                cmb.add(v)
                changed = True
    _shrink(cmb, target, cfg, test, recorder)
    return cmb


def _iamb(names, target, cfg, test, recorder, interleave: bool) -> set[str]:
    cmb = set(cfg.whitelist) | set(cfg.start)
    seen_states = {frozenset(cmb)}
    while True:
        best_key = None
        best_v = None
        best_out = None
        cond = frozenset(cmb)
        for v in names:
            if v in cmb:
                continue
            out = test.test(target, v, cond)
            if out.independent:
                recorder.note(v, cond)
            key = out.ranking_key(v)
            if best_key is None or key < best_key:
                best_key, best_v, best_out = key, v, out
        if best_v is None or best_out.independent:
            break
        cmb.add(best_v)
        if interleave:
            _shrink(cmb, target, cfg, test, recorder)
        state = frozenset(cmb)
        if state in seen_states:
            break  # oscillation guard on inconsistent test answers
        seen_states.add(state)
    _shrink(cmb, target, cfg, test, recorder)
    return cmb


def _shrink(cmb: set[str], target, cfg, test, recorder) -> None:
    """Remove members independent of the target given the rest, to fixpoint."""
    changed = True
    while changed:
        changed = False
        for v in sorted(cmb):
            if v in cfg.whitelist or v not in cmb:
                continue
            rest = frozenset(cmb - {v})
            out = test.test(target, v, rest)
            if out.independent:
                cmb.discard(v)
                recorder.note(v, rest)
                changed = True


def _mmpc(names, target, cfg, test, recorder) -> set[str]:
    cpc = set(cfg.whitelist) | set(cfg.start)
    candidates = [v for v in names if v not in cpc]
    while candidates:
        best_key = None
        best_v = None
        best_out = None
        for v in candidates:
            # Minimum association over separating subsets = maximum p-value.
            max_out = None
            max_subset = None
            for s in subsets_in_order(cpc, cfg.max_condition_size):
                out = test.test(target, v, s)
                if max_out is None or out.p_value > max_out.p_value:
                    max_out, max_subset = out, s
            if max_out.independent:
                recorder.note(v, max_subset)
            key = max_out.ranking_key(v)
            if best_key is None or key < best_key:
                best_key, best_v, best_out = key, v, max_out
        if best_out.independent:
            break
        cpc.add(best_v)
        candidates.remove(best_v)
    _backward(cpc, target, cfg, test, recorder)
    return cpc


def _si_hiton_pc(names, target, cfg, test, recorder) -> set[str]:
    pc = set(cfg.whitelist) | set(cfg.start)
    ranked = []
    for v in names:
        if v in pc:
            continue
        out = test.test(target, v, frozenset())
        if out.independent:
            recorder.note(v, frozenset())
        ranked.append((out.ranking_key(v), v))
    ranked.sort()
    for _, v in ranked:
        pc.add(v)
        for s in subsets_in_order(pc - {v}, cfg.max_condition_size):
            out = test.test(target, v, s)
            if out.independent:
                pc.discard(v)
                recorder.note(v, s)
                break
    _backward(pc, target, cfg, test, recorder)
    return pc


def _backward(pc: set[str], target, cfg, test, recorder) -> None:
    """One elimination pass: drop members some remaining subset separates."""
    for v in sorted(pc):
        if v in cfg.whitelist:
            continue
        for s in subsets_in_order(pc - {v}, cfg.max_condition_size):
            out = test.test(target, v, s)
            if out.independent:
                pc.discard(v)
                recorder.note(v, s)
                break

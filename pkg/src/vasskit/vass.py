"""The VASS data model: states, integer-vector transitions, configurations,
runs, flatness, and size metrics.

A `Vass` is a whole reachability instance: control graph plus a source and a
target configuration.  Runs from source to target are called halting runs.
All values here are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import BudgetExceededError, NegativeCounterError, WrongStateError


@dataclass(frozen=True, order=True)
class Transition:
    src: str
    delta: tuple[int, ...]
    dst: str


@dataclass(frozen=True)
class Configuration:
    state: str
    vector: tuple[int, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.vector):
            raise NegativeCounterError(next(i for i, v in enumerate(self.vector) if v < 0))


@dataclass(frozen=True)
class Vass:
    """A VASS reachability instance.

    States are kept sorted and transitions sorted/deduplicated so that two
    structurally equal instances serialize identically and searches expand
    successors in one canonical order.
    """

    dimension: int
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    source: Configuration
    target: Configuration

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(set(self.states))))
        object.__setattr__(self, "transitions", tuple(sorted(set(self.transitions))))
        known = set(self.states)
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise ValueError(f"transition endpoint not a state: {t}")
            if len(t.delta) != self.dimension:
                raise ValueError(f"transition delta has wrong dimension: {t}")
        for cfg, what in ((self.source, "source"), (self.target, "target")):
            if cfg.state not in known:
                raise ValueError(f"{what} state {cfg.state!r} not a state")
            if len(cfg.vector) != self.dimension:
                raise ValueError(f"{what} vector has wrong dimension")

    def to_json_obj(self) -> dict:
        return {
            "dimension": self.dimension,
            "states": list(self.states),
            "transitions": [
                {"from": t.src, "delta": [str(d) for d in t.delta], "to": t.dst}
                for t in self.transitions
            ],
            "source": {"state": self.source.state, "vector": [str(v) for v in self.source.vector]},
            "target": {"state": self.target.state, "vector": [str(v) for v in self.target.vector]},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json_obj(obj: dict) -> "Vass":
        return Vass(
            dimension=obj["dimension"],
            states=tuple(obj["states"]),
            transitions=tuple(
                Transition(t["from"], tuple(int(d) for d in t["delta"]), t["to"])
                for t in obj["transitions"]
            ),
            source=Configuration(obj["source"]["state"], tuple(int(v) for v in obj["source"]["vector"])),
            target=Configuration(obj["target"]["state"], tuple(int(v) for v in obj["target"]["vector"])),
        )

    @staticmethod
    def from_json(text: str) -> "Vass":
        return Vass.from_json_obj(json.loads(text))


@dataclass(frozen=True)
class Run:
    """A run given by its initial configuration and its path (transitions)."""

    initial: Configuration
    steps: tuple[Transition, ...]

    def configurations(self):
        """Yield the configuration sequence, applying each step in turn."""
        cfg = self.initial
        yield cfg
        for t in self.steps:
            cfg = step(cfg, t)
            yield cfg

    @property
    def final(self) -> Configuration:
        cfg = self.initial
        for t in self.steps:
            cfg = step(cfg, t)
        return cfg

    def __len__(self) -> int:
        return len(self.steps)


def step(cfg: Configuration, t: Transition) -> Configuration:
    """Apply one transition; counters must stay nonnegative."""
    if t.src != cfg.state:
        raise WrongStateError(f"transition leaves {t.src!r} but configuration is at {cfg.state!r}")
    vec = tuple(v + d for v, d in zip(cfg.vector, t.delta))
    for i, v in enumerate(vec):
        if v < 0:
            raise NegativeCounterError(i)
    return Configuration(t.dst, vec)


@dataclass(frozen=True)
class RunReport:
    ok: bool
    failure_index: int | None  # -1 when the initial configuration is wrong
    halting: bool
    reason: str = ""


def validate_run(v: Vass, r: Run) -> RunReport:
    """Check that r starts at v.source and every step is a legal transition
    of v; report separately whether the final configuration equals v.target.
    """
    if r.initial != v.source:
        return RunReport(False, -1, False, "initial configuration differs from source")
    known = set(v.transitions)
    cfg = r.initial
    for i, t in enumerate(r.steps):
        if t not in known:
            return RunReport(False, i, False, f"step {i} uses a transition not in the VASS")
        try:
            cfg = step(cfg, t)
        except (WrongStateError, NegativeCounterError) as e:
            return RunReport(False, i, False, f"step {i}: {e}")
    return RunReport(True, None, cfg == v.target)


@dataclass(frozen=True)
class FlatnessReport:
    is_flat: bool
    # On failure: a state plus two distinct simple cycles through it,
    # each a tuple of transitions in path order.
    witness_state: str | None = None
    witness_cycles: tuple[tuple[Transition, ...], tuple[Transition, ...]] | None = None


def _canonical_rotation(cycle: tuple[int, ...]) -> tuple[int, ...]:
    # Cycles are cyclic edge sequences; compare rotations so that the same
    # cycle entered at a different state is not counted twice.
    best = cycle
    for i in range(1, len(cycle)):
        rot = cycle[i:] + cycle[:i]
        if rot < best:
            best = rot
    return best


def simple_cycles(v: Vass, max_cycles: int = 1_000_000) -> list[tuple[Transition, ...]]:
    """Enumerate all simple cycles of the control graph (parallel transitions
    count as distinct edges), each reported once up to rotation."""
    index = {s: i for i, s in enumerate(v.states)}
    out: list[list[tuple[int, int]]] = [[] for _ in v.states]  # (dst_ix, transition_ix)
    for tix, t in enumerate(v.transitions):
        out[index[t.src]].append((index[t.dst], tix))

    found: set[tuple[int, ...]] = set()
    n = len(v.states)
    for start in range(n):
        # Only cycles whose minimal state is `start`; DFS restricted to >= start.
        on_path: list[int] = [start]
        path_edges: list[int] = []
        iters = [iter(out[start])]
        while iters:
            try:
                dst, tix = next(iters[-1])
            except StopIteration:
                iters.pop()
                on_path.pop()
                if path_edges:
                    path_edges.pop()
                continue
            if dst == start:
                cyc = _canonical_rotation(tuple(path_edges + [tix]))
                found.add(cyc)
                if len(found) > max_cycles:
                    raise BudgetExceededError(
                        f"simple-cycle enumeration exceeded budget of {max_cycles}"
                    )
                continue
            if dst < start or dst in on_path:
                continue
            on_path.append(dst)
            path_edges.append(tix)
            iters.append(iter(out[dst]))
    return [tuple(v.transitions[i] for i in cyc) for cyc in sorted(found)]


def is_flat(v: Vass, max_cycles: int = 1_000_000) -> FlatnessReport:
    """A VASS is flat when no state lies on two distinct simple cycles."""
    through: dict[str, list[tuple[Transition, ...]]] = {}
    for cyc in simple_cycles(v, max_cycles=max_cycles):
        for t in cyc:
            through.setdefault(t.src, []).append(cyc)
    for state in sorted(through):
        cycles = through[state]
        if len(cycles) >= 2:
            return FlatnessReport(False, state, (cycles[0], cycles[1]))
    return FlatnessReport(True)


def vass_size(v: Vass, encoding: str = "unary") -> int:
    """|Q| + |T| * s where s is the largest vector representation size:
    sum of |entries| for unary, sum of bit lengths (0 counts 1 bit) for binary.
    """
    if encoding not in ("unary", "binary"):
        raise ValueError(f"encoding must be 'unary' or 'binary', got {encoding!r}")
    s = 0
    for t in v.transitions:
        if encoding == "unary":
            rep = sum(abs(d) for d in t.delta)
        else:
            rep = sum(abs(d).bit_length() if d != 0 else 1 for d in t.delta)
        s = max(s, rep)
    return len(v.states) + len(v.transitions) * s

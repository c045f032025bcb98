"""Bounded exploration of VASS configuration spaces.

Everything here is bound-relative: exploration prunes any configuration with
a counter above the budget's bound, so "no halting run" verdicts certify
nonexistence only within that bound.  Family verifiers pick bounds that
provably contain every halting run, which upgrades the certificate.

Search is deterministic: successors are expanded in the canonical transition
order of the Vass and results (including shortest-run tie-breaking and stats)
are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .compiler import CompiledProgram
from .errors import BudgetExceededError, ConfigCycleError, PolicyStuckError
from .expand import FlatProgram, LoopSpan
from .lang import Add, Goto, Halt, Init, Sub
from .vass import Configuration, Run, Transition, Vass


class Verdict(str, Enum):
    FOUND = "found"
    EXHAUSTED = "exhausted-within-bound"
    BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class SearchBudget:
    """Per-counter value bound plus node/depth budgets."""

    counter_bound: int
    max_configs: int = 1_000_000
    max_depth: int | None = None

    def __post_init__(self):
        if self.counter_bound < 0:
            raise ValueError("counter_bound must be >= 0")
        if self.max_configs < 1:
            raise ValueError("max_configs must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")


@dataclass(frozen=True)
class SearchStats:
    expanded: int
    frontier_peak: int
    depth: int


@dataclass(frozen=True)
class ReachResult:
    verdict: Verdict
    run: Run | None
    stats: SearchStats

    def to_json_obj(self, v: Vass) -> dict:
        obj: dict = {
            "verdict": self.verdict.value,
            "stats": {
                "expanded": self.stats.expanded,
                "frontier_peak": self.stats.frontier_peak,
                "depth": self.stats.depth,
            },
            "run": None,
        }
        if self.run is not None:
            tindex = {t: i for i, t in enumerate(v.transitions)}
            obj["run"] = {
                "initial": {
                    "state": self.run.initial.state,
                    "vector": [str(x) for x in self.run.initial.vector],
                },
                "steps": [tindex[t] for t in self.run.steps],
            }
        return obj


def run_from_indices(v: Vass, indices: list[int]) -> Run:
    """Rebuild a Run from serialized transition indices (source-anchored)."""
    return Run(v.source, tuple(v.transitions[i] for i in indices))


def _adjacency(v: Vass):
    index = {s: i for i, s in enumerate(v.states)}
    adj: list[list[tuple[tuple[int, ...], int, int]]] = [[] for _ in v.states]
    for tix, t in enumerate(v.transitions):
        adj[index[t.src]].append((t.delta, index[t.dst], tix))
    return index, adj


class _Packed:
    """Configurations packed into single ints: the state index in the low
    bits, then one fixed-width field per counter.  Fields are wide enough
    that any over/underflow lands above the bound and is rejected, so a
    successor is one integer addition plus one masked check per touched
    counter."""

    def __init__(self, v: Vass, bound: int):
        self.v = v
        self.bound = bound
        self.index = {s: i for i, s in enumerate(v.states)}
        self.sbits = max(1, (len(v.states) - 1).bit_length())
        max_amount = max((abs(d) for t in v.transitions for d in t.delta), default=0)
        self.wbits = max(1, (2 * (bound + max_amount) + 1).bit_length())
        self.smask = (1 << self.sbits) - 1
        self.cmask = (1 << self.wbits) - 1
        # per state: (packed delta, shifts of touched counter fields)
        self.adj: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in v.states]
        for t in v.transitions:
            pd = self.index[t.dst] - self.index[t.src]
            checks = []
            for i, d in enumerate(t.delta):
                if d:
                    shift = self.sbits + self.wbits * i
                    pd += d << shift
                    checks.append(shift)
            self.adj[self.index[t.src]].append((pd, tuple(checks)))

    def encode(self, cfg: Configuration) -> int:
        key = self.index[cfg.state]
        for i, x in enumerate(cfg.vector):
            key += x << (self.sbits + self.wbits * i)
        return key


def halting_reachable(v: Vass, budget: SearchBudget) -> ReachResult:
    """Existence-only variant of shortest_halting: same verdicts and the
    same BFS depth, but no run is reconstructed, which keeps memory linear
    in the visited-set size for multi-million-configuration spaces."""
    bound = budget.counter_bound
    if max(v.source.vector, default=0) > bound:
        return ReachResult(Verdict.EXHAUSTED, None, SearchStats(0, 0, 0))
    packed = _Packed(v, bound)
    src = packed.encode(v.source)
    tgt = packed.encode(v.target)
    if src == tgt:
        return ReachResult(Verdict.FOUND, Run(v.source, ()), SearchStats(0, 1, 0))
    adj = packed.adj
    smask = packed.smask
    cmask = packed.cmask
    visited = {src}
    frontier = [src]
    depth = 0
    peak = 1
    while frontier:
        depth += 1
        if budget.max_depth is not None and depth > budget.max_depth:
            return ReachResult(
                Verdict.BUDGET_EXCEEDED, None, SearchStats(len(visited), peak, depth - 1)
            )
        nxt: list[int] = []
        for key in frontier:
            for pd, checks in adj[key & smask]:
                nk = key + pd
                ok = True
                for sh in checks:
                    if ((nk >> sh) & cmask) > bound:
                        ok = False
                        break
                if not ok or nk in visited:
                    continue
                if nk == tgt:
                    return ReachResult(
                        Verdict.FOUND, None, SearchStats(len(visited), peak, depth)
                    )
                if len(visited) >= budget.max_configs:
                    return ReachResult(
                        Verdict.BUDGET_EXCEEDED, None, SearchStats(len(visited), peak, depth)
                    )
                visited.add(nk)
                nxt.append(nk)
        frontier = nxt
        if len(frontier) > peak:
            peak = len(frontier)
    return ReachResult(Verdict.EXHAUSTED, None, SearchStats(len(visited), peak, depth))


def _key(state_ix: int, vector: tuple[int, ...]) -> tuple[int, ...]:
    return (state_ix,) + vector


def shortest_halting(v: Vass, budget: SearchBudget) -> ReachResult:
    """BFS from the source over configurations within the counter bound.

    FOUND returns a minimum-length halting run (ties broken by canonical
    transition order); EXHAUSTED certifies that no halting run stays within
    the bound; BUDGET_EXCEEDED means the node or depth budget cut search off.
    """
    index, adj = _adjacency(v)
    bound = budget.counter_bound
    src = _key(index[v.source.state], v.source.vector)
    tgt = _key(index[v.target.state], v.target.vector)

    if max(v.source.vector, default=0) > bound:
        return ReachResult(Verdict.EXHAUSTED, None, SearchStats(0, 0, 0))
    if src == tgt:
        return ReachResult(Verdict.FOUND, Run(v.source, ()), SearchStats(0, 1, 0))

    parents: dict[tuple[int, ...], tuple[tuple[int, ...], int] | None] = {src: None}
    dq = deque([(src, 0)])
    expanded = 0
    frontier_peak = 1
    depth_seen = 0
    suppressed = False
    found_key = None

    while dq:
        key, depth = dq.popleft()
        depth_seen = max(depth_seen, depth)
        if budget.max_depth is not None and depth >= budget.max_depth:
            suppressed = True
            continue
        expanded += 1
        vec = key[1:]
        for delta, dst, tix in adj[key[0]]:
            nvec = tuple(a + b for a, b in zip(vec, delta))
            ok = True
            for x in nvec:
                if x < 0 or x > bound:
                    ok = False
                    break
            if not ok:
                continue
            nk = (dst,) + nvec
            if nk in parents:
                continue
            if len(parents) >= budget.max_configs:
                return ReachResult(
                    Verdict.BUDGET_EXCEEDED, None,
                    SearchStats(expanded, frontier_peak, depth_seen),
                )
            parents[nk] = (key, tix)
            if nk == tgt:
                found_key = nk
                break
            dq.append((nk, depth + 1))
        if found_key is not None:
            break
        if len(dq) > frontier_peak:
            frontier_peak = len(dq)

    if found_key is None:
        verdict = Verdict.BUDGET_EXCEEDED if suppressed else Verdict.EXHAUSTED
        return ReachResult(verdict, None, SearchStats(expanded, frontier_peak, depth_seen))

    steps: list[Transition] = []
    key = found_key
    while parents[key] is not None:
        prev, tix = parents[key]
        steps.append(v.transitions[tix])
        key = prev
    steps.reverse()
    run = Run(v.source, tuple(steps))
    return ReachResult(Verdict.FOUND, run, SearchStats(expanded, frontier_peak, len(steps)))


def reachable_configs(
    v: Vass, budget: SearchBudget, absorbing: frozenset[str] = frozenset()
) -> dict[str, set[tuple[int, ...]]]:
    """All configurations reachable within the bound, grouped by state.

    States in `absorbing` are not expanded (their configurations are still
    collected), which is how halt-completion drains are kept out of
    "values on arrival" collections.  Raises BudgetExceededError if the node
    budget is hit before exhaustion.
    """
    index, adj = _adjacency(v)
    bound = budget.counter_bound
    absorbing_ix = {index[s] for s in absorbing if s in index}
    out: dict[str, set[tuple[int, ...]]] = {}
    if max(v.source.vector, default=0) > bound:
        return out
    src = _key(index[v.source.state], v.source.vector)
    visited = {src}
    dq = deque([src])
    while dq:
        key = dq.popleft()
        out.setdefault(v.states[key[0]], set()).add(key[1:])
        if key[0] in absorbing_ix:
            continue
        vec = key[1:]
        for delta, dst, _tix in adj[key[0]]:
            nvec = tuple(a + b for a, b in zip(vec, delta))
            ok = True
            for x in nvec:
                if x < 0 or x > bound:
                    ok = False
                    break
            if not ok:
                continue
            nk = (dst,) + nvec
            if nk not in visited:
                if len(visited) >= budget.max_configs:
                    raise BudgetExceededError(
                        f"reachable-set exploration exceeded {budget.max_configs} configurations"
                    )
                visited.add(nk)
                dq.append(nk)
    return out


def final_vectors(
    v: Vass, budget: SearchBudget, at_state: str | None = None
) -> frozenset[tuple[int, ...]]:
    """Counter vectors over all configurations arriving at the final state,
    collected before any halt-completion drain fires."""
    state = at_state if at_state is not None else v.target.state
    reach = reachable_configs(v, budget, absorbing=frozenset({state}))
    return frozenset(reach.get(state, set()))


def final_values(
    v: Vass, counter_index: int, budget: SearchBudget, at_state: str | None = None
) -> frozenset[int]:
    """Set of values one counter takes at the final state (pre-completion)."""
    return frozenset(vec[counter_index] for vec in final_vectors(v, budget, at_state))


def count_halting_runs(v: Vass, budget: SearchBudget, cutoff: int = 1_000_000) -> int:
    """Number of distinct halting paths within the bound, saturated at `cutoff`.

    The bounded configuration graph must be acyclic (a cycle would make some
    counts infinite); a back edge raises ConfigCycleError.  This is a bounded
    check, not a proof about unbounded runs.
    """
    index, adj = _adjacency(v)
    bound = budget.counter_bound
    if max(v.source.vector, default=0) > bound:
        return 0
    src = _key(index[v.source.state], v.source.vector)
    tgt = _key(index[v.target.state], v.target.vector)

    def successors(key):
        vec = key[1:]
        out = []
        for delta, dst, _tix in adj[key[0]]:
            nvec = tuple(a + b for a, b in zip(vec, delta))
            ok = True
            for x in nvec:
                if x < 0 or x > bound:
                    ok = False
                    break
            if ok:
                out.append((dst,) + nvec)
        return out

    counts: dict[tuple[int, ...], int] = {}
    on_stack = {src}
    # frames: [key, children or None, next_child_index, accumulated count]
    stack: list[list] = [[src, None, 0, 1 if src == tgt else 0]]
    while stack:
        frame = stack[-1]
        key, children, ix, acc = frame
        if children is None:
            children = frame[1] = successors(key)
        if ix == len(children):
            counts[key] = min(acc, cutoff)
            on_stack.discard(key)
            stack.pop()
            if stack:
                stack[-1][3] = min(stack[-1][3] + counts[key], cutoff)
            continue
        frame[2] += 1
        child = children[ix]
        if child in counts:
            frame[3] = min(acc + counts[child], cutoff)
            continue
        if child in on_stack:
            raise ConfigCycleError(
                "configuration graph has a cycle; halting-run count undefined"
            )
        if len(counts) + len(on_stack) >= budget.max_configs:
            raise BudgetExceededError(
                f"run counting exceeded {budget.max_configs} configurations"
            )
        on_stack.add(child)
        stack.append([child, None, 0, 1 if child == tgt else 0])
    return counts[src]


# ---------------------------------------------------------------------------
# Canonical replay


@dataclass(frozen=True)
class DrainLoop:
    """Maximal iteration: exit only when `counter` is zero at the entry."""

    counter: str


@dataclass(frozen=True)
class CountedLoop:
    """Iterate the body exactly `iterations` times, then exit."""

    iterations: int


@dataclass(frozen=True)
class TakeBranch:
    """Decision for a plain two-way goto: take the second target or the first."""

    second: bool


LoopPolicy = DrainLoop | CountedLoop | TakeBranch


@dataclass(frozen=True)
class LoopObservation:
    entry_line: int
    iterations: tuple[int, ...]  # per activation
    exit_vectors: tuple[tuple[int, ...], ...]  # counters at each exit


@dataclass(frozen=True)
class RunProbe:
    loops: dict[int, LoopObservation]
    final_vector: tuple[int, ...]
    peak: tuple[int, ...]
    length: int

    def to_json_obj(self) -> dict:
        return {
            "loops": {
                str(entry): {
                    "iterations": list(obs.iterations),
                    "exit_vectors": [[str(x) for x in vec] for vec in obs.exit_vectors],
                }
                for entry, obs in sorted(self.loops.items())
            },
            "final_vector": [str(x) for x in self.final_vector],
            "peak": [str(x) for x in self.peak],
            "length": self.length,
        }


@dataclass(frozen=True)
class ReplayOutcome:
    run: Run | None  # None when not materialized
    probe: RunProbe
    halting: bool
    final: Configuration


def drain_policies(flat: FlatProgram) -> dict[int, LoopPolicy]:
    """Default maximal-iteration policy: each loop exits when the counter its
    body decrements first (at top nesting level) reaches zero.  Loops whose
    bodies only increment (pump loops) get no entry; callers supply those."""
    policies: dict[int, LoopPolicy] = {}
    spans = flat.loops
    for span in spans:
        nested_lines: set[int] = set()
        for other in spans:
            if span.entry < other.entry and other.back < span.back:
                nested_lines.update(range(other.entry, other.back + 1))
        for ln in range(span.body_start, span.back):
            if ln in nested_lines:
                continue
            cmd = flat.line(ln)
            if isinstance(cmd, Sub):
                policies[span.entry] = DrainLoop(cmd.counter)
                break
    return policies


class _Replay:
    def __init__(self, compiled: CompiledProgram, policy: dict[int, LoopPolicy], materialize: bool):
        self.compiled = compiled
        self.flat = compiled.program
        self.policy = policy
        self.materialize = materialize
        self.counters = self.flat.counters
        self.cix = {c: i for i, c in enumerate(self.counters)}
        self.n = len(self.flat.lines)
        self.vec = [0] * len(self.counters)
        self.peak = [0] * len(self.counters)
        self.length = 0
        self.steps: list[Transition] = []
        self.spans: dict[int, LoopSpan] = {s.entry: s for s in self.flat.loops}
        self.iter_count: dict[int, int] = {}
        self.counted_left: dict[int, int] = {}
        self.observations: dict[int, tuple[list[int], list[tuple[int, ...]]]] = {}
        self.body_info: dict[int, tuple[bool, dict[int, int], int]] = {}
        for span in self.flat.loops:
            self.body_info[span.entry] = self._analyze_body(span)

    def _analyze_body(self, span: LoopSpan):
        deltas: dict[int, int] = {}
        touched: set[int] = set()
        straight = True
        for ln in range(span.body_start, span.back):
            cmd = self.flat.line(ln)
            if isinstance(cmd, (Add, Sub)):
                ci = self.cix[cmd.counter]
                if ci in touched:
                    straight = False  # same counter twice: no bulk application
                touched.add(ci)
                deltas[ci] = deltas.get(ci, 0) + (cmd.amount if isinstance(cmd, Add) else -cmd.amount)
            else:
                straight = False
        return straight, deltas, span.back - span.body_start

    def _state(self, line: int) -> str:
        if line <= self.n:
            return self.compiled.line_states[line - 1]
        return self.compiled.halt_state

    def _emit(self, src_line: int, delta: tuple[int, ...], dst_line: int):
        if self.materialize:
            self.steps.append(Transition(self._state(src_line), delta, self._state(dst_line)))

    def _apply(self, ci: int, amount: int, line: int):
        nv = self.vec[ci] + amount
        if nv < 0:
            raise PolicyStuckError(
                f"line {line}: counter {self.counters[ci]!r} would go below zero"
            )
        self.vec[ci] = nv
        if nv > self.peak[ci]:
            self.peak[ci] = nv

    def _record_exit(self, entry: int):
        iters, exits = self.observations.setdefault(entry, ([], []))
        iters.append(self.iter_count.pop(entry, 0))
        exits.append(tuple(self.vec))

    def _zero_delta(self) -> tuple[int, ...]:
        return (0,) * len(self.counters)

    def _unit_delta(self, ci: int, amount: int) -> tuple[int, ...]:
        d = [0] * len(self.counters)
        d[ci] = amount
        return tuple(d)

    def _fast_forward(self, span: LoopSpan, n_iter: int):
        """Apply n_iter full iterations of a straight-line body, then exit."""
        straight, deltas, body_len = self.body_info[span.entry]
        assert straight
        if n_iter > 0:
            for ci, d in deltas.items():
                if d < 0 and self.vec[ci] + n_iter * d < 0:
                    raise PolicyStuckError(
                        f"loop at line {span.entry}: counter {self.counters[ci]!r} "
                        f"underflows after {n_iter} iterations"
                    )
            if self.materialize:
                body_cmds = [self.flat.line(ln) for ln in range(span.body_start, span.back)]
                for _ in range(n_iter):
                    self._emit(span.entry, self._zero_delta(), span.body_start)
                    for off, cmd in enumerate(body_cmds):
                        amount = cmd.amount if isinstance(cmd, Add) else -cmd.amount
                        ci = self.cix[cmd.counter]
                        self._emit(span.body_start + off, self._unit_delta(ci, amount),
                                   span.body_start + off + 1)
                    self._emit(span.back, self._zero_delta(), span.entry)
            for ci, d in deltas.items():
                end = self.vec[ci] + n_iter * d
                # each counter moves monotonically across iterations
                self.peak[ci] = max(self.peak[ci], self.vec[ci], end)
                self.vec[ci] = end
            self.length += n_iter * (body_len + 2)
        self.iter_count[span.entry] = self.iter_count.get(span.entry, 0) + n_iter
        self._record_exit(span.entry)
        self._emit(span.entry, self._zero_delta(), span.exit)
        self.length += 1

    def run(self) -> ReplayOutcome:
        flat, policy = self.flat, self.policy
        pc = 1
        guard = 0
        while pc <= self.n:
            guard += 1
            if guard > 50_000_000:
                raise PolicyStuckError("replay did not terminate (policy loops)")
            cmd = flat.line(pc)
            if isinstance(cmd, Init):
                self._emit(pc, self._zero_delta(), pc + 1)
                self.length += 1
                pc += 1
            elif isinstance(cmd, (Add, Sub)):
                amount = cmd.amount if isinstance(cmd, Add) else -cmd.amount
                ci = self.cix[cmd.counter]
                self._apply(ci, amount, pc)
                self._emit(pc, self._unit_delta(ci, amount), pc + 1)
                self.length += 1
                pc += 1
            elif isinstance(cmd, Halt):
                break
            elif isinstance(cmd, Goto):
                span = self.spans.get(pc)
                if span is not None:
                    pc = self._handle_loop_entry(span)
                elif cmd.first == cmd.second:
                    self._emit(pc, self._zero_delta(), cmd.first)
                    self.length += 1
                    pc = cmd.first
                else:
                    pol = policy.get(pc)
                    if not isinstance(pol, TakeBranch):
                        raise PolicyStuckError(f"line {pc}: no branch policy for goto")
                    target = cmd.second if pol.second else cmd.first
                    self._emit(pc, self._zero_delta(), target)
                    self.length += 1
                    pc = target
            else:
                raise PolicyStuckError(f"line {pc}: cannot replay {cmd!r}")

        halting = False
        if pc <= self.n and isinstance(flat.line(pc), Halt):
            self._drain_completion()
            tested_ix = [self.cix[c] for c in flat.line(pc).tested]
            halting = all(self.vec[i] == 0 for i in tested_ix)
        final_state = self.compiled.vass.target.state if pc <= self.n else self._state(pc)
        final = Configuration(final_state, tuple(self.vec))
        if pc > self.n:
            halting = final == self.compiled.vass.target
        probe = RunProbe(
            loops={
                entry: LoopObservation(entry, tuple(it), tuple(ex))
                for entry, (it, ex) in sorted(self.observations.items())
            },
            final_vector=tuple(self.vec),
            peak=tuple(self.peak),
            length=self.length,
        )
        run = Run(self.compiled.vass.source, tuple(self.steps)) if self.materialize else None
        return ReplayOutcome(run, probe, halting, final)

    def _handle_loop_entry(self, span: LoopSpan) -> int:
        pol = self.policy.get(span.entry)
        if pol is None:
            raise PolicyStuckError(f"line {span.entry}: no policy for loop")
        straight, deltas, _body_len = self.body_info[span.entry]
        if isinstance(pol, DrainLoop):
            ci = self.cix[pol.counter]
            if straight:
                dec = -deltas.get(ci, 0)
                if dec <= 0:
                    raise PolicyStuckError(
                        f"loop at line {span.entry} does not decrease {pol.counter!r}"
                    )
                value = self.vec[ci]
                if value % dec != 0:
                    raise PolicyStuckError(
                        f"loop at line {span.entry}: {pol.counter!r}={value} not divisible "
                        f"by per-iteration decrement {dec}"
                    )
                self._fast_forward(span, value // dec)
                return span.exit
            if self.vec[ci] == 0:
                self._record_exit(span.entry)
                self._emit(span.entry, self._zero_delta(), span.exit)
                self.length += 1
                return span.exit
            self.iter_count[span.entry] = self.iter_count.get(span.entry, 0) + 1
            self._emit(span.entry, self._zero_delta(), span.body_start)
            self.length += 1
            return span.body_start
        if isinstance(pol, CountedLoop):
            if straight:
                left = self.counted_left.pop(span.entry, pol.iterations)
                self._fast_forward(span, left)
                return span.exit
            left = self.counted_left.get(span.entry, pol.iterations)
            if left == 0:
                self.counted_left.pop(span.entry, None)
                self._record_exit(span.entry)
                self._emit(span.entry, self._zero_delta(), span.exit)
                self.length += 1
                return span.exit
            self.counted_left[span.entry] = left - 1
            self.iter_count[span.entry] = self.iter_count.get(span.entry, 0) + 1
            self._emit(span.entry, self._zero_delta(), span.body_start)
            self.length += 1
            return span.body_start
        raise PolicyStuckError(f"line {span.entry}: policy {pol!r} does not fit a loop")

    def _drain_completion(self):
        # Walk the drain chain synthesized by the compiler for untested counters.
        for ix, (state, counter) in enumerate(self.compiled.drain_chain):
            ci = self.cix[counter]
            count = self.vec[ci]
            if self.materialize:
                delta = self._unit_delta(ci, -1)
                for _ in range(count):
                    self.steps.append(Transition(state, delta, state))
            self.vec[ci] = 0
            self.length += count
            nxt = self.compiled.drain_chain[ix + 1][0] if ix + 1 < len(self.compiled.drain_chain) else None
            if nxt is not None:
                if self.materialize:
                    self.steps.append(Transition(state, self._zero_delta(), nxt))
                self.length += 1


def replay_canonical(
    compiled: CompiledProgram,
    policy: dict[int, LoopPolicy],
    materialize: bool = True,
) -> ReplayOutcome:
    """Deterministically replay the schedule described by `policy`.

    Probes (per-loop iteration counts and exit values, final vector, peaks,
    length) are recomputed from the walk itself.  Loops with straight-line
    bodies are fast-forwarded arithmetically, so doubly-exponential canonical
    runs can be measured without materializing them (materialize=False).
    Raises PolicyStuckError if the schedule deadlocks.
    """
    return _Replay(compiled, policy, materialize).run()

"""Automated level-by-level synthesis of modular-exponentiation operators.

Each composite power U**p is laid out as r levels, one per orbit
transition, in cycle-decomposition order. The level for transition
f(y) -> f(y + p mod r) is synthesized against the *trajectory* of its
source through the already-built prefix: earlier levels are free to move
states that have not yet been consumed, and the tracker follows them.

Two constraint tiers govern gate construction:

* hard: basis values already sealed as earlier outputs must never move;
  the bit-flip path is routed around them.
* soft: all other live trajectories should not move either, so control
  sets are kept tight enough to exclude them - except for the flip
  partner of the current step, which a NOT gate unavoidably swaps with
  the running value. That displacement is tracked, never lost.

Truncation then simply empties the last ``trnc_lv`` levels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .circuit import (
    Control,
    Gate,
    LeveledCircuit,
    VERSION_PER_POWER,
    VERSION_TRUNCATED,
)
from .modmath import CycleDecomposition, Orbit, cycle_decomposition


class ProtectedCollisionError(RuntimeError):
    """No bit-flip path exists around the protected set (internal bug signal)."""


def minimize_controls(
    fire_value: int,
    forbidden: Iterable[int],
    n_qubits: int,
    target: int,
) -> tuple[Control, ...]:
    """Smallest greedy control set that matches fire_value but no forbidden value.

    Starts from all n-1 non-target qubits with polarity matching
    fire_value's bits, then drops controls in descending qubit order,
    keeping a drop only if the relaxed pattern still matches nothing
    forbidden. Deterministic; with nothing to distinguish, the result is
    the empty control set.
    """
    forbidden = tuple(forbidden)
    controls = {
        q: Control(qubit=q, negated=(fire_value >> q) & 1 == 0)
        for q in range(n_qubits)
        if q != target
    }

    def matches(cs: dict[int, Control], v: int) -> bool:
        return all(((v >> c.qubit) & 1 == 0) == c.negated for c in cs.values())

    for q in sorted(controls, reverse=True):
        dropped = controls.pop(q)
        if any(matches(controls, v) for v in forbidden):
            controls[q] = dropped
    return tuple(sorted(controls.values()))


def _flip_path(current: int, target: int, blocked: frozenset[int], n_qubits: int) -> list[int]:
    """Shortest single-bit-flip path from current to target avoiding blocked values.

    BFS with neighbors expanded in ascending bit order, so an unobstructed
    path flips the differing bits in ascending index order.
    """
    if current == target:
        return [current]
    prev: dict[int, int] = {current: -1}
    queue: deque[int] = deque([current])
    while queue:
        u = queue.popleft()
        for b in range(n_qubits):
            v = u ^ (1 << b)
            if v in prev or v in blocked:
                continue
            prev[v] = u
            if v == target:
                path = [v]
                while path[-1] != current:
                    path.append(prev[path[-1]])
                path.reverse()
                return path
            queue.append(v)
    raise ProtectedCollisionError(
        f"no path {current} -> {target} around {len(blocked)} protected values"
    )


def synth_level(
    current: int,
    target: int,
    protected: Iterable[int],
    n_qubits: int,
    avoid: Optional[Iterable[int]] = None,
) -> list[Gate]:
    """Gates mapping current -> target while fixing every protected value.

    ``avoid`` lists additional basis values the controls should exclude
    where possible (defaults to the protected set). Each step's flip
    partner is exempt: a NOT gate always swaps the running value with its
    single-bit twin, so a twin inside ``avoid`` is displaced and the
    caller's trajectory tracking picks it up. Returns [] when current
    already equals target (an automatic blank level).
    """
    protected = frozenset(protected)
    if current in protected or target in protected:
        raise ValueError("endpoints may not be protected")
    avoid_set = set(protected if avoid is None else avoid)
    gates: list[Gate] = []
    path = _flip_path(current, target, protected, n_qubits)
    for u, v in zip(path, path[1:]):
        bit = (u ^ v).bit_length() - 1
        soft = avoid_set - {u, v}
        gates.append(Gate(target=bit, controls=minimize_controls(u, soft, n_qubits, bit)))
        if v in avoid_set:
            avoid_set.discard(v)
            avoid_set.add(u)
    return gates


@dataclass
class SynthesisState:
    """Mutable tracker threaded through one operator synthesis.

    ``trajectories`` maps each orbit state (a circuit input) to its current
    intermediate value at the frontier; ``protected`` holds the sealed
    outputs every later gate must leave fixed.
    """

    trajectories: dict[int, int]
    protected: set[int] = field(default_factory=set)
    level_index: int = 0

    def advance(self, gates: Sequence[Gate]) -> None:
        for state in self.trajectories:
            w = self.trajectories[state]
            for gate in gates:
                w = gate.apply(w)
            self.trajectories[state] = w


def transition_order(decomp: CycleDecomposition) -> list[tuple[int, int]]:
    """Level assignment: cycles concatenated in head order, one transition each."""
    out: list[tuple[int, int]] = []
    for cycle in decomp.cycles:
        L = len(cycle)
        for i in range(L):
            out.append((cycle[i], cycle[(i + 1) % L]))
    return out


def synth_me_operator(orbit: Orbit, p: int, trnc_lv: int = 0) -> LeveledCircuit:
    """Synthesize U**p on the orbit, then empty the last trnc_lv levels."""
    r = orbit.r
    if not 0 <= trnc_lv < r:
        raise ValueError(f"trnc_lv={trnc_lv} outside [0, {r})")
    n = orbit.instance.n
    decomp = cycle_decomposition(orbit, p)
    state = SynthesisState(trajectories={s: s for s in orbit.states})
    levels: list[tuple[Gate, ...]] = []
    for src, tgt in transition_order(decomp):
        cur = state.trajectories[src]
        gates = synth_level(
            cur, tgt, state.protected, n, avoid=state.trajectories.values()
        )
        levels.append(tuple(gates))
        state.advance(gates)
        state.protected.add(tgt)
        state.level_index += 1
    if trnc_lv:
        levels[r - trnc_lv :] = [()] * trnc_lv
    return LeveledCircuit(
        n_qubits=n,
        power=p,
        levels=tuple(levels),
        trnc_lv=trnc_lv,
        version=VERSION_TRUNCATED if trnc_lv else VERSION_PER_POWER,
    )


def synth_all_powers(orbit: Orbit, m: int, trnc_lv: int = 0) -> list[LeveledCircuit]:
    """Circuits for p = 2**0 ... 2**(m-1), sharing equal-action duplicates.

    Powers congruent mod r act identically on the orbit and synthesize to
    identical gate lists, so they share one circuit object.
    """
    r = orbit.r
    cache: dict[int, LeveledCircuit] = {}
    out = []
    for q in range(m):
        p = 1 << q
        key = p % r
        if key not in cache:
            cache[key] = synth_me_operator(orbit, p, trnc_lv)
        out.append(cache[key])
    return out

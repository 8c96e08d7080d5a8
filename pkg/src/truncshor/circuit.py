"""Gate-level IR for reversible circuits plus two evaluation backends.

A circuit is an ordered list of levels, each an ordered list of NOT /
multi-controlled-NOT gates. Controls carry polarity: a negated control
fires on 0 instead of 1 and stands for the usual X-conjugation, which
``lower_negative_controls`` expands when a polarity-free circuit is needed.

Bit convention: qubit k is bit k of the basis integer, so qubit 0 is the
least significant bit (the OpenQASM/Qiskit ordering). That convention is
used everywhere, including serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


class DimensionMismatchError(ValueError):
    """State vector length does not match the circuit's qubit count."""


VERSION_CONCATENATED = "concatenated"
VERSION_PER_POWER = "per_power"
VERSION_TRUNCATED = "truncated"
_VERSIONS = (VERSION_CONCATENATED, VERSION_PER_POWER, VERSION_TRUNCATED)


@dataclass(frozen=True, order=True)
class Control:
    """A control qubit; ``negated`` means the gate fires when the bit is 0."""

    qubit: int
    negated: bool = False


@dataclass(frozen=True)
class Gate:
    """NOT on ``target`` when every control matches; no controls = plain X."""

    target: int
    controls: tuple[Control, ...] = ()

    def __post_init__(self) -> None:
        qubits = [c.qubit for c in self.controls]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate control qubits in {qubits}")
        if self.target in qubits:
            raise ValueError(f"target {self.target} is also a control")
        object.__setattr__(self, "controls", tuple(sorted(self.controls)))

    def fires(self, w: int) -> bool:
        return all(((w >> c.qubit) & 1 == 0) == c.negated for c in self.controls)

    def apply(self, w: int) -> int:
        return w ^ (1 << self.target) if self.fires(w) else w


@dataclass(frozen=True)
class LeveledCircuit:
    """An operator as levels of gates; trailing ``trnc_lv`` levels are empty.

    ``power`` records which composite power this circuit realizes;
    ``version`` is one of "concatenated", "per_power", "truncated".
    """

    n_qubits: int
    power: int
    levels: tuple[tuple[Gate, ...], ...]
    trnc_lv: int = 0
    version: str = VERSION_PER_POWER

    def __post_init__(self) -> None:
        if self.version not in _VERSIONS:
            raise ValueError(f"unknown version {self.version!r}")
        if not 0 <= self.trnc_lv <= len(self.levels):
            raise ValueError(f"trnc_lv={self.trnc_lv} out of range")
        for level in self.levels:
            for gate in level:
                qubits = [gate.target] + [c.qubit for c in gate.controls]
                if any(q < 0 or q >= self.n_qubits for q in qubits):
                    raise ValueError(f"gate {gate} outside {self.n_qubits} qubits")
        for level in self.levels[len(self.levels) - self.trnc_lv :]:
            if level:
                raise ValueError("truncated levels must be empty")
        object.__setattr__(
            self, "levels", tuple(tuple(level) for level in self.levels)
        )

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def gates(self) -> Iterator[Gate]:
        for level in self.levels:
            yield from level

    def gate_count(self) -> int:
        return sum(len(level) for level in self.levels)


@dataclass(frozen=True)
class PermutationTable:
    """Certificate of a circuit's action on a chosen domain of basis states."""

    domain: tuple[int, ...]
    image: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"domain": list(self.domain), "image": list(self.image)}


def apply_to_basis(circuit: LeveledCircuit, w: int) -> int:
    """Evaluate the circuit on one basis state, level by level, left to right."""
    if not 0 <= w < (1 << circuit.n_qubits):
        raise ValueError(f"basis state {w} outside {circuit.n_qubits} qubits")
    for gate in circuit.gates():
        w = gate.apply(w)
    return w


def apply_to_basis_array(circuit: LeveledCircuit, values: np.ndarray) -> np.ndarray:
    """Vectorized apply_to_basis over an integer array of basis states."""
    out = np.array(values, dtype=np.int64, copy=True)
    for gate in circuit.gates():
        mask = np.ones(out.shape, dtype=bool)
        for c in gate.controls:
            bit = (out >> c.qubit) & 1
            mask &= (bit == 0) if c.negated else (bit == 1)
        out[mask] ^= 1 << gate.target
    return out


def _apply_gate_dense(state: np.ndarray, gate_target: int,
                      controls: Sequence[tuple[int, bool]]) -> None:
    """Swap amplitude pairs (w, w^target) wherever the controls match, in place."""
    idx = np.arange(state.shape[0])
    mask = ((idx >> gate_target) & 1) == 0
    for qubit, negated in controls:
        bit = (idx >> qubit) & 1
        mask &= (bit == 0) if negated else (bit == 1)
    src = idx[mask]
    dst = src | (1 << gate_target)
    state[src], state[dst] = state[dst].copy(), state[src].copy()


def apply_to_statevector(circuit: LeveledCircuit, state: np.ndarray) -> np.ndarray:
    """Dense reference backend: same action as apply_to_basis, extended linearly.

    All gates are basis permutations, so the 2-norm is preserved exactly.
    """
    dim = 1 << circuit.n_qubits
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != (dim,):
        raise DimensionMismatchError(
            f"expected state of length {dim}, got shape {state.shape}"
        )
    out = state.copy()
    for gate in circuit.gates():
        _apply_gate_dense(out, gate.target, [(c.qubit, c.negated) for c in gate.controls])
    return out


def permutation_table(circuit: LeveledCircuit, domain: Iterable[int]) -> PermutationTable:
    dom = tuple(domain)
    return PermutationTable(
        domain=dom, image=tuple(apply_to_basis(circuit, w) for w in dom)
    )


def concatenate_power(u: LeveledCircuit, p: int) -> LeveledCircuit:
    """Repeat u's levels p times: the brute-force composite operator.

    Used as a correctness oracle against per-power synthesis, not in the
    production pipeline (it wastes a factor r of gates).
    """
    if p < 1:
        raise ValueError(f"power must be >= 1, got {p}")
    return LeveledCircuit(
        n_qubits=u.n_qubits,
        power=u.power * p,
        levels=u.levels * p,
        trnc_lv=u.trnc_lv,
        version=VERSION_CONCATENATED,
    )


def restricted_equal(c1: LeveledCircuit, c2: LeveledCircuit,
                     domain: Iterable[int]) -> bool:
    """True iff the two circuits act identically on the given domain."""
    if c1.n_qubits != c2.n_qubits:
        raise ValueError("circuits must have the same qubit count")
    dom = tuple(domain)
    return permutation_table(c1, dom) == permutation_table(c2, dom)


def lower_negative_controls(circuit: LeveledCircuit) -> LeveledCircuit:
    """Expand each negated control into an X-sandwich around a positive control."""
    new_levels = []
    for level in circuit.levels:
        new_level: list[Gate] = []
        for gate in level:
            negated = [c.qubit for c in gate.controls if c.negated]
            for q in negated:
                new_level.append(Gate(target=q))
            new_level.append(
                Gate(
                    target=gate.target,
                    controls=tuple(Control(qubit=c.qubit) for c in gate.controls),
                )
            )
            for q in negated:
                new_level.append(Gate(target=q))
        new_levels.append(tuple(new_level))
    return LeveledCircuit(
        n_qubits=circuit.n_qubits,
        power=circuit.power,
        levels=tuple(new_levels),
        trnc_lv=circuit.trnc_lv,
        version=circuit.version,
    )


def to_json_dict(circuit: LeveledCircuit) -> dict:
    """Normative JSON schema: zero-control gates serialize as "x", others "mcx"."""
    levels = []
    for level in circuit.levels:
        out = []
        for gate in level:
            if not gate.controls:
                out.append({"gate": "x", "target": gate.target})
            else:
                out.append(
                    {
                        "gate": "mcx",
                        "target": gate.target,
                        "controls": [
                            {"q": c.qubit, "neg": c.negated} for c in gate.controls
                        ],
                    }
                )
        levels.append(out)
    return {
        "n_qubits": circuit.n_qubits,
        "power": circuit.power,
        "trnc_lv": circuit.trnc_lv,
        "version": circuit.version,
        "levels": levels,
    }


def from_json_dict(data: dict) -> LeveledCircuit:
    levels = []
    for level in data["levels"]:
        gates = []
        for g in level:
            kind = g["gate"]
            if kind == "x":
                gates.append(Gate(target=g["target"]))
            elif kind == "mcx":
                gates.append(
                    Gate(
                        target=g["target"],
                        controls=tuple(
                            Control(qubit=c["q"], negated=c["neg"])
                            for c in g.get("controls", ())
                        ),
                    )
                )
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        levels.append(tuple(gates))
    return LeveledCircuit(
        n_qubits=data["n_qubits"],
        power=data["power"],
        levels=tuple(levels),
        trnc_lv=data["trnc_lv"],
        version=data["version"],
    )


def to_json(circuit: LeveledCircuit, indent: int | None = None) -> str:
    return json.dumps(to_json_dict(circuit), indent=indent)


def from_json(text: str) -> LeveledCircuit:
    return from_json_dict(json.loads(text))

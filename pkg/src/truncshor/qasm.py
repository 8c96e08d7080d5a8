"""OpenQASM 3 text export for leveled circuits.

Negated controls are lowered to X-conjugation before emission, so the
output uses only ``x`` and ``ctrl(k) @ x``. One barrier separates
consecutive levels.
"""

from __future__ import annotations

from .circuit import LeveledCircuit, lower_negative_controls


def to_qasm3(circuit: LeveledCircuit) -> str:
    lowered = lower_negative_controls(circuit)
    lines = [
        "OPENQASM 3.0;",
        'include "stdgates.inc";',
        f"qubit[{lowered.n_qubits}] q;",
    ]
    last = lowered.num_levels - 1
    for i, level in enumerate(lowered.levels):
        for gate in level:
            if not gate.controls:
                lines.append(f"x q[{gate.target}];")
            else:
                operands = ", ".join(
                    f"q[{c.qubit}]" for c in gate.controls
                ) + f", q[{gate.target}]"
                k = len(gate.controls)
                modifier = "ctrl @" if k == 1 else f"ctrl({k}) @"
                lines.append(f"{modifier} x {operands};")
        if i != last:
            lines.append("barrier q;")
    return "\n".join(lines) + "\n"

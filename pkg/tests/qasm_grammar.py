"""Reference line grammar for the OpenQASM 3 subset this project emits.

Validates version header, stdgates include, one qubit-register
declaration, and the statement forms ``x``, ``ctrl[(k)] @ x`` and
``barrier``; checks operand counts, index bounds, and operand
distinctness. Raises ValueError with the offending line on any mismatch.
"""

import re

_VERSION = re.compile(r"^OPENQASM 3(\.\d+)?;$")
_INCLUDE = re.compile(r'^include "[\w.]+";$')
_QUBIT_DECL = re.compile(r"^qubit\[(\d+)\] (\w+);$")
_X_STMT = re.compile(r"^x (\w+)\[(\d+)\];$")
_CTRL_STMT = re.compile(r"^ctrl(?:\((\d+)\))? @ x ((?:\w+\[\d+\], )+\w+\[\d+\]);$")
_BARRIER = re.compile(r"^barrier (\w+);$|^barrier;$")
_OPERAND = re.compile(r"^(\w+)\[(\d+)\]$")


def validate_qasm3(text: str) -> None:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not _VERSION.match(lines[0]):
        raise ValueError(f"missing or malformed version statement: {lines[:1]}")
    pos = 1
    while pos < len(lines) and _INCLUDE.match(lines[pos]):
        pos += 1
    registers: dict[str, int] = {}
    while pos < len(lines):
        m = _QUBIT_DECL.match(lines[pos])
        if not m:
            break
        registers[m.group(2)] = int(m.group(1))
        pos += 1
    if not registers:
        raise ValueError("no qubit declaration")

    def check_operand(op: str) -> tuple[str, int]:
        m = _OPERAND.match(op)
        if not m:
            raise ValueError(f"malformed operand {op!r}")
        reg, idx = m.group(1), int(m.group(2))
        if reg not in registers:
            raise ValueError(f"unknown register {reg!r}")
        if idx >= registers[reg]:
            raise ValueError(f"index {idx} out of range for {reg}[{registers[reg]}]")
        return reg, idx

    for line in lines[pos:]:
        if _BARRIER.match(line):
            continue
        m = _X_STMT.match(line)
        if m:
            check_operand(f"{m.group(1)}[{m.group(2)}]")
            continue
        m = _CTRL_STMT.match(line)
        if m:
            k = int(m.group(1)) if m.group(1) else 1
            operands = [check_operand(op.strip()) for op in m.group(2).split(",")]
            if len(operands) != k + 1:
                raise ValueError(f"ctrl({k}) needs {k + 1} operands: {line!r}")
            if len(set(operands)) != len(operands):
                raise ValueError(f"duplicate operands: {line!r}")
            continue
        raise ValueError(f"unrecognized statement: {line!r}")

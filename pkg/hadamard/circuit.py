"""Noncommutative arithmetic circuits with fan-in two.

Gates are stored in topological order; a gate refers to earlier gates by
position. ``Mul(l, r)`` computes left-times-right, so word order matters.
"""

import logging
from dataclasses import dataclass
from typing import Any, Tuple, Union

from . import config
from .errors import InputError, ResourceCapError, Violation
from .poly import NCPoly
from .scalar import RationalField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Input:
    var: int


@dataclass(frozen=True)
class Const:
    value: Any


@dataclass(frozen=True)
class Add:
    l: int
    r: int


@dataclass(frozen=True)
class Mul:
    l: int
    r: int


Gate = Union[Input, Const, Add, Mul]


@dataclass(frozen=True)
class Circuit:
    n_vars: int
    field: Any
    gates: Tuple[Gate, ...]
    output: int

    def __len__(self):
        return len(self.gates)


def validate(circuit):
    if not circuit.gates:
        return Violation("gates", "circuit has no gates")
    for g, gate in enumerate(circuit.gates):
        where = f"gate {g}"
        if isinstance(gate, Input):
            if not isinstance(gate.var, int) or not 0 <= gate.var < circuit.n_vars:
                return Violation(where, f"input variable {gate.var!r} outside [0, {circuit.n_vars})")
        elif isinstance(gate, Const):
            try:
                if circuit.field(gate.value) != gate.value:
                    return Violation(where, f"constant {gate.value!r} is not an element of {circuit.field}")
            except (InputError, ZeroDivisionError) as e:
                return Violation(where, str(e))
        elif isinstance(gate, (Add, Mul)):
            for child in (gate.l, gate.r):
                if not isinstance(child, int) or not 0 <= child < g:
                    return Violation(where, f"reference {child!r} must point to an earlier gate")
        else:
            return Violation(where, f"unknown gate {gate!r}")
    if not isinstance(circuit.output, int) or not 0 <= circuit.output < len(circuit.gates):
        return Violation("output", f"output {circuit.output!r} is not a gate")
    return None


def check_circuit(circuit):
    violation = validate(circuit)
    if violation is not None:
        logger.error("invalid circuit: %s", violation)
        raise InputError(f"invalid circuit: {violation}")
    return circuit


def gate_degrees(circuit):
    """Formal degree of every gate: inputs 1, constants 0, add max, mul sum."""
    degrees = []
    for gate in circuit.gates:
        if isinstance(gate, Input):
            degrees.append(1)
        elif isinstance(gate, Const):
            degrees.append(0)
        elif isinstance(gate, Add):
            degrees.append(max(degrees[gate.l], degrees[gate.r]))
        else:
            degrees.append(degrees[gate.l] + degrees[gate.r])
    return degrees


def formal_degree(circuit):
    return gate_degrees(circuit)[circuit.output]


def evaluate(circuit, point):
    if len(point) != circuit.n_vars:
        raise InputError(f"point has {len(point)} coordinates, circuit has {circuit.n_vars} variables")
    field = circuit.field
    values = [field(v) for v in point]
    out = []
    for gate in circuit.gates:
        if isinstance(gate, Input):
            out.append(values[gate.var])
        elif isinstance(gate, Const):
            out.append(field(gate.value))
        elif isinstance(gate, Add):
            out.append(out[gate.l] + out[gate.r])
        else:
            out.append(out[gate.l] * out[gate.r])
    return out[circuit.output]


def _needed(circuit):
    needed = [False] * len(circuit.gates)
    needed[circuit.output] = True
    for g in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[g]
        if needed[g] and isinstance(gate, (Add, Mul)):
            needed[gate.l] = needed[gate.r] = True
    return needed


def expand_gates(circuit, degree_cap=None, max_terms=None):
    """Polynomial computed at every gate the output depends on (None elsewhere)."""
    degree_cap = config.resolve(degree_cap, config.MAX_DEGREE)
    cap = config.resolve(max_terms, config.MAX_TERMS)
    degree = formal_degree(circuit)
    if degree > degree_cap:
        raise ResourceCapError(f"formal degree {degree} exceeds the degree cap {degree_cap}")
    n, field = circuit.n_vars, circuit.field
    needed = _needed(circuit)
    polys = []
    for g, gate in enumerate(circuit.gates):
        if not needed[g]:
            polys.append(None)
        elif isinstance(gate, Input):
            polys.append(NCPoly.variable(n, gate.var, field))
        elif isinstance(gate, Const):
            polys.append(NCPoly.constant(n, gate.value, field))
        elif isinstance(gate, Add):
            polys.append(polys[gate.l] + polys[gate.r])
        else:
            polys.append(polys[gate.l].multiply(polys[gate.r], max_terms=cap))
        if polys[-1] is not None and len(polys[-1]) > cap:
            raise ResourceCapError(f"gate {g} expands to more than {cap} terms")
    return polys


def expand(circuit, degree_cap=None, max_terms=None):
    return expand_gates(circuit, degree_cap, max_terms)[circuit.output]


def is_monotone(circuit):
    """True iff the circuit is over Q and every constant is positive."""
    if not isinstance(circuit.field, RationalField):
        raise InputError(f"monotonicity is defined over Q, circuit is over {circuit.field}")
    return all(gate.value > 0 for gate in circuit.gates if isinstance(gate, Const))


def coefficient_signs(circuit, degree_cap=None, max_terms=None):
    """Set of signs (+1/-1) among the coefficients of the expanded output."""
    poly = expand(circuit, degree_cap, max_terms)
    return {1 if c > 0 else -1 for c in poly.terms.values()}


def size(circuit):
    """(gate count, wire count)."""
    wires = sum(2 for gate in circuit.gates if isinstance(gate, (Add, Mul)))
    return len(circuit.gates), wires


class CircuitBuilder:
    """Appends gates in topological order, reusing identical gates."""

    def __init__(self, n_vars, field):
        self.n_vars = n_vars
        self.field = field
        self.gates = []
        self._index = {}

    def _gate(self, gate):
        if gate not in self._index:
            self._index[gate] = len(self.gates)
            self.gates.append(gate)
        return self._index[gate]

    def input(self, var):
        return self._gate(Input(var))

    def const(self, value):
        return self._gate(Const(self.field(value)))

    def add(self, l, r):
        return self._gate(Add(l, r))

    def mul(self, l, r):
        return self._gate(Mul(l, r))

    def sum_of(self, ids):
        """Left-folded sum; None for an empty list."""
        acc = None
        for g in ids:
            acc = g if acc is None else self.add(acc, g)
        return acc

    def product_of(self, ids):
        acc = None
        for g in ids:
            acc = g if acc is None else self.mul(acc, g)
        return acc

    def build(self, output):
        if output is None:
            output = self.const(0)
        return check_circuit(Circuit(self.n_vars, self.field, tuple(self.gates), output))


def compact(circuit):
    """Drop gates the output does not depend on."""
    needed = _needed(circuit)
    remap = {}
    gates = []
    for g, gate in enumerate(circuit.gates):
        if not needed[g]:
            continue
        if isinstance(gate, Add):
            gate = Add(remap[gate.l], remap[gate.r])
        elif isinstance(gate, Mul):
            gate = Mul(remap[gate.l], remap[gate.r])
        remap[g] = len(gates)
        gates.append(gate)
    return Circuit(circuit.n_vars, circuit.field, tuple(gates), remap[circuit.output])


def propagate_zeros(circuit):
    """Equivalent circuit without zero constants.

    A zero constant only survives as the whole circuit when the output is
    syntactically zero. Gates the output does not depend on are dropped.
    """
    builder = CircuitBuilder(circuit.n_vars, circuit.field)
    needed = _needed(circuit)
    image = {}
    for g, gate in enumerate(circuit.gates):
        if not needed[g]:
            continue
        if isinstance(gate, Input):
            image[g] = builder.input(gate.var)
        elif isinstance(gate, Const):
            image[g] = builder.const(gate.value) if gate.value else None
        elif isinstance(gate, Add):
            l, r = image[gate.l], image[gate.r]
            image[g] = r if l is None else l if r is None else builder.add(l, r)
        else:
            l, r = image[gate.l], image[gate.r]
            image[g] = None if l is None or r is None else builder.mul(l, r)
    output = image[circuit.output]
    if output is None:
        result = Circuit(circuit.n_vars, circuit.field, (Const(circuit.field.zero),), 0)
    else:
        result = compact(builder.build(output))
    logger.debug("zero propagation: %d -> %d gates", len(circuit.gates), len(result.gates))
    return result


def is_zero_circuit(circuit):
    return len(circuit.gates) == 1 and isinstance(circuit.gates[0], Const) and not circuit.gates[0].value


def monotone_form(circuit):
    """Zero-propagated copy of a circuit over Q, which must then be monotone.

    The constant-zero circuit counts as monotone here.
    """
    if not isinstance(circuit.field, RationalField):
        raise InputError(f"monotonicity is defined over Q, circuit is over {circuit.field}")
    propagated = propagate_zeros(check_circuit(circuit))
    if not is_zero_circuit(propagated) and not is_monotone(propagated):
        logger.error("circuit has negative constants after zero propagation")
        raise InputError("expected a monotone circuit over Q (zero constants are allowed)")
    return propagated

"""JSON codec: raw records in, clean domain values out (and back).

Loaders accept what a person would plausibly write by hand (integers for
rational coefficients, a missing ``"field"`` key) and log what they reject.
Dumpers are canonical: the same value always serializes to the same bytes.
"""

import json
import logging
from fractions import Fraction

from . import abp as abp_mod
from . import circuit as circuit_mod
from .abp import ABP, LinearForm
from .cfg import AcyclicCFG, Terminal, check_grammar
from .circuit import Add, Circuit, Const, Input, Mul
from .errors import InputError
from .linalg import Matrix
from .pit import Digraph
from .poly import CPoly, NCPoly, multilinear_monomial, support_of
from .scalar import RATIONALS, field_from_descriptor

logger = logging.getLogger(__name__)


def _default(value):
    if isinstance(value, Fraction):
        return str(value)
    if hasattr(value, "model_dump"):
        return value.model_dump()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if hasattr(value, "item"):
        # numpy scalars coming out of pandas tables
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dump_json(data):
    """Canonical JSON text: sorted keys, compact separators, trailing newline."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=_default) + "\n"


def read_json(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        logger.error("cannot read %s: %s", path, e)
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        logger.error("%s is not valid JSON: %s", path, e)
        raise InputError(f"{path} is not valid JSON: {e}") from e


def _require(data, key, what):
    if not isinstance(data, dict):
        raise InputError(f"{what} must be a JSON object, got {type(data).__name__}")
    if key not in data:
        logger.error("%s is missing %r", what, key)
        raise InputError(f"{what} is missing {key!r}")
    return data[key]


def _int(value, what):
    if not isinstance(value, int) or isinstance(value, bool):
        raise InputError(f"{what} must be an integer, got {value!r}")
    return value


def _list(value, what):
    if not isinstance(value, list):
        raise InputError(f"{what} must be a list, got {value!r}")
    return value


# fields and coefficients

def dump_field(field):
    return field.descriptor()


def load_field(data, default=None):
    """Field named by ``data["field"]``, else ``default`` (Q when None)."""
    if isinstance(data, dict) and data.get("field") is not None:
        return field_from_descriptor(data["field"])
    return default if default is not None else RATIONALS


def dump_coeff(value, field):
    return field.format(value)


def load_coeff(raw, field):
    if isinstance(raw, (bool, float)):
        raise InputError(f"coefficients are exact strings, integers or vectors, got {raw!r}")
    return field(raw)


# polynomials

def dump_poly(poly):
    if isinstance(poly, NCPoly):
        kind = "nc"
        terms = [{"word": list(m), "coeff": dump_coeff(c, poly.field)} for m, c in poly.items()]
    else:
        kind = "commutative"
        terms = []
        for m, c in poly.items():
            entry = {"support": list(support_of(m))} if all(e <= 1 for e in m) else {"exponents": list(m)}
            entry["coeff"] = dump_coeff(c, poly.field)
            terms.append(entry)
    return {"kind": kind, "nvars": poly.n_vars, "field": dump_field(poly.field), "terms": terms}


def _poly_kind(data, terms):
    kind = data.get("kind")
    if kind is not None:
        if kind not in ("nc", "commutative"):
            raise InputError(f"unknown polynomial kind {kind!r}")
        return kind
    if any(isinstance(t, dict) and ("support" in t or "exponents" in t) for t in terms):
        return "commutative"
    return "nc"


def load_poly(data, default_field=None):
    """NCPoly from ``word`` terms, CPoly from ``support``/``exponents`` terms."""
    n = _int(_require(data, "nvars", "polynomial"), "nvars")
    field = load_field(data, default_field)
    terms = _list(_require(data, "terms", "polynomial"), "terms")
    kind = _poly_kind(data, terms)
    merged = {}
    for position, term in enumerate(terms):
        what = f"term {position}"
        coeff = load_coeff(_require(term, "coeff", what), field)
        if kind == "nc":
            monomial = tuple(_list(_require(term, "word", what), f"{what} word"))
        elif "support" in term:
            monomial = multilinear_monomial(n, _list(term["support"], f"{what} support"))
        else:
            monomial = tuple(_list(_require(term, "exponents", what), f"{what} exponents"))
        merged[monomial] = merged[monomial] + coeff if monomial in merged else coeff
    return (NCPoly if kind == "nc" else CPoly)(n, field, merged)


# matrices

def dump_matrix(matrix):
    return {"rows": matrix.rows, "cols": matrix.cols, "field": dump_field(matrix.field),
            "entries": [dump_coeff(v, matrix.field) for v in matrix.entries]}


def load_matrix(data, default_field=None):
    rows = _int(_require(data, "rows", "matrix"), "rows")
    cols = _int(_require(data, "cols", "matrix"), "cols")
    field = load_field(data, default_field)
    entries = _list(_require(data, "entries", "matrix"), "entries")
    return Matrix(rows, cols, field, tuple(load_coeff(v, field) for v in entries))


# ABPs

def dump_label(label):
    return {"const": dump_coeff(label.constant, label.field),
            "coeffs": {str(v): dump_coeff(c, label.field) for v, c in label.coeffs}}


def load_label(data, field):
    if not isinstance(data, dict):
        raise InputError(f"edge label must be an object, got {data!r}")
    coeffs = data.get("coeffs") or {}
    if not isinstance(coeffs, dict):
        raise InputError(f"label coeffs must be an object, got {coeffs!r}")
    parsed = []
    for key, value in coeffs.items():
        try:
            var = int(key)
        except ValueError as e:
            raise InputError(f"variable key {key!r} is not an integer") from e
        parsed.append((var, load_coeff(value, field)))
    return LinearForm.make(field, load_coeff(data.get("const", "0"), field), parsed)


def dump_abp(program):
    edges = [{"from": list(start), "to": list(end), "label": dump_label(label)}
             for (start, end), label in sorted(program.edges.items(), key=lambda kv: kv[0])]
    return {"nvars": program.n_vars, "field": dump_field(program.field),
            "layers": list(program.layer_sizes), "edges": edges}


def load_abp(data, default_field=None):
    """Validated ABP; parallel edges are summed."""
    n = _int(_require(data, "nvars", "ABP"), "nvars")
    field = load_field(data, default_field)
    layers = [_int(s, "layer size") for s in _list(_require(data, "layers", "ABP"), "layers")]
    edges = []
    for position, edge in enumerate(_list(_require(data, "edges", "ABP"), "edges")):
        what = f"edge {position}"
        start = _list(_require(edge, "from", what), f"{what} from")
        end = _list(_require(edge, "to", what), f"{what} to")
        if len(start) != 2 or len(end) != 2:
            raise InputError(f"{what}: nodes are [layer, index] pairs")
        edges.append((tuple(_int(v, what) for v in start), tuple(_int(v, what) for v in end),
                      load_label(_require(edge, "label", what), field)))
    return abp_mod.from_edges(n, layers, edges, field)


# circuits

def dump_circuit(circuit):
    gates = []
    for gate in circuit.gates:
        if isinstance(gate, Input):
            gates.append({"op": "in", "var": gate.var})
        elif isinstance(gate, Const):
            gates.append({"op": "const", "value": dump_coeff(gate.value, circuit.field)})
        else:
            gates.append({"op": "add" if isinstance(gate, Add) else "mul", "l": gate.l, "r": gate.r})
    return {"nvars": circuit.n_vars, "field": dump_field(circuit.field), "gates": gates, "output": circuit.output}


def _operands(raw, what, normalize_fanin):
    if "args" in raw:
        args = [_int(a, what) for a in _list(raw["args"], f"{what} args")]
    else:
        args = [_int(_require(raw, "l", what), what), _int(_require(raw, "r", what), what)]
    if len(args) < 2:
        raise InputError(f"{what}: sums and products need at least two arguments")
    if len(args) > 2 and not normalize_fanin:
        logger.error("%s has fan-in %d", what, len(args))
        raise InputError(f"{what} has fan-in {len(args)}; pass --normalize-fanin to fold it into binary gates")
    return args


def load_circuit(data, default_field=None, normalize_fanin=False):
    """Validated circuit. With ``normalize_fanin`` wide gates are folded left to right."""
    n = _int(_require(data, "nvars", "circuit"), "nvars")
    field = load_field(data, default_field)
    raw_gates = _list(_require(data, "gates", "circuit"), "gates")
    gates = []
    image = {}

    def ref(g, what):
        if g not in image:
            raise InputError(f"{what}: reference {g} must point to an earlier gate")
        return image[g]

    for position, raw in enumerate(raw_gates):
        what = f"gate {position}"
        op = _require(raw, "op", what)
        if op == "in":
            gates.append(Input(_int(_require(raw, "var", what), what)))
        elif op == "const":
            gates.append(Const(load_coeff(_require(raw, "value", what), field)))
        elif op in ("add", "mul"):
            make = Add if op == "add" else Mul
            args = [ref(a, what) for a in _operands(raw, what, normalize_fanin)]
            acc = args[0]
            for arg in args[1:]:
                gates.append(make(acc, arg))
                acc = len(gates) - 1
            image[position] = acc
            continue
        else:
            raise InputError(f"{what}: unknown op {op!r}")
        image[position] = len(gates) - 1
    output = ref(_int(_require(data, "output", "circuit"), "output"), "output")
    return circuit_mod.check_circuit(Circuit(n, field, tuple(gates), output))


# grammars

def _dump_symbol(symbol):
    return {"t": symbol.index} if isinstance(symbol, Terminal) else symbol


def dump_grammar(grammar):
    return {"nonterminals": list(grammar.nonterminals), "terminals": grammar.n_terminals, "start": grammar.start,
            "productions": [{"lhs": lhs, "rhs": [_dump_symbol(s) for s in rhs]} for lhs, rhs in grammar.productions]}


def _load_symbol(raw, what):
    if isinstance(raw, str):
        return raw
    if isinstance(raw, dict) and "t" in raw:
        return Terminal(_int(raw["t"], what))
    raise InputError(f"{what}: symbol {raw!r} is neither a nonterminal name nor {{\"t\": index}}")


def load_grammar(data):
    nonterminals = _list(_require(data, "nonterminals", "grammar"), "nonterminals")
    terminals = _int(_require(data, "terminals", "grammar"), "terminals")
    start = _require(data, "start", "grammar")
    productions = []
    for position, raw in enumerate(_list(_require(data, "productions", "grammar"), "productions")):
        what = f"production {position}"
        rhs = _list(_require(raw, "rhs", what), f"{what} rhs")
        productions.append((_require(raw, "lhs", what), tuple(_load_symbol(s, what) for s in rhs)))
    return check_grammar(AcyclicCFG.make(nonterminals, terminals, start, productions))


# digraphs

def dump_digraph(graph):
    return {"vertices": graph.vertices, "edges": [list(e) for e in graph.edges], "s": graph.s, "t": graph.t}


def load_digraph(data):
    vertices = _int(_require(data, "vertices", "graph"), "vertices")
    edges = []
    for position, edge in enumerate(_list(_require(data, "edges", "graph"), "edges")):
        edge = _list(edge, f"edge {position}")
        if len(edge) != 2:
            raise InputError(f"edge {position} must be a [u, v] pair")
        edges.append((_int(edge[0], "edge"), _int(edge[1], "edge")))
    return Digraph(vertices, tuple(edges), _int(data.get("s", 0), "s"), _int(data.get("t", 1), "t"))


def load_program(data, default_field=None, normalize_fanin=False):
    """ABP or circuit, told apart by their keys."""
    if isinstance(data, dict) and "layers" in data:
        return load_abp(data, default_field)
    if isinstance(data, dict) and "gates" in data:
        return load_circuit(data, default_field, normalize_fanin)
    raise InputError("expected an ABP (with \"layers\") or a circuit (with \"gates\")")


def dump_value(value):
    """JSON form of any domain value this module knows."""
    if isinstance(value, (NCPoly, CPoly)):
        return dump_poly(value)
    if isinstance(value, ABP):
        return dump_abp(value)
    if isinstance(value, Circuit):
        return dump_circuit(value)
    if isinstance(value, AcyclicCFG):
        return dump_grammar(value)
    if isinstance(value, Matrix):
        return dump_matrix(value)
    if isinstance(value, Digraph):
        return dump_digraph(value)
    raise InputError(f"no JSON form for {type(value).__name__}")

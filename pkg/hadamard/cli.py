"""Command-line interface: ``python -m hadamard <command> ...``.

Results go to stdout (or ``--output``) as canonical JSON; diagnostics go to
stderr. Exit codes: 0 when the command ran (verdicts live in the JSON), 2 for
bad input, 3 when a resource cap was hit.
"""

import argparse
import logging
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from . import abp as abp_mod
from . import cfg as cfg_mod
from . import circuit as circuit_mod
from . import codec, config, lblab, metrics, pit, products
from .errors import ConfigError, InputError, ResourceCapError
from .poly import NCPoly, corr
from .scalar import parse_field_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3


class Invocation(BaseModel):
    """Everything needed to replay a run."""

    model_config = ConfigDict(frozen=True)

    command: str
    inputs: List[str] = []
    field: str = "q"
    seed: Optional[int] = None
    threads: Optional[int] = None
    max_terms: Optional[int] = None
    max_degree: Optional[int] = None
    output: Optional[str] = None
    normalize_fanin: bool = False
    options: Dict[str, Any] = {}


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be >= 1")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed {text!r} must fit in an unsigned 64-bit integer")
    return value


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number")


def _word(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of variable indices")


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="q", help="q, fp:<p> or fpk:<p>:<k>; used when an input has no field")
    common.add_argument("--seed", type=_seed, default=None)
    common.add_argument("--threads", type=_positive, default=None)
    common.add_argument("--max-terms", type=_positive, default=None)
    common.add_argument("--max-degree", type=_positive, default=None)
    common.add_argument("--output", default=None, help="write the result JSON here instead of stdout")
    common.add_argument("--log-level", default=None)
    common.add_argument("--normalize-fanin", action="store_true",
                        help="fold circuit gates with more than two arguments into binary gates")
    return common


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="hadamard", description="Hadamard products of noncommutative polynomials.")
    commands = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name, help_text):
        sub = group.add_parser(name, parents=[common], help=help_text)
        return sub

    pit_parser = commands.add_parser("pit", help="identity test for an ABP")
    pit_group = pit_parser.add_subparsers(dest="method", required=True)
    for method, text in (("det", "over Q via P o P at the all-ones point"),
                         ("span", "span of coefficient-matrix products, any field"),
                         ("rand", "randomized evaluation over a finite field"),
                         ("brute", "full expansion")):
        sub = leaf(pit_group, method, text)
        sub.add_argument("input")
        if method == "rand":
            sub.add_argument("--trials", type=_positive, default=20)

    had = commands.add_parser("hadamard", help="Hadamard product constructions")
    had_group = had.add_subparsers(dest="kind", required=True)
    sub = leaf(had_group, "abp", "ABP o ABP")
    sub.add_argument("left")
    sub.add_argument("right")
    sub = leaf(had_group, "circuit-abp", "circuit o ABP")
    sub.add_argument("circuit")
    sub.add_argument("abp")

    sub = leaf(commands, "nisan", "Nisan matrix ranks of a polynomial, ABP or circuit")
    sub.add_argument("input")
    sub = leaf(commands, "expand", "expand an ABP or circuit into a polynomial")
    sub.add_argument("input")

    grammar = commands.add_parser("cfg", help="acyclic grammars and monotone circuits")
    cfg_group = grammar.add_subparsers(dest="action", required=True)
    sub = leaf(cfg_group, "to-circuit", "circuit counting derivation trees")
    sub.add_argument("input")
    sub = leaf(cfg_group, "from-circuit", "grammar for the monomials of a monotone circuit")
    sub.add_argument("input")
    sub = leaf(cfg_group, "count", "derivation trees of one word")
    sub.add_argument("input")
    sub.add_argument("--word", type=_word, required=True, help="comma-separated variable indices")
    sub = leaf(cfg_group, "intersect", "words in both languages")
    sub.add_argument("left")
    sub.add_argument("right")
    sub.add_argument("--max-len", type=_positive, default=None)
    for name in ("gen-l1", "gen-l2"):
        sub = leaf(cfg_group, name, "palindrome grammar family")
        sub.add_argument("--n", type=_positive, required=True)

    reduce_parser = commands.add_parser("reduce", help="reductions to identity testing")
    reduce_group = reduce_parser.add_subparsers(dest="reduction", required=True)
    sub = leaf(reduce_group, "det2abp", "integer matrix to a determinant ABP")
    sub.add_argument("input")
    sub = leaf(reduce_group, "reach2abp", "digraph to a reachability ABP")
    sub.add_argument("input")

    lab = commands.add_parser("lab", help="experiments with the explicit polynomial F")
    lab_group = lab.add_subparsers(dest="experiment", required=True)
    sub = leaf(lab_group, "build-f", "coefficient sums and correlations of F and F'")
    sub.add_argument("--t", type=_positive, required=True)
    sub.add_argument("--p", type=_positive, required=True)
    sub = leaf(lab_group, "corr", "correlation of F with Hadamard products of product polynomials")
    sub.add_argument("--t", type=_positive, required=True)
    sub.add_argument("--p", type=_positive, required=True)
    sub.add_argument("--trials", type=_positive, default=20)
    sub.add_argument("--eps", type=_fraction, default=Fraction(1, 3))
    sub = leaf(lab_group, "expsum", "exponential sums over random subsets of F_2^p")
    sub.add_argument("--p", type=_positive, required=True)
    sub.add_argument("--s", type=_positive, default=2)
    sub.add_argument("--samples", type=_positive, default=10)
    sub = leaf(lab_group, "perm", "the permanent as a Hadamard product")
    sub.add_argument("--n", type=_positive, required=True)
    return parser


_PATH_KEYS = ("input", "left", "right", "circuit", "abp")
_GLOBAL_KEYS = ("command", "method", "kind", "action", "reduction", "experiment", "field", "seed", "threads",
                "max_terms", "max_degree", "output", "log_level", "normalize_fanin")


def _invocation(args):
    words = [args.command] + [getattr(args, k) for k in ("method", "kind", "action", "reduction", "experiment")
                              if getattr(args, k, None)]
    options = {k: v for k, v in vars(args).items() if k not in _PATH_KEYS + _GLOBAL_KEYS}
    return Invocation(
        command=" ".join(words),
        inputs=[getattr(args, k) for k in _PATH_KEYS if getattr(args, k, None)],
        field=args.field,
        seed=args.seed,
        threads=args.threads,
        max_terms=args.max_terms,
        max_degree=args.max_degree,
        output=args.output,
        normalize_fanin=args.normalize_fanin,
        options={k: (str(v) if isinstance(v, Fraction) else list(v) if isinstance(v, tuple) else v)
                 for k, v in options.items()},
    )


@contextmanager
def _caps(args):
    """Apply --max-terms / --max-degree for the duration of one command."""
    saved = (config.MAX_TERMS, config.MAX_DEGREE)
    if args.max_terms is not None:
        config.MAX_TERMS = args.max_terms
    if args.max_degree is not None:
        config.MAX_DEGREE = args.max_degree
    try:
        yield
    finally:
        config.MAX_TERMS, config.MAX_DEGREE = saved


class _Context:
    def __init__(self, args):
        self.args = args
        self.field = parse_field_spec(args.field)

    def read(self, path):
        return codec.read_json(path)

    def program(self, path):
        return codec.load_program(self.read(path), self.field, self.args.normalize_fanin)

    def abp(self, path):
        return codec.load_abp(self.read(path), self.field)

    def circuit(self, path):
        return codec.load_circuit(self.read(path), self.field, self.args.normalize_fanin)

    def grammar(self, path):
        return codec.load_grammar(self.read(path))


def _cmd_pit(ctx):
    args = ctx.args
    if args.method == "brute":
        verdict = pit.pit_bruteforce(ctx.program(args.input))
    else:
        program = ctx.abp(args.input)
        verdict = pit.pit_verdict(program, args.method, trials=getattr(args, "trials", 20),
                                  seed=args.seed, threads=args.threads)
    return verdict.model_dump()


def _cmd_hadamard(ctx):
    args = ctx.args
    if args.kind == "abp":
        left, right = ctx.abp(args.left), ctx.abp(args.right)
        build = products.build_hadamard_abp(left, right, args.threads)
        return {"abp": codec.dump_abp(build.result), "report": metrics.hadamard_abp_metrics(build, left, right)}
    circuit, program = ctx.circuit(args.circuit), ctx.abp(args.abp)
    build = products.build_hadamard_circuit_abp(circuit, program)
    return {"circuit": codec.dump_circuit(build.circuit),
            "report": metrics.circuit_product_metrics(build, circuit, program)}


def _expand(source):
    if isinstance(source, abp_mod.ABP):
        return abp_mod.expand(source)
    return circuit_mod.expand(source)


def _cmd_nisan(ctx):
    data = ctx.read(ctx.args.input)
    if isinstance(data, dict) and "terms" in data:
        poly = codec.load_poly(data, ctx.field)
    else:
        poly = _expand(codec.load_program(data, ctx.field, ctx.args.normalize_fanin))
    if not isinstance(poly, NCPoly):
        raise InputError("Nisan matrices are defined for noncommutative polynomials")
    parts = []
    for k, part in sorted(poly.homogeneous_parts().items()):
        parts.append(metrics.nisan_metrics(part, abp_mod.nisan_ranks(part)))
    return {"parts": parts, "total": sum(p["complexity"] for p in parts)}


def _cmd_expand(ctx):
    return codec.dump_poly(_expand(ctx.program(ctx.args.input)))


def _words(found):
    return [list(w) for w in sorted(found, key=lambda w: (len(w), w))]


def _cmd_cfg(ctx):
    args = ctx.args
    if args.action == "to-circuit":
        grammar = ctx.grammar(args.input)
        circuit = cfg_mod.cfg_to_circuit(grammar)
        return {"circuit": codec.dump_circuit(circuit),
                "report": {**metrics.circuit_metrics(circuit), "grammar_size": cfg_mod.size(grammar)}}
    if args.action == "from-circuit":
        circuit = ctx.circuit(args.input)
        grammar = cfg_mod.circuit_to_cfg(circuit)
        return {"grammar": codec.dump_grammar(grammar), "report": metrics.grammar_metrics(grammar, circuit)}
    if args.action == "count":
        grammar = ctx.grammar(args.input)
        return {"word": list(args.word), "count": cfg_mod.count_derivations(grammar, args.word)}
    if args.action == "intersect":
        common = cfg_mod.intersect_bruteforce(ctx.grammar(args.left), ctx.grammar(args.right), args.max_len)
        return {"words": _words(common), "count": len(common)}
    build = cfg_mod.build_L1_grammar if args.action == "gen-l1" else cfg_mod.build_L2_grammar
    grammar = build(args.n)
    return {"grammar": codec.dump_grammar(grammar), "report": metrics.grammar_metrics(grammar)}


def _cmd_reduce(ctx):
    args = ctx.args
    data = ctx.read(args.input)
    if args.reduction == "det2abp":
        program = pit.det_to_abp(codec.load_matrix(data, ctx.field))
    else:
        program = pit.reach_to_abp(codec.load_digraph(data))
    return codec.dump_abp(program)


def _params(args):
    params = lblab.ExplicitParams(args.t, args.p)
    return {"t": params.t, "p": params.p, "n": params.n}, params


def _cmd_lab(ctx):
    args = ctx.args
    if args.experiment == "build-f":
        _, params = _params(args)
        F = lblab.build_F(params, args.threads)
        F_prime = lblab.build_F_prime(params, F)
        report = metrics.build_f_report(params, F, F_prime, corr(F, F_prime))
        report["plus_one"] = lblab.count_plus_one(params, F)
        return report
    if args.experiment == "corr":
        header, params = _params(args)
        F = lblab.build_F(params, args.threads)
        rows = lblab.product_battery(params, args.trials, args.seed, args.eps, F, args.threads)
        return {"params": header, "eps": str(args.eps), "seed": config.resolve(args.seed, config.SEED),
                "battery": metrics.battery_table(rows)}
    if args.experiment == "expsum":
        rows = lblab.exp_sum_samples(args.p, args.s, args.samples, args.seed)
        return {"p": args.p, "s": args.s, "seed": config.resolve(args.seed, config.SEED),
                "sums": metrics.exp_sum_table(rows)}
    f, g = lblab.permanent_hadamard(args.n)
    product = f.hadamard(g)
    return {"n": args.n, "f_terms": len(f), "g_terms": len(g), "permanent": codec.dump_poly(product),
            "matches_permutation_sum": product == lblab.permanent_polynomial(args.n)}


_COMMANDS = {
    "pit": _cmd_pit,
    "hadamard": _cmd_hadamard,
    "nisan": _cmd_nisan,
    "expand": _cmd_expand,
    "cfg": _cmd_cfg,
    "reduce": _cmd_reduce,
    "lab": _cmd_lab,
}


def _setup_logging(level):
    level = (level or config.LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise InputError(f"unknown log level {level!r}")
    logging.basicConfig(stream=sys.stderr, level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror or e}") from e


def run(argv=None):
    """Parse ``argv``, run one command and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        _setup_logging(args.log_level)
        invalid = config.validate_config()
        if invalid:
            raise InputError(f"invalid HADAMARD_* settings: {', '.join(invalid)}")
        invocation = _invocation(args)
        logger.info("invocation %s", invocation.model_dump_json())
        with _caps(args):
            result = _COMMANDS[args.command](_Context(args))
        _emit(codec.dump_json(result), args.output)
    except ResourceCapError as e:
        logger.error("resource cap: %s", e)
        return EXIT_CAP
    except (InputError, ConfigError, ZeroDivisionError) as e:
        logger.error("input error: %s", e)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run())

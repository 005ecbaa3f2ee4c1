"""Batch command-line front end.

Exit codes: 0 result computed, 1 usage or input error, 2 capacity exceeded,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import random
import sys
from typing import Optional

from . import arith, categoricity, library, semantics, syntax, transforms
from .syntax import Formula, Vocabulary, render_formula

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_INVARIANT = 0, 1, 2, 3

ZFC_POOL_VOCAB = Vocabulary((("e1", 2), ("e2", 2)), ())


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Input files


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _split_declarations(text: str) -> tuple[Vocabulary | None, list[str]]:
    """Separate ``rel``/``fun`` declaration lines from the formula lines."""
    decls, body = [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head in ("rel", "fun") and len(line.split()) == 3 and line.split()[2].isdigit():
            decls.append(line)
        else:
            body.append(line)
    vocab = Vocabulary.from_text("\n".join(decls)) if decls else None
    return vocab, body


def read_formula_file(path: str) -> tuple[Formula, Vocabulary]:
    """A sentence, optionally preceded by ``rel``/``fun`` declarations."""
    vocab, body = _split_declarations(_read(path))
    if not body:
        raise UsageError(f"{path}: no formula")
    text = " ".join(body)
    if vocab is None:
        return syntax.parse_sentence(text)
    f = syntax.parse_formula(text, vocab, free=())
    return f, vocab


def read_vocab_file(path: str) -> tuple[Vocabulary, Optional[Formula]]:
    """Declarations alone, or a formula file whose vocabulary is wanted."""
    vocab, body = _split_declarations(_read(path))
    if not body:
        return vocab or Vocabulary(), None
    f, v = read_formula_file(path)
    return v, f


def read_pool_file(path: str, default: Optional[Vocabulary] = None) -> tuple[list[Formula], Vocabulary]:
    """One formula per line; free variables allowed, so symbols must be declared."""
    vocab, body = _split_declarations(_read(path))
    vocab = vocab or default
    if vocab is None:
        raise UsageError(f"{path}: pool files need rel/fun declarations")
    return [syntax.parse_formula(line, vocab) for line in body], vocab


def read_theory_file(path: str) -> transforms.TheoryInstanceSet:
    return transforms.TheoryInstanceSet.from_text(_read(path))


def _sentence(args) -> tuple[Formula, Vocabulary]:
    if args.key and args.formula:
        raise UsageError("give either --formula or --key, not both")
    if args.key:
        entry = library.get(args.key)
        try:
            return entry.sentence, entry.vocab
        except TypeError as exc:
            raise UsageError(str(exc)) from None
    if args.formula:
        return read_formula_file(args.formula)
    raise UsageError("--formula or --key is required")


def _structure(path: str):
    return semantics.parse_structure(_read(path))


def _capacity(args) -> int:
    if args.capacity is not None:
        if args.capacity < 1:
            raise UsageError("--capacity must be positive")
        return args.capacity
    return semantics.default_capacity()


def _positive(args, name: str, default: Optional[int] = None) -> int:
    value = getattr(args, name)
    if value is None:
        if default is None:
            raise UsageError(f"--{name} is required")
        return default
    if value < 1:
        raise UsageError(f"--{name} must be positive")
    return value


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _bool(b: bool) -> str:
    return "true" if b else "false"


# ---------------------------------------------------------------------------
# Commands


def cmd_parse(args):
    f, vocab = _sentence(args)
    syms, fo, so = syntax.free_symbols(f)
    lines = [f"formula {render_formula(f)}"]
    lines += [f"vocab {line}" for line in vocab.to_text().splitlines()]
    lines += [f"sentence {_bool(syntax.is_sentence(f))}", f"so-depth {syntax.so_depth(f)}",
              f"free-symbols {' '.join(sorted(syms))}".rstrip()]
    _emit(args, "\n".join(lines) + "\n")


def cmd_render(args):
    f, _ = _sentence(args)
    _emit(args, render_formula(f) + "\n")


def cmd_relativize(args):
    f, _ = _sentence(args)
    _emit(args, render_formula(transforms.relativize(f, args.predicate)) + "\n")


def cmd_prime(args):
    f, vocab = _sentence(args)
    ren = transforms.priming(vocab)
    _emit(args, render_formula(transforms.prime(f, ren)) + "\n")


def cmd_res(args):
    _, vocab = _sentence(args)
    _emit(args, render_formula(transforms.res_sentence(vocab, args.predicate)) + "\n")


def cmd_iso(args):
    _, vocab = _sentence(args)
    f = transforms.iso_sentence(vocab, transforms.priming(vocab), mode=args.mode)
    _emit(args, render_formula(f) + "\n")


def cmd_cat(args):
    f, vocab = _sentence(args)
    _emit(args, render_formula(transforms.cat(f, mode=args.mode, vocab=vocab)) + "\n")


def cmd_catplus(args):
    f, vocab = _sentence(args)
    _emit(args, render_formula(transforms.cat_plus(f, mode=args.mode, vocab=vocab)) + "\n")


def cmd_eval(args):
    f, _ = _sentence(args)
    if not args.model:
        raise UsageError("--model is required")
    M = _structure(args.model)
    if isinstance(M, semantics.HenkinStructure):
        M = M.base
    value = semantics.eval_full(M, f, capacity=_capacity(args))
    _emit(args, f"value {_bool(value)}\n")


def cmd_eval_henkin(args):
    f, _ = _sentence(args)
    if not args.model:
        raise UsageError("--model is required")
    H = _structure(args.model)
    if not isinstance(H, semantics.HenkinStructure):
        raise UsageError(f"{args.model} declares no families")
    _emit(args, f"value {_bool(semantics.eval_henkin(H, f))}\n")


def cmd_closure_check(args):
    if not args.model or not args.formula:
        raise UsageError("--model and --formula (a pool or theory file) are required")
    H = _structure(args.model)
    if not isinstance(H, semantics.HenkinStructure):
        raise UsageError(f"{args.model} declares no families")
    if _read(args.formula).lstrip().startswith("theory"):
        instances = read_theory_file(args.formula)
    else:
        pool, vocab = read_pool_file(args.formula, H.base.vocab)
        arities = [args.arity] if args.arity else sorted(H.relations) or [1]
        sentences = []
        for m in arities:
            sentences += transforms.comprehension_instances(vocab, pool, m).sentences
        instances = transforms.TheoryInstanceSet("comprehension", tuple(sentences))
    rep = semantics.check_closure(H, instances)
    lines = [f"closed {_bool(rep.ok)}"]
    lines += [f"symbol {name} in-family {_bool(v)}" for name, v in sorted(rep.symbols_in_family.items())]
    for i, r in enumerate(rep.results, 1):
        lines.append(f"instance {i} {'holds' if r.holds else 'fails'}")
        if r.witness:
            lines.append("witness " + " ".join(f"{k}={_witness_value(v)}" for k, v in sorted(r.witness.items())))
        if r.missing is not None:
            lines.append("missing " + " ".join(" ".join(map(str, t)) for t in sorted(r.missing)))
    _emit(args, "\n".join(lines) + "\n")


def _witness_value(v) -> str:
    if isinstance(v, frozenset):
        return "{" + ",".join("(" + " ".join(map(str, t)) + ")" for t in sorted(v)) + "}"
    if isinstance(v, tuple):
        return "[" + " ".join(map(str, v)) + "]"
    return str(v)


def cmd_enum(args):
    if args.key:
        entry = library.get(args.key)
        vocab, f = entry.vocab, entry.sentence
    elif args.formula:
        vocab, f = read_vocab_file(args.formula)
    else:
        raise UsageError("--formula (or a declarations file) or --key is required")
    n = _positive(args, "size")
    cap = _capacity(args)
    if f is None:
        found = list(categoricity.enumerate_structures(vocab, n, args.up_to_iso, cap))
    else:
        found = list(categoricity.models_of(f, vocab, n, cap))
        if args.up_to_iso:
            reps = {}
            for M in found:
                reps.setdefault(categoricity.canonical_key(M), M)
            found = list(reps.values())
    lines = [f"size {n}", f"count {len(found)}"]
    for i, M in enumerate(found, 1):
        lines += [f"structure {i}", semantics.structure_to_text(M).rstrip("\n"), "end"]
    _emit(args, "\n".join(lines) + "\n")


def cmd_find_iso(args):
    if not args.model or len(args.model) != 2:
        raise UsageError("--model must be given exactly twice")
    A, B = (_structure(p) for p in args.model)
    A = A.base if isinstance(A, semantics.HenkinStructure) else A
    B = B.base if isinstance(B, semantics.HenkinStructure) else B
    cert = categoricity.find_isomorphism(A, B)
    if cert is None:
        _emit(args, "isomorphic false\n")
    else:
        _emit(args, "isomorphic true\nmap " + " ".join(f"{a}->{b}" for a, b in enumerate(cert.mapping)) + "\n")


def cmd_check_cat(args):
    f, vocab = _sentence(args)
    rep = categoricity.categorical_up_to(f, _positive(args, "kappa"), vocab, _capacity(args),
                                         _positive(args, "jobs", 1))
    _emit(args, rep.to_text())


def cmd_cat_truth(args):
    f, _ = _sentence(args)
    kappa = _positive(args, "kappa")
    value = categoricity.cat_truth(f, kappa, args.mode, _capacity(args))
    _emit(args, f"kappa {kappa}\nmode {args.mode}\ncat-truth {_bool(value)}\n")


def cmd_lemma_check(args):
    f, _ = _sentence(args)
    rep = categoricity.lemma_eq_check(f, _positive(args, "kappa"), args.mode, _capacity(args))
    _emit(args, rep.to_text())


def cmd_unique_iso(args):
    f, _ = _sentence(args)
    rep = categoricity.unique_isomorphism(f, _positive(args, "kappa"), _capacity(args))
    _emit(args, rep.to_text())


def cmd_gen_comprehension(args):
    if not args.formula:
        raise UsageError("--formula (a pool file) is required")
    pool, vocab = read_pool_file(args.formula)
    m = args.arity or 1
    _emit(args, transforms.comprehension_instances(vocab, pool, m).to_text())


def cmd_gen_induction(args):
    if args.formula:
        pool, _ = read_pool_file(args.formula, transforms.DOUBLED_VOCAB)
        params: tuple = (("pool", str(len(pool))),)
    else:
        d = _positive(args, "depth", 1)
        pool = transforms.induction_pool(d)
        params = (("depth", str(d)),)
    sentences = tuple(transforms.induction_instance(phi) for phi in pool)
    _emit(args, transforms.TheoryInstanceSet("induction", sentences, params).to_text())


def cmd_gen_pa_doubled(args):
    d = _positive(args, "depth", 1)
    theory = transforms.peano_doubled(transforms.induction_pool(d), params=(("depth", str(d)),))
    _emit(args, theory.to_text())


def cmd_gen_zfc(args):
    if not args.formula:
        raise UsageError("--formula (a pool file over e1, e2) is required")
    pool, _ = read_pool_file(args.formula, ZFC_POOL_VOCAB)
    _emit(args, transforms.zfc_doubled(pool).to_text())


def cmd_build_phi(args):
    psi, phi = transforms.build_graph_formula()
    _emit(args, f"psi {render_formula(psi)}\nphi {render_formula(phi)}\n")


def cmd_verify_phi(args):
    bound = _positive(args, "size", 20)
    M = arith.conjugated_doubled() if args.conjugated else arith.standard_doubled()
    _emit(args, arith.verify_phi_graph(M, bound).to_text())


def cmd_export_prover(args):
    if args.key:
        entry = library.get(args.key)
        if isinstance(entry.content, transforms.TheoryInstanceSet):
            problem = entry.content
        elif isinstance(entry.content, tuple):
            raise UsageError(f"{args.key} holds templates; instantiate them with a gen-* command first")
        else:
            problem = transforms.TheoryInstanceSet(args.key, (entry.content,))
    elif args.formula:
        if _read(args.formula).lstrip().startswith("theory"):
            problem = read_theory_file(args.formula)
        else:
            f, _ = read_formula_file(args.formula)
            problem = transforms.TheoryInstanceSet("problem", (f,))
    else:
        raise UsageError("--formula or --key is required")
    conjecture = None
    if args.isom:
        conjecture = transforms.isom_statement()
    elif args.conjecture:
        conjecture, _ = read_formula_file(args.conjecture)
    _emit(args, arith.export_prover_text(problem, conjecture))


def cmd_catalogue(args):
    if args.action == "list":
        _emit(args, "".join(f"{e.key} {e.note}\n" for e in library.entries()))
        return
    if not args.name:
        raise UsageError("catalogue show needs a key")
    _emit(args, library.get(args.name).to_text())


# ---------------------------------------------------------------------------
# Argument parsing

_COMMANDS = {
    "parse": (cmd_parse, "parse a sentence and report its vocabulary", "fk"),
    "render": (cmd_render, "print the canonical text of a sentence", "fk"),
    "relativize": (cmd_relativize, "relativize a sentence to a unary predicate", "fkp"),
    "prime": (cmd_prime, "rename every symbol to its primed copy", "fk"),
    "res": (cmd_res, "the nonempty, function-closed predicate sentence", "fkp"),
    "iso": (cmd_iso, "the isomorphism sentence for the vocabulary", "fkM"),
    "cat": (cmd_cat, "the closed categoricity sentence", "fkM"),
    "catplus": (cmd_catplus, "the categoricity sentence with symbols free", "fkM"),
    "eval": (cmd_eval, "evaluate under full semantics", "fkmc"),
    "eval-henkin": (cmd_eval_henkin, "evaluate over the model's families", "fkm"),
    "closure-check": (cmd_closure_check, "check comprehension closure of a Henkin model", "fma"),
    "enum": (cmd_enum, "enumerate structures or models of one size", "fksci"),
    "find-iso": (cmd_find_iso, "search for an isomorphism between two structures", "m2"),
    "check-cat": (cmd_check_cat, "categoricity up to a size by enumeration", "fkKcj"),
    "cat-truth": (cmd_cat_truth, "truth of the closed categoricity sentence at a size", "fkKcM"),
    "lemma-check": (cmd_lemma_check, "compare the three categoricity checks", "fkKcM"),
    "unique-iso": (cmd_unique_iso, "count isomorphisms between models", "fkKc"),
    "gen-comprehension": (cmd_gen_comprehension, "comprehension instances for a pool", "fa"),
    "gen-induction": (cmd_gen_induction, "induction instances for a pool or a term depth", "fd"),
    "gen-pa-doubled": (cmd_gen_pa_doubled, "the doubled Peano theory", "d"),
    "gen-zfc": (cmd_gen_zfc, "the doubled set theory for a pool", "f"),
    "build-phi": (cmd_build_phi, "the coding formulas psi and phi", ""),
    "verify-phi": (cmd_verify_phi, "check the graph of phi on an initial segment", "sC"),
    "export-prover": (cmd_export_prover, "write a fof problem file", "fkI"),
    "catalogue": (cmd_catalogue, "list or show catalogue entries", "L"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="catkit", description="Second-order categoricity toolkit.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, (func, help_text, flags) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(func=func)
        if "f" in flags:
            p.add_argument("--formula", metavar="PATH", help="formula, pool or theory file")
        if "k" in flags:
            p.add_argument("--key", metavar="KEY", choices=library.KEYS, help="catalogue key")
        if "m" in flags:
            if "2" in flags:
                p.add_argument("--model", metavar="PATH", action="append", help="structure file (twice)")
            else:
                p.add_argument("--model", metavar="PATH", help="structure file")
        if "K" in flags:
            p.add_argument("--kappa", metavar="K", type=int, help="largest size examined")
        if "s" in flags:
            p.add_argument("--size", metavar="N", type=int,
                           help="domain size" if name == "enum" else "bound of the initial segment (default 20)")
        if "c" in flags or "K" in flags:
            if not any(a.dest == "capacity" for a in p._actions):
                p.add_argument("--capacity", metavar="N", type=int,
                               help="enumeration budget (default $CATKIT_CAPACITY or 2^24)")
        if "M" in flags:
            p.add_argument("--mode", choices=("guarded", "literal"), default="guarded",
                           help="isomorphism sentence variant")
        if "d" in flags:
            p.add_argument("--depth", metavar="D", type=int, help="term depth of the generated pool (default 1)")
        if "j" in flags:
            p.add_argument("--jobs", metavar="J", type=int, help="worker processes (default 1)")
        if "p" in flags:
            p.add_argument("--predicate", metavar="NAME", default=transforms.DEFAULT_U,
                           help=f"relativizing predicate (default {transforms.DEFAULT_U})")
        if "a" in flags:
            p.add_argument("--arity", metavar="M", type=int, help="arity of the comprehended relation")
        if "i" in flags:
            p.add_argument("--up-to-iso", action="store_true", help="one structure per isomorphism class")
        if "C" in flags:
            p.add_argument("--conjugated", action="store_true",
                           help="use the primed copy conjugated by the pair swap")
        if "I" in flags:
            p.add_argument("--conjecture", metavar="PATH", help="formula file for the conjecture")
            p.add_argument("--isom", action="store_true", help="use the isomorphism statement as conjecture")
        if "L" in flags:
            p.add_argument("action", choices=("list", "show"))
            p.add_argument("name", nargs="?", metavar="KEY")
        p.add_argument("--seed", metavar="S", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    return parser


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"catkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    random.seed(args.seed)
    try:
        args.func(args)
    except (semantics.CapacityError, arith.ArithCapacityError) as exc:
        print(f"catkit: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except categoricity.InvariantViolation as exc:
        print(f"catkit: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, syntax.SyntaxError_, semantics.StructureError, semantics.EvaluationError,
            library.UnknownEntry, arith.ExportError, arith.BoundednessError, ValueError) as exc:
        print(f"catkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"catkit: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

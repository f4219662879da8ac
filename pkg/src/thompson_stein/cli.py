"""Command-line interface: ``thompson-stein <command> ...``.

Exit codes: 0 success or equal, 1 distinct, 2 usage or parse error, 3 the
input is rejected for this group (bad signature, generator or map).
Arguments starting with ``@`` are read from the named file.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .diagrams import NotInGroup, compose, format_diagram, format_map, invert, parse_diagram, parse_map, to_map
from .metric import ball, constants, growth_experiment, growth_table, lower_bound, to_finite_word
from .minimizer import canonical_from_map, canonicalize
from .signature import GroupSignature, SignatureError
from .trees import TreeParseError
from .words import WordParseError, evaluate, normal_form, parse_word, print_word

EXIT_OK, EXIT_DISTINCT, EXIT_USAGE, EXIT_REJECTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _text(arg: str) -> str:
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def _word(arg: str, sig: GroupSignature):
    return parse_word(_text(arg), sig)


def _diagram(arg: str, sig: GroupSignature):
    return parse_diagram(_text(arg), sig)


def cmd_eval(args, sig, out) -> int:
    x = evaluate(_word(args.word, sig), sig)
    print(format_map(x.map), file=out)
    print(f"leaves {x.leaf_count}", file=out)
    return EXIT_OK


def cmd_nf(args, sig, out) -> int:
    sig.require_divisible()
    x = evaluate(_word(args.word, sig), sig)
    print(print_word(normal_form(x).to_word()), file=out)
    return EXIT_OK


def cmd_eq(args, sig, out) -> int:
    a = evaluate(_word(args.left, sig), sig)
    b = evaluate(_word(args.right, sig), sig)
    same = a.map == b.map
    print("equal" if same else "distinct", file=out)
    return EXIT_OK if same else EXIT_DISTINCT


def cmd_compose(args, sig, out) -> int:
    d = compose(_diagram(args.left, sig), _diagram(args.right, sig))
    print(format_diagram(canonicalize(d, sig).rep), file=out)
    return EXIT_OK


def cmd_invert(args, sig, out) -> int:
    print(format_diagram(invert(_diagram(args.diagram, sig))), file=out)
    return EXIT_OK


def cmd_reduce(args, sig, out) -> int:
    print(format_diagram(canonicalize(_diagram(args.diagram, sig), sig).rep), file=out)
    return EXIT_OK


def cmd_map(args, sig, out) -> int:
    print(format_map(to_map(_diagram(args.diagram, sig))), file=out)
    return EXIT_OK


def cmd_unmap(args, sig, out) -> int:
    try:
        f = parse_map(_text(args.plmap))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    f.check(sig)
    print(format_diagram(canonical_from_map(f, sig).rep), file=out)
    return EXIT_OK


def cmd_bounds(args, sig, out) -> int:
    sig.require_divisible()
    x = evaluate(_word(args.word, sig), sig)
    k = constants(sig)
    print(f"lower_bound {lower_bound(x, k)}", file=out)
    print(f"finite_word_length {to_finite_word(x).length}", file=out)
    print(f"d_times_leaves {k.d * x.leaf_count}", file=out)
    return EXIT_OK


def cmd_growth(args, sig, out) -> int:
    rows = growth_experiment(sig, args.j, args.n, args.bfs)
    out.write(growth_table(rows))
    return EXIT_OK


def cmd_ball(args, sig, out) -> int:
    sig.require_divisible()
    b = ball(sig, args.radius)
    print("length,word,diagram,map", file=out)
    for e in b.upto(args.radius):
        x = b.element(e)
        print(f'{e.length},"{print_word(e.word)}","{format_diagram(x.rep)}","{format_map(e.map)}"', file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thompson-stein", description=__doc__.splitlines()[0])
    p.add_argument("--group", default="2,3", help="arities n1,...,nk (default 2,3)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *positionals):
        s = sub.add_parser(name, help=help_text)
        for arg in positionals:
            s.add_argument(arg)
        s.set_defaults(func=func)
        return s

    add("eval", cmd_eval, "PL map and minimal leaf count of a word", "word")
    add("nf", cmd_nf, "normal form of a word", "word")
    add("eq", cmd_eq, "decide whether two words are equal", "left", "right")
    add("compose", cmd_compose, "minimal diagram of left after right", "left", "right")
    add("invert", cmd_invert, "inverse diagram", "diagram")
    add("reduce", cmd_reduce, "unique minimal representative", "diagram")
    add("map", cmd_map, "diagram to PL map", "diagram")
    add("unmap", cmd_unmap, "PL map to its minimal diagram", "plmap")
    add("bounds", cmd_bounds, "word-metric bounds", "word")
    g = add("growth", cmd_growth, "leaf growth of (y_j)_0^n")
    g.add_argument("--j", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--bfs", type=int, default=0, help="exact lengths up to this radius")
    b = add("ball", cmd_ball, "Cayley ball over the finite generators")
    b.add_argument("--radius", type=int, required=True)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        sig = GroupSignature.parse(args.group)
        return args.func(args, sig, out)
    except (WordParseError, TreeParseError, UsageError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (SignatureError, NotInGroup) as exc:
        print(f"rejected: {exc}", file=err)
        return EXIT_REJECTED
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

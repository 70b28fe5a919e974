"""Command-line front end."""

from __future__ import annotations

import argparse
import random
import sys
import time
from collections import Counter
from itertools import product
from pathlib import Path

from . import games
from .evaluation import is_separating
from .formulas import FormulaSyntaxError, is_prenex, is_sentence, negate_prenex, parse_formula
from .games import BudgetExceeded, DUPLICATOR, SPOILER
from .instances import COLOR_SCHEMA, LO, two_color_structures
from .io import (RunReport, StructureFormatError, format_structure, load_structure, parse_shorthand,
                 structure_digest)
from .measures import F_Q, F_R, F_S, measure_by_name
from .play import ENGINE, HUMAN, play_ms, play_sg
from .rtypes import THEORIES, classify_sentence
from .structures import ORDER_SCHEMA, OnTopPolicy, Structure
from .synthesis import AT_MOST, EXACT, decide_sg, min_measure, naive_oracle_sg

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_SPOILER = 10
EXIT_DUPLICATOR = 11
EXIT_NO_SEPARATOR = 12

GAMES = ("ms", "ms-no-on-top", "ms-repebble", "ms-hereditary", "ms-no-dup", "ef", "ef-rk", "pebble",
         "qvt", "sg:qcount", "sg:qrank", "sg:fsize")

ON_TOP = {
    "any": OnTopPolicy.UNRESTRICTED,
    "no-left": OnTopPolicy.FORBID_LEFT,
    "no-right": OnTopPolicy.FORBID_RIGHT,
    "none": OnTopPolicy.FORBID_BOTH,
}


class UsageError(Exception):
    pass


def _load_side(specs):
    """Structures with multiplicities; 'SPEC*N' repeats a structure N times."""
    out = []
    for spec in specs or []:
        mult = 1
        base, star, n = spec.rpartition("*")
        if star and n.isdigit() and base:
            spec, mult = base, int(n)
        try:
            s = load_structure(spec)
        except StructureFormatError as e:
            raise UsageError(str(e)) from None
        out.extend([s] * mult)
    if not out:
        raise UsageError("each side needs at least one structure")
    return out


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"this game needs -{name}")
    return val


def _single(side, what):
    if len(set(side)) != 1:
        raise UsageError(f"{what} needs exactly one structure per side")
    return side[0]


def _emit(report: RunReport, args, out):
    text = report.to_text()
    out.write(text)
    if getattr(args, "report", None):
        Path(args.report).write_text(text)


def _finish_spoiler(cert, A, B):
    # never exit 10 with a certificate that does not verify
    if cert is not None and not is_separating(cert.formula, A, B):
        raise RuntimeError("certificate failed to re-verify")


def run_decide(args, out) -> int:
    A, B = _load_side(args.left), _load_side(args.right)
    game = args.game
    if game not in GAMES:
        raise UsageError(f"unknown game {game!r}; choose from {', '.join(GAMES)}")
    if game != "ms-no-dup":
        A, B = list(dict.fromkeys(A)), list(dict.fromkeys(B))
    r = args.r
    cap = args.node_cap
    start = time.perf_counter()
    cert = None
    measure = ""
    if game == "ms":
        res = games.decide_ms(A, B, _need(args, "r"), node_cap=cap)
    elif game == "ms-no-on-top":
        policy = ON_TOP[args.on_top or "none"]
        if policy == OnTopPolicy.UNRESTRICTED:
            res = games.decide_ms(A, B, _need(args, "r"), node_cap=cap)
        else:
            res = games.decide_ms_no_on_top(A, B, _need(args, "r"), policy, node_cap=cap)
    elif game == "ms-repebble":
        res = games.decide_ms_repebbling(A, B, _need(args, "r"), _need(args, "k"), node_cap=cap)
    elif game == "ms-hereditary":
        res = games.decide_ms_hereditary(A, B, _need(args, "r"), _need(args, "k"), node_cap=cap)
    elif game == "ms-no-dup":
        res = games.decide_ms_no_duplication(Counter(A), Counter(B), _need(args, "r"), node_cap=cap)
    elif game == "ef":
        res = games.decide_ef(_single(A, game), _single(B, game), _need(args, "r"))
    elif game == "ef-rk":
        res = games.decide_ef_rk(_single(A, game), _single(B, game), _need(args, "r"), _need(args, "k"))
    elif game == "pebble":
        res = games.decide_pebble(_single(A, game), _single(B, game), _need(args, "k"))
    else:
        m = F_Q if game == "qvt" else measure_by_name(game.split(":", 1)[1])
        if args.measure and game == "qvt" and measure_by_name(args.measure) is not F_Q:
            raise UsageError("qvt always counts quantifiers; use sg:<measure> for other measures")
        mode = EXACT if args.exact else AT_MOST
        res = decide_sg(A, B, _need(args, "r"), _need(args, "k"), m, mode=mode, node_cap=cap)
        cert = res.certificate
        measure = m.name
        if cert is not None:
            _finish_spoiler(cert, A, B)
    report = RunReport(
        command=" ".join(args.argv),
        left=[structure_digest(s) for s in A],
        right=[structure_digest(s) for s in B],
        winner=res.winner,
        certificate=cert.text() if cert else "",
        measure=f"{measure} {cert.measure_value}" if cert else measure,
        nodes=res.nodes,
        wall_time=time.perf_counter() - start,
    )
    _emit(report, args, out)
    return EXIT_SPOILER if res.winner == SPOILER else EXIT_DUPLICATOR


def run_synth(args, out) -> int:
    A, B = list(dict.fromkeys(_load_side(args.left))), list(dict.fromkeys(_load_side(args.right)))
    m = measure_by_name(args.measure or "qcount")
    k = _need(args, "k")
    start = time.perf_counter()
    res = min_measure(A, B, k, m, args.rmax, node_cap=args.node_cap)
    report = RunReport(
        command=" ".join(args.argv),
        left=[structure_digest(s) for s in A],
        right=[structure_digest(s) for s in B],
        winner=SPOILER if res.value is not None else DUPLICATOR,
        certificate=res.certificate.text() if res.certificate else "",
        measure=f"{m.name} {res.value}" if res.value is not None else m.name,
        nodes=res.nodes,
        wall_time=time.perf_counter() - start,
    )
    if res.value is None:
        _emit(report, args, out)
        return EXIT_NO_SEPARATOR
    _finish_spoiler(res.certificate, A, B)
    _emit(report, args, out)
    return EXIT_SPOILER


def _read_formula(text):
    path = Path(text)
    if path.is_file():
        text = path.read_text().strip()
    return parse_formula(text)


def default_theory(psi):
    from .rtypes import infer_schema
    schema = infer_schema(psi)
    return "linear-order" if schema == ORDER_SCHEMA else None


def run_classify(args, out) -> int:
    try:
        psi = _read_formula(args.formula)
    except FormulaSyntaxError as e:
        raise UsageError(f"cannot parse formula: {e}") from None
    if not is_sentence(psi) or not is_prenex(psi):
        raise UsageError("classify needs a prenex sentence")
    theory = args.theory if args.theory != "auto" else default_theory(psi)
    out.write(f"theory: {theory or 'generic'}\n")
    for label, f in (("psi", psi), ("not psi", negate_prenex(psi))):
        c = classify_sentence(f, theory=theory)
        out.write(f"{label}: {c.verdict}\n")
        for t in c.offending:
            out.write(f"  offending type: {t.describe()}\n")
    return EXIT_OK


def run_gen(args, out) -> int:
    try:
        s = parse_shorthand(args.spec)
        if s is None:
            s = load_structure(args.spec)
    except StructureFormatError as e:
        raise UsageError(str(e)) from None
    text = format_structure(s)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def run_play(args, out) -> int:
    A, B = list(dict.fromkeys(_load_side(args.left))), list(dict.fromkeys(_load_side(args.right)))
    r = _need(args, "r")
    spoiler = ENGINE if args.auto or args.side == "duplicator" else HUMAN
    duplicator = ENGINE if args.auto or args.side == "spoiler" else HUMAN
    if args.game in ("ms", "ms-no-on-top"):
        policy = OnTopPolicy.UNRESTRICTED if args.game == "ms" else ON_TOP[args.on_top or "none"]
        sess = play_ms(A, B, r, spoiler=spoiler, duplicator=duplicator, policy=policy, stdout=out)
    elif args.game == "qvt" or args.game.startswith("sg:"):
        if duplicator == HUMAN:
            raise UsageError("in the tree-building game Duplicator's replies are forced; play as spoiler")
        m = F_Q if args.game == "qvt" else measure_by_name(args.game.split(":", 1)[1])
        sess = play_sg(A, B, r, _need(args, "k"), m, spoiler=spoiler, stdout=out)
    else:
        raise UsageError(f"play supports ms, ms-no-on-top, qvt and sg:<measure>, not {args.game!r}")
    if not sess.winner:
        return EXIT_OK
    if args.trace:
        Path(args.trace).write_text(sess.to_json())
    return EXIT_SPOILER if sess.winner == SPOILER else EXIT_DUPLICATOR


# -- oracle cross-check ---------------------------------------------------------

def builtin_corpus():
    A, B, C = two_color_structures()
    return [
        ([LO(3)], [LO(2)], 3, 2),
        ([LO(3)], [LO(2)], 2, 2),
        ([LO(2)], [LO(2)], 2, 2),
        ([A], [B, C], 1, 1),
        ([A], [B], 1, 1),
        ([A], [C], 1, 1),
    ]


def random_structure(rng, schema, n):
    rels = {}
    for name, arity in schema.relations:
        rels[name] = [t for t in product(range(n), repeat=arity) if rng.random() < 0.4]
    return Structure.build(schema, n, rels)


def random_tiny_instance(rng):
    """Total universe at most 4, r at most 2 (3 on universes of size 3)."""
    schema = rng.choice([ORDER_SCHEMA, COLOR_SCHEMA])
    while True:
        sizes = [rng.randint(1, 3) for _ in range(rng.randint(2, 3))]
        if sum(sizes) <= 4:
            break
    sts = [random_structure(rng, schema, n) for n in sizes]
    cut = rng.randint(1, len(sts) - 1)
    r = rng.randint(0, 3 if sum(sizes) <= 3 else 2)
    k = rng.randint(1, 2)
    return sts[:cut], sts[cut:], r, k


def oracle_check(instances, measures=(F_Q, F_R, F_S), out=None):
    """Returns the list of disagreements; each is (instance, measure name, mode, oracle, solver)."""
    bad = []
    for A, B, r, k in instances:
        for m in measures:
            for mode in (AT_MOST, EXACT):
                a = naive_oracle_sg(A, B, r, k, m, mode)
                b = decide_sg(A, B, r, k, m, mode=mode)
                if a != b.winner:
                    bad.append(((A, B, r, k), m.name, mode, a, b.winner))
    # micro checks of the MS engine against a Duplicator that may copy freely
    for A, B, r, k in instances:
        if r <= 2 and sum(s.size for s in set(A + B)) <= 4:
            a = games.decide_ms_full_duplicator(A, B, r).winner
            b = games.decide_ms(A, B, r).winner
            if a != b:
                bad.append(((A, B, r, k), "ms", "full-duplicator", a, b))
    return bad


def run_oracle_check(args, out) -> int:
    if args.corpus == "builtin":
        instances = builtin_corpus()
    else:
        rng = random.Random(args.seed)
        instances = [random_tiny_instance(rng) for _ in range(args.count)]
    for A, B, r, k in instances:
        if sum(s.size for s in set(A + B)) > 5 or r > 3:
            raise UsageError("corpus exceeds the oracle size guard")
    bad = oracle_check(instances)
    if bad:
        # smallest counterexample first
        bad.sort(key=lambda b: (sum(s.size for s in b[0][0] + b[0][1]), b[0][2]))
        (A, B, r, k), mname, mode, a, b = bad[0]
        out.write(f"FAIL {len(bad)} disagreement(s); smallest: measure={mname} mode={mode} r={r} k={k} "
                  f"oracle={a} solver={b}\n")
        for s in A:
            out.write("left:\n" + format_structure(s))
        for s in B:
            out.write("right:\n" + format_structure(s))
        return EXIT_USAGE
    out.write(f"PASS {len(instances)} instances\n")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msgames", description="Multi-structural games workbench")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, game=True):
        if game:
            sp.add_argument("game", help="one of: " + ", ".join(GAMES))
        sp.add_argument("--left", action="append", help="structure file or LO:n / RT:[...]; SPEC*N repeats")
        sp.add_argument("--right", action="append")
        sp.add_argument("-r", type=int)
        sp.add_argument("-k", type=int)
        sp.add_argument("--measure", choices=["qcount", "qrank", "fsize"])
        grp = sp.add_mutually_exclusive_group()
        grp.add_argument("--exact", action="store_true")
        grp.add_argument("--at-most", action="store_true")
        sp.add_argument("--on-top", choices=sorted(ON_TOP))
        sp.add_argument("--node-cap", type=int)
        sp.add_argument("--report")
        sp.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="write a structure file")
    g.add_argument("spec")
    g.add_argument("-o", "--output")

    d = sub.add_parser("decide", help="decide a game")
    common(d)

    s = sub.add_parser("synth", help="minimal separating formula")
    common(s, game=False)
    s.add_argument("--rmax", type=int, default=5)

    c = sub.add_parser("classify", help="replication verdicts of a prenex sentence")
    c.add_argument("formula", help="formula text or a file containing it")
    c.add_argument("--theory", default="auto", choices=["auto", "generic"] + sorted(THEORIES))

    pl = sub.add_parser("play", help="play against the engine")
    common(pl)
    pl.add_argument("--side", choices=["spoiler", "duplicator"], default="spoiler")
    pl.add_argument("--auto", action="store_true", help="engine plays both sides")
    pl.add_argument("--trace", help="save the session trace as JSON")

    o = sub.add_parser("oracle-check", help="compare the solver with the naive oracle")
    o.add_argument("--corpus", default="builtin", choices=["builtin", "random"])
    o.add_argument("--count", type=int, default=200)
    o.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "gen": run_gen,
    "decide": run_decide,
    "synth": run_synth,
    "classify": run_classify,
    "play": run_play,
    "oracle-check": run_oracle_check,
}


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    args.argv = argv
    if getattr(args, "theory", None) == "generic":
        args.theory = None
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded after {e.nodes} nodes", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

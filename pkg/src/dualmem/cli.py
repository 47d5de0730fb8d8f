"""Command-line interface.

Exit codes: 0 success / all-pass, 1 semantic negative (axiom failure, no
isomorphism, false sentence, lemma failure, ill-founded input), 2 usage or
input errors. Reports go to stdout; usage diagnostics to stderr. Every
command is deterministic given its flags and seeds.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import axioms as axioms_mod
from . import hf
from . import iso as iso_mod
from . import lemmas as lemmas_mod
from .errors import CycleError, DualMemError, NonExtensionalError
from .formulas import evaluate, free_vars, parse_formula
from .structure import (
    TAMPER_KINDS,
    Permutation,
    build_v_universe,
    parse_structure,
    random_dual_structure,
    scramble,
    serialize_structure,
    tamper,
)

PASS, NEGATIVE, USAGE = 0, 1, 2


def _read_structure(path: str):
    return parse_structure(Path(path).read_text(encoding="utf-8"))


def _write_structure(path: Path, s) -> None:
    path.write_text(serialize_structure(s), encoding="utf-8")


def _budget(args) -> axioms_mod.SamplingBudget:
    return axioms_mod.SamplingBudget(
        seed=getattr(args, "seed", 0) or 0,
        samples=getattr(args, "samples", 64),
        bounded_depth=getattr(args, "depth", 12),
    )


def cmd_gen(args) -> int:
    out = sys.stdout
    if args.kind == "v-universe":
        s = build_v_universe(args.n)
        path = Path(args.out or f"v{args.n}.st")
        _write_structure(path, s)
        print(path, file=out)
    elif args.kind == "scramble":
        if not args.infile:
            raise DualMemError("scramble needs --in")
        s = _read_structure(args.infile)
        p = Permutation.random(s.domain_size, args.seed)
        path = Path(args.out or f"{Path(args.infile).stem}-scrambled-{args.seed}.st")
        _write_structure(path, scramble(s, p))
        print(path, file=out)
        print("perm " + " ".join(map(str, p.images)), file=out)
    elif args.kind == "random-pair":
        if args.size is None:
            raise DualMemError("random-pair needs --size")
        s = random_dual_structure(args.size, args.seed)
        path = Path(args.out or f"random-{args.size}-{args.seed}.st")
        _write_structure(path, s)
        print(path, file=out)
    elif args.kind == "tamper":
        if not args.infile:
            raise DualMemError("tamper needs --in")
        if args.tamper_kind not in TAMPER_KINDS:
            raise DualMemError(f"--tamper-kind must be one of {', '.join(TAMPER_KINDS)}")
        s = tamper(_read_structure(args.infile), args.tamper_kind, args.seed)
        path = Path(args.out or f"{Path(args.infile).stem}-{args.tamper_kind}-{args.seed}.st")
        _write_structure(path, s)
        print(path, file=out)
    elif args.kind == "gallery":
        directory = Path(args.out or "gallery")
        directory.mkdir(parents=True, exist_ok=True)
        for item in lemmas_mod.counterexample_gallery():
            st_path = directory / f"{item.name}.st"
            _write_structure(st_path, item.structure)
            expected_path = directory / f"{item.name}.expected"
            expected_path.write_text(item.expected_summary, encoding="utf-8")
            print(st_path, file=out)
            print(expected_path, file=out)
    else:
        raise DualMemError(f"unknown gen kind {args.kind!r}")
    return PASS


def cmd_check_axioms(args) -> int:
    s = _read_structure(args.infile)
    report = axioms_mod.full_report(s, _budget(args), schema_mode=args.mode)
    sys.stdout.write(axioms_mod.render_report(report))
    return PASS if report.all_pass else NEGATIVE


def cmd_find_iso(args) -> int:
    s = _read_structure(args.infile)
    try:
        result = iso_mod.global_isomorphism(s)
    except CycleError as exc:
        tag = exc.tag or 0
        print(f"fail ill-founded e{tag} cycle={'>'.join(map(str, exc.cycle))}")
        return NEGATIVE
    except NonExtensionalError as exc:
        print(f"fail non-extensional e{exc.tag} x={exc.pair[0]} y={exc.pair[1]}")
        return NEGATIVE
    if isinstance(result, iso_mod.FailureDiagnostic):
        sys.stdout.write(iso_mod.render_diagnostic(result))
        return NEGATIVE
    if args.verify and not iso_mod.verify_certificate(s, result):
        print("fail certificate-rejected")
        return NEGATIVE
    if args.oracle_check:
        c1 = hf.collapse_domain(s.e1, 1)
        c2 = hf.collapse_domain(s.e2, 2)
        for x, y in enumerate(result.mapping):
            if c1.codes[x] is not c2.codes[y]:
                print(f"fail oracle-mismatch x={x} y={y}")
                return NEGATIVE
    sys.stdout.write(iso_mod.render_certificate(result))
    return PASS


def _parse_assignment(text: str) -> dict[str, int]:
    assignment: dict[str, int] = {}
    if not text:
        return assignment
    for chunk in text.split(","):
        name, _, value = chunk.strip().partition("=")
        if not name or not value.lstrip("-").isdigit():
            raise DualMemError(f"bad assignment chunk {chunk!r}; expected var=id")
        assignment[name] = int(value)
    return assignment


def cmd_eval(args) -> int:
    s = _read_structure(args.infile)
    if args.formula is not None:
        text = args.formula
    elif args.formula_file is not None:
        text = Path(args.formula_file).read_text(encoding="utf-8")
    else:
        raise DualMemError("eval needs --formula or --formula-file")
    sentence = parse_formula(text)
    assignment = _parse_assignment(args.assign or "")
    missing = free_vars(sentence) - assignment.keys()
    if missing:
        raise DualMemError(f"assignment misses free variables: {', '.join(sorted(missing))}")
    value = evaluate(s, sentence, assignment)
    print("true" if value else "false")
    return PASS if value else NEGATIVE


def cmd_verify_lemmas(args) -> int:
    if args.corpus:
        settings = _parse_corpus(args.corpus, args.seed)
        report = lemmas_mod.run_corpus(settings)
    elif args.infile:
        report = lemmas_mod.run_suite(_read_structure(args.infile))
    else:
        raise DualMemError("verify-lemmas needs a structure file or --corpus")
    sys.stdout.write(lemmas_mod.render_suite(report))
    return PASS if report.all_ok else NEGATIVE


def _parse_corpus(text: str, seed: int) -> lemmas_mod.CorpusConfig:
    sizes: tuple[int, ...] = (3, 4)
    count = 100
    kinds: tuple[str, ...] = ("scrambled",)
    for chunk in text.replace(";", " ").split():
        key, _, value = chunk.partition("=")
        if key == "sizes":
            sizes = tuple(int(v) for v in value.split(",") if v)
        elif key == "count":
            count = int(value)
        elif key == "kinds":
            kinds = tuple(v for v in value.split(",") if v)
        elif key == "seed":
            seed = int(value)
        else:
            raise DualMemError(f"unknown corpus setting {key!r}")
    return lemmas_mod.CorpusConfig(sizes=sizes, count=count, seed=seed, kinds=kinds)


def cmd_collapse(args) -> int:
    s = _read_structure(args.infile)
    rel = s.relation(args.relation)
    if not (0 <= args.element < s.domain_size):
        raise DualMemError(f"element {args.element} outside domain of size {s.domain_size}")
    try:
        code = hf.collapse(rel, args.element, args.relation)
    except CycleError as exc:
        print(f"fail ill-founded e{args.relation} cycle={'>'.join(map(str, exc.cycle))}")
        return NEGATIVE
    print(hf.render_hf(code))
    numeral = hf.ackermann_code_if_below(code, 1 << 64)
    print(f"code={numeral}" if numeral is not None else "code=large")
    return PASS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualmem",
        description="Generate, check, and match dual membership structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write structure files")
    gen.add_argument("kind", choices=["v-universe", "scramble", "random-pair", "tamper", "gallery"])
    gen.add_argument("--n", type=int, default=3, help="level index for v-universe")
    gen.add_argument("--in", dest="infile", help="input structure file")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--size", type=int, help="domain size for random-pair")
    gen.add_argument("--tamper-kind", choices=list(TAMPER_KINDS), default="add-cycle")
    gen.add_argument("--out", help="output path (file, or directory for gallery)")
    gen.set_defaults(func=cmd_gen)

    check = sub.add_parser("check-axioms", help="run the axiom battery on a structure file")
    check.add_argument("infile")
    check.add_argument("--mode", choices=list(axioms_mod.SCHEMA_MODES), default="battery")
    check.add_argument("--depth", type=int, default=12, help="bounded-mode formula size")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--samples", type=int, default=64)
    check.set_defaults(func=cmd_check_axioms)

    find = sub.add_parser("find-iso", help="construct the definable isomorphism")
    find.add_argument("infile")
    find.add_argument("--verify", action="store_true", help="re-check the certificate")
    find.add_argument("--oracle-check", action="store_true", help="cross-check against collapse codes")
    find.set_defaults(func=cmd_find_iso)

    ev = sub.add_parser("eval", help="evaluate a formula on a structure file")
    ev.add_argument("infile")
    ev.add_argument("--formula")
    ev.add_argument("--formula-file")
    ev.add_argument("--assign", help="free-variable values, e.g. 'x=0,y=3'")
    ev.set_defaults(func=cmd_eval)

    verify = sub.add_parser("verify-lemmas", help="run the lemma suite")
    verify.add_argument("infile", nargs="?")
    verify.add_argument("--corpus", help="e.g. 'sizes=3,4 count=100 kinds=scrambled'")
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=cmd_verify_lemmas)

    col = sub.add_parser("collapse", help="canonical set value of one element")
    col.add_argument("infile")
    col.add_argument("--relation", type=int, choices=[1, 2], default=1)
    col.add_argument("--element", type=int, required=True)
    col.set_defaults(func=cmd_collapse)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (DualMemError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

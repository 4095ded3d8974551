"""
Command-line driver.

Exit codes: 0 success, 1 validation or domain failure (including bad
arguments), 2 a resource cap was reached before an answer was found.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .circuit import CircuitError
from .codes import bound_report, css_code, read_pcm
from .ft import (
    DEFAULT_REPETITIONS,
    DEFAULT_VERIFY_ROUNDS,
    cat_measurement_circuit,
    check_transversal_clifford,
    pi8_ancilla_check_circuit,
    pi8_injection_circuit,
    shor_ec_round,
    steane_ec_circuit,
    transversal_cnot,
)
from .noise import (
    CircuitProtocol,
    CodeCapacityProtocol,
    concatenated_rate,
    estimate_logical_rate,
    levels_needed,
)
from .pauli import format_pauli, parse_pauli
from .stabilizer import Cap, build_decoder, distance, read_stab, validate, write_stab

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CAP = 2

log = logging.getLogger("qecft")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 keeps meaning "cap reached"."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAILURE, f"{self.prog}: error: {message}\n")


def _load_code(path):
    return validate(read_stab(path))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


# -- commands ----------------------------------------------------------------------------

def cmd_code_validate(args) -> int:
    code = _load_code(args.path)
    print(f"valid [[{code.n},{code.k}]] stabilizer code with {code.num_generators} generators")
    for j in range(code.k):
        print(f"logical X{j}: {format_pauli(code.logical_x[j])}")
        print(f"logical Z{j}: {format_pauli(code.logical_z[j])}")
    return EXIT_OK


def cmd_code_distance(args) -> int:
    code = _load_code(args.path)
    d = distance(code, args.cap)
    if d is Cap.EXCEEDS:
        print(Cap.EXCEEDS.value)
        return EXIT_CAP
    print(d)
    return EXIT_OK


def cmd_code_decoder(args) -> int:
    code = _load_code(args.path)
    table = build_decoder(code, args.t)
    width = code.num_generators
    for s in range(1 << width):
        corr, best_effort = table.lookup(s)
        bits = "".join(str(s >> i & 1) for i in range(width))
        flag = "  (best effort)" if best_effort else ""
        print(f"{bits}  {format_pauli(corr)}{flag}")
    return EXIT_OK


def cmd_css_build(args) -> int:
    code = css_code(read_pcm(args.h1), read_pcm(args.h2))
    write_stab(args.out, code.generators,
               f"CSS code from {Path(args.h1).name} (Z checks) and {Path(args.h2).name} (X checks)")
    print(f"[[{code.n},{code.k}]] CSS code written to {args.out}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    report = bound_report(args.n, args.k, args.d)
    print(report.as_text())
    return EXIT_OK if report.singleton_ok else EXIT_FAILURE


def cmd_ft_check(args) -> int:
    code = _load_code(args.path)
    gate = args.gate.upper()
    if gate == "PAULI":
        if not args.pauli:
            raise ValueError("--gate PAULI needs --pauli")
        action = check_transversal_clifford(code, parse_pauli(args.pauli))
    else:
        action = check_transversal_clifford(code, gate)
    print(action.describe())
    return EXIT_OK if action.preserves else EXIT_FAILURE


GADGETS = ("cat", "shor-ec", "steane-ec", "transversal-cnot", "pi8", "pi8-check")


def cmd_gadget_emit(args) -> int:
    g = args.gadget
    if g in ("pi8", "pi8-check"):
        circ = pi8_injection_circuit() if g == "pi8" else pi8_ancilla_check_circuit(args.with_preparation)
    else:
        if not args.path:
            raise ValueError(f"gadget {g} needs a .stab file")
        code = _load_code(args.path)
        if g == "cat":
            m = parse_pauli(args.measure) if args.measure else code.generators[0]
            circ = cat_measurement_circuit(code, m, args.verify_rounds)
        elif g == "shor-ec":
            circ = shor_ec_round(code, args.repetitions, verify_rounds=args.verify_rounds, vote_mode=args.vote)
        elif g == "steane-ec":
            circ = steane_ec_circuit(code)
        else:
            circ = transversal_cnot(code)
    header = [f"# gadget {g}", f"# qubits {circ.num_qubits}, depth {circ.depth}, "
              + ", ".join(f"{k} {v}" for k, v in circ.gate_counts().items())]
    _emit("\n".join(header) + "\n" + circ.to_text(), args.out)
    return EXIT_OK


def cmd_sim_sweep(args) -> int:
    code = _load_code(args.path)
    if args.mode == "code-capacity":
        protocol = CodeCapacityProtocol(code, args.t)
    elif args.mode == "circuit-shor":
        protocol = CircuitProtocol(shor_ec_round(code, args.repetitions), code, "circuit-shor")
    else:
        protocol = CircuitProtocol(steane_ec_circuit(code), code, "circuit-steane")
    report = estimate_logical_rate(protocol, args.p, args.shots, args.seed, workers=args.workers)
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else
                          "json" if args.out else "text")
    text = {"text": report.to_text, "csv": report.to_csv, "json": report.to_json}[fmt]()
    _emit(text, args.out)
    return EXIT_OK


def _number(text: str):
    """Exact rational for decimal input so the printed table is reproducible."""
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None


def cmd_concat_predict(args) -> int:
    p, pt = args.p, args.pt
    if args.epsilon is not None:
        level = levels_needed(p, pt, args.epsilon)
        print(f"levels needed: {level}")
        rows = range(level + 1)
    else:
        rows = range(args.levels + 1)
    print(f"{'L':>3}  {'p_L':>14}")
    for level in rows:
        print(f"{level:>3}  {float(concatenated_rate(p, pt, level)):>14.6e}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qecft", description="Stabilizer codes, fault-tolerant gadgets and noise sweeps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    code = sub.add_parser("code", help="inspect a .stab file").add_subparsers(dest="cmd", required=True)
    p = code.add_parser("validate", help="check the generators and print logical operators")
    p.add_argument("path")
    p.set_defaults(func=cmd_code_validate)
    p = code.add_parser("distance", help="exhaustive distance up to a weight cap")
    p.add_argument("path")
    p.add_argument("--cap", type=int, required=True)
    p.set_defaults(func=cmd_code_distance)
    p = code.add_parser("decoder", help="print the lookup-table decoder")
    p.add_argument("path")
    p.add_argument("--t", type=int, default=1, help="largest error weight covered exactly")
    p.set_defaults(func=cmd_code_decoder)

    css = sub.add_parser("css", help="CSS construction").add_subparsers(dest="cmd", required=True)
    p = css.add_parser("build", help="build a CSS code from two .pcm files")
    p.add_argument("h1", help="parity checks giving the Z-type generators")
    p.add_argument("h2", help="parity checks giving the X-type generators")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_css_build)

    p = sub.add_parser("bounds", help="Singleton, Hamming and Gilbert-Varshamov checks")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("d", type=int)
    p.set_defaults(func=cmd_bounds)

    ft = sub.add_parser("ft", help="transversal gate checks").add_subparsers(dest="cmd", required=True)
    p = ft.add_parser("check", help="logical action of a transversal Clifford")
    p.add_argument("path")
    p.add_argument("--gate", required=True, type=str.upper, choices=["H", "S", "SDG", "CNOT", "PAULI"])
    p.add_argument("--pauli", help="operator for --gate PAULI, e.g. XXXXXXX")
    p.set_defaults(func=cmd_ft_check)

    gadget = sub.add_parser("gadget", help="emit gadget circuits").add_subparsers(dest="cmd", required=True)
    p = gadget.add_parser("emit", help="write a gadget in the circuit text format")
    p.add_argument("path", nargs="?", help=".stab file (not needed for the pi8 gadgets)")
    p.add_argument("--gadget", required=True, choices=GADGETS)
    p.add_argument("--measure", help="operator measured by the cat gadget (default: generator 0)")
    p.add_argument("--verify-rounds", type=int, default=DEFAULT_VERIFY_ROUNDS)
    p.add_argument("--repetitions", type=int, default=DEFAULT_REPETITIONS)
    p.add_argument("--vote", choices=["vector", "bitwise"], default="vector")
    p.add_argument("--with-preparation", action="store_true", help="pi8-check: prepare the candidate too")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gadget_emit)

    sim = sub.add_parser("sim", help="Monte Carlo").add_subparsers(dest="cmd", required=True)
    p = sim.add_parser("sweep", help="logical failure rate against physical error rate")
    p.add_argument("path")
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=["code-capacity", "circuit-shor", "circuit-steane"], default="code-capacity")
    p.add_argument("--t", type=int, default=1, help="decoder coverage for code-capacity mode")
    p.add_argument("--repetitions", type=int, default=DEFAULT_REPETITIONS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["text", "csv", "json"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_sim_sweep)

    concat = sub.add_parser("concat", help="concatenation predictions").add_subparsers(dest="cmd", required=True)
    p = concat.add_parser("predict", help="p_t (p/p_t)^(2^L) per level")
    p.add_argument("--p", type=_number, required=True)
    p.add_argument("--pt", type=_number, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--levels", type=int)
    group.add_argument("--epsilon", type=_number)
    p.set_defaults(func=cmd_concat_predict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, CircuitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

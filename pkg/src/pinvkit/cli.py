"""Batch command-line front end.

Subcommands wrap the library's pseudoinverse paths with file I/O, method
selection, self-verification, and seeded instance generation. Every command
that produces a pseudoinverse re-checks the Penrose residuals before
exiting, and the exit code encodes the verdict:

    0  success, residuals within bound
    1  unparseable command line or input data
    2  residual bound violated
    3  precondition violated (parity, zero-sum, orthogonality, ...)

Reports go to stdout as single-line JSON, or as an aligned table with
--pretty. Output files are written atomically and are byte-identical across
reruns of the same command, seed, and inputs; wall time lives only in the
report stream.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .circulant import (
    block_pattern_pinv,
    circ_materialize,
    circ_pinv_spectral,
    circ_spectrum,
    two_term_pinv,
    zero_sum_shift_pinv,
)
from .core import (
    characterization_residuals,
    gen_random_matrix,
    penrose_residuals,
    pinv,
    pinv_normal_equations,
)
from .graphdist import (
    gen_zero_sum_tree,
    tree_build,
    tree_pinv,
    tree_u_and_reconstruction,
    wheel_build,
    wheel_pinv,
    wheel_z_identities,
)
from .linalg import svd
from .matrix import (
    DEFAULT_TOL,
    ConvergenceError,
    MatrixFormatError,
    PreconditionError,
    Tolerance,
    VerificationError,
    dumps_generator_json,
    dumps_matrix_csv,
    dumps_matrix_json,
    dumps_tree_csv,
    frobenius,
    loads_generator_json,
    loads_matrix_csv,
    loads_matrix_json,
    loads_tree_csv,
    parse_complex,
    parse_generator,
)
from .sumdecomp import (
    check_orthogonality,
    completion_pinv_pair,
    gen_rank_additive_pair,
    gen_svd_block_family,
    rank_completion_pinv,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_RESIDUAL = 2
EXIT_PRECONDITION = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would sys.exit(2) on bad flags; route through the parse code
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunReport:
    """Machine-readable summary of one command execution."""

    command: str
    method: str | None = None
    rows: int | None = None
    cols: int | None = None
    rank: int | None = None
    max_penrose_residual: float | None = None
    residual_bound: float | None = None
    passed: bool = True
    wall_time_s: float = 0.0
    input_digest: str | None = None
    output_digest: str | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "method": self.method,
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "max_penrose_residual": self.max_penrose_residual,
            "residual_bound": self.residual_bound,
            "passed": self.passed,
            "wall_time_s": self.wall_time_s,
            "input_digest": self.input_digest,
            "output_digest": self.output_digest,
            "extras": self.extras,
        }


# --------------------------------------------------------------------------
# I/O helpers


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from None


def _load_matrix(path: str) -> tuple[np.ndarray, str]:
    text = _read_text(path)
    if path.endswith(".json"):
        return loads_matrix_json(text), _digest(text.encode())
    if path.endswith(".csv"):
        return loads_matrix_csv(text), _digest(text.encode())
    raise MatrixFormatError(f"unknown matrix format for {path}; use .json or .csv")


def _write_atomic(path: str, text: str) -> str:
    tmp = os.path.join(
        os.path.dirname(path) or ".", f".{os.path.basename(path)}.tmp"
    )
    try:
        with open(tmp, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise PreconditionError(f"cannot write {path}: {exc}") from None
    return _digest(text.encode())


def _write_matrix(path: str, a: np.ndarray) -> str:
    if path.endswith(".json"):
        return _write_atomic(path, dumps_matrix_json(a))
    if path.endswith(".csv"):
        return _write_atomic(path, dumps_matrix_csv(a))
    raise PreconditionError(f"unknown matrix format for {path}; use .json or .csv")


def _resolve_tolerance(args) -> Tolerance:
    residual = getattr(args, "tol_residual", None)
    if residual is None:
        env = os.environ.get("PINVKIT_TOL_RESIDUAL")
        if env is not None:
            try:
                residual = float(env)
            except ValueError:
                raise MatrixFormatError(
                    f"PINVKIT_TOL_RESIDUAL is not a float: {env!r}"
                ) from None
    kwargs = {}
    if getattr(args, "tol_rank", None) is not None:
        kwargs["rank_rel"] = args.tol_rank
    if residual is not None:
        kwargs["residual_abs"] = residual
    try:
        return Tolerance(**kwargs)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None


# --------------------------------------------------------------------------
# subcommands


def _cmd_pinv(args, tol: Tolerance) -> tuple[RunReport, int]:
    started = time.perf_counter()
    if not args.input:
        raise PreconditionError("pinv needs --input")
    a, in_digest = _load_matrix(args.input)
    if args.method == "svd":
        x = pinv(a, tol)
    elif args.method == "normal":
        x = pinv_normal_equations(a, tol)
    elif args.method == "rank-completion":
        x = rank_completion_pinv(a, tol=tol)
    else:
        if not args.aux:
            raise PreconditionError("pair method needs --aux with the completing matrix")
        b, _ = _load_matrix(args.aux)
        x = completion_pinv_pair(a, b, tol=tol)
    check_tol = tol.scaled_for(a)
    residuals = penrose_residuals(a, x, check_tol)
    out_digest = _write_matrix(args.output, x) if args.output else None
    report = RunReport(
        command="pinv",
        method=args.method,
        rows=a.shape[0],
        cols=a.shape[1],
        rank=svd(a, tol).rank,
        max_penrose_residual=float(max(residuals.residuals.values())),
        residual_bound=check_tol.residual_abs,
        passed=bool(residuals.passed),
        wall_time_s=time.perf_counter() - started,
        input_digest=in_digest,
        output_digest=out_digest,
    )
    return report, EXIT_OK if residuals.passed else EXIT_RESIDUAL


def _two_term_from_generator(gen: np.ndarray) -> tuple[complex, complex, int]:
    """Split a two-entry generator into (alpha, beta, k_pos).

    The two nonzero entries must sit at cyclically adjacent indices; alpha is
    the one whose successor is the other.
    """
    n = gen.shape[0]
    nonzero = [k for k in range(n) if gen[k] != 0]
    if len(nonzero) != 2:
        raise PreconditionError(
            f"two-term method needs exactly two nonzero entries, found {len(nonzero)}"
        )
    first, second = nonzero
    if (first + 1) % n == second:
        p = first
    elif (second + 1) % n == first:
        p = second
    else:
        raise PreconditionError(
            f"two-term entries at {first} and {second} are not cyclically adjacent"
        )
    return complex(gen[p]), complex(gen[(p + 1) % n]), p + 1


def _cmd_circ(args, tol: Tolerance) -> tuple[RunReport, int]:
    started = time.perf_counter()
    if args.gen is not None and args.input:
        raise PreconditionError("give --gen or --input, not both")
    gen = None
    in_digest = None
    if args.gen is not None:
        gen = parse_generator(args.gen)
        in_digest = _digest(args.gen.encode())
    elif args.input:
        text = _read_text(args.input)
        gen = loads_generator_json(text)
        in_digest = _digest(text.encode())

    if args.method == "spectral":
        if gen is None:
            raise PreconditionError("spectral method needs a generator (--gen or --input)")
        result = circ_pinv_spectral(gen, tol)
    elif args.method == "two-term":
        if gen is not None:
            alpha, beta, k_pos = _two_term_from_generator(gen)
            n = gen.shape[0]
        else:
            if args.alpha is None or args.beta is None or args.n is None:
                raise PreconditionError(
                    "two-term without --gen needs --alpha, --beta and --n"
                )
            alpha, beta, n = args.alpha, args.beta, args.n
            k_pos = args.k if args.k is not None else 1
            gen = np.zeros(n, dtype=np.complex128)
            gen[(k_pos - 1) % n] = alpha
            gen[k_pos % n] = beta
        result = two_term_pinv(alpha, beta, n, k_pos, tol)
    elif args.method == "zero-sum":
        if gen is None:
            raise PreconditionError("zero-sum method needs a generator (--gen or --input)")
        result = zero_sum_shift_pinv(gen, alpha=args.alpha, tol=tol)
    else:
        if args.alpha is None or args.beta is None or args.k is None or args.q is None:
            raise PreconditionError("block method needs --alpha, --beta, --k and --q")
        result = block_pattern_pinv(args.alpha, args.beta, args.k, args.q, tol)
        pattern = np.asarray(([args.k] + [-1] * args.k) * args.q, dtype=np.complex128)
        gen = args.alpha * np.ones(pattern.shape[0], dtype=np.complex128) + args.beta * pattern

    c = circ_materialize(gen)
    x = circ_materialize(result.gen)
    check_tol = tol.scaled_for(c)
    residuals = penrose_residuals(c, x, check_tol)
    spectrum = circ_spectrum(gen, tol)
    out_digest = None
    if args.output:
        if args.output.endswith(".json"):
            out_digest = _write_atomic(args.output, dumps_generator_json(result.gen))
        elif args.output.endswith(".csv"):
            out_digest = _write_atomic(args.output, dumps_matrix_csv(x))
        else:
            raise PreconditionError(
                f"unknown output format for {args.output}; use .json or .csv"
            )
    report = RunReport(
        command="circ",
        method=args.method,
        rows=gen.shape[0],
        cols=gen.shape[0],
        rank=len(spectrum.support),
        max_penrose_residual=float(max(residuals.residuals.values())),
        residual_bound=check_tol.residual_abs,
        passed=bool(residuals.passed),
        wall_time_s=time.perf_counter() - started,
        input_digest=in_digest,
        output_digest=out_digest,
        extras={"support": [int(i) for i in spectrum.support]},
    )
    return report, EXIT_OK if residuals.passed else EXIT_RESIDUAL


def _cmd_tree(args, tol: Tolerance) -> tuple[RunReport, int]:
    started = time.perf_counter()
    if not args.input:
        raise PreconditionError("tree needs --input with an edge CSV")
    text = _read_text(args.input)
    edges = loads_tree_csv(text)
    tree = tree_build(edges, tol)
    x = tree_pinv(tree, alpha=args.alpha, tol=tol)
    u, rebuilt = tree_u_and_reconstruction(tree, alpha=args.alpha, tol=tol)
    check_tol = tol.scaled_for(tree.D)
    residuals = penrose_residuals(tree.D, x, check_tol)
    ones = np.ones(tree.n)
    dl_residual = frobenius(
        tree.D @ tree.L - (np.outer(ones, tree.tau) - 2.0 * np.eye(tree.n))
    )
    out_digest = _write_matrix(args.output, x) if args.output else None
    report = RunReport(
        command="tree",
        method="shift-inverse",
        rows=tree.n,
        cols=tree.n,
        rank=svd(tree.D, tol).rank,
        max_penrose_residual=float(max(residuals.residuals.values())),
        residual_bound=check_tol.residual_abs,
        passed=bool(residuals.passed),
        wall_time_s=time.perf_counter() - started,
        input_digest=_digest(text.encode()),
        output_digest=out_digest,
        extras={
            "alpha": "auto" if args.alpha is None else float(args.alpha),
            "weight_sum": tree.weight_sum,
            "u": [float(value) for value in u],
            "reconstruction_gap": frobenius(rebuilt - x),
            "dl_identity_residual": dl_residual,
        },
    )
    return report, EXIT_OK if residuals.passed else EXIT_RESIDUAL


def _cmd_wheel(args, tol: Tolerance) -> tuple[RunReport, int]:
    started = time.perf_counter()
    wheel = wheel_build(args.n, tol)
    inv134, dpinv = wheel_pinv(args.n, tol)
    check_tol = tol.scaled_for(wheel.D)
    residuals = penrose_residuals(wheel.D, dpinv, check_tol)
    identities = wheel_z_identities(args.n)
    out_digest = _write_matrix(args.output, dpinv) if args.output else None
    eig_residual = float(np.max(np.abs(inv134 @ wheel.a - wheel.a / (args.n - 1))))
    report = RunReport(
        command="wheel",
        method="closed-form",
        rows=args.n,
        cols=args.n,
        rank=args.n - 1,
        max_penrose_residual=float(max(residuals.residuals.values())),
        residual_bound=check_tol.residual_abs,
        passed=bool(residuals.passed) and all(identities.values()),
        wall_time_s=time.perf_counter() - started,
        input_digest=None,
        output_digest=out_digest,
        extras={
            "n": args.n,
            "z24": [int(value) for value in wheel.z24],
            "z_identities": {key: bool(value) for key, value in identities.items()},
            "eigvector_residual": eig_residual,
        },
    )
    code = EXIT_OK if report.passed else EXIT_RESIDUAL
    return report, code


def _cmd_verify(args, tol: Tolerance) -> tuple[RunReport, int]:
    started = time.perf_counter()
    if not args.input or not args.aux:
        raise PreconditionError("verify needs --input (matrix) and --aux (candidate inverse)")
    a, in_digest = _load_matrix(args.input)
    x, _ = _load_matrix(args.aux)
    check_tol = tol.scaled_for(a)
    pen = penrose_residuals(a, x, check_tol)
    chars = characterization_residuals(a, x, check_tol)
    every = {**pen.residuals, **chars.residuals}
    passed = bool(pen.passed and chars.passed)
    report = RunReport(
        command="verify",
        method=None,
        rows=a.shape[0],
        cols=a.shape[1],
        rank=svd(a, tol).rank,
        max_penrose_residual=float(max(pen.residuals.values())),
        residual_bound=check_tol.residual_abs,
        passed=passed,
        wall_time_s=time.perf_counter() - started,
        input_digest=in_digest,
        output_digest=None,
        extras={"residuals": {key: float(value) for key, value in every.items()}},
    )
    return report, EXIT_OK if passed else EXIT_RESIDUAL


def _cmd_gen(args, tol: Tolerance) -> tuple[RunReport, int]:
    started = time.perf_counter()
    prefix = args.output or "instance"
    files: list[dict] = []
    extras: dict = {"kind": args.kind, "seed": args.seed}

    def emit(path: str, text: str) -> None:
        files.append({"path": path, "sha256": _write_atomic(path, text)})

    if args.kind == "sum-family":
        rows = args.rows if args.rows is not None else 6
        cols = args.cols if args.cols is not None else 5
        k = args.k if args.k is not None else 2
        family = gen_svd_block_family(args.seed, rows, cols, k)
        for index, member in enumerate(family.members, start=1):
            emit(f"{prefix}_{index}.json", dumps_matrix_json(member))
        extras["certificate_holds"] = bool(check_orthogonality(family, tol).holds)
    elif args.kind == "zero-sum-tree":
        n = args.n if args.n is not None else 8
        tree = gen_zero_sum_tree(args.seed, n)
        emit(f"{prefix}.csv", dumps_tree_csv(tree.edges))
        extras["weight_sum"] = tree.weight_sum
    elif args.kind == "rank-additive-pair":
        n = args.n if args.n is not None else 6
        first, second = gen_rank_additive_pair(args.seed, n, tol)
        emit(f"{prefix}_a.json", dumps_matrix_json(first))
        emit(f"{prefix}_b.json", dumps_matrix_json(second))
    else:
        rows = args.rows if args.rows is not None else 8
        cols = args.cols if args.cols is not None else 8
        a = gen_random_matrix(args.seed, rows, cols, rank=args.k)
        emit(f"{prefix}.json", dumps_matrix_json(a))

    extras["files"] = files
    report = RunReport(
        command="gen",
        method=args.kind,
        wall_time_s=time.perf_counter() - started,
        extras=extras,
    )
    return report, EXIT_OK


# --------------------------------------------------------------------------
# wiring


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="input file (.json or .csv)")
    parser.add_argument("--aux", help="secondary input file")
    parser.add_argument("--output", help="output file, or filename prefix for gen")
    parser.add_argument("--tol-rank", type=float, help="relative rank cutoff factor")
    parser.add_argument("--tol-residual", type=float, help="absolute residual bound")
    parser.add_argument("--seed", type=int, default=0, help="generator seed")
    parser.add_argument("--pretty", action="store_true", help="aligned table instead of JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pinvkit", description="structure-exploiting pseudoinverses")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    cmd = commands.add_parser("pinv", help="pseudoinverse of a dense matrix")
    cmd.add_argument(
        "--method",
        choices=["svd", "normal", "rank-completion", "pair"],
        default="svd",
    )
    _add_common(cmd)
    cmd.set_defaults(handler=_cmd_pinv)

    cmd = commands.add_parser("circ", help="closed-form circulant pseudoinverse")
    cmd.add_argument(
        "--method",
        choices=["spectral", "two-term", "zero-sum", "block"],
        default="spectral",
    )
    cmd.add_argument("--gen", help="comma-separated generator entries")
    cmd.add_argument("--alpha", type=parse_complex)
    cmd.add_argument("--beta", type=parse_complex)
    cmd.add_argument("--k", type=int)
    cmd.add_argument("--q", type=int)
    cmd.add_argument("--n", type=int)
    _add_common(cmd)
    cmd.set_defaults(handler=_cmd_circ)

    cmd = commands.add_parser("tree", help="zero-sum tree distance pseudoinverse")
    cmd.add_argument("--alpha", type=float, help="completion weight (default: auto)")
    _add_common(cmd)
    cmd.set_defaults(handler=_cmd_tree)

    cmd = commands.add_parser("wheel", help="odd wheel distance pseudoinverse")
    cmd.add_argument("--n", type=int, required=True, help="vertex count, odd and >= 5")
    _add_common(cmd)
    cmd.set_defaults(handler=_cmd_wheel)

    cmd = commands.add_parser("verify", help="check a candidate pseudoinverse")
    _add_common(cmd)
    cmd.set_defaults(handler=_cmd_verify)

    cmd = commands.add_parser("gen", help="write seeded test instances")
    cmd.add_argument(
        "kind",
        choices=["sum-family", "zero-sum-tree", "rank-additive-pair", "random-matrix"],
    )
    cmd.add_argument("--rows", type=int)
    cmd.add_argument("--cols", type=int)
    cmd.add_argument("--k", type=int, help="family size, or rank for random-matrix")
    cmd.add_argument("--n", type=int)
    _add_common(cmd)
    cmd.set_defaults(handler=_cmd_gen)

    return parser


def _flatten(payload: dict, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, f"{name}."))
        else:
            rows.append((name, str(value)))
    return rows


def _print_report(report: RunReport, pretty: bool) -> None:
    payload = report.to_dict()
    if not pretty:
        print(json.dumps(payload))
        return
    rows = _flatten(payload)
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"pinvkit: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        tol = _resolve_tolerance(args)
        report, code = args.handler(args, tol)
    except MatrixFormatError as exc:
        print(f"pinvkit: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except VerificationError as exc:
        print(f"pinvkit: verification failed: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL
    except (PreconditionError, ConvergenceError) as exc:
        print(f"pinvkit: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    _print_report(report, args.pretty)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

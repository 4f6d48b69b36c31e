"""``hessplit`` command line: experiment tables as CSV and the verification suites.

Exit status is 0 on success, 1 when a verification suite fails and 2 on
usage or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from hessplit import experiments as ex
from hessplit.genmodels import GeneratorSpec
from hessplit.mmio import MatrixMarketError
from hessplit.verify import SUITES, reports_json, run_suite

log = logging.getLogger("hessplit")

FIGURE5_QUEUE = (21, 5, 0.9, 0.1, 1.0)


def _floats(text: str) -> List[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _queue(text: str) -> tuple:
    vals = _floats(text)
    if len(vals) != 5 or vals[0] != int(vals[0]) or vals[1] != int(vals[1]):
        raise argparse.ArgumentTypeError("expected N,S,LAMBDA,MU,LAMBDA1 with integer N and S")
    return (int(vals[0]), int(vals[1]), *vals[2:])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hessplit",
                                description="Matrix-splitting experiments (CSV) and verification suites.")
    p.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = p.add_subparsers(dest="command", required=True)

    def out_arg(sp):
        sp.add_argument("--out", help="output file (default: stdout)")

    sp = sub.add_parser("compare", help="GS, stair and AGS radii on random Hessenberg M-matrices")
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    out_arg(sp)

    sp = sub.add_parser("excess", help="radii and sweeps-to-0.01 against the row-sum excess eta")
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--eta-list", type=_floats, default=list(ex.DEFAULT_ETAS))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=1, help="matrices per eta")
    out_arg(sp)

    sp = sub.add_parser("sor-sweep", help="SOR-variant radii over an omega grid (or block counts)")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--matrix", help="Matrix Market file")
    src.add_argument("--queue", type=_queue, default=None,
                     help="two-queue generator N,S,LAMBDA,MU,LAMBDA1 (default 21,5,0.9,0.1,1)")
    sp.add_argument("--partition", help="block sizes sidecar for --matrix")
    sp.add_argument("--omega-list", type=_floats, default=list(ex.DEFAULT_OMEGAS))
    sp.add_argument("--block", action="store_true", help="use block splittings on the source partition")
    sp.add_argument("--flip", action="store_true", help="relabel indices in reverse (upper Hessenberg input)")
    sp.add_argument("--transpose", action="store_true", help="transpose the input first (zero row sums)")
    sp.add_argument("--k-list", type=_ints, default=None,
                    help="sweep the number of near-uniform blocks K at the single --omega-list value "
                         "(--matrix only)")
    out_arg(sp)

    sp = sub.add_parser("verify", help="run randomized property suites")
    sp.add_argument("--suite", default="all", choices=SUITES + ("all",))
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--trials", type=int, default=None, help="override each suite's default trial count")
    out_arg(sp)
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _run(args, parser) -> int:
    if args.command == "compare":
        rows = ex.compare_rows(args.n, args.trials, args.seed)
        _emit(ex.to_csv(ex.COMPARE_HEADER, rows), args.out)
        return 0
    if args.command == "excess":
        rows = ex.excess_rows(args.n, args.eta_list, args.seed, repeats=args.trials)
        _emit(ex.to_csv(ex.EXCESS_HEADER, rows), args.out)
        return 0
    if args.command == "sor-sweep":
        if args.partition and not args.matrix:
            parser.error("--partition needs --matrix")
        if args.matrix:
            source = GeneratorSpec("file", path=args.matrix, partition_path=args.partition)
        else:
            source = GeneratorSpec("two_queue", queue_params=args.queue or FIGURE5_QUEUE)
        if args.k_list is not None:
            if not args.matrix:
                parser.error("--k-list needs --matrix")
            if len(args.omega_list) != 1:
                parser.error("--k-list takes exactly one --omega-list value")
            rows = ex.block_count_rows(source, args.k_list, args.omega_list[0],
                                       flip_order=args.flip, transpose=args.transpose)
            _emit(ex.to_csv(ex.BLOCK_HEADER, rows), args.out)
            return 0
        rows = ex.sor_sweep_rows(source, args.omega_list, block=args.block,
                                 flip_order=args.flip, transpose=args.transpose)
        _emit(ex.to_csv(ex.SOR_HEADER, rows), args.out)
        return 0
    log.info("verify: suite=%s seed=%d trials=%s", args.suite, args.seed, args.trials)
    reports = run_suite(args.suite, args.seed, args.trials)
    _emit(reports_json(reports) + "\n", args.out)
    return 0 if all(r.passed for r in reports) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=args.log_level, stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
        return _run(args, parser)
    except SystemExit as exc:
        # argparse usage errors (2) and --help (0)
        return exc.code if isinstance(exc.code, int) else 2
    except (ValueError, MatrixMarketError, OSError) as exc:
        print(f"hessplit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

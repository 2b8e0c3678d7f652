"""Command-line front end.

Exit codes: 0 converged / verification passed, 1 usage, I/O or parse error,
2 iteration limit reached, 3 verification failure.
"""

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import diagnostics, io, oracle, solvers
from .errors import ContactError, InvalidMeshRatio
from .fem import BenchmarkSpec, build_benchmark, paper_spec
from .linalg import cholesky_factorize
from .solvers import Method, SolverConfig, Status

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITER = 2
EXIT_VERIFY_FAILED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _alpha(text):
    if text == "auto":
        return None
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("alpha must be positive or 'auto'")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_instance_args(p):
    p.add_argument("--nx", type=_positive_int, help="elements along the width")
    p.add_argument("--ny", type=_positive_int, help="elements along the height")
    p.add_argument("--paper-spec", action="store_true",
                   help="reference block with ny = nx / 3 (requires --nx)")
    p.add_argument("--instance", help="instance JSON file")


def _add_solver_args(p):
    p.add_argument("--alpha", type=_alpha, default=None, help="step size or 'auto' (default)")
    p.add_argument("--eps", type=_positive_float, default=1e-6)
    p.add_argument("--max-iter", type=_positive_int, default=100000)


def build_parser():
    parser = _Parser(prog="uzawa-contact", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one instance")
    _add_instance_args(p)
    _add_solver_args(p)
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.ACCELERATED_RESTART.value)
    p.add_argument("--history", help="write the convergence history CSV here")
    p.add_argument("--out", default="solution.json")

    p = sub.add_parser("compare", help="run all three methods on one instance")
    _add_instance_args(p)
    _add_solver_args(p)
    p.add_argument("--out", default="compare.json",
                   help="summary JSON; history_<method>.csv files go next to it")

    p = sub.add_parser("export", help="write a benchmark instance as JSON")
    _add_instance_args(p)
    p.add_argument("--out", default="instance.json")

    p = sub.add_parser("import-check", help="load and validate an instance file")
    _add_instance_args(p)

    p = sub.add_parser("verify", help="cross-check solvers against the brute-force oracle")
    p.add_argument("--seed", type=int, default=oracle.DEFAULT_SEED)
    p.add_argument("--cases", type=_positive_int, default=200)
    p.add_argument("--dump", default="verify_failure.json",
                   help="where to write the first failing instance")
    return parser


def load_qp(args, parser):
    if args.instance is not None:
        if args.nx is not None or args.ny is not None or args.paper_spec:
            parser.error("give either --instance or mesh flags, not both")
        return io.load_instance(args.instance)
    if args.nx is None:
        parser.error("an instance source is required (--nx/--ny, --paper-spec --nx, or --instance)")
    if args.paper_spec:
        spec = paper_spec(args.nx)
        if args.ny is not None and args.ny != spec.ny:
            raise InvalidMeshRatio(f"--paper-spec needs ny = nx / 3 = {spec.ny}, got {args.ny}")
    else:
        if args.ny is None:
            parser.error("--ny is required unless --paper-spec is given")
        spec = BenchmarkSpec(nx=args.nx, ny=args.ny)
    return build_benchmark(spec)


def _resolve_alpha(args, qp, factor):
    if args.alpha is not None:
        return args.alpha
    alpha = solvers.default_step_size(qp, factor)
    print(f"alpha = {alpha!r} (auto)")
    return alpha


def cmd_solve(args, parser):
    qp = load_qp(args, parser)
    factor = cholesky_factorize(qp.stiffness)
    alpha = _resolve_alpha(args, qp, factor)
    cfg = SolverConfig(alpha=alpha, epsilon=args.eps, max_iter=args.max_iter,
                       method=Method(args.method), record_history=args.history is not None)
    t0 = time.perf_counter()
    result = solvers.solve(qp, cfg, factor=factor)
    elapsed = time.perf_counter() - t0
    doc = io.solution_to_dict(qp, result)
    io.write_json(args.out, doc)
    if args.history is not None:
        io.write_history_csv(args.history, result.history)
    print(f"method={result.method.value} status={result.status.value} "
          f"iterations={result.iterations} residual={doc['kkt']['total']:.3e} "
          f"time={elapsed:.3f}s")
    return EXIT_OK if result.status is Status.CONVERGED else EXIT_MAX_ITER


def cmd_compare(args, parser):
    qp = load_qp(args, parser)
    factor = cholesky_factorize(qp.stiffness)
    alpha = _resolve_alpha(args, qp, factor)

    def run(method):
        cfg = SolverConfig(alpha=alpha, epsilon=args.eps, max_iter=args.max_iter,
                           method=method, record_history=True)
        return solvers.solve(qp, cfg, factor=factor)

    methods = list(Method)
    with ThreadPoolExecutor(max_workers=len(methods)) as pool:
        results = list(pool.map(run, methods))

    outdir = os.path.dirname(os.path.abspath(args.out))
    summary = {"alpha": alpha, "epsilon": args.eps, "max_iter": args.max_iter, "methods": {}}
    for method, result in zip(methods, results):
        io.write_history_csv(os.path.join(outdir, f"history_{method.value}.csv"), result.history)
        summary["methods"][method.value] = {
            "status": result.status.value,
            "iterations": result.iterations,
            "dual_obj": diagnostics.dual_objective(factor, qp, result.r),
            "kkt_total": diagnostics.kkt_residual(qp, result.u, result.r).total,
        }
        print(f"{method.value:>14s}: status={result.status.value} iterations={result.iterations} "
              f"time={result.wall_time:.3f}s")
    io.write_json(args.out, summary)
    ok = all(r.status is Status.CONVERGED for r in results)
    return EXIT_OK if ok else EXIT_MAX_ITER


def cmd_export(args, parser):
    if args.instance is not None:
        parser.error("export builds a benchmark; use --nx/--ny or --paper-spec --nx")
    qp = load_qp(args, parser)
    io.save_instance(qp, args.out)
    print(f"wrote {args.out}: d={qp.dim} m={qp.ncon}")
    return EXIT_OK


def cmd_import_check(args, parser):
    if args.instance is None:
        parser.error("import-check needs --instance")
    qp = io.load_instance(args.instance)
    cholesky_factorize(qp.stiffness)
    print(f"ok: d={qp.dim} m={qp.ncon}")
    return EXIT_OK


def _gradient_check(qp, rng, step=1e-6, rtol=1e-5):
    factor = cholesky_factorize(qp.stiffness)
    r = -rng.uniform(0.0, 2.0, qp.ncon)
    _, gamma = solvers.dual_gradient(factor, qp, r)
    for i in range(qp.ncon):
        e = np.zeros(qp.ncon)
        e[i] = step
        fd = (diagnostics.dual_objective(factor, qp, r + e)
              - diagnostics.dual_objective(factor, qp, r - e)) / (2 * step)
        if abs(fd - gamma[i]) > rtol * max(abs(gamma[i]), 1.0):
            return f"gradient mismatch at component {i}: fd={fd!r}, analytic={gamma[i]!r}"
    return None


def _oracle_check(qp, tol=1e-6, eps=1e-10):
    ref = oracle.active_set_solve(qp)
    for method in Method:
        result = solvers.solve(qp, SolverConfig(epsilon=eps, method=method))
        if np.any(result.r > 0):
            return f"{method.value}: infeasible reactions {result.r.tolist()}"
        du = np.max(np.abs(result.u - ref.u))
        dr = np.max(np.abs(result.r - ref.r))
        if du > tol or dr > tol:
            return f"{method.value}: |u - u*| = {du:.3e}, |r - r*| = {dr:.3e}"
    return None


def cmd_verify(args, parser):
    rng = np.random.default_rng(args.seed)
    suites = {"oracle-equivalence": 0, "gradient-check": 0}
    failure = None
    for case in range(args.cases):
        qp = oracle.random_instance(rng)
        for name, check in (("oracle-equivalence", lambda: _oracle_check(qp)),
                            ("gradient-check", lambda: _gradient_check(qp, rng))):
            try:
                reason = check()
            except ContactError as exc:
                reason = f"{type(exc).__name__}: {exc}"
            if reason is None:
                suites[name] += 1
            elif failure is None:
                failure = {"case": case, "suite": name, "reason": reason,
                           "instance": io.qp_to_dict(qp)}
    for name, passed in suites.items():
        print(f"{name}: {passed}/{args.cases} passed")
    if failure is not None:
        io.write_json(args.dump, failure)
        print(f"first failure (case {failure['case']}, {failure['suite']}): {failure['reason']}")
        print(f"instance written to {args.dump}")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "compare": cmd_compare,
    "export": cmd_export,
    "import-check": cmd_import_check,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, parser)
    except (ContactError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

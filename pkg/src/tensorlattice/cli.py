"""Command-line front end.

Subcommands: ``gen`` (example tensors), ``unfold``, ``landscape`` (CSV, JSON
or DOT), ``check`` (inequality audits as JSON lines) and ``odeco``
(compose/verify factor files).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bounds, odeco
from .errors import DimsError, ParamError, TensorLatticeError
from .norms import AscentConfig, landscape
from .partitions import Partition, cover_edges, enumerate_partitions
from .tensor import Tensor, load_tensor, make_tensor, unfold

SUITES = ("pq", "monotonicity", "onestep", "main", "corollaries", "odeco-cone", "all")
KINDS = ("random-gaussian", "identity-kron", "onestep-sharp", "pi-od")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = 64
    tolerance: float = 1e-10
    p: float = 2.0
    format: str = "csv"
    input: str | None = None
    output: str | None = None

    def __post_init__(self):
        if self.format not in ("csv", "json", "dot"):
            raise ParamError(f"unknown format {self.format!r}")
        self.ascent  # validates ranges

    @property
    def ascent(self) -> AscentConfig:
        return AscentConfig(restarts=self.restarts, tolerance=self.tolerance, seed=self.seed)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p value {text!r}") from None


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_config(args) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        restarts=args.restarts,
        tolerance=args.tol,
        p=getattr(args, "p", 2.0),
        format=getattr(args, "format", "csv"),
        input=getattr(args, "input", None),
        output=args.output,
    )


# -- generators ---------------------------------------------------------------


def identity_kron(d: int) -> Tensor:
    eye = np.eye(d)
    return Tensor(np.multiply.outer(eye, eye))


def onestep_sharp(d1: int, d2: int, core: np.ndarray) -> Tensor:
    """``(sum_{i<=d1} e_{1,i} ⊗ e_{2,i}) ⊗ D`` with ``d1 <= d2``."""
    if d1 > d2:
        raise ParamError(f"need d1 <= d2, got {d1} > {d2}")
    pairing = np.zeros((d1, d2))
    pairing[np.arange(d1), np.arange(d1)] = 1.0
    return Tensor(np.multiply.outer(pairing, core))


def cmd_gen(args) -> int:
    cfg = _run_config(args)
    rng = np.random.default_rng(cfg.seed)
    factors = None
    if args.kind == "random-gaussian":
        if not args.dims:
            raise ParamError("random-gaussian needs --dims")
        tensor = make_tensor(args.dims, rng.standard_normal(math.prod(args.dims)))
    elif args.kind == "identity-kron":
        if not args.d or args.d < 1:
            raise ParamError("identity-kron needs --d >= 1")
        tensor = identity_kron(args.d)
    elif args.kind == "onestep-sharp":
        if not args.d1 or not args.d2:
            raise ParamError("onestep-sharp needs --d1 and --d2")
        core_dims = args.core_dims or [2, 2]
        tensor = onestep_sharp(args.d1, args.d2, rng.standard_normal(core_dims))
    else:
        if not args.dims or not args.partition:
            raise ParamError("pi-od needs --dims and --partition")
        part = Partition.parse(args.partition, len(args.dims))
        r = args.rank or (len(args.lambdas) if args.lambdas else 1)
        factors = odeco.generate_pi_od(args.dims, part, r, args.lambdas, cfg.seed)
        tensor = odeco.compose(factors)
    _emit(json.dumps(tensor.to_json()) + "\n", cfg.output)
    if factors is not None:
        if args.factors_output:
            odeco.save_factors(factors, args.factors_output)
        else:
            sys.stdout.write(json.dumps(factors.to_json()) + "\n")
    return 0


# -- unfold / landscape -------------------------------------------------------


def cmd_unfold(args) -> int:
    tensor = load_tensor(args.input)
    part = Partition.parse(args.partition, tensor.order)
    _emit(json.dumps(unfold(tensor, part).to_json()) + "\n", args.output)
    return 0


def render_csv(land) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["partition", "level", "norm_estimate", "converged", "restarts", "is_exact"])
    for part, est in land.items():
        writer.writerow(
            [
                str(part),
                part.level,
                fmt(est.value),
                str(est.converged).lower(),
                est.restarts,
                str(est.is_exact).lower(),
            ]
        )
    return buf.getvalue()


def render_json(land) -> str:
    rows = [
        {
            "partition": str(part),
            "level": part.level,
            "norm_estimate": est.value,
            "method": est.method,
            "converged": est.converged,
            "restarts": est.restarts,
            "iterations": est.iterations,
            "is_exact": est.is_exact,
        }
        for part, est in land.items()
    ]
    return json.dumps(rows, indent=1) + "\n"


def render_dot(land, k: int) -> str:
    lines = ["digraph partition_lattice {", "  rankdir=BT;", "  node [shape=box];"]
    for part, est in land.items():
        lines.append(f'  "{part}" [label="{part}\\n{fmt(est.value)}"];')
    for fine, coarse in cover_edges(k):
        lines.append(f'  "{fine}" -> "{coarse}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_landscape(args) -> int:
    cfg = _run_config(args)
    tensor = load_tensor(cfg.input)
    land = landscape(tensor, cfg.p, cfg.ascent)
    if cfg.format == "csv":
        text = render_csv(land)
    elif cfg.format == "json":
        text = render_json(land)
    else:
        text = render_dot(land, tensor.order)
    _emit(text, cfg.output)
    return 0


# -- check --------------------------------------------------------------------


def run_suite(suite: str, tensor: Tensor | None, args, cfg: RunConfig) -> list[bounds.InequalityReport]:
    if suite not in SUITES:
        raise ParamError(f"unknown suite {suite!r}")
    reports: list[bounds.InequalityReport] = []
    factors = odeco.load_factors(args.factors) if getattr(args, "factors", None) else None
    if tensor is None:
        if factors is None:
            raise ParamError("check needs --input or --factors")
        tensor = odeco.compose(factors)
    want = (lambda s: True) if suite == "all" else (lambda s: s == suite)
    config = cfg.ascent
    land = None
    if any(want(s) for s in ("monotonicity", "onestep", "main", "corollaries")):
        land = landscape(tensor, 2, config)
    k = tensor.order

    if want("pq"):
        if args.q is not None:
            pairs = [(cfg.p, args.q)]
        else:
            pairs = [(1.0, 2.0), (2.0, math.inf)]
        for p, q in pairs:
            reports.append(bounds.audit_pq_sandwich(tensor, p, q, config))
    if want("monotonicity"):
        reports.extend(bounds.audit_monotonicity(tensor, config, land))
    if want("onestep"):
        if args.partition:
            part = Partition.parse(args.partition, k)
            if not args.blocks or len(args.blocks) != 2:
                raise ParamError("onestep with --partition needs --blocks i,j")
            reports.append(bounds.audit_one_step(tensor, part, *args.blocks, config, land))
        else:
            for part in enumerate_partitions(k):
                for i in range(1, part.level + 1):
                    for j in range(i + 1, part.level + 1):
                        reports.append(bounds.audit_one_step(tensor, part, i, j, config, land))
    if want("main"):
        if args.pi1 and args.pi2:
            pairs = [(Partition.parse(args.pi1, k), Partition.parse(args.pi2, k))]
        else:
            parts = enumerate_partitions(k)
            pairs = [(a, b) for a in parts for b in parts]
        for a, b in pairs:
            reports.append(bounds.audit_main_theorem(tensor, a, b, config, land))
    if want("corollaries"):
        try:
            reports.extend(bounds.audit_corollaries(tensor, config, land))
        except DimsError:
            if suite != "all":
                raise
            reports.append(bounds.audit_frobenius_ratio(tensor, config, land))
    if want("odeco-cone"):
        if factors is None:
            if suite != "all":
                raise ParamError("odeco-cone needs --factors")
        else:
            base = Partition.parse(args.partition, k) if args.partition and suite != "all" else None
            reports.extend(odeco.check_upper_cone_equality(factors, base, config))
    return reports


def cmd_check(args) -> int:
    cfg = _run_config(args)
    tensor = load_tensor(cfg.input) if cfg.input else None
    reports = run_suite(args.suite, tensor, args, cfg)
    _emit("".join(r.to_json() + "\n" for r in reports), cfg.output)
    for n, r in enumerate(reports):
        if not r.passed:
            sys.stderr.write(f"FAILED report #{n}: {r.name} {json.dumps(r.instance)}\n")
            return 1
    return 0


# -- odeco --------------------------------------------------------------------


def cmd_odeco(args) -> int:
    factors = odeco.load_factors(args.factors)
    if args.action == "compose":
        _emit(json.dumps(odeco.compose(factors).to_json()) + "\n", args.output)
        return 0
    part = Partition.parse(args.partition, len(factors.dims)) if args.partition else factors.partition
    ok = odeco.verify_pi_od(factors, part, args.vtol)
    _emit(json.dumps({"partition": str(part), "pi_od": ok}) + "\n", args.output)
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--restarts", type=int, default=64)
    sub.add_argument("--tol", type=float, default=1e-10)
    sub.add_argument("--output", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorlattice",
        description="Unfoldings, norm landscapes and norm-inequality audits for dense tensors.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="write an example tensor as JSON")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--dims", type=parse_ints)
    gen.add_argument("--d", type=int)
    gen.add_argument("--d1", type=int)
    gen.add_argument("--d2", type=int)
    gen.add_argument("--core-dims", type=parse_ints, help="dims of D for onestep-sharp (default 2,2)")
    gen.add_argument("--partition")
    gen.add_argument("--rank", type=int)
    gen.add_argument("--lambdas", type=parse_floats)
    gen.add_argument("--factors-output")
    _common(gen)
    gen.set_defaults(func=cmd_gen)

    unf = subs.add_parser("unfold", help="unfold a tensor along a partition")
    unf.add_argument("--input", required=True)
    unf.add_argument("--partition", required=True)
    unf.add_argument("--output")
    unf.set_defaults(func=cmd_unfold)

    land = subs.add_parser("landscape", help="norm of every unfolding")
    land.add_argument("--input", required=True)
    land.add_argument("--p", type=parse_p, default=2.0)
    land.add_argument("--format", choices=("csv", "json", "dot"), default="csv")
    _common(land)
    land.set_defaults(func=cmd_landscape)

    chk = subs.add_parser("check", help="audit norm inequalities; exit 0 iff all pass")
    chk.add_argument("suite", choices=SUITES)
    chk.add_argument("--input")
    chk.add_argument("--factors")
    chk.add_argument("--p", type=parse_p, default=2.0)
    chk.add_argument("--q", type=parse_p)
    chk.add_argument("--pi1")
    chk.add_argument("--pi2")
    chk.add_argument("--partition")
    chk.add_argument("--blocks", type=parse_ints, help="1-based block pair i,j for onestep")
    _common(chk)
    chk.set_defaults(func=cmd_check)

    od = subs.add_parser("odeco", help="compose or verify pi-OD factor files")
    od.add_argument("action", choices=("compose", "verify"))
    od.add_argument("--factors", required=True)
    od.add_argument("--partition")
    od.add_argument("--vtol", type=float, default=odeco.LOADED_TOLERANCE)
    od.add_argument("--output")
    od.set_defaults(func=cmd_odeco)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TensorLatticeError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

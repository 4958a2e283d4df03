"""Command-line front end: single runs, the three bundled experiment tables,
chirp plots with a box-count estimate, and the series route to codimension.

Exit codes: 0 success, 2 usage, 3 model/admissibility, 4 numeric failure.
"""

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import csvio
from .dimension import (
    EstimatorMethod,
    best_estimate,
    box_count_dimension,
    chirp_segments,
    chirp_theoretical_dimension,
    codimension_from_dimension,
    dyadic_scales,
    estimate_all,
    select_estimate,
    theoretical_dimension,
)
from .entryexit import SequenceConfig, generate_sequence
from .errors import (
    BracketFailure,
    DegenerateGap,
    DegenerateModel,
    FractalCodimError,
    InsufficientScales,
    NoConvergence,
    NonAdmissibleHeight,
    QuadratureFailure,
    WrongShape,
)
from .models import ClassicalLienardModel, NormalFormModel, TwoStrokeModel
from .series import (
    TruncatedSeries,
    codimension_from_series,
    g_from_h1,
    psi_from_h1,
    series_invert,
)
from .svg import write_chirp_svg

USAGE_EXIT = 2
MODEL_EXIT = 3
NUMERIC_EXIT = 4

_MODEL_ERRORS = (DegenerateModel, NonAdmissibleHeight)
_NUMERIC_ERRORS = (
    NoConvergence,
    QuadratureFailure,
    BracketFailure,
    DegenerateGap,
    InsufficientScales,
    WrongShape,
    FractalCodimError,
)

_METHOD_LABEL = {
    EstimatorMethod.CAHEN: "cahen",
    EstimatorMethod.BOREL: "borel",
    EstimatorMethod.TAIL_NUCLEUS: "tail-nucleus",
    EstimatorMethod.BOX_COUNT: "box-count",
}


class _UsageError(Exception):
    pass


def _thread_count(n_jobs):
    env = os.environ.get("SLOWFAST_THREADS", "").strip()
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


def _build_model(args):
    name = args.model
    if name == "normalform":
        missing = [k for k in ("n", "m", "j", "alpha", "beta") if getattr(args, k) is None]
        if missing:
            raise _UsageError(f"--model normalform requires --{' --'.join(missing)}")
        return NormalFormModel(n=args.n, m=args.m, j=args.j, alpha=args.alpha, beta=args.beta)
    if name == "lienard":
        missing = [k for k in ("j", "a") if getattr(args, k) is None]
        if missing:
            raise _UsageError(f"--model lienard requires --{' --'.join(missing)}")
        return ClassicalLienardModel(j=args.j, a_coeff=args.a)
    if name == "twostroke":
        missing = [k for k in ("alpha", "delta", "gamma") if getattr(args, k) is None]
        if missing:
            raise _UsageError(f"--model twostroke requires --{' --'.join(missing)}")
        return TwoStrokeModel(alpha_p=args.alpha, delta_p=args.delta, gamma_p=args.gamma)
    raise _UsageError(f"unknown model {name!r}")


def _model_desc(model):
    if isinstance(model, NormalFormModel):
        return (
            f"normalform n={model.n} m={model.m} j={model.j} "
            f"alpha={model.alpha:g} beta={model.beta}"
        )
    if isinstance(model, ClassicalLienardModel):
        return f"lienard j={model.j} a={model.a_coeff:g}"
    return (
        f"twostroke alpha={model.alpha_p:g} delta={model.delta_p:g} "
        f"gamma={model.gamma_p:g} beta={model.beta_p:g}"
    )


def _declared_j(model):
    return model.j if isinstance(model, (NormalFormModel, ClassicalLienardModel)) else None


def _codim_cell(report):
    if not report.resolved:
        (ja, da), (jb, db) = report.candidates
        return f"unresolved({ja}:{da:.6g}|{jb}:{db:.6g})"
    if report.infinite:
        return "infinite"
    return str(report.codimension)


@dataclass
class RunRecord:
    """Lossless one-row summary of a single sequence run."""

    model_desc: str
    y0: float
    iterations: int
    orientation: str
    n_heights: int
    truncated_early: bool
    cahen: float
    borel: float
    tail_nucleus: float
    selected_method: str
    selected_value: float
    codimension: str
    snap_distance: float
    wall_time_s: float

    HEADER = (
        "model,y0,iterations,orientation,n_heights,truncated_early,"
        "est_cahen,est_borel,est_tailnucleus,selected_method,selected_value,"
        "codimension,snap_distance,wall_time_s"
    ).split(",")

    def row(self):
        return [
            self.model_desc,
            self.y0,
            self.iterations,
            self.orientation,
            self.n_heights,
            int(self.truncated_early),
            self.cahen,
            self.borel,
            self.tail_nucleus,
            self.selected_method,
            self.selected_value,
            self.codimension,
            self.snap_distance,
            self.wall_time_s,
        ]


def _run_pipeline(model, cfg):
    t0 = time.perf_counter()
    seq = generate_sequence(model, cfg)
    estimates = estimate_all(seq)
    wall = time.perf_counter() - t0
    return seq, estimates, wall


def _trace_csv(seq, estimates):
    traces = {}
    for method, est in estimates.items():
        traces[method] = {int(k): v for k, v in est.per_k}
    rows = []
    for k, y in enumerate(seq.heights):
        rows.append(
            [
                k,
                float(y),
                traces[EstimatorMethod.CAHEN].get(k, ""),
                traces[EstimatorMethod.BOREL].get(k, ""),
                traces[EstimatorMethod.TAIL_NUCLEUS].get(k, ""),
            ]
        )
    return csvio.write_rows(["k", "y_k", "est_cahen", "est_borel", "est_tailnucleus"], rows)


def cmd_run(args):
    model = _build_model(args)
    if args.iters < 2:
        raise _UsageError("--iters must be at least 2")
    cfg = SequenceConfig(
        h0=args.y0,
        max_iterations=args.iters,
        root_tol=args.root_tol,
        min_height=args.min_height,
    )
    seq, estimates, wall = _run_pipeline(model, cfg)
    if args.method == "auto":
        method, selected = select_estimate(estimates)
    else:
        method = {
            "cahen": EstimatorMethod.CAHEN,
            "borel": EstimatorMethod.BOREL,
            "tailnucleus": EstimatorMethod.TAIL_NUCLEUS,
        }[args.method]
        selected = estimates[method]
    report = codimension_from_dimension(model.contact_order, selected.final_value)
    record = RunRecord(
        model_desc=_model_desc(model),
        y0=args.y0,
        iterations=args.iters,
        orientation=seq.orientation.value,
        n_heights=len(seq.heights),
        truncated_early=seq.truncated_early,
        cahen=estimates[EstimatorMethod.CAHEN].final_value,
        borel=estimates[EstimatorMethod.BOREL].final_value,
        tail_nucleus=estimates[EstimatorMethod.TAIL_NUCLEUS].final_value,
        selected_method=_METHOD_LABEL[method],
        selected_value=selected.final_value,
        codimension=_codim_cell(report),
        snap_distance=report.snap_distance,
        wall_time_s=wall,
    )
    print(f"model: {record.model_desc}")
    print(
        f"run: y0={args.y0:g} iterations={args.iters} orientation={record.orientation}-solved "
        f"heights={record.n_heights} truncated={'yes' if record.truncated_early else 'no'}"
    )
    print(f"est cahen:        {record.cahen:.9g}")
    print(f"est borel:        {record.borel:.9g}")
    print(f"est tail-nucleus: {record.tail_nucleus:.9g}")
    print(f"selected ({record.selected_method}): {record.selected_value:.9g}")
    jd = _declared_j(model)
    if jd is not None:
        theo = theoretical_dimension(model.contact_order, jd)
        print(f"declared j={jd}: theoretical dimension {theo:.9g}")
    print(f"codimension: {record.codimension} (snap distance {record.snap_distance:.3g})")
    print(f"wall time: {wall:.3f} s")
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(_trace_csv(seq, estimates))
        print(f"trace written: {args.trace}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(csvio.write_rows(RunRecord.HEADER, [record.row()]))
        print(f"summary csv written: {args.csv}")
    return 0


# --- bundled experiment tables ---------------------------------------------

# (iterations, y0, j, a)
TABLE1_ROWS = [
    (100, 0.001, 0, 1.0),
    (1000, 0.001, 0, 2.0),
    (100, 0.001, 1, 1.0),
    (100, 0.001, 2, 1.0),
    (100, 0.001, 3, 1.0),
    (100, 0.001, 4, 1.0),
    (100, 0.3, 49, 1.0),
]

# (iterations, y_tilde0, alpha, delta, gamma)
TABLE2_ROWS = [
    (1000, 1.1, 1.0, 1.0, 1.0),
    (1000, 1.1, 1.0, 1.0, 10.0),
    (1000, 1.1, 2.0, 1.0, 1.0),
    (1000, 10.1, 5.0, 10.0, 1.0),
]

# (iterations, y0, m, n, j, alpha, beta)
TABLE3_ROWS = [
    (2000, 0.1, 1, 2, 0, 1.0, 1),
    (2000, 0.1, 1, 2, 0, 1.0, -1),
    (2000, 0.1, 1, 2, 10, 1.0, 1),
    (2000, 0.1, 1, 4, 10, 1.0, 1),
    (2000, 0.1, 1, 10, 10, 1.0, 1),
    (2000, 0.1, 3, 4, 10, 1.0, 1),
    (2000, 0.1, 9, 10, 5, 5.0, 1),
    (2000, 0.1, 99, 100, 50, 1.0, 1),
]


def _estimator_cells(model, h0, iterations, theoretical):
    """(cahen, borel, tail_nucleus, result, abs_gap, codim_cell, status)."""
    try:
        cfg = SequenceConfig(h0=h0, max_iterations=iterations)
        seq, estimates, _ = _run_pipeline(model, cfg)
        _, best = best_estimate(estimates, theoretical)
        report = codimension_from_dimension(model.contact_order, best.final_value)
        return [
            estimates[EstimatorMethod.CAHEN].final_value,
            estimates[EstimatorMethod.BOREL].final_value,
            estimates[EstimatorMethod.TAIL_NUCLEUS].final_value,
            best.final_value,
            abs(best.final_value - theoretical),
            _codim_cell(report),
            "ok",
        ]
    except (_MODEL_ERRORS + _NUMERIC_ERRORS + (ValueError,)) as exc:
        return ["", "", "", "", "", "", f"error:{type(exc).__name__}"]


def _table1_row(row):
    iterations, y0, j, a = row
    theo = theoretical_dimension(2, j)
    cells = _estimator_cells(ClassicalLienardModel(j=j, a_coeff=a), y0, iterations, theo)
    return [iterations, y0, j, a, theo] + cells


def _table2_row(row):
    iterations, ytilde0, alpha, delta, gamma = row
    model = TwoStrokeModel(alpha_p=alpha, delta_p=delta, gamma_p=gamma)
    theo = theoretical_dimension(2, 0)
    cells = _estimator_cells(model, ytilde0 - delta, iterations, theo)
    return [iterations, ytilde0, alpha, delta, gamma, model.beta_p, theo] + cells


def _table3_row(row):
    iterations, y0, m, n, j, alpha, beta = row
    theo = theoretical_dimension(n, j)
    model = NormalFormModel(n=n, m=m, j=j, alpha=alpha, beta=beta)
    cells = _estimator_cells(model, y0, iterations, theo)
    return [iterations, y0, m, n, j, alpha, beta, theo] + cells


_EST_HEADER = ["cahen", "borel", "tail_nucleus", "result", "abs_gap", "codimension", "status"]

TABLES = {
    1: (TABLE1_ROWS, _table1_row, ["iterations", "y0", "j", "a"] + ["theoretical"] + _EST_HEADER),
    2: (
        TABLE2_ROWS,
        _table2_row,
        ["iterations", "y_tilde0", "alpha", "delta", "gamma", "beta", "theoretical"] + _EST_HEADER,
    ),
    3: (
        TABLE3_ROWS,
        _table3_row,
        ["iterations", "y0", "m", "n", "j", "alpha", "beta", "theoretical"] + _EST_HEADER,
    ),
}


def table_csv(table_id):
    rows, row_fn, header = TABLES[table_id]
    with ThreadPoolExecutor(max_workers=_thread_count(len(rows))) as pool:
        out_rows = list(pool.map(row_fn, rows))
    return csvio.write_rows(header, out_rows)


def cmd_table(args):
    if args.id not in TABLES:
        raise _UsageError("table id must be 1, 2 or 3")
    text = table_csv(args.id)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"table {args.id} written: {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# --- chirp ------------------------------------------------------------------


def _critical_curve(model, x_lo, x_hi):
    xs = np.linspace(x_lo, x_hi, 400)
    if isinstance(model, NormalFormModel):
        ys = xs**model.n
    elif isinstance(model, ClassicalLienardModel):
        ys = xs**2 + model.a_coeff * xs ** (2 * model.j + 3)
    else:
        ys = np.full_like(xs, model.delta_p)
    return np.column_stack((xs, ys))


def auto_chirp_scales(model, seq):
    """Dyadic scale grid matched to the chirp's scaling window: between the
    entry-exit gap size at the initial and at the final height."""
    gap_hi = model._gap_scale(seq.heights[0])
    gap_lo = model._gap_scale(seq.heights[-1])
    lo_exp = max(1, int(math.floor(-math.log2(gap_hi))))
    hi_exp = min(48, int(math.ceil(-math.log2(gap_lo))))
    if hi_exp - lo_exp < 12:
        hi_exp = lo_exp + 12
    return dyadic_scales(lo_exp, hi_exp)


def cmd_chirp(args):
    model = _build_model(args)
    if args.iters < 2:
        raise _UsageError("--iters must be at least 2 (empty chirps have no dimension)")
    cfg = SequenceConfig(h0=args.y0, max_iterations=args.iters)
    seq = generate_sequence(model, cfg)
    segments = chirp_segments(model, seq)
    if args.scales:
        lo_exp, hi_exp = args.scales
        scales = dyadic_scales(lo_exp, hi_exp)
    else:
        scales = auto_chirp_scales(model, seq)
    est = box_count_dimension(segments, scales)
    print(f"model: {_model_desc(model)}")
    print(f"chirp: {len(segments)} segments, heights [{seq.heights[-1]:.6g}, {seq.heights[0]:.6g}]")
    print(
        f"box-count scales: 2^-{int(round(-math.log2(scales[0])))}..2^-{int(round(-math.log2(scales[-1])))}"
    )
    print(f"box-count dimension: {est.final_value:.6g}")
    jd = _declared_j(model)
    if jd is not None:
        theo = chirp_theoretical_dimension(model.contact_order, jd)
        print(f"theoretical chirp dimension: {theo:.6g}")
    else:
        print("theoretical chirp dimension: n/a (no declared codimension parameter)")
    if args.svg:
        x_lo = float(segments[:, 0].min())
        x_hi = float(segments[:, 1].max())
        pad = 0.1 * (x_hi - x_lo or 1.0)
        curve = _critical_curve(model, x_lo - pad, x_hi + pad)
        write_chirp_svg(args.svg, segments, curve, f"chirp: {_model_desc(model)}")
        print(f"svg written: {args.svg}")
    return 0


# --- series route -----------------------------------------------------------


def _series_table(label, series):
    cells = " ".join(f"{c:.9g}" for c in series.coefficients)
    print(f"{label}: {cells}")


def cmd_codim_series(args):
    try:
        coeffs = [float(tok) for tok in args.h1.split(",") if tok.strip() != ""]
    except ValueError:
        raise _UsageError("--h1 expects a comma-separated coefficient list, e.g. '0,1'")
    if not coeffs:
        raise _UsageError("--h1 coefficient list must be nonempty")
    if args.order < 2:
        raise _UsageError("--order must be at least 2")
    h1 = TruncatedSeries.from_coeffs(coeffs, order=max(len(coeffs) - 1, 1))
    psi = psi_from_h1(h1, order=args.order)
    inv = series_invert(psi)
    g = g_from_h1(h1, order=args.order)
    verdict = codimension_from_series(g)
    _series_table("psi", psi)
    _series_table("psi_inverse", inv)
    _series_table("g", g)
    if verdict.finite:
        print(
            f"codimension: {verdict.codimension} (j={verdict.j}, "
            f"alpha={verdict.alpha:.9g}, sign {'+' if verdict.alpha > 0 else '-'})"
        )
        nz = np.nonzero(h1.coefficients)[0]
        if len(nz) == 1 and nz[0] % 2 == 0 and nz[0] == 2 * verdict.j:
            # single-term even h1 pairs with the cubic-family model
            # F(x) = x^2 - c x^(2j+3); cross-check the sign of alpha against
            # the sign of its slow divergence integral at a small height
            paired = ClassicalLienardModel(j=verdict.j, a_coeff=-float(h1.coefficients[nz[0]]))
            sdi_sign = paired.sdi(1e-3, 1e-3)
            consistent = (sdi_sign > 0) == (verdict.alpha > 0)
            print(
                f"sign cross-check vs paired model (a={paired.a_coeff:g}): "
                f"sdi(1e-3,1e-3)={sdi_sign:.3e} -> "
                f"{'CONSISTENT' if consistent else 'INCONSISTENT'}"
            )
        else:
            print("sign cross-check: n/a (h1 is not a single even-power term)")
    else:
        print(f"codimension: infinite up to truncation order {verdict.infinite_up_to_order}")
    return 0


# --- entry point -------------------------------------------------------------


def _add_model_args(p):
    p.add_argument("--model", required=True, choices=["normalform", "lienard", "twostroke"])
    p.add_argument("--n", type=int, help="contact order (normalform)")
    p.add_argument("--m", type=int, help="singularity order (normalform)")
    p.add_argument("--j", type=int, help="codimension parameter (normalform, lienard)")
    p.add_argument("--alpha", type=float, help="alpha (normalform, twostroke)")
    p.add_argument("--beta", type=int, help="beta = +1/-1 (normalform)")
    p.add_argument("--a", type=float, help="cubic-family coefficient (lienard)")
    p.add_argument("--delta", type=float, help="delta (twostroke)")
    p.add_argument("--gamma", type=float, help="gamma (twostroke)")
    p.add_argument("--y0", type=float, required=True, help="initial section height")
    p.add_argument("--iters", type=int, required=True, help="number of entry-exit iterations")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fractalcodim",
        description=(
            "Fractal sequences of planar slow-fast contact points, Minkowski "
            "dimension estimation and fractal codimension recovery"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="generate one fractal sequence and estimate its dimension")
    _add_model_args(p_run)
    p_run.add_argument(
        "--method",
        choices=["auto", "cahen", "borel", "tailnucleus"],
        default="auto",
        help="estimator reported as 'selected' (all three are always computed)",
    )
    p_run.add_argument("--root-tol", type=float, default=1e-10, dest="root_tol")
    p_run.add_argument("--min-height", type=float, default=1e-14, dest="min_height")
    p_run.add_argument("--trace", help="write per-k trace CSV to this path")
    p_run.add_argument("--csv", help="write one-row summary CSV to this path")
    p_run.set_defaults(fn=cmd_run)

    p_table = sub.add_parser("table", help="run a bundled experiment table, emit CSV")
    p_table.add_argument("id", type=int, choices=[1, 2, 3])
    p_table.add_argument("--out", help="write CSV here instead of stdout")
    p_table.set_defaults(fn=cmd_table)

    p_chirp = sub.add_parser("chirp", help="box-count the chirp of a run, optionally plot SVG")
    _add_model_args(p_chirp)
    p_chirp.add_argument("--svg", help="write an 800x600 SVG plot to this path")
    p_chirp.add_argument(
        "--scales",
        type=lambda s: tuple(int(t) for t in s.split(",")),
        help="dyadic scale exponents LO,HI (boxes 2^-LO..2^-HI); default auto",
    )
    p_chirp.set_defaults(fn=cmd_chirp)

    p_series = sub.add_parser(
        "codim-series", help="codimension via power-series inversion of the section map"
    )
    p_series.add_argument("--h1", required=True, help="comma-separated h1 coefficients c0,c1,...")
    p_series.add_argument("--order", type=int, default=16, help="truncation order (default 16)")
    p_series.set_defaults(fn=cmd_codim_series)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except _MODEL_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return MODEL_EXIT
    except ValueError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return MODEL_EXIT
    except _NUMERIC_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return NUMERIC_EXIT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments or input, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import sys
from pathlib import Path

import numpy as np

from . import completion, design, lifting, metrics, msf, mwt, transform
from . import denoise as dn
from . import io as mio
from .polymat import lm_det

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_range(text):
    """``"3"`` -> [3]; ``"1..14"`` -> [1, ..., 14]."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a..b, got {text!r}") from None


# -- output --------------------------------------------------------------------

class Output:
    def __init__(self, fmt, path=None):
        self.fmt = fmt
        self.path = path
        self.buf = _io.StringIO()

    def table(self, header, rows, title=None):
        if self.fmt == "csv":
            w = csv.writer(self.buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
            return
        if title:
            self.buf.write(f"{title}\n")
        cells = [[str(h) for h in header]] + [[_fmt(v) for v in row] for row in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
        for c in cells:
            self.buf.write("  ".join(s.rjust(wd) for s, wd in zip(c, widths)).rstrip() + "\n")

    def matrix(self, name, M):
        M = np.atleast_2d(M)
        if self.fmt == "csv":
            self.table(["name", "i", "j", "value"],
                       [(name, i, j, M[i, j]) for i in range(M.shape[0]) for j in range(M.shape[1])])
            return
        self.buf.write(f"{name} =\n")
        for row in M:
            self.buf.write("  " + "  ".join(f"{v: .16f}" for v in row) + "\n")

    def value(self, name, v):
        if self.fmt == "csv":
            self.table(["name", "value"], [(name, v)])
        else:
            self.buf.write(f"{name}: {_fmt(v)}\n")

    def flush(self):
        text = self.buf.getvalue()
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.15g}"
    return str(v)


# -- helpers -------------------------------------------------------------------

def _load_system(args):
    if getattr(args, "system", None):
        return mwt.load_system(args.system)
    b0 = getattr(args, "b0", None)
    if b0 is not None:
        return mwt.quantized_sa1(b0)
    return mwt.sa1()


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
        return v
    return conv


def _prepost(args):
    return transform.haar_prepost() if args.mode == "balanced" else None


def _pyramid_to_flat(pyr):
    # layout: s^J, d^J, ..., d^1, each flattened vector by vector
    return np.concatenate([pyr.s.ravel()] + [d.ravel() for d in reversed(pyr.d)])


def _flat_to_pyramid(flat, J, mode, r=2):
    n = len(flat)
    transform._check_length(n, r, J, "coefficient count")
    nv = n // r
    pos = 0
    size = (nv >> J) * r
    s = flat[pos:pos + size].reshape(-1, r)
    pos += size
    d = []
    for j in range(J, 0, -1):
        size = (nv >> j) * r
        d.append(flat[pos:pos + size].reshape(-1, r))
        pos += size
    return transform.WaveletPyramid(J=J, s=s, d=d[::-1], mode=mode, length0=n)


# -- subcommands ---------------------------------------------------------------

def cmd_design(args, out):
    P = design.solve_simple_product_filter(design.SimpleDesignParams(k=4, branch=args.branch))
    out.matrix("P1", P[1])
    det = lm_det(P)
    out.table(["degree", "coefficient"], [(k, det[k]) for k in range(det.lo, det.hi + 1)],
              title="det P(z)")


def cmd_factor(args, out):
    P = design.solve_simple_product_filter(design.SimpleDesignParams(k=4, branch=args.branch))
    H0, H1, state = msf.spectral_factor(P, tol=args.tol, max_iter=args.max_iter)
    out.matrix("H0", H0)
    out.matrix("H1", H1)
    out.value("iterations", state.iter)
    out.value("fixed_point_residual", state.residual)
    out.value("status", state.status_name)
    out.value("factorization_error", msf.verify_factorization(msf.factor_symbol(H0, H1), P))


def cmd_complete(args, out):
    P = design.solve_simple_product_filter(design.SimpleDesignParams(k=4, branch=args.branch))
    H0, H1, _ = msf.spectral_factor(P, tol=args.tol, max_iter=args.max_iter)
    # iterated factors are accurate to about sqrt(tol), not to tol
    sym_tol = max(1e-10, 10 * math.sqrt(args.tol))
    S = completion.detect_symmetry(H0, H1, sym_tol)
    G0, G1 = completion.complete(H0, H1, S if args.wavelet_sign == "plus" else -S, sym_tol=sym_tol, ortho_tol=sym_tol)
    for name, M in (("H0", H0), ("H1", H1), ("G0", G0), ("G1", G1)):
        out.matrix(name, M)
    W = np.vstack([np.hstack([H0, H1]), np.hstack([G0, G1])])
    out.value("orthogonality_error", float(np.max(np.abs(W @ W.T - np.eye(4)))))


def cmd_show_system(args, out):
    s = _load_system(args)
    for k in range(s.m + 1):
        out.matrix(f"H{k}", s.H[k])
    for k in range(s.m + 1):
        out.matrix(f"G{k}", s.G[k])
    out.value("name", s.name)
    out.value("orthogonal", s.orthogonal)
    out.value("orthogonality_defect", mwt.orthogonality_defect(s.H, s.G))
    out.value("S", "none" if s.S is None else " ".join(str(int(v)) for v in s.S))
    out.value("T", "none" if s.T is None else " ".join(str(int(v)) for v in s.T))
    if s.r == 2 and s.m == 1:
        out.value("coding_gain_db", metrics.coding_gain(s))


def cmd_cascade(args, out):
    s = _load_system(args)
    f = mwt.cascade_eval(s, L=args.level, tol=args.tol)
    header = ["t"] + [f"phi{i}" for i in range(s.r)] + [f"psi{i}" for i in range(s.r)]
    rows = np.column_stack([f.grid, f.phi.T, f.psi.T])
    out.fmt = "csv"
    out.table(header, [tuple(float(v) for v in row) for row in rows])


def cmd_transform(args, out):
    s = _load_system(args)
    x = mio.read_csv(args.input)
    pyr = transform.dmwt_forward_1d(x, s, args.levels, args.mode, _prepost(args))
    flat = _pyramid_to_flat(pyr)
    if args.out:
        mio.write_csv(flat, args.out)
    else:
        out.table(["coefficient"], [(float(v),) for v in flat])


def cmd_inverse(args, out):
    s = _load_system(args)
    pyr = _flat_to_pyramid(mio.read_csv(args.input), args.levels, args.mode, s.r)
    x = transform.dmwt_inverse_1d(pyr, s, _prepost(args))
    if args.out:
        mio.write_csv(x, args.out)
    else:
        out.table(["sample"], [(float(v),) for v in x])


def cmd_denoise(args, out):
    s = _load_system(args)
    clean = mio.read_pgm(args.input).astype(float)
    noisy = clean
    if args.add_noise:
        noisy = clean + mio.gen_awgn(clean.shape, args.sigma, seed=args.seed)
    model = dn.NoiseModel(sigma=args.sigma, known=not args.estimate_sigma)
    result = dn.denoise_image(noisy, s, args.levels, args.rule, model, args.mode, _prepost(args), seed=args.seed)
    if args.out:
        mio.write_pgm(result, args.out)
    rows = [("psnr_denoised", metrics.psnr(clean, mio.to_uint8(result)))]
    if args.add_noise:
        rows.insert(0, ("psnr_noisy", metrics.psnr(clean, mio.to_uint8(noisy))))
    out.table(["metric", "value"], rows)


def cmd_quantize_report(args, out):
    rows = []
    for b0 in args.b0:
        d = lifting.dyadic_approx(b0)
        rows.append((b0, d.k, d.value, d.error, d.adders))
    out.table(["b0", "mantissa", "value", "error", "csd_adders"], rows)


def cmd_quant_error(args, out):
    q = mwt.quantized_sa1(args.b0)
    x = mio.read_csv(args.input) if args.input else mio.gen_test_signal(args.signal, args.n)
    rows = []
    for J in args.levels:
        pyr = transform.dmwt_forward_1d(x, q, J, args.mode, _prepost(args))
        rows.append((J, metrics.sup_error(x, transform.dmwt_inverse_1d(pyr, q, _prepost(args)))))
    out.table(["J", "sup_error"], rows)


def cmd_coding_gain(args, out):
    s = _load_system(args)
    model = metrics.CGModel(rho=args.rho)
    var = metrics.channel_variances(s.analysis_matrix(), model)
    out.table(["channel", "variance"], list(enumerate(var.tolist())))
    out.value("coding_gain_db", metrics.coding_gain(s, model, normalize=args.normalize))


def cmd_psnr(args, out):
    a = mio.read_pgm(args.a)
    b = mio.read_pgm(args.b)
    out.value("mse", metrics.mse(a, b))
    out.value("psnr_db", metrics.psnr(a, b))


# -- parser --------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--out", help="write output here instead of stdout")

    sysopt = _Parser(add_help=False)
    sysopt.add_argument("--system", help="coefficient file (MWSYS format); default exact SA1")
    sysopt.add_argument("--b0", type=_positive(int), help="use SA1 with a b0-bit dyadic sqrt(3)")

    tr = _Parser(add_help=False)
    tr.add_argument("--levels", type=_positive(int), default=1)
    tr.add_argument("--mode", choices=("balanced", "nonbalanced"), default="balanced")

    fac = _Parser(add_help=False)
    fac.add_argument("--branch", type=int, choices=range(4), default=0)
    fac.add_argument("--tol", type=_positive(float), default=1e-12)
    fac.add_argument("--max-iter", type=_positive(int), default=10**7)

    p = _Parser(prog="mwbank", description="Multiwavelet filter bank design and processing.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("design", parents=[common], help="solve the one-lag product filter")
    d.add_argument("--branch", type=int, choices=range(4), default=0)
    d.set_defaults(func=cmd_design)

    sub.add_parser("factor", parents=[common, fac], help="spectral factor of the product filter").set_defaults(
        func=cmd_factor)

    c = sub.add_parser("complete", parents=[common, fac], help="factor and complete with symmetric wavelets")
    c.add_argument("--wavelet-sign", choices=("plus", "minus"), default="plus",
                   help="wavelet symmetry T = S (plus) or T = -S (minus)")
    c.set_defaults(func=cmd_complete)

    sub.add_parser("show-system", parents=[common, sysopt], help="print coefficients and properties").set_defaults(
        func=cmd_show_system)

    cc = sub.add_parser("cascade", parents=[common, sysopt], help="sample phi and psi (CSV)")
    cc.add_argument("--level", type=_positive(int), default=8)
    cc.add_argument("--tol", type=_positive(float), default=1e-13)
    cc.set_defaults(func=cmd_cascade)

    t = sub.add_parser("transform", parents=[common, sysopt, tr], help="forward 1D transform of a CSV signal")
    t.add_argument("input")
    t.set_defaults(func=cmd_transform)

    i = sub.add_parser("inverse", parents=[common, sysopt, tr], help="inverse of 'transform'")
    i.add_argument("input")
    i.set_defaults(func=cmd_inverse)

    dz = sub.add_parser("denoise", parents=[common, sysopt, tr], help="denoise a PGM image")
    dz.add_argument("input")
    dz.add_argument("--sigma", type=_positive(float), required=True)
    dz.add_argument("--rule", choices=("hard", "soft"), default="hard")
    dz.add_argument("--seed", type=int, default=0)
    dz.add_argument("--add-noise", action="store_true", help="add AWGN of the given sigma first")
    dz.add_argument("--estimate-sigma", action="store_true", help="estimate sigma from level-1 details")
    dz.set_defaults(func=cmd_denoise)

    q = sub.add_parser("quantize-report", parents=[common], help="dyadic sqrt(3) approximations")
    q.add_argument("--b0", type=parse_range, default=parse_range("1..14"))
    q.set_defaults(func=cmd_quantize_report)

    qe = sub.add_parser("quant-error", parents=[common], help="sup-norm roundtrip error of a quantized bank")
    qe.add_argument("--b0", type=_positive(int), default=1)
    qe.add_argument("--levels", type=parse_range, default=parse_range("1..6"))
    qe.add_argument("--mode", choices=("balanced", "nonbalanced"), default="balanced")
    qe.add_argument("--signal", choices=("piece_regular", "piece_polynomial"), default="piece_regular")
    qe.add_argument("--n", type=_positive(int), default=1024)
    qe.add_argument("--input", help="CSV signal instead of a generated one")
    qe.set_defaults(func=cmd_quant_error)

    cg = sub.add_parser("coding-gain", parents=[common, sysopt], help="AR(1) coding gain")
    cg.add_argument("--rho", type=float, default=0.95)
    cg.add_argument("--normalize", action="store_true", help="normalize analysis rows first")
    cg.set_defaults(func=cmd_coding_gain)

    ps = sub.add_parser("psnr", parents=[common], help="PSNR between two PGM images")
    ps.add_argument("a")
    ps.add_argument("b")
    ps.set_defaults(func=cmd_psnr)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "system", None) and getattr(args, "b0", None) is not None:
            raise UsageError("--system and --b0 are mutually exclusive")
        out = Output(args.format, args.out if args.command not in ("transform", "inverse", "denoise") else None)
        args.func(args, out)
        out.flush()
        return EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    except (msf.InadmissibleFilterError, mwt.CascadeDivergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

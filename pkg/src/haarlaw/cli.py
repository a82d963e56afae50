"""Command-line front end: ``haarlaw <subcommand> [options]``.

Exit codes: 0 success, 2 invalid input or file error, 3 precision target
missed in a float mode with ``--no-fallback``.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as hio
from .analysis import clt_diagnostics, levy_compare, number_operator_tail, rescaled_density
from .errors import HaarLawError, PrecisionExceeded, TooLarge
from .exact_law import PointMassLaw, cdf, char_fn, compile_law, density, identity_check, mgf
from .moments import (MAX_PERMUTATION_ORDER, cumulants, moments_compact, moments_fidelity,
                      moments_permutation, moments_quadrature)
from .montecarlo import ks_test, sample
from .precision import PrecisionPolicy
from .spectrum import Spectrum, SpectrumKind, build_spectrum, generate

EXIT_OK, EXIT_INPUT, EXIT_PRECISION = 0, 2, 3
DEFAULT_POINTS = 1001
GRID_NUDGE = 1e-12
FIG1_DIMS = (3, 5, 9, 17)
FIG2_DIMS = (8, 16, 32, 64)
CLT_DIMS = (16, 32, 64, 128, 256)
GENERATORS = ("projector", "number-operator", "power", "log", "constant", "uniform-grid")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    spectrum: Spectrum | None
    kind: SpectrumKind | None
    grid: tuple | None
    policy: PrecisionPolicy
    fallback: bool
    fmt: str
    out: Path | None
    seed: int
    samples: int


# ---------------------------------------------------------------- parsing

def _add_spectrum_args(p, required=True):
    g = p.add_argument_group("spectrum")
    src = g.add_mutually_exclusive_group(required=required)
    src.add_argument("--spectrum", metavar="PATH", help="JSON or CSV (value,multiplicity) file")
    src.add_argument("--generate", choices=GENERATORS, help="named spectrum family")
    src.add_argument("--eigenvalues", metavar="LIST", help="comma-separated raw eigenvalues")
    g.add_argument("--rank", type=int, default=1, help="projector rank (default 1)")
    g.add_argument("--alpha", type=float, help="exponent for power spectra")
    g.add_argument("--value", type=float, help="value for constant spectra")
    g.add_argument("--dim", type=int, help="dimension d for generated spectra")
    g.add_argument("--cluster-tol", type=float, default=1e-12,
                   help="relative clustering tolerance for --eigenvalues")


def _add_common(p, grid=False, seed=False):
    p.add_argument("--precision", default="high",
                   help="fast | compensated | high | high:<bits> (default high)")
    p.add_argument("--no-fallback", action="store_true",
                   help="fail with exit 3 instead of retrying in high precision")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    if grid:
        p.add_argument("--grid", metavar="MIN:MAX:N", help="evaluation grid")
    if seed:
        p.add_argument("--seed", type=int, default=2024)
        p.add_argument("--samples", type=int, default=100_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haarlaw",
        description="Exact law of <psi|A|psi> for Haar-random pure states.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("spectrum", help="canonicalise a spectrum and print it")
    _add_spectrum_args(p)
    _add_common(p)

    for name, what in (("density", "probability density"), ("cdf", "cumulative distribution"),
                       ("charfn", "characteristic function"), ("mgf", "moment generating function")):
        p = sub.add_parser(name, help=f"{what} on a grid")
        _add_spectrum_args(p)
        _add_common(p, grid=True)
        if name == "mgf":
            p.add_argument("--omega", type=float, default=0.0, help="shift in M(y, omega)")

    p = sub.add_parser("moments", help="moments by every applicable route (JSON)")
    _add_spectrum_args(p)
    _add_common(p)
    p.add_argument("--nmax", type=int, default=4)

    p = sub.add_parser("sample", help="Haar Monte Carlo draws (CSV plus JSON sidecar)")
    _add_spectrum_args(p)
    _add_common(p, seed=True)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("kstest", help="Kolmogorov-Smirnov test of draws against the exact CDF")
    _add_spectrum_args(p)
    _add_common(p, seed=True)
    p.add_argument("--samples-file", metavar="PATH",
                   help="test these draws instead of drawing from the spectrum itself")

    p = sub.add_parser("levy", help="exact tail versus Levy's bound")
    _add_spectrum_args(p)
    _add_common(p, grid=True)
    p.add_argument("--fit-window", metavar="LO:HI",
                   help="fit exp(-C eps) on this eps window (default for number-operator: 1:10)")

    p = sub.add_parser("clt", help="cumulant scaling and rescaled densities")
    p.add_argument("--generate", choices=("power", "log"), required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--dims", default=",".join(map(str, CLT_DIMS)))
    _add_common(p, grid=True)

    p = sub.add_parser("identities", help="sum-rule identities for a non-degenerate spectrum")
    _add_spectrum_args(p)
    _add_common(p)
    p.add_argument("--omega", type=float, action="append",
                   help="shift(s) to test (repeatable; default 0, 10, -10)")

    p = sub.add_parser("fig1", help="density curves for a_k = k/d")
    p.add_argument("--dims", default=",".join(map(str, FIG1_DIMS)))
    _add_common(p, grid=True)

    p = sub.add_parser("fig2", help="rescaled densities against the standard normal")
    p.add_argument("--generate", choices=("power", "log"), default="power")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--dims", default=",".join(map(str, FIG2_DIMS)))
    _add_common(p, grid=True)
    return parser


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be MIN:MAX:N, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    if n < 2 or not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise UsageError("grid needs MIN < MAX and N >= 2")
    return lo, hi, n


def parse_dims(text: str) -> list[int]:
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad dimension list {text!r}") from None
    if not dims or min(dims) < 1:
        raise UsageError("dimensions must be positive integers")
    return dims


def _kind_from_args(args) -> SpectrumKind:
    name = args.generate
    if name == "projector":
        return SpectrumKind.projector(args.rank)
    if name == "number-operator":
        return SpectrumKind.number_operator()
    if name == "power":
        if args.alpha is None:
            raise UsageError("--generate power needs --alpha")
        if not args.alpha > 0:
            raise UsageError("--alpha must be positive")
        return SpectrumKind.power(args.alpha)
    if name == "log":
        return SpectrumKind.log()
    if name == "constant":
        if args.value is None:
            raise UsageError("--generate constant needs --value")
        return SpectrumKind.constant(args.value)
    return SpectrumKind.uniform_grid()


def _spectrum_from_args(args) -> tuple[Spectrum, SpectrumKind | None]:
    if args.spectrum:
        return hio.read_spectrum(args.spectrum), None
    if args.eigenvalues:
        try:
            raw = [float(t) for t in args.eigenvalues.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"bad eigenvalue list {args.eigenvalues!r}") from None
        return build_spectrum(raw, args.cluster_tol), None
    if args.dim is None:
        raise UsageError("--generate needs --dim")
    kind = _kind_from_args(args)
    return generate(kind, args.dim), kind


def config_from_args(args) -> RunConfig:
    spectrum = kind = None
    if hasattr(args, "dim"):
        spectrum, kind = _spectrum_from_args(args)
    grid = parse_grid(args.grid) if getattr(args, "grid", None) else None
    samples = getattr(args, "samples", 1)
    if samples < 1:
        raise UsageError("--samples must be at least 1")
    return RunConfig(
        command=args.command, spectrum=spectrum, kind=kind, grid=grid,
        policy=PrecisionPolicy.parse(args.precision), fallback=not args.no_fallback,
        fmt=args.format or ("json" if args.command in _JSON_DEFAULT else "csv"),
        out=Path(args.out) if args.out else None,
        seed=getattr(args, "seed", 0), samples=samples)


# ---------------------------------------------------------------- helpers

def _linspace(grid):
    lo, hi, n = grid
    return np.linspace(lo, hi, n)


def default_support_grid(s: Spectrum, n: int = DEFAULT_POINTS) -> np.ndarray:
    """[a_1, a_l] with the endpoints nudged inward by 1e-12 of the range."""
    nudge = GRID_NUDGE * s.width
    return np.linspace(s.lower + nudge, s.upper - nudge, n)


def _grid_or_support(cfg: RunConfig) -> np.ndarray:
    if cfg.grid:
        return _linspace(cfg.grid)
    if cfg.spectrum.is_constant:
        c = cfg.spectrum.values[0]
        span = max(1.0, abs(c))
        return np.linspace(c - span, c + span, DEFAULT_POINTS)
    return default_support_grid(cfg.spectrum)


def _grid_or_frequency(cfg: RunConfig) -> np.ndarray:
    if cfg.grid:
        return _linspace(cfg.grid)
    width = cfg.spectrum.width or 1.0
    return np.linspace(0.0, 100.0 / width, DEFAULT_POINTS)


def _emit(cfg: RunConfig, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)


def _emit_grid(cfg: RunConfig, x, values, name: str):
    if cfg.fmt == "json":
        values = np.asarray(values)
        payload = {"spectrum": hio.spectrum_to_dict(cfg.spectrum), "quantity": name,
                   "x": np.asarray(x).tolist()}
        if np.iscomplexobj(values):
            payload["re"], payload["im"] = values.real.tolist(), values.imag.tolist()
        else:
            payload["value"] = values.tolist()
        _emit(cfg, hio.dumps(payload))
    else:
        _emit(cfg, hio.grid_csv(x, values))


def _with_fallback(cfg: RunConfig, fn):
    """Run ``fn(policy)``; retry once in high precision if a float mode gives up."""
    try:
        return fn(cfg.policy)
    except PrecisionExceeded:
        if not cfg.fallback or not cfg.policy.is_float:
            raise
        print(f"haarlaw: {cfg.policy.mode} precision insufficient, retrying in high precision",
              file=sys.stderr)
        return fn(PrecisionPolicy.high())


# ---------------------------------------------------------------- commands

def cmd_spectrum(cfg, args):
    s = cfg.spectrum
    if cfg.fmt == "csv":
        _emit(cfg, "".join(f"{hio.fmt(v)},{n}\n" for v, n in zip(s.values, s.multiplicities)))
    else:
        payload = hio.spectrum_to_dict(s)
        payload["d"] = s.d
        _emit(cfg, hio.dumps(payload))


def cmd_density(cfg, args):
    x = _grid_or_support(cfg)
    values = _with_fallback(cfg, lambda pol: density(compile_law(cfg.spectrum, pol), x))
    _emit_grid(cfg, x, values, "density")


def cmd_cdf(cfg, args):
    x = _grid_or_support(cfg)
    values = _with_fallback(cfg, lambda pol: cdf(compile_law(cfg.spectrum, pol), x))
    _emit_grid(cfg, x, values, "cdf")


def cmd_charfn(cfg, args):
    lam = _grid_or_frequency(cfg)
    values = _with_fallback(cfg, lambda pol: char_fn(compile_law(cfg.spectrum, pol), lam))
    _emit_grid(cfg, lam, values, "charfn")


def cmd_mgf(cfg, args):
    y = _linspace(cfg.grid) if cfg.grid else np.linspace(-1.0, 1.0, DEFAULT_POINTS)
    values = _with_fallback(cfg, lambda pol: mgf(compile_law(cfg.spectrum, pol), y, args.omega))
    _emit_grid(cfg, y, values, "mgf")


def _is_rank_one_projector(s: Spectrum) -> bool:
    return s.d >= 2 and s.values == (0.0, 1.0) and s.multiplicities == (s.d - 1, 1)


def cmd_moments(cfg, args):
    s, nmax = cfg.spectrum, args.nmax
    if nmax < 1:
        raise UsageError("--nmax must be positive")
    routes, skipped = {}, {}

    def add(report):
        if report.n_max >= 3:
            report = cumulants(report)
        routes[report.method] = report.to_dict()

    if s.is_degenerate:
        skipped["compact"] = "needs distinct eigenvalues"
    else:
        add(_with_fallback(cfg, lambda pol: moments_compact(s, nmax, pol)))
    if nmax <= MAX_PERMUTATION_ORDER:
        add(moments_permutation(s, nmax))
    else:
        skipped["permutation"] = f"n_max > {MAX_PERMUTATION_ORDER}"
    add(_with_fallback(cfg, lambda pol: moments_quadrature(compile_law(s, pol), nmax, pol)))
    if _is_rank_one_projector(s):
        add(moments_fidelity(s.d, nmax))
    payload = {"spectrum": hio.spectrum_to_dict(s), "d": s.d, "n_max": nmax,
               "routes": routes, "skipped": skipped}
    _emit(cfg, hio.dumps(payload))


def cmd_sample(cfg, args):
    if cfg.out is None:
        raise UsageError("sample needs --out for the CSV and its JSON sidecar")
    draws = sample(cfg.spectrum, cfg.samples, cfg.seed, workers=max(1, args.workers))
    hio.write_samples(draws, cfg.out)


def cmd_kstest(cfg, args):
    if args.samples_file:
        draws = hio.read_samples(args.samples_file)
        # test foreign draws: relabel them with the target spectrum
        draws = type(draws)(cfg.spectrum, draws.seed, draws.values)
    else:
        draws = sample(cfg.spectrum, cfg.samples, cfg.seed)
    report = _with_fallback(cfg, lambda pol: ks_test(draws, compile_law(cfg.spectrum, pol)))
    payload = report.to_dict()
    payload.update(seed=draws.seed, spectrum=hio.spectrum_to_dict(cfg.spectrum))
    _emit(cfg, hio.dumps(payload))


def cmd_levy(cfg, args):
    s = cfg.spectrum
    window = None
    if args.fit_window:
        try:
            lo, hi = (float(t) for t in args.fit_window.split(":"))
        except ValueError:
            raise UsageError(f"bad fit window {args.fit_window!r}") from None
        window = (lo, hi)
    if cfg.kind is not None and cfg.kind.tag == "number_operator":
        window = window or (1.0, 10.0)
    if window is not None:
        if cfg.kind is None or cfg.kind.tag != "number_operator":
            raise UsageError("--fit-window applies to --generate number-operator")
        eps = _linspace(cfg.grid) if cfg.grid else np.linspace(0.0, window[1], 41)
        report = _with_fallback(cfg, lambda pol: number_operator_tail(s.d, eps, window, pol))
    else:
        eps = _linspace(cfg.grid) if cfg.grid else np.linspace(
            s.width / 200, s.upper - s.mean, 100, endpoint=False)
        report = _with_fallback(cfg, lambda pol: levy_compare(s, eps, pol))
    if cfg.fmt == "csv":
        _emit(cfg, hio.multi_grid_csv(report.eps, {"exact_tail": report.exact_tail,
                                                   "levy_bound": report.levy_bound}))
    else:
        payload = report.to_dict()
        payload["random_guess_levy_c"] = report.c1 / 2
        payload["number_operator_levy_c"] = 2 * report.c1
        _emit(cfg, hio.dumps(payload))


def _clt_kind(args) -> SpectrumKind:
    if args.generate == "log":
        return SpectrumKind.log()
    if args.alpha is None or not args.alpha > 0:
        raise UsageError("--generate power needs a positive --alpha")
    return SpectrumKind.power(args.alpha)


def cmd_clt(cfg, args):
    z = _linspace(cfg.grid) if cfg.grid else np.linspace(-4.0, 4.0, 161)
    kind, dims = _clt_kind(args), parse_dims(args.dims)
    report = _with_fallback(cfg, lambda pol: clt_diagnostics(kind, dims, z, pol))
    if cfg.fmt == "csv":
        cols = {f"d={d}": p for d, p in zip(dims, report.densities)}
        cols["normal"] = report.normal
        _emit(cfg, hio.multi_grid_csv(z, cols))
    else:
        _emit(cfg, hio.dumps(report.to_dict()))


def cmd_identities(cfg, args):
    s = cfg.spectrum
    omegas = args.omega or [0.0, 10.0, -10.0]
    rows = []
    worst = 0.0
    for om in omegas:
        for n in range(s.d):
            value = _with_fallback(cfg, lambda pol: identity_check(s, om, n, pol))
            expected = 1.0 if n == s.d - 1 else 0.0
            worst = max(worst, abs(value - expected))
            rows.append({"omega": om, "n": n, "value": value, "expected": expected,
                         "residual": value - expected})
    payload = {"spectrum": hio.spectrum_to_dict(s), "max_residual": worst, "checks": rows}
    _emit(cfg, hio.dumps(payload))


def cmd_fig1(cfg, args):
    dims = parse_dims(args.dims)
    x = _linspace(cfg.grid) if cfg.grid else np.linspace(0.0, 1.0, DEFAULT_POINTS)
    cols = {}
    for d in dims:
        s = generate(SpectrumKind.uniform_grid(), d)
        law = _with_fallback(cfg, lambda pol: compile_law(s, pol))
        if isinstance(law, PointMassLaw):
            raise UsageError("fig1 needs d >= 2")
        cols[f"d={d}"] = _with_fallback(cfg, lambda pol: density(law, x, pol))
    if cfg.fmt == "json":
        _emit(cfg, hio.dumps({"x": x.tolist(), "densities": {k: v.tolist() for k, v in cols.items()}}))
    else:
        _emit(cfg, hio.multi_grid_csv(x, cols))


def cmd_fig2(cfg, args):
    kind, dims = _clt_kind(args), parse_dims(args.dims)
    z = _linspace(cfg.grid) if cfg.grid else np.linspace(-4.0, 4.0, 161)
    cols = {}
    for d in dims:
        s = generate(kind, d)
        cols[f"d={d}"] = _with_fallback(cfg, lambda pol: rescaled_density(s, z, pol))
    cols["normal"] = np.exp(-0.5 * z ** 2) / math.sqrt(2 * math.pi)
    if cfg.fmt == "json":
        _emit(cfg, hio.dumps({"z": z.tolist(), "densities": {k: v.tolist() for k, v in cols.items()}}))
    else:
        _emit(cfg, hio.multi_grid_csv(z, cols))


COMMANDS = {
    "spectrum": cmd_spectrum, "density": cmd_density, "cdf": cmd_cdf, "charfn": cmd_charfn,
    "mgf": cmd_mgf, "moments": cmd_moments, "sample": cmd_sample, "kstest": cmd_kstest,
    "levy": cmd_levy, "clt": cmd_clt, "identities": cmd_identities, "fig1": cmd_fig1,
    "fig2": cmd_fig2,
}
_JSON_DEFAULT = {"spectrum", "moments", "kstest", "levy", "clt", "identities"}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        cfg = config_from_args(args)
        COMMANDS[args.command](cfg, args)
    except PrecisionExceeded as exc:
        print(f"haarlaw: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (UsageError, HaarLawError, TooLarge) as exc:
        print(f"haarlaw: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK
    except OSError as exc:
        print(f"haarlaw: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

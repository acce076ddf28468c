"""Command-line front end: ``ptdimer {matrix,spectrum,sweep,find-ep,boundary}``.

Every command writes CSV: ``#`` metadata lines echoing the parameters,
one header row, then data, LF line endings.  Floats are written as the
shortest decimal that round-trips.  ``--plot`` additionally renders a
PNG next to each CSV.

A config file (``--config PATH``) holds ``key = value`` lines whose keys
are the long flag names; flags given on the command line win.

Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .epfinder import (DEFAULT_COARSE_STEPS, DEFAULT_TOL, discriminant_on_axis,
                       scan_discriminant, classify, trace_boundary)
from .fock import DimerParams, SectorViolation, build_hamiltonian
from .rootfind import RootFindingError
from .spectra import (OracleConvergenceError, cardano_spectrum, closed_form_spectrum,
                      cubic_energies, oracle_spectrum, track_complex_pair)
from .symmetry import BlockStructureError

log = logging.getLogger("ptdimer")

COMMANDS = ("matrix", "spectrum", "sweep", "find-ep", "boundary")
SWEEP_AXES = ("lambda", "gamma", "U", "eps", "t")
PARAM_KEYS = {"t": "t", "eps": "epsilon", "lambda": "lam", "gamma": "gamma", "U": "u"}
CONFIG_KEYS = set(PARAM_KEYS) | {"axis", "range", "steps", "tol", "out", "jobs",
                                 "scan-range", "plot", "coarse-steps"}
DEFAULT_RANGES = {"sweep": (0.0, 2.0), "find-ep": (0.0, 3.0), "boundary": (-4.0, 4.0)}
DEFAULT_STEPS = {"sweep": 401, "boundary": 81}


class ConfigError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    params: DimerParams = field(default_factory=DimerParams)
    axis: str = "lambda"
    range: tuple = None
    steps: int = None
    tol: float = DEFAULT_TOL
    out: str | None = None
    jobs: int = 1
    scan_range: tuple = (0.0, 3.0)
    coarse_steps: int = DEFAULT_COARSE_STEPS
    plot: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.range is None:
            self.range = DEFAULT_RANGES.get(self.command, (0.0, 2.0))
        if self.steps is None:
            self.steps = DEFAULT_STEPS.get(self.command, 401)
        lo, hi = self.range
        if not lo < hi:
            raise ConfigError(f"range must satisfy lo < hi, got {lo}:{hi}")
        slo, shi = self.scan_range
        if not slo < shi:
            raise ConfigError(f"scan-range must satisfy lo < hi, got {slo}:{shi}")
        if self.steps < 2:
            raise ConfigError("steps must be at least 2")
        if self.coarse_steps < 2:
            raise ConfigError("coarse-steps must be at least 2")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        allowed = SWEEP_AXES if self.command == "sweep" else ("lambda", "gamma")
        if self.command in ("sweep", "find-ep", "boundary") and self.axis not in allowed:
            raise ConfigError(f"axis for {self.command} must be one of {allowed}, got {self.axis!r}")
        if self.plot and not self.out:
            raise ConfigError("--plot needs --out")


# --- parsing --------------------------------------------------------------------

def _parse_range(text):
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise ConfigError(f"range must look like lo:hi, got {text!r}") from None


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def read_config_file(path) -> dict:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        values[key] = value
    return values


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ptdimer", description="Spectra and exceptional points of the PT-symmetric Hubbard dimer.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH")
        for key in PARAM_KEYS:
            p.add_argument(f"--{key}", type=float, default=None)
        p.add_argument("--axis", default=None)
        p.add_argument("--range", default=None, metavar="LO:HI")
        p.add_argument("--steps", type=int, default=None, metavar="N")
        p.add_argument("--tol", type=float, default=None, metavar="X")
        p.add_argument("--out", default=None, metavar="PATH")
        p.add_argument("--jobs", type=int, default=None, metavar="N")
        p.add_argument("--scan-range", dest="scan_range", default=None, metavar="LO:HI",
                       help="axis interval searched at each U (boundary)")
        p.add_argument("--coarse-steps", dest="coarse_steps", type=int, default=None, metavar="N")
        p.add_argument("--plot", action="store_true", default=None,
                       help="also render a PNG next to the CSV")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _join_ranges(argv):
    # argparse would read "-4:4" as an option, so glue it to its flag
    out = []
    it = iter(argv)
    for arg in it:
        if arg in ("--range", "--scan-range"):
            out.append(f"{arg}={next(it, '')}")
        else:
            out.append(arg)
    return out


def config_from_args(argv) -> RunConfig:
    parser = _build_parser()
    ns = parser.parse_args(_join_ranges(list(argv)))
    merged = read_config_file(ns.config) if ns.config else {}
    for key in CONFIG_KEYS:
        value = getattr(ns, key.replace("-", "_"), None)
        if value is not None:
            merged[key] = value
    if ns.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    try:
        params = DimerParams(**{PARAM_KEYS[k]: float(merged[k]) for k in PARAM_KEYS if k in merged})
        kwargs = dict(command=ns.command, params=params)
        if "axis" in merged:
            kwargs["axis"] = str(merged["axis"])
        for key in ("range", "scan-range"):
            if key in merged:
                kwargs[key.replace("-", "_")] = _parse_range(str(merged[key]))
        for key in ("steps", "jobs", "coarse-steps"):
            if key in merged:
                kwargs[key.replace("-", "_")] = int(merged[key])
        if "tol" in merged:
            kwargs["tol"] = float(merged["tol"])
        if "out" in merged:
            kwargs["out"] = str(merged["out"])
        if "plot" in merged:
            kwargs["plot"] = _parse_bool(merged["plot"])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if "jobs" not in kwargs:
        kwargs["jobs"] = os.cpu_count() or 1
    return RunConfig(**kwargs)


# --- output ---------------------------------------------------------------------

def fmt(x) -> str:
    return repr(float(x))


def _metadata(cfg: RunConfig, extra=()):
    p = cfg.params
    lines = [f"# ptdimer {cfg.command}",
             f"# t={fmt(p.t)}", f"# eps={fmt(p.epsilon)}", f"# lambda={fmt(p.lam)}",
             f"# gamma={fmt(p.gamma)}", f"# U={fmt(p.u)}"]
    if cfg.command in ("sweep", "find-ep", "boundary"):
        lines.append(f"# axis={cfg.axis}")
        lines.append(f"# range={fmt(cfg.range[0])}:{fmt(cfg.range[1])}")
    if cfg.command in ("sweep", "boundary"):
        lines.append(f"# steps={cfg.steps}")
    if cfg.command in ("find-ep", "boundary"):
        lines.append(f"# tol={fmt(cfg.tol)}")
        lines.append(f"# coarse-steps={cfg.coarse_steps}")
    if cfg.command == "boundary":
        lines.append(f"# scan-range={fmt(cfg.scan_range[0])}:{fmt(cfg.scan_range[1])}")
    lines.extend(f"# {e}" for e in extra)
    return lines


def render_csv(meta, header, rows) -> str:
    buf = io.StringIO()
    for line in meta:
        buf.write(line + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(r if isinstance(r, str) else fmt(r) for r in row) + "\n")
    return buf.getvalue()


class _Outputs:
    """Collects files so a failing run leaves none behind."""

    def __init__(self):
        self.written = []

    def write(self, path, text):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".part")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
        self.written.append(path)

    def rollback(self):
        for path in self.written:
            path.unlink(missing_ok=True)
            path.with_name(path.name + ".part").unlink(missing_ok=True)


def _emit(cfg, outputs, text, path=None):
    path = path or cfg.out
    if path:
        outputs.write(path, text)
    else:
        sys.stdout.write(text)


def _png_path(path) -> Path:
    return Path(path).with_suffix(".png")


# --- commands -------------------------------------------------------------------

def _sweep_params(base: DimerParams, axis: str, value: float) -> DimerParams:
    key = {"lambda": "lam", "gamma": "gamma", "U": "u", "eps": "epsilon", "t": "t"}[axis]
    return base.replace(**{key: float(value)})


def _levels_at(args):
    base, axis, value = args
    p = _sweep_params(base, axis, value)
    return cubic_energies(p), 2 * p.epsilon + p.u


def sweep_rows(cfg: RunConfig):
    xs = np.linspace(cfg.range[0], cfg.range[1], cfg.steps)
    tasks = [(cfg.params, cfg.axis, float(x)) for x in xs]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_levels_at, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))
    else:
        results = [_levels_at(t) for t in tasks]
    pairs = track_complex_pair([r[0] for r in results], [r[1] for r in results])
    return xs, pairs


def run_matrix(cfg, outputs):
    h = build_hamiltonian(cfg.params)
    rows = [(str(i + 1), str(j + 1), h.entries[i, j].real, h.entries[i, j].imag)
            for i in range(6) for j in range(6)]
    _emit(cfg, outputs, render_csv(_metadata(cfg), ["row", "col", "re", "im"], rows))


def spectra_for(params: DimerParams):
    out = []
    if params.gamma == 0:
        out.append(closed_form_spectrum(params))
    out.append(cardano_spectrum(params))
    out.append(oracle_spectrum(build_hamiltonian(params)))
    return out


def run_spectrum(cfg, outputs):
    rows = []
    for spectrum in spectra_for(cfg.params):
        for i, v in enumerate(spectrum.values, 1):
            rows.append((spectrum.method, str(i), v.real, v.imag))
    _emit(cfg, outputs, render_csv(_metadata(cfg), ["method", "index", "re", "im"], rows))


def run_sweep(cfg, outputs):
    xs, pairs = sweep_rows(cfg)
    rows = [(x, ep.real, ep.imag, em.real, em.imag) for x, (ep, em) in zip(xs, pairs)]
    header = [cfg.axis, "re_e_plus", "im_e_plus", "re_e_minus", "im_e_minus"]
    _emit(cfg, outputs, render_csv(_metadata(cfg), header, rows))
    if cfg.plot:
        from .plotting import plot_sweep
        png = _png_path(cfg.out)
        plot_sweep(cfg.axis, xs, pairs, png, title=_title(cfg.params, cfg.axis))
        outputs.written.append(png)


def find_eps(cfg):
    scan = scan_discriminant(cfg.params, cfg.axis, cfg.range, cfg.coarse_steps, cfg.tol)
    eps = classify(scan.eps, cfg.params, cfg.axis, cfg.range, coarse_steps=cfg.coarse_steps)
    return eps, scan.tangencies


def run_find_ep(cfg, outputs):
    eps, tangencies = find_eps(cfg)
    extra = [f"tangency {t.axis}={fmt(t.value)} discriminant={fmt(t.discriminant)}" for t in tangencies]
    rows = [(e.axis, e.value, e.bracket[0], e.bracket[1], e.kind) for e in eps]
    _emit(cfg, outputs, render_csv(_metadata(cfg, extra), ["axis", "value", "lo", "hi", "kind"], rows))
    if cfg.plot:
        from .plotting import plot_discriminant
        xs = np.linspace(cfg.range[0], cfg.range[1], cfg.coarse_steps)
        disc = discriminant_on_axis(cfg.params, cfg.axis, xs)
        png = _png_path(cfg.out)
        plot_discriminant(cfg.axis, xs, disc, eps, png, title=_title(cfg.params, cfg.axis))
        outputs.written.append(png)


def branch_path(out, branch: int) -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}_branch{branch}{out.suffix or '.csv'}")


def run_boundary(cfg, outputs):
    curves = trace_boundary(cfg.params, cfg.axis, cfg.range, cfg.steps, cfg.tol,
                            cfg.scan_range, cfg.coarse_steps)
    header = ["U", f"{cfg.axis}_e"]
    if not curves:
        log.warning("no boundary points found")
    for c in curves:
        text = render_csv(_metadata(cfg, [f"branch={c.branch}"]), header, c.points)
        if cfg.out:
            outputs.write(branch_path(cfg.out, c.branch), text)
        else:
            sys.stdout.write(text)
    if cfg.plot:
        from .plotting import plot_boundary
        png = _png_path(cfg.out)
        plot_boundary(curves, png, title=_title(cfg.params, cfg.axis, skip=("U",)))
        outputs.written.append(png)


def _title(p: DimerParams, axis, skip=()):
    names = [("t", p.t), ("eps", p.epsilon), ("lambda", p.lam), ("gamma", p.gamma), ("U", p.u)]
    return ", ".join(f"{k}={v:g}" for k, v in names if k != axis and k not in skip)


RUNNERS = {"matrix": run_matrix, "spectrum": run_spectrum, "sweep": run_sweep,
           "find-ep": run_find_ep, "boundary": run_boundary}


def run(cfg: RunConfig) -> int:
    outputs = _Outputs()
    try:
        RUNNERS[cfg.command](cfg, outputs)
    except (OracleConvergenceError, RootFindingError, SectorViolation,
            BlockStructureError, NumericalFailure, FloatingPointError) as exc:
        outputs.rollback()
        print(f"ptdimer: numerical failure: {exc}", file=sys.stderr)
        return 3
    except BaseException:
        outputs.rollback()
        raise
    for path in outputs.written:
        log.info("wrote %s", path)
    return 0


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"ptdimer: config error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse
        return int(exc.code) if isinstance(exc.code, int) else 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

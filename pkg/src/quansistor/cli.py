"""Command-line front end.

Every subcommand prints one table (CSV) or report (JSON).  Floats use
``%.12g`` so identical inputs give byte-identical output.  Exit codes: 0 on
success, 2 for invalid input, 3 when a numerical check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0

from . import chain, leads, logic, omega, universality
from .errors import NumericalError, ValidationError

FLOAT_FMT = "%.12g"


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise ValidationError("config must be a JSON object")
        unknown = set(raw) - {"command", "parameters", "output_path", "format"}
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in raw:
            raise ValidationError("config needs a 'command'")
        cfg = cls(**raw)
        if cfg.format not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {cfg.format!r}")
        if not isinstance(cfg.parameters, dict):
            raise ValidationError("parameters must be an object")
        return cfg

    def argv(self) -> list:
        out = [self.command]
        for key, val in self.parameters.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(val, bool):
                if val:
                    out.append(flag)
            else:
                out += [flag, str(val)]
        if self.output_path:
            out += ["--out", self.output_path]
        out += ["--format", self.format]
        return out


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT % x
    return "" if x is None else str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return float(FLOAT_FMT % v) if np.isfinite(v) else str(v)
    return x


def render(result, fmt: str) -> str:
    if isinstance(result, dict):
        return json.dumps(_jsonable(result), indent=2, sort_keys=True) + "\n"
    header, rows = result
    if fmt == "json":
        return json.dumps([dict(zip(header, _jsonable(list(r)))) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("QUANSISTOR_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"QUANSISTOR_JOBS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def _pmap(fn, items, jobs: int) -> list:
    """Ordered map; results come back in input order whatever the completion order."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# -- subcommands ---------------------------------------------------------------

def _params(a) -> omega.OmegaParams:
    return omega.OmegaParams(a.eps, a.alpha, a.beta, a.gamma, a.q)


def cmd_spectrum(a):
    p = _params(a)
    lam = omega.spectrum(p) if p.q in (0, 1) else omega.eigenvalues(p)
    return ["k", "lambda"], [(k + 1, float(x)) for k, x in enumerate(lam)]


def cmd_universality(a):
    r = universality.independence_certificate(swap_h16_for_h1=a.swap_h16_for_h1)
    return r.as_dict()


def _mode(a) -> chain.ModeSpec:
    mu = a.lam if a.mu is None else a.mu
    tc2 = a.tc if a.tc2 is None else a.tc2
    return chain.ModeSpec(a.lam, mu, a.tc, tc2, a.L)


def cmd_chain(a):
    m = _mode(a)
    states = chain.solve_spectrum(m)
    w, _ = chain.dense_oracle(m)
    rows = []
    for i, (s, e) in enumerate(zip(states, w)):
        path = ""
        if a.profile_dir:
            os.makedirs(a.profile_dir, exist_ok=True)
            path = os.path.join(a.profile_dir, f"beta_L{m.L}_state{i:03d}.csv")
            with open(path, "w") as fh:
                fh.write("j,re_beta,im_beta\n")
                for j, b in enumerate(s.beta):
                    fh.write(f"{j},{FLOAT_FMT % b.real},{FLOAT_FMT % b.imag}\n")
        rows.append((i, s.energy, s.kind, s.parity, s.endpoint_weight, s.residual, abs(s.energy - e), path))
    return ["index", "energy", "kind", "parity", "endpoint_weight", "residual", "oracle_diff", "beta_profile"], rows


PRESETS = {"bound": (10, 0.1, 2.5), "hybrid": (10, 0.1, 1.4)}


def cmd_survival(a):
    if a.preset:
        a.L, a.tc, a.lam = PRESETS[a.preset]
    if a.L is None or a.tc is None or a.lam is None:
        raise ValidationError("survival needs --preset or all of --L, --tc, --lam")
    m = chain.ModeSpec(a.lam, a.lam, a.tc, a.tc, a.L)
    x = chain.localize_left(m)
    gap = float(x.energies[1] - x.energies[0])
    t_max = a.t_max if a.t_max is not None else 3.0 / gap  # three memory times
    t = np.linspace(0.0, t_max, a.samples)
    p = chain.survival_probability(x, t)
    closed = 0.5 * (1 + np.cos(gap * t))
    return ["t", "survival", "closed_form", "splitting"], [(ti, pi, ci, gap) for ti, pi, ci in zip(t, p, closed)]


def cmd_fixed_points(a):
    n = int(round((a.lambda_max - a.lambda_min) / a.step))
    grid = a.lambda_min + a.step * np.arange(n + 1)

    def one(lam):
        fp = leads.fixed_point(float(lam), a.tc)
        return (float(lam), fp.e_star.real, fp.e_star.imag, fp.kind, fp.residual)

    return ["lambda", "re_e_star", "im_e_star", "kind", "residual"], _pmap(one, list(grid), _jobs(a))


def cmd_flux(a):
    fs = omega.flux_structure(_params(a))
    rows = [(f"{i}{j}{k}", phi) for (i, j, k), phi in zip(omega.FACES, fs.plaquette_fluxes)]
    rows.append(("sum", fs.total))
    return ["face", "flux"], rows


def cmd_mub(a):
    labels, table = omega.mub_overlaps()
    rows = []
    for (b1, b2), block in zip(labels, table):
        for r in range(4):
            for s in range(4):
                rows.append((b1, b2, r + 1, s + 1, block[r, s]))
    return ["basis_a", "basis_b", "r", "s", "overlap"], rows


def cmd_floquet(a):
    v = omega.drive_samples(a.shape, a.A, a.T, a.samples)
    if a.shape == "square":
        oracle = a.K * np.sinc(a.A * a.T / 2 / np.pi)
    else:
        oracle = a.K * j0(a.A * a.T / np.pi)
    k = omega.floquet_peierls(a.K, v, -v, a.T)
    return ["re_k_eff", "im_k_eff", "abs_k_eff", "phase", "closed_form"], [
        (k.real, k.imag, abs(k), float(np.angle(k)), float(oracle))]


def cmd_dispersive(a):
    cfg = logic.DispersiveConfig(a.nu_r, a.nu_q, a.g_a, a.g_b, a.cutoff)
    return {
        "K_eff": logic.k_effective(cfg),
        "K_second_order": logic.k_second_order(cfg),
        "fidelity_quoted_K_bare_frame": logic.sqrt_iswap_fidelity(cfg, "quoted", "bare"),
        "fidelity_second_order_dressed_frame": logic.sqrt_iswap_fidelity(cfg, "second_order", "dressed"),
        "flip_flop_fidelity": logic.flip_flop_fidelity(logic.k_effective(cfg)) if cfg.g_a * cfg.g_b else None,
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quansistor", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON run configuration")
    sub = ap.add_subparsers(dest="command")

    def add(name, fn, helptext):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--out", help="write to this path instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, default=None)
        p.set_defaults(func=fn)
        return p

    def core_flags(p):
        p.add_argument("--eps", type=float, default=0.0)
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--beta", type=float, default=0.0)
        p.add_argument("--gamma", type=float, default=0.0)
        p.add_argument("--q", type=int, default=0)

    core_flags(add("spectrum", cmd_spectrum, "closed-form core spectrum"))
    p = add("universality", cmd_universality, "16x16 independence certificate")
    p.add_argument("--swap-h16-for-h1", action="store_true")
    p = add("chain", cmd_chain, "one mode of two cores joined by a finite lead")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--tc", type=float, required=True)
    p.add_argument("--tc2", type=float)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--mu", type=float)
    p.add_argument("--profile-dir")
    p = add("survival", cmd_survival, "survival of the left-localized pair state")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--L", type=int)
    p.add_argument("--tc", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--samples", type=int, default=201)
    p = add("fixed-points", cmd_fixed_points, "fixed-point energies over a lambda grid")
    p.add_argument("--tc", type=float, required=True)
    p.add_argument("--lambda-min", type=float, default=-3.0)
    p.add_argument("--lambda-max", type=float, default=3.0)
    p.add_argument("--step", type=float, default=0.01)
    core_flags(add("flux", cmd_flux, "plaquette fluxes of a core"))
    add("mub", cmd_mub, "overlaps between position, class-X and class-Y bases")
    p = add("floquet", cmd_floquet, "effective hopping of a driven link")
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=4097)
    p.add_argument("--shape", choices=("square", "cosine"), default="cosine")
    p = add("dispersive", cmd_dispersive, "dispersive sqrt(iSWAP) coupler")
    p.add_argument("--nu-r", type=float, default=6.0)
    p.add_argument("--nu-q", type=float, default=5.0)
    p.add_argument("--g-a", type=float, default=0.02)
    p.add_argument("--g-b", type=float, default=0.02)
    p.add_argument("--cutoff", type=int, default=5)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        if argv[:1] == ["--config"] or (argv and argv[0].startswith("--config=")):
            path = argv[1] if argv[0] == "--config" else argv[0].split("=", 1)[1]
            with open(path) as fh:
                argv = RunConfig.from_json(fh.read()).argv()
        args = ap.parse_args(argv)
        if args.command is None:
            ap.print_help(sys.stderr)
            return 2
        text = render(args.func(args), args.format)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

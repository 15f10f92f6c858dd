"""``fermidec`` command line runner.

Usage::

    fermidec run config.json
    fermidec validate config.json
    fermidec list-experiments

Outputs go to ``<output>_*.csv`` / ``<output>_*.json``; each file carries a
run manifest (config hash, channel constants, tolerance set). Exit codes:
0 ok, 2 configuration error, 3 physics-contract violation, 4 numeric
tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from . import __version__
from . import io as fio
from . import lindblad_channel as lc
from . import tolerances
from .closed_dynamics import delta_trace, expm
from .config import EXPERIMENTS, ExperimentConfig, json_schema
from .errors import DomainError, PhysicsContractError, StructuralError, ToleranceError
from .majorana_core import joint_matrix, operator_norm, random_skew, thermal_covariance
from .markov_db import build_p_eta, converge
from .models import (
    BathParams,
    KitaevParams,
    bath_lattice,
    endpoint_coupling,
    ground_state_pair,
    kitaev_wire,
    spectral_bandwidth,
    uniform_loss_spec,
)
from .spectral_analysis import decoherence_bound, fit_decay_rate
from .weak_coupling import BathCorrelation, block_decompose, derive_generator, system_eigenbasis

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_TOLERANCE = 0, 2, 3, 4

DESCRIPTIONS = {
    "simulate-closed": "closed evolution of a wire's ground state under its own Hamiltonian",
    "simulate-joint": "delta(t) and ||D(t)|| for two ground states of a wire coupled to a bath",
    "derive-master": "weak-coupling channel (X, Y) and derivation report per bath temperature",
    "lindblad-demo": "||e^{Xt}|| for a lossy Kitaev wire against exp(-lambda_P t)",
    "temperature-sweep": "simulate-joint for every bath temperature; curves must coincide",
    "rate-report": "lambda_P, lambda_PG and the ground-space decoherence bound",
    "oracle-compare": "Gaussian channel against exact density-matrix evolution on random instances",
    "detailed-balance": "two-state chain convergence across stationary states",
}


def _workers() -> int:
    env = os.environ.get("FERMIDEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def parallel_map(fn, keys):
    """Order-independent map; results are returned sorted by key."""
    keys = list(keys)
    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        results = list(ex.map(fn, keys))
    return sorted(zip(keys, results), key=lambda kv: kv[0])


def manifest(cfg: ExperimentConfig) -> dict:
    return {
        "config_hash": cfg.config_hash(),
        "experiment": cfg.experiment,
        "fermidec_version": __version__,
        "tolerances_version": tolerances.TOLERANCES_VERSION,
        "tolerances": tolerances.as_dict(),
        "constants": {
            "convention": cfg.convention,
            "dissipation_scale": lc.DISSIPATION_SCALE if cfg.convention == "calibrated" else lc.LITERAL_DISSIPATION_SCALE,
            "inhomogeneity_scale": lc.INHOMOGENEITY_SCALE if cfg.convention == "calibrated" else lc.LITERAL_INHOMOGENEITY_SCALE,
        },
        "seed": cfg.seed,
    }


def _beta_label(b: float) -> str:
    return "inf" if math.isinf(b) else f"{b:g}"


class _Run:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.man = manifest(cfg)
        self.prefix = cfg.output
        self.written: list[Path] = []

    def path(self, suffix: str) -> Path:
        return Path(f"{self.prefix}_{suffix}")

    def csv(self, suffix, cols, rows):
        self.written.append(fio.write_csv(self.path(suffix), cols, rows, self.man))

    def json(self, suffix, payload):
        self.written.append(fio.write_json(self.path(suffix), payload, self.man))

    # model pieces

    def h_s(self):
        return kitaev_wire(KitaevParams(**self.cfg.model.params.model_dump()))

    def h_b(self):
        return bath_lattice(BathParams(**self.cfg.bath.params.model_dump()))

    def coupling(self, sys_dim, bath_dim):
        c = self.cfg.coupling
        return endpoint_coupling(sys_dim, bath_dim, c.strength, c.bath_site, c.sys_majorana)

    def times(self):
        return self.cfg.times.grid()

    # experiments

    def simulate_closed(self):
        h = self.h_s()
        g0 = ground_state_pair(h)[0] if _has_kernel(h) else thermal_covariance(h, math.inf)
        # a ground state is stationary; rotate it so the evolution is not trivial
        rot = expm(random_skew(h.shape[0], np.random.default_rng(self.cfg.seed)), 0.3)
        gamma0 = rot @ g0 @ rot.T
        rows = []
        for t in self.times():
            u = expm(h, t)
            g = u @ gamma0 @ u.T
            rows.append([t, operator_norm(g - gamma0), *g.ravel()])
        dim = h.shape[0]
        cols = ["t", "norm_change"] + [f"g_{j}_{k}" for j in range(dim) for k in range(dim)]
        self.csv("closed.csv", cols, rows)

    def _joint_trace(self, beta):
        h_s, h_b = self.h_s(), self.h_b()
        hj = joint_matrix(h_s, h_b, self.coupling(h_s.shape[0], h_b.shape[0]))
        g0, g1 = ground_state_pair(h_s)
        return delta_trace(g0, g1, hj, thermal_covariance(h_b, beta), self.times())

    def _write_trace(self, suffix, tr):
        self.written.append(fio.write_delta_trace(self.path(suffix), tr, self.man))

    def simulate_joint(self):
        beta = self.cfg.bath.betas[0]
        self._write_trace("delta.csv", self._joint_trace(beta))

    def temperature_sweep(self):
        res = parallel_map(self._joint_trace, self.cfg.bath.betas)
        for beta, tr in res:
            self._write_trace(f"delta_beta_{_beta_label(beta)}.csv", tr)
        ref = res[0][1].delta_norms
        spread = max(float(np.abs(tr.delta_norms - ref).max()) for _, tr in res)
        self.json("sweep.json", {"betas": [_beta_label(b) for b, _ in res], "max_delta_spread": spread})

    def _bath_correlation(self):
        h_s, h_b = self.h_s(), self.h_b()
        eps = self.cfg.derivation.epsilon_fraction * spectral_bandwidth(h_b)
        return h_s, h_b, BathCorrelation(self.coupling(h_s.shape[0], h_b.shape[0]), h_b, eps)

    def _derive(self, beta):
        h_s, h_b, bc = self._bath_correlation()
        return derive_generator(h_s, bc, thermal_covariance(h_b, beta),
                                secular=self.cfg.derivation.secular, full_output=True)

    def derive_master(self):
        for beta, (ch, rep) in parallel_map(self._derive, self.cfg.bath.betas):
            lab = _beta_label(beta)
            self.json(f"channel_beta_{lab}.json", fio.channel_to_json(ch))
            self.json(f"report_beta_{lab}.json", rep.to_dict())

    def _kitaev_loss_channel(self):
        h = self.h_s()
        spec = uniform_loss_spec(h.shape[0] // 2, self.cfg.lindblad.eta)
        return lc.build_channel(h, spec, self.cfg.convention)

    def lindblad_demo(self):
        ch = self._kitaev_loss_channel()
        t = self.times()
        lam = ch.min_dissipation
        norms = np.array([operator_norm(expm(ch.x, s)) for s in t])
        pred = np.exp(-lam * t)
        self.csv("norm_D.csv", ("t", "norm_D", "predicted"), zip(t, norms, pred))
        mask = norms > 0
        fitted = fit_decay_rate(t[mask], norms[mask]) if mask.sum() >= 2 else float("nan")
        self.json("rate.json", {
            "eta": self.cfg.lindblad.eta,
            "lambda_p": lam,
            "fitted_rate": fitted,
            "relative_slope_error": abs(fitted - lam) / lam if lam > 0 else float("nan"),
        })

    def rate_report(self):
        h_s = self.h_s()
        basis = system_eigenbasis(h_s)
        if self.cfg.lindblad is not None:
            ch = self._kitaev_loss_channel()
        else:
            ch = self._derive(self.cfg.bath.betas[0])[0]
        blocks = block_decompose(ch.x, basis)
        og = blocks.o[:, :blocks.n_ground]
        g0, g1 = ground_state_pair(h_s)
        rep, curves = decoherence_bound(blocks.x_g, og.T @ g0 @ og, og.T @ g1 @ og, self.times(),
                                        x_full=ch.x, gap=basis.gap)
        self.json("rates.json", {**rep.to_dict(), "leakage": blocks.leakage})
        self.written.append(fio.write_bound_curves(self.path("bound.csv"), curves, self.man))

    def oracle_compare(self):
        from . import exact_oracle as eo

        oc = self.cfg.oracle
        rng = np.random.default_rng(self.cfg.seed)
        rows = []
        for i in range(oc.instances):
            n = oc.n_modes[i % len(oc.n_modes)]
            h = random_skew(2 * n, rng)
            ls = rng.normal(size=(oc.n_lindblad, 2 * n)) + 1j * rng.normal(size=(oc.n_lindblad, 2 * n))
            spec = lc.LindbladSpec(tuple(0.3 * ls))
            ops = eo.fock_operators(n)
            rho0 = eo.random_gaussian_pure_state(n, rng, ops)
            ch = lc.build_channel(h, spec)
            g0 = eo.covariance_of(rho0, ops)
            t = self.times()
            rhos = eo.lindblad_trajectory(rho0, h, spec, t, ops)
            gss = lc.steady_state(ch)
            for s, rho in zip(t, rhos):
                diff = np.abs(eo.covariance_of(rho, ops) - lc.propagate(ch, g0, s, gss)).max()
                rows.append([i, n, s, diff])
        self.csv("oracle.csv", ("instance", "n_modes", "t", "max_abs_diff"), rows)

    def detailed_balance(self):
        mk = self.cfg.markov
        summary = []
        for a in sorted(mk.alphas):
            chain = build_p_eta(a, mk.eta)
            traj = converge(chain, mk.v0, mk.steps)
            self.written.append(fio.write_markov_trajectory(self.path(f"chain_alpha_{a:g}.csv"), traj, self.man))
            d = traj.dist
            # skip steps where rounding dominates the distance
            ok = d[:-1] > 1e-6 * d[0]
            factor = float(np.median(d[1:][ok] / d[:-1][ok])) if ok.any() else 0.0
            summary.append([a, mk.eta, factor, chain.balance_defect()])
        self.csv("decay.csv", ("alpha", "eta", "decay_factor", "balance_defect"), summary)


def _has_kernel(h) -> bool:
    from .majorana_core import skew_normal_form

    return bool(skew_normal_form(h).kernel)


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    return ExperimentConfig.model_validate_json(text)


def _format_validation(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"  {loc}: {e['msg']}")
    return "config error:\n" + "\n".join(lines)


def run_config(cfg: ExperimentConfig) -> list:
    r = _Run(cfg)
    getattr(r, cfg.experiment.replace("-", "_"))()
    return r.written


def _guarded(fn) -> int:
    try:
        fn()
    except FileNotFoundError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(_format_validation(e), file=sys.stderr)
        return EXIT_CONFIG
    except (StructuralError, DomainError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsContractError as e:
        print(f"physics contract violated: {e}", file=sys.stderr)
        return EXIT_PHYSICS
    except ToleranceError as e:
        print(f"numeric tolerance failure: {e}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fermidec", description="Gaussian fermionic decoherence experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    sub.add_parser("list-experiments", help="list experiment names")
    p_schema = sub.add_parser("schema", help="print the config JSON schema")
    p_schema.add_argument("--output", default=None)
    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for name in EXPERIMENTS:
            print(f"{name}\t{DESCRIPTIONS[name]}")
        return EXIT_OK
    if args.command == "schema":
        text = json.dumps(json_schema(), indent=2, sort_keys=True) + "\n"
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if args.command == "validate":
        def _v():
            cfg = load_config(args.config)
            print(f"ok: {cfg.experiment} (config hash {cfg.config_hash()[:12]})")
        return _guarded(_v)

    def _r():
        cfg = load_config(args.config)
        for p in run_config(cfg):
            print(p)
    return _guarded(_r)


if __name__ == "__main__":
    sys.exit(main())

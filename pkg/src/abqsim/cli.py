"""Command-line entry point.

    abqsim run <scenario> --config <path> [--out <dir>]
    abqsim list-scenarios
    abqsim selftest

Exit codes: 0 all verdicts pass, 1 verdict failure, 2 configuration
error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import __version__
from .config import SCENARIOS, config_echo, default_config, parse_config
from .errors import ConfigurationError, NumericalFailure
from .scenarios import SCENARIO_RUNNERS
from .snapshot_io import write_report, write_snapshot

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_SNAPSHOT_GAUGE = {
    "madelung-demo": "zero",
    "instantaneous-aspect": "string",
    "gauge-invariance": "string",
    "flux-quantization": "string",
}


def _cmd_run(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    if "scenario" not in text:
        text = f"scenario={args.scenario}\n" + text
    cfg = parse_config(text)
    if cfg.scenario != args.scenario:
        raise ConfigurationError(
            f"config names scenario '{cfg.scenario}' but the command line asked for '{args.scenario}'")
    out_dir = args.out or cfg.out_dir or os.path.join("abqsim-out", cfg.scenario)
    cfg = dataclasses.replace(cfg, out_dir=out_dir)
    os.makedirs(out_dir, exist_ok=True)

    written = []

    def snapshot_writer(t, field):
        path = os.path.join(out_dir, f"snapshot_t{t:.6f}.txt")
        write_snapshot(field, _SNAPSHOT_GAUGE.get(cfg.scenario, "zero"), t, path)
        written.append(path)

    runner = SCENARIO_RUNNERS[cfg.scenario]
    report = runner(cfg, on_snapshot=snapshot_writer if cfg.snapshot_times else None)
    write_report(report, out_dir, config_echo(cfg, __version__))

    for v in report.verdicts:
        mark = "PASS" if v.passed else "FAIL"
        print(f"[{mark}] {v.name}: measured {v.measured:.6e} (tolerance {v.tolerance:.6e})")
    for e in report.events:
        print(f"[event] {e}")
    print(f"report written to {out_dir}")
    return EXIT_OK if report.passed() else EXIT_VERDICT


def _selftest_checks():
    """Fast subset of the example suite; each yields (name, callable)."""
    from .fields import bump_packet, gaussian_packet, make_grid, superpose
    from .gauge import (plaquette_flux, quantized_flux_values, solenoid_plaquette,
                        string_gauge, symmetric_gauge, total_flux, zero_gauge)
    from .observables import (current, density, expectation_position,
                              expectation_velocity, modular_momentum_expectation)
    from .propagators import PropagatorConfig, free_evolution
    from .rotor import (RotorParams, coherent_angular_state, cylinder_eigenstate,
                        energy_level, entanglement_entropy, evolve_rotor,
                        product_state, shift_unitary)

    grid = make_grid(128, 128, 0.25, 0.25, -16.0, -15.9375)

    def norm_one():
        f = gaussian_packet(grid, (0.0, 0.0), 1.5, (0.0, 0.0))
        return abs(f.norm_squared() - 1.0) < 1e-12

    def moments():
        f = gaussian_packet(grid, (3.0, -2.0), 1.5)
        x, y = expectation_position(f)
        return abs(x - 3.0) < 1e-8 and abs(y + 2.0) < 1e-8

    def density_integral():
        f = gaussian_packet(grid, (0.0, 0.0), 1.5)
        return abs(density(f).integral() - 1.0) < 1e-12

    def bump_support():
        f = bump_packet(grid, (0.0, 0.0625), 2.0)
        outside = np.abs(grid.x) >= 2.5
        return float(np.max(np.abs(f.amp[:, outside]))) == 0.0

    def modular_identity():
        f = gaussian_packet(grid, (0.0, 0.0), 1.5)
        return abs(modular_momentum_expectation(f, 0.0) - 1.0) < 1e-12

    def modular_gaussian():
        sigma, k0, L = 1.5, 1.0, 2.0
        f = gaussian_packet(grid, (0.0, 0.0), sigma, (k0, 0.0))
        expect = np.exp(1j * k0 * L) * np.exp(-L ** 2 / (8 * sigma ** 2))
        return abs(modular_momentum_expectation(f, L) - expect) < 1e-8

    def string_flux():
        g = string_gauge(grid, 1.3)
        i, j = solenoid_plaquette(grid)
        ok = abs(plaquette_flux(g, i, j) - 1.3) < 1e-12
        return ok and abs(total_flux(g) - 1.3) < 1e-12

    def symmetric_flux():
        g = symmetric_gauge(grid, 0.7, 1.0)
        return abs(total_flux(g) - 0.7) < 1e-10

    def current_real_field():
        f = bump_packet(grid, (0.0, 0.0625), 2.0)
        j = current(f, zero_gauge(grid))
        return max(np.max(np.abs(j.vx)), np.max(np.abs(j.vy))) < 1e-14

    def velocity_gaussian():
        fine = make_grid(256, 64, 0.015625, 0.25, -2.0, -8.0)
        f = gaussian_packet(fine, (0.0, 0.0), 0.5, (1.0, 0.0))
        vx, vy = expectation_velocity(f, zero_gauge(fine))
        return abs(vx - 1.0) < 1e-4 and abs(vy) < 1e-12

    def flux_values():
        vals = quantized_flux_values(2)
        return vals[0] == 0.0 and abs(vals[2] - 2 * np.pi) < 1e-15

    def free_run_norm():
        f = gaussian_packet(grid, (0.0, 0.0), 1.5, (0.0, -1.0))
        out = free_evolution(f, PropagatorConfig(dt=0.01, t_end=1.0))
        return abs(out.norm_squared() - 1.0) < 1e-10

    def rotor_energy():
        p = RotorParams(2.0, 1.0, 0.5)
        return energy_level(p, 2, 1) == 1.0

    def rotor_shift_commutes():
        p = RotorParams(100.0, 1.0, 0.05)
        st = product_state(p, cylinder_eigenstate(5, 16), coherent_angular_state(0.3, 2.0, 16))
        a = shift_unitary(evolve_rotor(st, 0.7), 0.4)
        b = evolve_rotor(shift_unitary(st, 0.4), 0.7)
        return float(np.max(np.abs(a.coeffs - b.coeffs))) < 1e-12

    def rotor_bell_entropy():
        p = RotorParams(100.0, 1.0, 0.05)
        c = np.zeros((33, 33), dtype=complex)
        e0 = coherent_angular_state(0.0, 2.0, 16)
        e1 = coherent_angular_state(np.pi, 2.0, 16)
        c[16 + 4] = e0 / np.sqrt(2)
        c[16 + 6] += e1 / np.sqrt(2)
        from .rotor import RotorState
        st = RotorState(p, c / np.linalg.norm(c))
        return abs(entanglement_entropy(st) - np.log(2)) < 1e-3

    def superpose_zero_norm():
        f = gaussian_packet(grid, (0.0, 0.0), 1.5)
        try:
            superpose(f, f, 1.0, 1.0, np.pi)
        except ConfigurationError:
            return True
        return False

    return [
        ("constructor norm = 1", norm_one),
        ("gaussian position moments", moments),
        ("density integral = 1", density_integral),
        ("bump support bit-exact zero", bump_support),
        ("modular expectation at L=0", modular_identity),
        ("modular gaussian self-overlap", modular_gaussian),
        ("string gauge plaquette flux", string_flux),
        ("symmetric gauge total flux", symmetric_flux),
        ("real field has zero current", current_real_field),
        ("gaussian velocity expectation", velocity_gaussian),
        ("quantized flux values", flux_values),
        ("free evolution norm", free_run_norm),
        ("rotor energy (I_c=2, I_e=1, lambda=1/2)", rotor_energy),
        ("shift unitary commutes with evolution", rotor_shift_commutes),
        ("two-branch entanglement entropy", rotor_bell_entropy),
        ("destructive superposition rejected", superpose_zero_norm),
    ]


def _cmd_selftest() -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            ok = check()
        except Exception as exc:  # a crash is a failure, not an abort
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        failures += 0 if ok else 1
    print(f"selftest: {'all checks passed' if failures == 0 else f'{failures} check(s) failed'}")
    return EXIT_OK if failures == 0 else EXIT_VERDICT


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="abqsim",
                                     description="Gauge-aware quantum dynamics scenarios")
    parser.add_argument("--version", action="version", version=f"abqsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario from a config file")
    p_run.add_argument("scenario", choices=SCENARIOS)
    p_run.add_argument("--config", required=True, help="key=value config file")
    p_run.add_argument("--out", default=None, help="output directory")
    sub.add_parser("list-scenarios", help="print the available scenario names")
    sub.add_parser("selftest", help="run the quick built-in example checks")

    try:
        args = parser.parse_args(argv)
        if args.command == "list-scenarios":
            for name in SCENARIOS:
                print(name)
            return EXIT_OK
        if args.command == "selftest":
            return _cmd_selftest()
        return _cmd_run(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


def console_main():
    raise SystemExit(main())

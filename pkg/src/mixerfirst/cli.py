"""Command-line front end: sweeps, Gm ladders, tuning, trimming and oracle checks.

Exit codes: 0 success, 1 configuration error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Optional

import numpy as np

from .complex_impedance import check_gm_bandwidth
from .config import ConfigError, RunConfig, load_config, parse_si, serialize_config
from .errors import MixerFirstError, NotSettled, StepTooLarge
from .matching import Receiver, s11, s11_db, trim_switch_bank, tune_center
from .oracle_sim import measure_input_impedance, simulate
from .tia_rgc import rgc_input_impedance, rgc_input_impedance_nodal

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2
LTI_MAG_TOL = 0.10
LTI_PHASE_TOL_DEG = 10.0
NODAL_REL_TOL = 1e-6

SWEEP_COLUMNS = ["f_hz", "re_zin_ohm", "im_zin_ohm", "mag_zin_ohm", "s11_db"]


def fmt(x: float) -> str:
    """Scientific notation with 9 significant digits."""
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.8e}"


def tuned_receiver(run: RunConfig) -> Receiver:
    """Receiver from the config; retuned first when [tune] target is set."""
    rx = run.receiver()
    if run.tune.target is not None and hasattr(rx.baseband, "with_gm"):
        return tune_center(rx, run.tune.target, run.tune.gm_max).receiver
    return rx


def _sweep_rows(rx: Receiver, run: RunConfig):
    sw = run.sweep
    resp = rx.sweep(sw.f_start, sw.f_stop, sw.points)
    gamma_db = s11_db(s11(resp.values, run.mixer.ra))
    for f, z, g in zip(resp.f_hz, resp.values, np.atleast_1d(gamma_db)):
        yield [fmt(f), fmt(z.real), fmt(z.imag), fmt(abs(z)), fmt(g)]


def cmd_sweep(run: RunConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(_sweep_rows(tuned_receiver(run), run))
    return buf.getvalue()


def cmd_gm_ladder(run: RunConfig) -> str:
    if not run.ladder.gm:
        raise ConfigError("gm-ladder needs a non-empty [ladder] gm list")
    rx = run.receiver()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gm_s"] + SWEEP_COLUMNS)
    for gm in run.ladder.gm:
        for row in _sweep_rows(rx.with_gm(gm), run):
            w.writerow([fmt(gm)] + row)
    return buf.getvalue()


def _tune_row(tr) -> list[str]:
    mask = "" if tr.enabled_mask is None else "".join("1" if m else "0" for m in tr.enabled_mask)
    return [fmt(tr.gm_s), str(tr.orientation), fmt(tr.center_f_hz), fmt(tr.rsw_ohm), mask,
            fmt(tr.achieved_s11_db)]


def _table(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gm_s", "orientation", "center_f_hz", "rsw_ohm", "enabled_mask", "s11_db"])
    w.writerows(rows)
    return buf.getvalue()


def cmd_tune(run: RunConfig) -> str:
    tr = tune_center(run.receiver(), run.tune.target, run.tune.gm_max)
    return _table([_tune_row(tr)])


def cmd_trim(run: RunConfig) -> str:
    tr = tune_center(run.receiver(), run.tune.target, run.tune.gm_max)
    trimmed = trim_switch_bank(run.switch_bank(), tr.receiver, run.mixer.ra, tr.center_f_hz)
    return _table([_tune_row(tr), _tune_row(trimmed)])


def cmd_validate(run: RunConfig) -> tuple[str, int]:
    """Oracle-vs-analytic comparison plus the validity checks, one line each."""
    lines = []
    rx = tuned_receiver(run)
    gm, orientation = rx.gm_s, rx.orientation
    spec = run.rc_equivalent(gm)
    analytic = rx
    if run.baseband.kind == "tia":
        # the oracle has no transistor-level TIA; compare both sides on its RC stand-in
        analytic = Receiver(rx.cfg, spec, orientation)
        p = run.rgc_params()
        f = np.logspace(1, 10, 91)
        rel = max(abs(rgc_input_impedance_nodal(p, fi) - rgc_input_impedance(p, fi))
                  / abs(rgc_input_impedance_nodal(p, fi)) for fi in f)
        lines.append(("PASS" if rel < NODAL_REL_TOL else "FAIL", "rgc_vs_nodal", f"max_rel={rel:.3e}"))

    mag_dev = phase_dev = 0.0
    settled = True
    failure = None
    for off in run.sim.offsets:
        f_rf = run.mixer.f_lo + off
        try:
            z_o = measure_input_impedance(run.scenario(f_rf, gm, orientation))
        except StepTooLarge as exc:
            failure = f"StepTooLarge: {exc}"
            break
        except NotSettled as exc:
            settled = False
            failure = f"NotSettled: {exc}"
            continue
        z_a = analytic(f_rf)
        mag_dev = max(mag_dev, abs(abs(z_o) / abs(z_a) - 1))
        phase_dev = max(phase_dev, abs(math.degrees(np.angle(z_o / z_a))))
    if failure and failure.startswith("StepTooLarge"):
        lines.append(("FAIL", "lti_vs_oracle", failure))
    else:
        ok = mag_dev <= LTI_MAG_TOL and phase_dev <= LTI_PHASE_TOL_DEG
        lines.append(("PASS" if ok else "FAIL", "lti_vs_oracle",
                      f"max_mag_dev={mag_dev:.4f} max_phase_dev_deg={phase_dev:.3f}"))
    lines.append(("PASS" if settled else "FAIL", "settling", failure if not settled else "windows agree within 1%"))

    try:
        rep = check_gm_bandwidth(spec)
        lines.append((rep.status, "gm_bandwidth", rep.message))
    except ValueError as exc:
        lines.append(("WARN", "gm_bandwidth", str(exc)))

    text = "".join(f"{status} {name} {msg}\n" for status, name, msg in lines)
    code = EXIT_VALIDATION if any(status == "FAIL" for status, _, _ in lines) else EXIT_OK
    return text, code


def cmd_oracle(run: RunConfig, out: Optional[str]) -> str:
    rx = tuned_receiver(run)
    s = run.scenario(run.sim.f_rf, rx.gm_s, rx.orientation)
    if out:
        simulate(s).to_csv(out)
    z = measure_input_impedance(s)
    return f"f_rf_hz = {fmt(run.sim.f_rf)}\nzin_ohm = {fmt(z.real)} {fmt(z.imag)}\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file (defaults built in)")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--fmin", help="sweep start, e.g. 950MHz")
    common.add_argument("--fmax", help="sweep stop, e.g. 1.05GHz")
    common.add_argument("--points", type=int, help="number of sweep points")

    parser = argparse.ArgumentParser(prog="mixerfirst", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("sweep", "input impedance and S11 over the sweep grid"),
        ("gm-ladder", "one sweep per Gm in [ladder] gm, long format"),
        ("tune", "set Gm for the [tune] target center"),
        ("trim", "tune, then pick the best switch-bank mask"),
        ("validate", "compare the LTI model with the time-domain oracle"),
        ("oracle", "run the time-domain oracle at [sim] f_rf"),
        ("show-config", "print the effective configuration"),
    ]:
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def _load(args) -> RunConfig:
    run = load_config(args.config) if args.config else RunConfig()
    fmin = parse_si(args.fmin, "Hz") if args.fmin else None
    fmax = parse_si(args.fmax, "Hz") if args.fmax else None
    run = run.with_sweep(fmin, fmax, args.points)
    run.require(args.command)
    return run


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = _load(args)
        if args.command == "validate":
            text, code = cmd_validate(run)
            _emit(text, args.out)
            return code
        if args.command == "oracle":
            sys.stdout.write(cmd_oracle(run, args.out))
            return EXIT_OK
        handlers = {"sweep": cmd_sweep, "gm-ladder": cmd_gm_ladder, "tune": cmd_tune,
                    "trim": cmd_trim, "show-config": serialize_config}
        _emit(handlers[args.command](run), args.out)
        return EXIT_OK
    except (MixerFirstError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"mixerfirst: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

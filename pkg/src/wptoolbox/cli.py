"""Command-line runner emitting CSV/JSON tables of simulated statistics.

Angles are taken in degrees on the command line (flag names say so) and
written to the output files in radians.  With ``--shots 0`` every command
is analytic and seed-independent; with ``--shots N`` each row additionally
carries multinomial counts (row ``k`` uses ``seed + k``) and Poissonian
errors.  Numeric columns are printed with 17 significant digits so a fixed
seed reproduces files byte-for-byte.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments/spec.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .entangle import (
    TwoPhotonSettings,
    coincidence_closed_forms,
    coincidence_probabilities,
    entanglement_witness,
    ghz_sector_probabilities,
    mixture_coincidence_probabilities,
)
from .hardware import equivalence_scan
from .optics import interferometer_circuit
from .qcore import measure_distribution
from .shots import (
    NoiseModel,
    estimate_witness,
    noisy_coincidence_probabilities,
    noisy_single_probabilities,
    poisson_error,
    sample_counts,
)
from .toolbox import (
    BETA_SPLIT,
    ToolboxPhases,
    detection_probabilities,
    mixed_output,
    prepare_input,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_SPEC = 2

OUTDIR_ENV = "WPTOOLBOX_OUTDIR"

#: sweepable parameters; angles are entered in degrees, unit knobs as-is
ANGLE_PARAMS = ("alpha", "phi1", "phi1_prime", "phi2", "phi2_prime", "beta")
UNIT_PARAMS = ("visibility", "dephase")
SWEEP_PARAMS = ANGLE_PARAMS + UNIT_PARAMS

_DEFAULT_SWEEPS = {
    "single-sweep": ("phi1", 0.0, 360.0, 25),
    "witness-coherence": ("alpha", 0.0, 90.0, 13),
    "witness-entanglement": ("phi1", 0.0, 360.0, 25),
}


class SpecError(Exception):
    """Invalid sweep/command specification (maps to exit code 2)."""


@dataclass
class SweepSpec:
    """One command run: swept parameter (or None), fixed values, output."""

    command: str
    param: str | None
    start: float
    stop: float
    steps: int
    fixed: dict[str, float]
    shots: int
    seed: int
    mixed: bool
    fmt: str
    out: str | None

    def rows(self) -> list[dict[str, float]]:
        """Per-row parameter dictionaries (radians / unit scale)."""
        if self.param is None:
            return [dict(self.fixed)]
        values = np.linspace(self.start, self.stop, self.steps)
        if self.param in ANGLE_PARAMS:
            values = np.radians(values)
        out = []
        for v in values:
            row = dict(self.fixed)
            row[self.param] = float(v)
            out.append(row)
        return out


def _spec_from_args(args: argparse.Namespace) -> SweepSpec:
    if args.beta_deg is None:
        # the n-photon table is defined for switched-off mixers
        args.beta_deg = 0.0 if args.command == "ghz" else 22.5
    fixed = {
        "alpha": np.radians(args.alpha_deg),
        "phi1": np.radians(args.phi1_deg),
        "phi2": np.radians(args.phi2_deg),
        "phi1_prime": np.radians(args.phi1p_deg),
        "phi2_prime": np.radians(args.phi2p_deg),
        "beta": np.radians(args.beta_deg),
        "beta_prime": np.radians(args.betap_deg),
        "visibility": args.visibility,
        "dephase": args.dephase,
    }
    if args.shots < 0:
        raise SpecError("--shots must be >= 0")
    for knob in ("visibility", "dephase"):
        if not 0.0 <= fixed[knob] <= 1.0:
            raise SpecError(f"--{knob} must lie in [0, 1]")

    param, start, stop, steps = None, 0.0, 0.0, 0
    if args.sweep is not None:
        if args.start is None or args.stop is None:
            raise SpecError("--sweep needs explicit --start and --stop")
        param, start, stop, steps = args.sweep, args.start, args.stop, args.steps
    elif args.command in _DEFAULT_SWEEPS:
        param, start, stop, steps = _DEFAULT_SWEEPS[args.command]
    if param is not None and steps < 2:
        raise SpecError("sweeps need --steps >= 2")
    return SweepSpec(
        command=args.command,
        param=param,
        start=start,
        stop=stop,
        steps=steps,
        fixed=fixed,
        shots=args.shots,
        seed=args.seed,
        mixed=args.mixed,
        fmt=args.format,
        out=args.out,
    )


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _output_path(spec: SweepSpec) -> str:
    if spec.out is not None:
        return spec.out
    base = spec.command.replace("-", "_") + ("." + spec.fmt)
    return os.path.join(os.environ.get(OUTDIR_ENV, "."), base)


def _emit(spec: SweepSpec, header: list[str], rows: list[dict]) -> str:
    """Write rows as CSV or JSON; returns the path written."""
    path = _output_path(spec)
    if spec.fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow(_fmt(row[col]) for col in header)
    else:
        payload = [
            {
                col: (int(row[col]) if isinstance(row[col], (int, np.integer))
                      else float(row[col]))
                for col in header
            }
            for row in rows
        ]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return path


def _noise(values: dict[str, float]) -> NoiseModel:
    return NoiseModel(visibility=values["visibility"], dephase_wp=values["dephase"])


def _single_distribution(spec: SweepSpec, v: dict[str, float]):
    """Detector probabilities for one parameter point, honoring --mixed/noise."""
    phases = ToolboxPhases(v["phi1"], v["phi2"])
    if spec.mixed:
        # the classical mixture carries no fringe, so noise leaves it alone
        return measure_distribution(mixed_output(v["alpha"], phases, v["beta"]))
    model = _noise(v)
    if model.fringe_scale == 1.0:
        return detection_probabilities(v["alpha"], phases, v["beta"]).as_array()
    return noisy_single_probabilities(v["alpha"], phases, v["beta"], model).as_array()


def _pair_table(spec: SweepSpec, v: dict[str, float]):
    """Coincidence table for one parameter point, honoring --mixed/noise."""
    settings = _pair_settings(v)
    if spec.mixed:
        return mixture_coincidence_probabilities(settings)
    model = _noise(v)
    if model.fringe_scale == 1.0:
        return coincidence_probabilities(settings)
    return noisy_coincidence_probabilities(settings, model)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_single_sweep(spec: SweepSpec) -> int:
    header = ["alpha", "phi1", "phi2", "beta", "p1", "p2", "p3", "p4"]
    if spec.shots > 0:
        header += [f"c{i}" for i in range(1, 5)] + [f"e{i}" for i in range(1, 5)]
    rows = []
    for k, v in enumerate(spec.rows()):
        dist = _single_distribution(spec, v)
        row = {
            "alpha": v["alpha"], "phi1": v["phi1"],
            "phi2": v["phi2"], "beta": v["beta"],
        }
        row.update(zip(("p1", "p2", "p3", "p4"), dist))
        if spec.shots > 0:
            counts = sample_counts(dist, spec.shots, spec.seed + k)
            row.update(zip(("c1", "c2", "c3", "c4"), counts.counts))
            row.update(zip(("e1", "e2", "e3", "e4"), poisson_error(counts)))
        rows.append(row)
    print(f"wrote {_emit(spec, header, rows)}")
    return EXIT_OK


def cmd_witness_coherence(spec: SweepSpec) -> int:
    header = ["alpha", "phi1", "wc"]
    if spec.shots > 0:
        header.append("wc_err")
    rows = []
    for k, v in enumerate(spec.rows()):
        dist = _single_distribution(spec, v)
        row = {"alpha": v["alpha"], "phi1": v["phi1"]}
        if spec.shots > 0:
            counts = sample_counts(dist, spec.shots, spec.seed + k)
            estimate = estimate_witness(counts, "coherence")
            row["wc"] = estimate.value
            row["wc_err"] = estimate.error
        else:
            row["wc"] = abs(float(dist[0]) - float(dist[1]))
        rows.append(row)
    print(f"wrote {_emit(spec, header, rows)}")
    return EXIT_OK


_PAIR_COLUMNS = [f"p_{a}{b}p" for a in range(1, 5) for b in range(1, 5)]


def _pair_settings(v: dict[str, float]) -> TwoPhotonSettings:
    return TwoPhotonSettings(
        alpha=v["alpha"],
        phases_a=ToolboxPhases(v["phi1"], v["phi2"]),
        phases_b=ToolboxPhases(v["phi1_prime"], v["phi2_prime"]),
        beta_a=v["beta"],
        beta_b=v["beta_prime"],
    )


def cmd_two_photon(spec: SweepSpec) -> int:
    header = ["phi1", "phi1p", "beta", "betap"] + list(_PAIR_COLUMNS)
    if spec.shots > 0:
        header += [c.replace("p_", "c_") for c in _PAIR_COLUMNS]
        header += [c.replace("p_", "e_") for c in _PAIR_COLUMNS]
    if spec.param is None:
        # default grid: the four fringe corners at both validated mixers
        value_sets = []
        for beta in (0.0, BETA_SPLIT):
            for phi1 in (0.0, np.pi):
                for phi1p in (0.0, np.pi):
                    v = dict(spec.fixed)
                    v.update(
                        phi1=phi1, phi1_prime=phi1p, beta=beta, beta_prime=beta
                    )
                    value_sets.append(v)
    else:
        value_sets = spec.rows()
    rows = []
    for k, v in enumerate(value_sets):
        table = _pair_table(spec, v)
        row = {
            "phi1": v["phi1"], "phi1p": v["phi1_prime"],
            "beta": v["beta"], "betap": v["beta_prime"],
        }
        row.update(zip(_PAIR_COLUMNS, table.matrix.reshape(-1)))
        if spec.shots > 0:
            counts = sample_counts(table, spec.shots, spec.seed + k)
            row.update(
                zip((c.replace("p_", "c_") for c in _PAIR_COLUMNS),
                    counts.counts.reshape(-1))
            )
            row.update(
                zip((c.replace("p_", "e_") for c in _PAIR_COLUMNS),
                    poisson_error(counts).reshape(-1))
            )
        rows.append(row)
    print(f"wrote {_emit(spec, header, rows)}")
    return EXIT_OK


def cmd_witness_entanglement(spec: SweepSpec) -> int:
    header = ["phi1", "p_22p", "p_21p", "we"]
    if spec.shots > 0:
        header.append("we_err")
    rows = []
    for k, v in enumerate(spec.rows()):
        table = _pair_table(spec, v)
        row = {"phi1": v["phi1"]}
        if spec.shots > 0:
            counts = sample_counts(table, spec.shots, spec.seed + k)
            freq = counts.frequencies()
            estimate = estimate_witness(counts, "entanglement")
            row.update(
                p_22p=float(freq[1, 1]), p_21p=float(freq[1, 0]),
                we=estimate.value, we_err=estimate.error,
            )
        else:
            row.update(
                p_22p=table.prob(2, 2), p_21p=table.prob(2, 1),
                we=entanglement_witness(table),
            )
        rows.append(row)
    print(f"wrote {_emit(spec, header, rows)}")
    return EXIT_OK


def cmd_ghz(spec: SweepSpec, photons: int) -> int:
    if spec.param is not None:
        raise SpecError("the n-photon table does not support sweeps")
    if spec.mixed or _noise(spec.fixed).fringe_scale != 1.0:
        raise SpecError("the n-photon table supports neither --mixed nor noise")
    v = spec.fixed
    sectors = ghz_sector_probabilities(
        photons, v["alpha"], ToolboxPhases(v["phi1"], v["phi2"]), beta=v["beta"]
    )
    rows = []
    crossed_mass = 0.0
    for pattern, prob in sectors.items():
        crossed = int(len(set(pattern)) > 1)
        crossed_mass += prob if crossed else 0.0
        rows.append({"sector": pattern, "probability": prob, "crossed": crossed})
    header = ["sector", "probability", "crossed"]
    path = _emit_ghz(spec, header, rows)
    print(f"crossed-sector mass: {_fmt(crossed_mass)}")
    print(f"wrote {path}")
    return EXIT_OK


def _emit_ghz(spec: SweepSpec, header: list[str], rows: list[dict]) -> str:
    # sector labels are strings, so bypass the numeric formatter for them
    path = _output_path(spec)
    if spec.fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow(
                    [row["sector"], _fmt(row["probability"]), str(row["crossed"])]
                )
    else:
        with open(path, "w") as fh:
            json.dump(rows, fh, indent=2)
            fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_single_photon() -> float:
    alphas = np.linspace(0.0, np.pi / 2, 7)
    phis = np.linspace(0.0, 2 * np.pi, 9)
    worst = 0.0
    for beta in (0.0, BETA_SPLIT):
        for alpha in alphas:
            ca, sa = np.cos(alpha) ** 2, np.sin(alpha) ** 2
            for phi1 in phis:
                ch, sh = np.cos(phi1 / 2), np.sin(phi1 / 2)
                for phi2 in phis:
                    if beta == 0.0:
                        closed = np.array(
                            [ca * ch**2, sa / 2, ca * sh**2, sa / 2]
                        )
                    else:
                        pc = ca * ch**2 / 2 + sa / 4
                        ps = ca * sh**2 / 2 + sa / 4
                        pref = np.sin(2 * alpha) / (2 * np.sqrt(2))
                        ic = pref * ch**2
                        is_ = pref * sh * np.sin(phi1 / 2 - phi2)
                        closed = np.array([pc + ic, pc - ic, ps + is_, ps - is_])
                    born = (
                        interferometer_circuit(phi1, phi2, beta)
                        .propagate(prepare_input(alpha))
                        .probabilities()
                    )
                    worst = max(worst, float(np.max(np.abs(closed - born))))
    return worst


def _verify_two_photon() -> float:
    phis = np.linspace(0.0, 2 * np.pi, 5)
    worst = 0.0
    for alpha in (0.0, 0.3, np.pi / 4, 1.2, np.pi / 2):
        for phi1 in phis:
            for phi1p in phis:
                for phi2 in (0.0, 1.1):
                    for phi2p in (0.0, 2.3):
                        pa = ToolboxPhases(phi1, phi2)
                        pb = ToolboxPhases(phi1p, phi2p)
                        closed = coincidence_closed_forms(alpha, pa, pb)
                        table = coincidence_probabilities(
                            TwoPhotonSettings(alpha=alpha, phases_a=pa, phases_b=pb)
                        )
                        worst = max(
                            worst, float(np.max(np.abs(closed - table.matrix)))
                        )
    return worst


def _verify_hardware(points: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    grid = [
        (rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
        for _ in range(points)
    ]
    return equivalence_scan(grid)


def _verify_ghz() -> float:
    sectors = ghz_sector_probabilities(
        3, np.pi / 4, ToolboxPhases(np.pi / 2, 0.0), beta=0.0
    )
    worst = abs(sectors["www"] - 0.5)
    worst = max(worst, abs(sectors["ppp"] - 0.5))
    crossed = sum(v for key, v in sectors.items() if len(set(key)) > 1)
    return max(worst, crossed)


def _verify_noise() -> float:
    s = TwoPhotonSettings()
    scaled = entanglement_witness(
        noisy_coincidence_probabilities(s, NoiseModel(visibility=0.9))
    )
    worst = abs(scaled - 0.9 * 0.25)
    dephased = entanglement_witness(
        noisy_coincidence_probabilities(s, NoiseModel(dephase_wp=1.0))
    )
    worst = max(worst, abs(dephased))
    probs = noisy_single_probabilities(
        np.pi / 4, ToolboxPhases(0.0, 0.0), model=NoiseModel(dephase_wp=1.0)
    )
    return max(worst, abs(probs.p1 - probs.p2))


def cmd_verify(points: int, seed: int) -> int:
    checks = [
        ("single-photon closed forms vs propagation", _verify_single_photon, 1e-10),
        ("two-photon closed forms vs propagation", _verify_two_photon, 1e-10),
        ("hardware equivalence", lambda: _verify_hardware(points, seed), 1e-10),
        ("n-photon history sectors", _verify_ghz, 1e-10),
        ("noise-model witness scaling", _verify_noise, 1e-10),
    ]
    failed = False
    for name, fn, tol in checks:
        dev = fn()
        ok = dev < tol
        failed = failed or not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: max deviation {dev:.3e} (tol {tol:g})")
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wptoolbox",
        description="Simulated single- and two-photon interferometer statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    angles = common.add_argument_group("settings (degrees)")
    angles.add_argument("--alpha-deg", type=float, default=45.0,
                        help="input superposition angle (default 45)")
    angles.add_argument("--phi1-deg", type=float, default=0.0,
                        help="closed-arm phase (default 0)")
    angles.add_argument("--phi2-deg", type=float, default=0.0,
                        help="open-arm phase (default 0)")
    angles.add_argument("--phi1p-deg", type=float, default=0.0,
                        help="closed-arm phase, photon B (default 0)")
    angles.add_argument("--phi2p-deg", type=float, default=0.0,
                        help="open-arm phase, photon B (default 0)")
    angles.add_argument("--beta-deg", type=float, default=None,
                        help="detection mixer angle (default 22.5; 0 = mixers off; "
                             "the ghz command defaults to 0)")
    angles.add_argument("--betap-deg", type=float, default=22.5,
                        help="detection mixer angle, photon B (default 22.5)")
    sampling = common.add_argument_group("sampling and noise")
    sampling.add_argument("--shots", type=int, default=0,
                          help="counts per row; 0 = analytic only (default)")
    sampling.add_argument("--seed", type=int, default=12345,
                          help="RNG seed; row k samples with seed+k (default 12345)")
    sampling.add_argument("--visibility", type=float, default=1.0,
                          help="fringe-contrast factor in [0, 1] (default 1)")
    sampling.add_argument("--dephase", type=float, default=0.0,
                          help="wave/particle dephasing in [0, 1] (default 0)")
    sampling.add_argument("--mixed", action="store_true",
                          help="use the classical wave/particle mixture")
    sweep = common.add_argument_group("sweeping")
    sweep.add_argument("--sweep", choices=SWEEP_PARAMS, default=None,
                       help="parameter to sweep (angles in degrees)")
    sweep.add_argument("--start", type=float, default=None,
                       help="sweep start (degrees for angle parameters)")
    sweep.add_argument("--stop", type=float, default=None,
                       help="sweep stop (degrees for angle parameters)")
    sweep.add_argument("--steps", type=int, default=25,
                       help="sweep length (default 25; must be >= 2)")
    output = common.add_argument_group("output")
    output.add_argument("--format", choices=("csv", "json"), default="csv")
    output.add_argument("--out", default=None,
                        help=f"output path (default: command name in ${OUTDIR_ENV} or .)")

    sub.add_parser(
        "single-sweep", parents=[common],
        help="four detector probabilities (default: phi1 sweep, 25 points)",
    )
    sub.add_parser(
        "witness-coherence", parents=[common],
        help="|P1 - P2| witness (default: alpha sweep, 13 points)",
    )
    sub.add_parser(
        "two-photon", parents=[common],
        help="4x4 coincidence tables (default: fringe corners at both mixers)",
    )
    sub.add_parser(
        "witness-entanglement", parents=[common],
        help="P22' - P21' witness (default: phi1 sweep at phi1' = 0)",
    )
    ghz = sub.add_parser(
        "ghz", parents=[common],
        help="n-photon history-sector table (mixers off)",
    )
    ghz.add_argument("--photons", type=int, default=3,
                     help="number of photons, 1..8 (default 3)")
    verify = sub.add_parser(
        "verify", help="run the built-in consistency grids and report deviations"
    )
    verify.add_argument("--points", type=int, default=100,
                        help="random points for the hardware grid (default 100)")
    verify.add_argument("--seed", type=int, default=12345)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.points, args.seed)
        spec = _spec_from_args(args)
        if args.command == "single-sweep":
            return cmd_single_sweep(spec)
        if args.command == "witness-coherence":
            return cmd_witness_coherence(spec)
        if args.command == "two-photon":
            return cmd_two_photon(spec)
        if args.command == "witness-entanglement":
            return cmd_witness_entanglement(spec)
        if args.command == "ghz":
            return cmd_ghz(spec, args.photons)
        raise SpecError(f"unknown command {args.command!r}")
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())

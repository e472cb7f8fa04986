"""Batch command-line front door.

Subcommands: ``partition``, ``kernel``, ``verify``, ``spectrum gen
twisted-circle``.  Exit codes: 0 success, 1 assertion failure, 2 parse or
usage failure, 3 capacity exceeded.  All numeric output uses fixed
17-significant-digit lowercase scientific formatting so identical inputs
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import Optional

from . import correlation, fock, partition, realfield, verify
from .errors import (
    AdmissibilityError,
    CapacityError,
    ConfigError,
    DomainError,
    KindError,
    PreconditionError,
)
from .spectrum import (
    ANTIUNITARY,
    UNITARY,
    ModeSpectrum,
    SymmetrySpec,
    load_config,
    parse_config,
    spectrum_to_config,
    twisted_circle_spectrum,
)

PARSE_FAILURE = 2
ASSERTION_FAILURE = 1
CAPACITY_FAILURE = 3


def fmt(x: float) -> str:
    return f"{x:.16e}"


def _load(path: Optional[str]):
    if path is None:
        with resources.files("twistkit.data").joinpath("default.json").open(
            "r", encoding="utf-8"
        ) as fh:
            return parse_config(json.load(fh))
    return load_config(path)


def _cmd_partition(args) -> int:
    spectrum, sym = _load(args.config)
    cutoff = args.cutoff
    print("beta,z_untwisted,z_twisted,lower_bound,oracle_z,rel_err,tail_bound")
    ok = True
    for beta in args.beta:
        z0 = partition.z_untwisted(spectrum, beta)
        bound = partition.positivity_lower_bound(spectrum, beta)
        tail = (
            fock.truncation_tail_bound(spectrum, beta, cutoff) if len(spectrum) else 0.0
        )
        if sym is None:
            z = z0
            oracle = fock.partition_trace(spectrum, None, beta, cutoff).real
        elif sym.kind == UNITARY:
            z = partition.z_twisted_unitary(spectrum, sym, beta)
            oracle = abs(fock.partition_trace(spectrum, sym, beta, cutoff))
        else:
            z = partition.z_twisted_antiunitary(spectrum, sym, beta)
            enum_cutoff = min(cutoff, max(2, int(round(40 ** (1.0 / max(1, len(spectrum)))))))
            tail = (
                fock.truncation_tail_bound(spectrum, beta, enum_cutoff)
                if len(spectrum)
                else 0.0
            )
            oracle = fock.antiunitary_partition_trace(spectrum, sym, beta, enum_cutoff).real
        rel = abs(z - oracle) / z if z else 0.0
        print(
            ",".join(
                [fmt(beta), fmt(z0), fmt(z), fmt(bound), fmt(oracle), fmt(rel), fmt(tail)]
            )
        )
        if not z > 0.0:
            ok = False
        if sym is None or sym.kind == UNITARY:
            if z < bound * (1.0 - 1e-12):
                ok = False
        if rel > tail + 1e-8:
            ok = False
    return 0 if ok else ASSERTION_FAILURE


def _select_mode(spectrum: ModeSpectrum, label: Optional[str]) -> tuple[str, float]:
    if len(spectrum) == 0:
        raise ConfigError("kernel export needs at least one mode")
    if label is None:
        return spectrum.labels[0], spectrum.omegas[0]
    return label, spectrum.omega_of(label)


def _cmd_kernel(args) -> int:
    spectrum, sym = _load(args.config)
    beta = args.beta
    if sym is not None and sym.kind == ANTIUNITARY:
        if not args.extended:
            print(
                "error: antiunitary symmetry requires --extended "
                "(kernel is defined on the doubled space)",
                file=sys.stderr,
            )
            return PARSE_FAILURE
        ext = realfield.extend(spectrum, sym)
        _export_extended(ext, beta, args.grid, args.output)
        print(f"wrote extended kernel grid to {args.output}")
        return 0
    label, omega = _select_mode(spectrum, args.mode)
    rho = 1.0 + 0.0j
    if sym is not None:
        rho = complex(sym.phases[spectrum.labels.index(label)])
    theta = correlation.kernel_twist_angle(rho)
    kern = correlation.TwistedKernel(omega, theta, beta)
    correlation.export_kernel_csv(args.output, kern, args.grid)
    print(f"wrote {args.grid * args.grid} kernel samples to {args.output}")
    if args.verify:
        from .spectrum import validate_spectrum

        single = validate_spectrum([(label, omega)])
        single_sym = SymmetrySpec(kind=UNITARY, phases=(rho,))
        cutoff = 800
        tail = fock.truncation_tail_bound(single, beta, cutoff)
        worst = 0.0
        m_check = min(args.grid, 8)
        for i in range(m_check):
            for j in range(m_check):
                t = i * beta / m_check
                s = j * beta / m_check
                closed = kern(t, s)
                oracle = correlation.kernel_oracle(single, single_sym, beta, t, s, cutoff)
                four, ftail = correlation.kernel_fourier(omega, theta, beta, t, s, 2000)
                worst = max(worst, abs(closed - oracle), max(0.0, abs(closed - four) - ftail))
        print(f"max three-way disagreement: {fmt(worst)}")
        if worst > tail + 1e-6:
            return ASSERTION_FAILURE
    return 0


def _export_extended(ext, beta: float, m: int, path: str) -> None:
    """CSV of the extended block kernel: one row per (t, s, sector pair)."""
    import csv

    times = [i * beta / m for i in range(m)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "s", "row_sector", "col_sector", "re_k", "im_k", "tail_bound"])
        for t in times:
            for s in times:
                value = realfield.extended_kernel(ext, beta, t, s)
                n = ext.n_doubled
                for a in range(n):
                    for b in range(n):
                        writer.writerow(
                            [
                                fmt(t),
                                fmt(s),
                                str(a),
                                str(b),
                                fmt(value.block[a, b].real),
                                fmt(value.block[a, b].imag),
                                fmt(0.0),
                            ]
                        )


def _cmd_verify(args) -> int:
    spectrum, sym = _load(args.config)
    results = verify.run_suite(args.suite, spectrum, sym, seed=args.seed)
    n_pass = sum(1 for r in results if r.passed)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.suite}: {r.name} (deviation {fmt(r.deviation)}, "
              f"threshold {fmt(r.threshold)})")
    print(f"{n_pass}/{len(results)} checks passed")
    return 0 if n_pass == len(results) else ASSERTION_FAILURE


def _cmd_spectrum_gen(args) -> int:
    spectrum = twisted_circle_spectrum(
        args.twist, args.mass, range(args.n_min, args.n_max + 1)
    )
    doc = spectrum_to_config(spectrum)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistkit",
        description="Twisted free-boson partition functions and thermal kernels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_part = sub.add_parser("partition", help="closed-form vs oracle partition table")
    p_part.add_argument("--config", help="JSON config path (default: bundled config)")
    p_part.add_argument(
        "--beta", type=float, action="append", required=True, help="inverse temperature"
    )
    p_part.add_argument("--cutoff", type=int, default=40, help="oracle occupation cutoff")
    p_part.set_defaults(func=_cmd_partition)

    p_kern = sub.add_parser("kernel", help="export sampled twisted kernels as CSV")
    p_kern.add_argument("--config", help="JSON config path (default: bundled config)")
    p_kern.add_argument("--beta", type=float, required=True)
    p_kern.add_argument("--grid", type=int, default=64, help="grid points per axis")
    p_kern.add_argument("--output", required=True, help="CSV output path")
    p_kern.add_argument("--mode", help="mode label (default: first mode)")
    p_kern.add_argument(
        "--extended", action="store_true", help="doubled-space kernel (antiunitary twists)"
    )
    p_kern.add_argument(
        "--verify", action="store_true", help="print max three-way disagreement"
    )
    p_kern.set_defaults(func=_cmd_kernel)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("--config", help="JSON config path (default: bundled config)")
    p_ver.add_argument("--suite", choices=verify.SUITES, default="all")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=_cmd_verify)

    p_spec = sub.add_parser("spectrum", help="spectrum generators")
    spec_sub = p_spec.add_subparsers(dest="spectrum_command", required=True)
    p_gen = spec_sub.add_parser("gen", help="generate a spectrum config")
    gen_sub = p_gen.add_subparsers(dest="generator", required=True)
    p_circle = gen_sub.add_parser(
        "twisted-circle", help="modes of the twisted circle Laplacian"
    )
    p_circle.add_argument("--twist", type=float, required=True, help="twist angle rho")
    p_circle.add_argument("--mass", type=float, default=0.0)
    p_circle.add_argument("--n-min", type=int, required=True)
    p_circle.add_argument("--n-max", type=int, required=True)
    p_circle.add_argument("--output", help="write config JSON here instead of stdout")
    p_circle.set_defaults(func=_cmd_spectrum_gen)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CAPACITY_FAILURE
    except (
        AdmissibilityError,
        ConfigError,
        DomainError,
        KindError,
        PreconditionError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_FAILURE


if __name__ == "__main__":
    sys.exit(main())

"""Named verification suites over a (spectrum, symmetry) configuration.

Each suite runs a fixed list of checks and returns structured results;
the CLI renders them and sets the exit code.  Checks that need a dense
Fock oracle pick the occupation cutoff adaptively so the matrices fit the
capacity budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import correlation, fock, partition, realfield
from .errors import CapacityError, ConfigError, KindError
from .spectrum import ANTIUNITARY, UNITARY, ModeSpectrum, SymmetrySpec

SUITES = ("ccr", "tc", "symmetry", "partition", "kernel", "realfield", "all")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    deviation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.threshold


def adaptive_cutoff(n_modes: int, budget: Optional[int] = None, cap: int = 8) -> int:
    """Largest cutoff whose dense operators fit the budget, at most ``cap``."""
    budget = fock.matrix_budget() if budget is None else budget
    if n_modes == 0:
        return cap
    dim_max = int(math.floor(budget**0.25))  # dim**2 <= budget
    n = int(math.floor(dim_max ** (1.0 / (2 * n_modes)))) - 1
    if n < 1:
        raise CapacityError(
            f"{n_modes} modes do not admit even cutoff 1 within the budget"
        )
    return min(n, cap)


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.abs(matrix).max()) if matrix.size else 0.0


def _sub_block(space: fock.TruncatedFockSpace, matrix: np.ndarray) -> float:
    mask = space.subcutoff_mask()
    cut = matrix[np.ix_(mask, mask)]
    return _max_abs(cut)


def _random_coeffs(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def suite_ccr(spectrum: ModeSpectrum, sym, seed: int = 0) -> list[CheckResult]:
    results: list[CheckResult] = []
    if len(spectrum) == 0:
        return [CheckResult("ccr", "empty-spectrum (vacuous)", 0.0, 0.0)]
    space = fock.build_space(spectrum, adaptive_cutoff(len(spectrum)))
    rng = np.random.default_rng(seed)
    f = _random_coeffs(rng, len(spectrum))
    g = _random_coeffs(rng, len(spectrum))
    eye = np.eye(space.dim)
    mask = space.subcutoff_mask().astype(float)

    a_plus = fock.annihilation_functional(space, "+", f)
    a_plus_star = fock.creation_functional(space, "+", g)
    comm = a_plus.matrix @ a_plus_star.matrix - a_plus_star.matrix @ a_plus.matrix
    inner_gf = complex(np.vdot(g, f))  # <g, f>
    results.append(
        CheckResult(
            "ccr",
            "[A+(f), A+*(g-bar)] = <g,f> on sub-cutoff block",
            _sub_block(space, comm - inner_gf * eye),
            1e-12,
        )
    )
    a_minus = fock.annihilation_functional(space, "-", g)
    a_minus_star = fock.creation_functional(space, "-", f)
    comm_m = a_minus.matrix @ a_minus_star.matrix - a_minus_star.matrix @ a_minus.matrix
    results.append(
        CheckResult(
            "ccr",
            "[A-(g-bar), A-*(f)] = <g,f> on sub-cutoff block",
            _sub_block(space, comm_m - inner_gf * eye),
            1e-12,
        )
    )
    cross = (
        a_plus_star.matrix @ a_minus_star.matrix
        - a_minus_star.matrix @ a_plus_star.matrix
    )
    results.append(
        CheckResult("ccr", "[A+*(g-bar), A-*(f)] = 0 on full space", _max_abs(cross), 0.0)
    )
    # dynamics: e^{itH} A+*(f-bar) e^{-itH} = A+*((e^{-it omega} f)-bar)
    t = 0.83
    energies = space.energies()
    u_t = np.diag(np.exp(1j * t * energies))
    evolved = u_t @ fock.creation_functional(space, "+", f).matrix @ u_t.conj().T
    shifted = fock.creation_functional(
        space, "+", f * np.exp(-1j * t * np.asarray(spectrum.omegas))
    ).matrix
    results.append(
        CheckResult(
            "ccr",
            "Heisenberg dynamics of A+* on sub-cutoff block",
            _sub_block(space, evolved - shifted),
            1e-10,
        )
    )
    del mask
    return results


def suite_tc(spectrum: ModeSpectrum, sym: Optional[SymmetrySpec], seed: int = 0) -> list[CheckResult]:
    results: list[CheckResult] = []
    space = fock.build_space(spectrum, adaptive_cutoff(len(spectrum)))
    tc = fock.tc_operator(space)
    eye = np.eye(space.dim)
    square = tc @ tc
    results.append(
        CheckResult("tc", "TC squares to the identity", _max_abs(square.matrix - eye), 0.0)
    )
    rng = np.random.default_rng(seed)
    x = _random_coeffs(rng, space.dim)
    y = _random_coeffs(rng, space.dim)
    lhs = complex(np.vdot(tc.apply(x), tc.apply(y)))
    rhs = complex(np.vdot(x, y)).conjugate()
    results.append(CheckResult("tc", "TC is antiunitary on random vectors", abs(lhs - rhs), 1e-12))
    if len(spectrum) > 0:
        f = _random_coeffs(rng, len(spectrum))
        conj_plus = tc @ fock.creation_functional(space, "+", f) @ tc
        results.append(
            CheckResult(
                "tc",
                "TC A+*(f-bar) TC = A-*(f) on sub-cutoff block",
                _sub_block(
                    space, conj_plus.matrix - fock.creation_functional(space, "-", f).matrix
                ),
                1e-12,
            )
        )
        t = 0.41
        phi = fock.imaginary_time_field(space, t, f, conjugate=False)
        phibar = fock.imaginary_time_field(space, t, f, conjugate=True)
        conj_phi = tc @ phi @ tc
        results.append(
            CheckResult(
                "tc",
                "TC phi(t, f-bar) TC = phibar(t, f) on sub-cutoff block",
                _sub_block(space, conj_phi.matrix - phibar.matrix),
                1e-10,
            )
        )
    if sym is not None:
        u = fock.implement_symmetry(space, sym)
        comm = (u @ tc).matrix - (tc @ u).matrix
        results.append(CheckResult("tc", "[U_S, TC] = 0", _max_abs(comm), 1e-12))
    return results


def suite_symmetry(
    spectrum: ModeSpectrum, sym: Optional[SymmetrySpec], seed: int = 0
) -> list[CheckResult]:
    if sym is None:
        raise ConfigError("symmetry suite requires a symmetry in the config")
    results: list[CheckResult] = []
    space = fock.build_space(spectrum, adaptive_cutoff(len(spectrum)))
    u = fock.implement_symmetry(space, sym)
    eye = np.eye(space.dim)
    results.append(
        CheckResult(
            "symmetry", "U is unitary", _max_abs((u @ u.adjoint()).matrix - eye), 1e-12
        )
    )
    h = fock.hamiltonian(space)
    results.append(
        CheckResult(
            "symmetry",
            "[U, H] = 0",
            _max_abs((u @ h).matrix - (h @ u).matrix),
            0.0,
        )
    )
    vac = np.zeros(space.dim, dtype=complex)
    vac[0] = 1.0
    results.append(
        CheckResult("symmetry", "U fixes the vacuum", float(np.abs(u.apply(vac) - vac).max()), 0.0)
    )
    for k, lbl in enumerate(spectrum.labels):
        alpha_plus = fock.creation(space, "+", lbl)
        conj = u @ alpha_plus @ u.adjoint()
        if sym.kind == UNITARY:
            expected = alpha_plus.matrix * sym.phases[k]
            name = f"U alpha+*({lbl}) U* = rho alpha+*({lbl})"
        else:
            j = sym.partner_index(k)
            expected = (
                fock.creation(space, "-", spectrum.labels[j]).matrix * sym.phases[j]
            )
            name = f"U alpha+*({lbl}) U* = eta alpha-*(pi({lbl}))"
        results.append(CheckResult("symmetry", name, _max_abs(conj.matrix - expected), 1e-12))
    return results


def suite_partition(
    spectrum: ModeSpectrum, sym: Optional[SymmetrySpec], seed: int = 0
) -> list[CheckResult]:
    results: list[CheckResult] = []
    beta = 1.0
    cutoff = 40
    tail = fock.truncation_tail_bound(spectrum, beta, cutoff) if len(spectrum) else 0.0
    z_plain = partition.z_untwisted(spectrum, beta)
    oracle_plain = fock.partition_trace(spectrum, None, beta, cutoff).real
    results.append(
        CheckResult(
            "partition",
            "untwisted product formula vs truncated trace",
            abs(z_plain - oracle_plain) / z_plain,
            tail + 1e-10,
        )
    )
    if sym is not None and sym.kind == UNITARY:
        z = partition.z_twisted_unitary(spectrum, sym, beta)
        oracle = fock.partition_trace(spectrum, sym, beta, cutoff)
        results.append(
            CheckResult(
                "partition",
                "unitary product formula vs truncated trace",
                abs(z - oracle) / z,
                tail + 1e-10,
            )
        )
        results.append(
            CheckResult(
                "partition",
                "twist positivity lower bound",
                max(0.0, partition.positivity_lower_bound(spectrum, beta) - z),
                1e-14 * z,
            )
        )
    if sym is not None and sym.kind == ANTIUNITARY:
        z = partition.z_twisted_antiunitary(spectrum, sym, beta)
        n_enum = min(cutoff, max(2, int(round(40 ** (1.0 / len(spectrum))))))
        tail_enum = fock.truncation_tail_bound(spectrum, beta, n_enum)
        oracle = fock.antiunitary_partition_trace(spectrum, sym, beta, n_enum)
        results.append(
            CheckResult(
                "partition",
                "antiunitary square-root identity vs truncated trace",
                abs(z - oracle) / abs(z),
                tail_enum + 1e-8,
            )
        )
        ext = realfield.extend(spectrum, sym)
        z_rf = realfield.z_via_realfield(ext, beta)
        results.append(
            CheckResult(
                "partition",
                "square-root route vs doubled-theory route",
                abs(z - z_rf) / abs(z),
                1e-10,
            )
        )
    # finite trace bound: sum e^{-bw}/(1-e^{-bw}) <= (1-e^{-b mu})^{-1} sum e^{-bw}
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        omegas = rng.uniform(0.3, 4.0, size=rng.integers(1, 6))
        mu = float(omegas.min())
        b = float(rng.uniform(0.2, 3.0))
        lhs = float(np.sum(np.exp(-b * omegas) / (1.0 - np.exp(-b * omegas))))
        rhs = float(np.sum(np.exp(-b * omegas)) / (1.0 - math.exp(-b * mu)))
        worst = max(worst, lhs - rhs)
    results.append(CheckResult("partition", "trace-class bound on random spectra", worst, 1e-12))
    return results


def suite_kernel(
    spectrum: ModeSpectrum, sym: Optional[SymmetrySpec], seed: int = 0
) -> list[CheckResult]:
    if len(spectrum) == 0:
        return [CheckResult("kernel", "empty-spectrum (vacuous)", 0.0, 0.0)]
    if sym is not None and sym.kind != UNITARY:
        raise KindError("kernel suite needs a unitary (or absent) symmetry")
    results: list[CheckResult] = []
    from .spectrum import validate_spectrum

    label, omega = spectrum.labels[0], spectrum.omegas[0]
    single = validate_spectrum([(label, omega)])
    rho = complex(sym.phases[0]) if sym is not None else 1.0 + 0.0j
    single_sym = SymmetrySpec(kind=UNITARY, phases=(rho,)) if sym is not None else None
    beta = 1.0
    theta = correlation.kernel_twist_angle(rho)
    kern = correlation.TwistedKernel(omega, theta, beta)
    cutoff = 800
    tail = fock.truncation_tail_bound(single, beta, cutoff)
    rng = np.random.default_rng(seed)
    worst_oracle = 0.0
    worst_fourier = 0.0
    fourier_tail = 0.0
    for _ in range(20):
        t, s = rng.uniform(0.0, beta, size=2)
        closed = kern(t, s)
        oracle = correlation.kernel_oracle(single, single_sym, beta, t, s, cutoff)
        worst_oracle = max(worst_oracle, abs(closed - oracle))
        four, fourier_tail = correlation.kernel_fourier(omega, theta, beta, t, s, 4000)
        worst_fourier = max(worst_fourier, abs(closed - four))
    results.append(
        CheckResult("kernel", "closed form vs Fock-trace oracle", worst_oracle, tail + 1e-8)
    )
    results.append(
        CheckResult("kernel", "closed form vs Fourier partial sum", worst_fourier, fourier_tail)
    )
    grid = correlation.kernel_grid(kern, 32)
    results.append(
        CheckResult(
            "kernel",
            "sampled kernel Hermitian",
            _max_abs(grid.matrix - grid.matrix.conj().T),
            1e-10,
        )
    )
    eigs = np.linalg.eigvalsh(grid.matrix)
    results.append(
        CheckResult("kernel", "sampled kernel positive definite", max(0.0, -float(eigs.min())), 0.0)
    )
    m = 128
    nu = (theta + 2.0 * math.pi * 0) / beta

    def g(t_: float) -> complex:
        return np.exp(1j * nu * t_)

    def g2(t_: float) -> complex:
        return -(nu**2) * np.exp(1j * nu * t_)

    report = correlation.verify_resolvent(kern, g, g2, m=m)
    results.append(
        CheckResult(
            "kernel",
            "resolvent residual on twisted eigenmode",
            report.max_residual,
            5.0 * (beta / m) ** 2,
        )
    )
    return results


def suite_realfield(
    spectrum: ModeSpectrum, sym: Optional[SymmetrySpec], seed: int = 0
) -> list[CheckResult]:
    if sym is None:
        raise ConfigError("realfield suite requires a symmetry in the config")
    if len(spectrum) == 0:
        return [CheckResult("realfield", "empty-spectrum (vacuous)", 0.0, 0.0)]
    results: list[CheckResult] = []
    ext = realfield.extend(spectrum, sym)
    pairs = realfield.diagonalize_induced(ext)
    phases = np.array([p for _, p in pairs])
    conj_defect = 0.0
    for p in phases:
        conj_defect = max(conj_defect, float(np.abs(phases - np.conj(p)).min()))
    results.append(
        CheckResult(
            "realfield", "induced eigenphases closed under conjugation", conj_defect, 1e-10
        )
    )
    beta = 1.0
    value = realfield.extended_kernel(ext, beta, 0.3, 0.1)
    m = len(spectrum)
    off = max(_max_abs(value.block[:m, m:]), _max_abs(value.block[m:, :m])) if m else 0.0
    if sym.kind == UNITARY:
        results.append(
            CheckResult("realfield", "unitary input: sector-mixing blocks vanish", off, 1e-12)
        )
    grid = realfield.extended_kernel_grid(ext, beta, 12)
    eigs = np.linalg.eigvalsh(grid)
    results.append(
        CheckResult(
            "realfield",
            "sampled extended kernel positive definite",
            max(0.0, -float(eigs.min())),
            0.0,
        )
    )
    cutoff = adaptive_cutoff(len(spectrum), cap=6)
    report = realfield.real_field_checks(ext, sym, cutoff, seed=seed)
    for key, dev in report.items():
        results.append(CheckResult("realfield", f"doubled-field oracle: {key}", dev, 1e-8))
    return results


_SUITE_FUNCS: dict[str, Callable] = {
    "ccr": suite_ccr,
    "tc": suite_tc,
    "symmetry": suite_symmetry,
    "partition": suite_partition,
    "kernel": suite_kernel,
    "realfield": suite_realfield,
}


def run_suite(
    name: str, spectrum: ModeSpectrum, sym: Optional[SymmetrySpec], seed: int = 0
) -> list[CheckResult]:
    """Run one named suite (or 'all'); skips kind-mismatched suites under 'all'."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {SUITES}")
    if name != "all":
        return _SUITE_FUNCS[name](spectrum, sym, seed=seed)
    results: list[CheckResult] = []
    for suite_name, func in _SUITE_FUNCS.items():
        if sym is None and suite_name in ("symmetry", "realfield"):
            continue
        if sym is not None and sym.kind == ANTIUNITARY and suite_name == "kernel":
            continue
        results.extend(func(spectrum, sym, seed=seed))
    return results

"""Global transformations, bath inversion, and parity certification.

Two unitaries connect a boundary-driven chain to its bath-inverted partner:
an x-flip on every site for the target-polarization family, and a per-site
rotation exchanging x and y (while flipping z) for the twisted-XY family.
Conjugating the steady state with the matching unitary must reproduce the
steady state of the inverted-bath system; the reports here measure how well
that holds and what it implies for the currents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec
from .errors import SpecError
from .lindblad import (
    DissipatorSpec,
    SolverConfig,
    TargetZ,
    TwistedXY,
    chain_steady_state,
    currents_profile,
)
from .pauli import kron_chain, pauli


def u_x(n_sites: int) -> np.ndarray:
    """Tensor power of the x Pauli over the whole chain (involutive, unitary)."""
    if n_sites < 1:
        raise SpecError(f"n_sites must be >= 1, got {n_sites}")
    return kron_chain([pauli("x")] * n_sites)


def u_r(n_sites: int) -> np.ndarray:
    """Tensor power of the x/y-exchanging rotation over the whole chain.

    Conjugation rho -> U rho U^dag with this unitary maps the twisted-XY
    dissipator (k_prime = -k) onto its bath-inverted counterpart.
    """
    if n_sites < 1:
        raise SpecError(f"n_sites must be >= 1, got {n_sites}")
    return kron_chain([pauli("r")] * n_sites)


@dataclass(frozen=True)
class BathInversion:
    """A dissipator spec together with its bath-inverted counterpart.

    ``site_assignment`` records which jump family sits at the first and last
    site in each spec; for the target-polarization family inversion is a
    plain swap of the two drivings, for twisted XY the two operator pairs
    trade places (keeping their own parameters).
    """

    family: str
    original: DissipatorSpec
    inverted: DissipatorSpec
    original_assignment: tuple[str, str]
    inverted_assignment: tuple[str, str]


def invert_baths(spec: DissipatorSpec) -> BathInversion:
    if isinstance(spec, TargetZ):
        return BathInversion(
            family="target_z",
            original=spec,
            inverted=TargetZ(f_left=spec.f_right, f_right=spec.f_left, gamma=spec.gamma),
            original_assignment=("left-target", "right-target"),
            inverted_assignment=("right-target", "left-target"),
        )
    if isinstance(spec, TwistedXY):
        inverted = TwistedXY(
            k=spec.k, k_prime=spec.k_prime, rate=spec.rate, swapped=not spec.swapped
        )
        pair = ("W", "V") if not spec.swapped else ("V", "W")
        return BathInversion(
            family="twisted_xy",
            original=spec,
            inverted=inverted,
            original_assignment=pair,
            inverted_assignment=pair[::-1],
        )
    raise SpecError(f"unknown dissipator spec {type(spec).__name__}")


def _require_zero_field(spec: ChainSpec, what: str) -> None:
    if any(b != 0.0 for b in spec.b_field):
        raise SpecError(
            f"{what} requires a vanishing magnetic field; the Hamiltonian is "
            "only invariant under the transformation for B = 0"
        )


def _require_antisymmetric(diss: DissipatorSpec) -> None:
    if isinstance(diss, TargetZ):
        if abs(diss.f_left + diss.f_right) > 1e-12:
            raise SpecError(
                "antisymmetric driving f_left = -f_right is required; for other "
                "drivings conjugation flips both signs instead of swapping the baths"
            )
    elif isinstance(diss, TwistedXY):
        if abs(diss.k + diss.k_prime) > 1e-12:
            raise SpecError(
                "k_prime = -k is required for the rotation to map the jump set "
                "onto the inverted-bath jump set"
            )


def conjugation_unitary(diss: DissipatorSpec, n_sites: int) -> np.ndarray:
    """The unitary whose conjugation implements bath inversion for this family."""
    return u_x(n_sites) if isinstance(diss, TargetZ) else u_r(n_sites)


@dataclass(frozen=True)
class ConjugationReport:
    max_error: float
    passed: bool
    transformation: str  # "x-flip" | "xy-rotation"


def check_conjugation_identity(
    spec: ChainSpec,
    diss: DissipatorSpec,
    method: str = "auto",
    config: SolverConfig | None = None,
) -> ConjugationReport:
    """Certify that the transported steady state solves the inverted-bath system.

    Solves both systems, conjugates the original steady state with the
    family's unitary, and reports the max entrywise deviation from the
    inverted-bath steady state.
    """
    cfg = config or SolverConfig()
    _require_zero_field(spec, "the conjugation identity")
    _require_antisymmetric(diss)
    inversion = invert_baths(diss)
    rho = chain_steady_state(spec, diss, method=method, config=cfg)
    rho_inverted = chain_steady_state(spec, inversion.inverted, method=method, config=cfg)
    u = conjugation_unitary(diss, spec.n_sites)
    transported = u @ rho @ u.conj().T
    max_error = float(np.abs(transported - rho_inverted).max())
    return ConjugationReport(
        max_error=max_error,
        passed=max_error <= cfg.conjugation_tol,
        transformation="x-flip" if isinstance(diss, TargetZ) else "xy-rotation",
    )


@dataclass(frozen=True)
class ParityReport:
    """Current expectations of a system and its bath-inverted partner.

    ``f_even_error`` vanishes when the exchange energy current is even under
    bath inversion; ``j_odd_error`` vanishes when the spin current is odd.
    ``f_total_asymmetry`` is the rectification signal of the total energy
    current (nonzero only with a magnetic field). Energy entries are NaN for
    chains shorter than 3 sites.
    """

    f_xxz_forward: float
    f_xxz_inverted: float
    spin_forward: float
    spin_inverted: float
    f_total_forward: float
    f_total_inverted: float
    f_even_error: float
    j_odd_error: float
    f_total_asymmetry: float


def parity_report(
    spec: ChainSpec,
    diss: DissipatorSpec,
    method: str = "auto",
    config: SolverConfig | None = None,
) -> ParityReport:
    cfg = config or SolverConfig()
    _require_antisymmetric(diss)
    inversion = invert_baths(diss)
    rho = chain_steady_state(spec, diss, method=method, config=cfg)
    rho_inverted = chain_steady_state(spec, inversion.inverted, method=method, config=cfg)
    forward = currents_profile(rho, spec, cfg)
    inverted = currents_profile(rho_inverted, spec, cfg)
    # steady-state currents are uniform, so the central entries are representative
    j_fwd = forward.spin[spec.n_sites // 2 - 1] if forward.spin else math.nan
    j_inv = inverted.spin[spec.n_sites // 2 - 1] if inverted.spin else math.nan
    if forward.energy_xxz:
        mid = (len(forward.energy_xxz) - 1) // 2
        fx_fwd, fx_inv = forward.energy_xxz[mid], inverted.energy_xxz[mid]
        ft_fwd, ft_inv = forward.energy_total[mid], inverted.energy_total[mid]
    else:
        fx_fwd = fx_inv = ft_fwd = ft_inv = math.nan
    return ParityReport(
        f_xxz_forward=fx_fwd,
        f_xxz_inverted=fx_inv,
        spin_forward=j_fwd,
        spin_inverted=j_inv,
        f_total_forward=ft_fwd,
        f_total_inverted=ft_inv,
        f_even_error=abs(fx_fwd - fx_inv) if forward.energy_xxz else math.nan,
        j_odd_error=abs(j_fwd + j_inv),
        f_total_asymmetry=ft_fwd - ft_inv if forward.energy_xxz else math.nan,
    )


def _sign(value: float, floor: float) -> int:
    if abs(value) <= floor:
        return 0
    return 1 if value > 0 else -1


@dataclass(frozen=True)
class DirectionScanRow:
    drive: float
    forward_value: float
    inverted_value: float
    sign_forward: int
    sign_inverted: int
    consistent: bool


@dataclass(frozen=True)
class DirectionScan:
    rows: tuple[DirectionScanRow, ...]
    consistent: bool
    common_sign: int  # 0 when every magnitude sits below the sign floor


def energy_current_direction_scan(
    spec: ChainSpec,
    drive_grid,
    *,
    family: str = "target_z",
    gamma: float = 1.0,
    rate: float = 1.0,
    method: str = "auto",
    config: SolverConfig | None = None,
) -> DirectionScan:
    """Scan the exchange energy current over a driving grid and its inversion.

    For each drive value the current is evaluated with the baths as given and
    with the baths inverted; the scan is consistent when the sign never
    changes (magnitudes below the sign floor count as zero).
    """
    cfg = config or SolverConfig()
    _require_zero_field(spec, "the direction scan")
    if spec.n_sites < 3:
        raise SpecError("the energy current needs at least 3 sites")
    rows = []
    signs = set()
    for drive in drive_grid:
        if family == "target_z":
            diss = TargetZ(f_left=float(drive), f_right=-float(drive), gamma=gamma)
        elif family == "twisted_xy":
            diss = TwistedXY(k=float(drive), k_prime=-float(drive), rate=rate)
        else:
            raise SpecError(f"unknown bath family {family!r}")
        report = parity_report(spec, diss, method=method, config=cfg)
        s_fwd = _sign(report.f_xxz_forward, cfg.sign_floor)
        s_inv = _sign(report.f_xxz_inverted, cfg.sign_floor)
        rows.append(
            DirectionScanRow(
                drive=float(drive),
                forward_value=report.f_xxz_forward,
                inverted_value=report.f_xxz_inverted,
                sign_forward=s_fwd,
                sign_inverted=s_inv,
                consistent=s_fwd == s_inv,
            )
        )
        signs.update({s_fwd, s_inv})
    nonzero = signs - {0}
    consistent = all(r.consistent for r in rows) and len(nonzero) <= 1
    common = nonzero.pop() if len(nonzero) == 1 else 0
    return DirectionScan(rows=tuple(rows), consistent=consistent, common_sign=common)

"""Redheffer star product of scattering matrices.

Composition convention: ``star(s2, s1)`` glues the right side of ``s1`` to
the left side of ``s2``; right-out slots of s1 feed left-in slots of s2 and
left-out slots of s2 feed right-in slots of s1.  The loop inverse is always
taken as the Moore-Penrose pseudo-inverse, so perfectly resonant (singular
loop) configurations stay well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DecouplingViolationError,
    InvalidInputError,
    SeriesDivergentError,
)
from .errors import InternalConsistencyError
from .numerics import DEFAULT_REL_TOL, max_abs, operator_norm, svd
from .smatrix import PortSpec, ScatteringMatrix, unitarity_defect

KERNEL_SV_TOL = 1e-10
DECOUPLING_TOL = 1e-8
RESULT_UNITARITY_TOL = 1e-6


@dataclass(frozen=True)
class Wiring:
    """Slot identification between two scatterers.

    ``s1_to_s2`` pairs (s1 right-out slot, s2 left-in slot); ``s2_to_s1``
    pairs (s2 left-out slot, s1 right-in slot).  The interface groups must
    be wired completely; dangling slots belong in the outer (left of s1,
    right of s2) groups.
    """

    s1_to_s2: tuple = field(default_factory=tuple)
    s2_to_s1: tuple = field(default_factory=tuple)

    @classmethod
    def identity(cls, m12: int, m21: int) -> "Wiring":
        return cls(
            tuple((i, i) for i in range(m12)),
            tuple((i, i) for i in range(m21)),
        )

    def to_json(self) -> dict:
        return {
            "s1_to_s2": [list(p) for p in self.s1_to_s2],
            "s2_to_s1": [list(p) for p in self.s2_to_s1],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Wiring":
        try:
            return cls(
                tuple((int(a), int(b)) for a, b in obj["s1_to_s2"]),
                tuple((int(a), int(b)) for a, b in obj["s2_to_s1"]),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed wiring: {exc}") from exc


def _validate_pair(s2: ScatteringMatrix, s1: ScatteringMatrix):
    if s1.spec.dim != s2.spec.dim:
        raise InvalidInputError(
            f"internal dimensions differ: {s1.spec.dim} vs {s2.spec.dim}"
        )
    if s1.spec.right_out != s2.spec.left_in:
        raise InvalidInputError(
            f"s1 has {s1.spec.right_out} right-out slots but s2 has "
            f"{s2.spec.left_in} left-in slots"
        )
    if s1.spec.right_in != s2.spec.left_out:
        raise InvalidInputError(
            f"s1 has {s1.spec.right_in} right-in slots but s2 has "
            f"{s2.spec.left_out} left-out slots"
        )


def _apply_wiring(s2: ScatteringMatrix, s1: ScatteringMatrix, wiring: Wiring):
    """Permute s2's interface slots so the wiring becomes the identity."""
    m12, m21 = s1.spec.right_out, s1.spec.right_in
    fwd = dict(wiring.s1_to_s2)
    bwd = dict(wiring.s2_to_s1)
    if sorted(fwd) != list(range(m12)) or sorted(fwd.values()) != list(range(m12)):
        raise InvalidInputError("s1_to_s2 wiring is not a bijection on interface slots")
    rev = {r: l for l, r in wiring.s2_to_s1}
    if sorted(rev) != list(range(m21)) or sorted(rev.values()) != list(range(m21)):
        raise InvalidInputError("s2_to_s1 wiring is not a bijection on interface slots")
    in_slots = [fwd[q] for q in range(m12)] + list(
        range(m12, s2.spec.total_in)
    )
    out_slots = [rev[q] for q in range(m21)] + list(
        range(m21, s2.spec.total_out)
    )
    return s2.permuted(in_slots, out_slots)


def loop_matrix(s2: ScatteringMatrix, s1: ScatteringMatrix) -> np.ndarray:
    """The loop matrix 1 - S2^{L,L} S1^{R,R} resumming internal reflections."""
    _validate_pair(s2, s1)
    prod = s2.block("L", "L") @ s1.block("R", "R")
    if prod.shape[0] != prod.shape[1]:
        raise InvalidInputError(f"loop matrix is not square: {prod.shape}")
    return np.eye(prod.shape[0]) - prod


def _assemble(s2: ScatteringMatrix, s1: ScatteringMatrix, linv: np.ndarray):
    """Star-product block assembly given a resolved loop inverse."""
    s1_ll, s1_lr = s1.block("L", "L"), s1.block("L", "R")
    s1_rl, s1_rr = s1.block("R", "L"), s1.block("R", "R")
    s2_ll, s2_lr = s2.block("L", "L"), s2.block("L", "R")
    s2_rl, s2_rr = s2.block("R", "L"), s2.block("R", "R")
    g_ll = s1_ll + s1_lr @ linv @ s2_ll @ s1_rl
    g_lr = s1_lr @ linv @ s2_lr
    g_rl = s2_rl @ s1_rl + s2_rl @ s1_rr @ linv @ s2_ll @ s1_rl
    g_rr = s2_rr + s2_rl @ s1_rr @ linv @ s2_lr
    matrix = np.block([[g_ll, g_lr], [g_rl, g_rr]])
    spec = PortSpec(
        s1.spec.left_in,
        s1.spec.left_out,
        s2.spec.right_in,
        s2.spec.right_out,
        s1.spec.dim,
    )
    return ScatteringMatrix._trusted(matrix, spec)


def pad_to_homogeneous(s: ScatteringMatrix, target_k: int) -> ScatteringMatrix:
    """Embed into a 2*target_k-slot homogeneous scatterer.

    Fictitious in-slots are routed one-to-one onto fictitious out-slots via
    identity blocks, appended after the physical slots of each group.
    """
    spec = s.spec
    counts = (spec.left_in, spec.left_out, spec.right_in, spec.right_out)
    if target_k < max(counts):
        raise InvalidInputError(
            f"target_k={target_k} smaller than largest group count {max(counts)}"
        )
    if spec.homogeneous and spec.left_in == target_k:
        return s
    d = spec.dim
    k = target_k
    out = np.zeros((2 * k * d, 2 * k * d), dtype=complex)

    # Padded flat positions of the original slots.
    phys_in = list(range(spec.left_in)) + [k + j for j in range(spec.right_in)]
    phys_out = list(range(spec.left_out)) + [k + j for j in range(spec.right_out)]
    rows = np.concatenate(
        [np.arange(p * d, (p + 1) * d) for p in phys_out]
    ) if phys_out else np.array([], dtype=int)
    cols = np.concatenate(
        [np.arange(p * d, (p + 1) * d) for p in phys_in]
    ) if phys_in else np.array([], dtype=int)
    out[np.ix_(rows, cols)] = s.matrix

    fict_in = list(range(spec.left_in, k)) + [k + j for j in range(spec.right_in, k)]
    fict_out = list(range(spec.left_out, k)) + [k + j for j in range(spec.right_out, k)]
    for p_in, p_out in zip(fict_in, fict_out):
        out[p_out * d:(p_out + 1) * d, p_in * d:(p_in + 1) * d] = np.eye(d)

    return ScatteringMatrix._trusted(out, PortSpec(k, k, k, k, d))


def extract_physical(
    s_bar: ScatteringMatrix,
    in_slots,
    out_slots,
    spec: PortSpec,
) -> ScatteringMatrix:
    """Pull out the physical sub-block after a padded composition.

    ``in_slots``/``out_slots`` are the flat physical slot indices of
    ``s_bar``; ``spec`` is the port partition of the physical result.
    Raises when physical and fictitious slots fail to decouple.
    """
    d = s_bar.spec.dim
    in_slots, out_slots = list(in_slots), list(out_slots)
    if len(in_slots) != spec.total_in or len(out_slots) != spec.total_out:
        raise InvalidInputError("physical slot labels do not match result spec")
    cols = np.concatenate([np.arange(p * d, (p + 1) * d) for p in in_slots])
    rows = np.concatenate([np.arange(p * d, (p + 1) * d) for p in out_slots])
    col_mask = np.ones(s_bar.spec.in_dim, dtype=bool)
    col_mask[cols] = False
    row_mask = np.ones(s_bar.spec.out_dim, dtype=bool)
    row_mask[rows] = False
    fict_cols = np.flatnonzero(col_mask)
    fict_rows = np.flatnonzero(row_mask)
    cross = 0.0
    if fict_cols.size:
        cross = max(cross, max_abs(s_bar.matrix[np.ix_(rows, fict_cols)]))
    if fict_rows.size:
        cross = max(cross, max_abs(s_bar.matrix[np.ix_(fict_rows, cols)]))
    if cross > DECOUPLING_TOL:
        raise DecouplingViolationError(
            f"physical/fictitious cross-coupling {cross:.3e} exceeds "
            f"{DECOUPLING_TOL:.0e}"
        )
    return ScatteringMatrix._trusted(s_bar.matrix[np.ix_(rows, cols)], spec)


@dataclass(frozen=True)
class KernelDecouplingReport:
    """Residuals of the Kostrykin-Schrader decoupling conditions, one
    4-tuple per loop-kernel vector."""

    kernel_dim: int
    residuals: tuple

    @property
    def max_residual(self) -> float:
        return max((r for quad in self.residuals for r in quad), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_residual < DECOUPLING_TOL


def _kernel_residuals(kmat, s2, s1) -> tuple:
    """Decoupling residual 4-tuples, one per column of the kernel basis."""
    if kmat.shape[1] == 0:
        return ()
    kc = kmat.conj()
    r1 = np.linalg.norm(s1.block("L", "R") @ kmat, axis=0)
    r2 = np.linalg.norm(s2.block("R", "L") @ (s1.block("R", "R") @ kmat), axis=0)
    r3 = np.linalg.norm(s2.block("L", "R").T @ kc, axis=0)
    r4 = np.linalg.norm((s2.block("L", "L") @ s1.block("R", "L")).T @ kc, axis=0)
    return tuple(
        (float(a), float(b), float(c), float(e))
        for a, b, c, e in zip(r1, r2, r3, r4)
    )


def kernel_decoupling_check(
    s2: ScatteringMatrix, s1: ScatteringMatrix
) -> KernelDecouplingReport:
    """Verify that loop-kernel modes are invisible from all dangling ports."""
    loop = loop_matrix(s2, s1)
    if loop.shape[0] == 0:
        return KernelDecouplingReport(0, ())
    _, sing, v = svd(loop)
    kmat = v[:, sing < KERNEL_SV_TOL]
    return KernelDecouplingReport(kmat.shape[1], _kernel_residuals(kmat, s2, s1))


def _inputs_unitary(s2: ScatteringMatrix, s1: ScatteringMatrix) -> bool:
    return (
        s1.matrix.shape[0] == s1.matrix.shape[1]
        and s2.matrix.shape[0] == s2.matrix.shape[1]
        and unitarity_defect(s1.matrix) <= 1e-8
        and unitarity_defect(s2.matrix) <= 1e-8
    )


def star(
    s2: ScatteringMatrix,
    s1: ScatteringMatrix,
    wiring: Wiring | None = None,
) -> ScatteringMatrix:
    """Redheffer star product ``s2 * s1``.

    Dishomogeneous pairs are padded with fictitious identity-routed edges,
    composed homogeneously, and reduced back to the physical block.
    Whenever the loop matrix is (near-)singular the Kostrykin-Schrader
    decoupling conditions are verified rather than assumed.
    """
    _validate_pair(s2, s1)
    if wiring is not None:
        s2 = _apply_wiring(s2, s1, wiring)

    if s1.spec.homogeneous and s2.spec.homogeneous:
        result = _star_direct(s2, s1)
    else:
        k_bar = max(
            s1.spec.left_in, s1.spec.left_out, s1.spec.right_in, s1.spec.right_out,
            s2.spec.left_in, s2.spec.left_out, s2.spec.right_in, s2.spec.right_out,
        )
        bar1 = pad_to_homogeneous(s1, k_bar)
        bar2 = pad_to_homogeneous(s2, k_bar)
        bar_g = _star_direct(bar2, bar1)
        spec = PortSpec(
            s1.spec.left_in, s1.spec.left_out,
            s2.spec.right_in, s2.spec.right_out, s1.spec.dim,
        )
        in_slots = list(range(spec.left_in)) + [k_bar + j for j in range(spec.right_in)]
        out_slots = list(range(spec.left_out)) + [k_bar + j for j in range(spec.right_out)]
        result = extract_physical(bar_g, in_slots, out_slots, spec)

    if _inputs_unitary(s2, s1) and result.matrix.shape[0] == result.matrix.shape[1]:
        defect = unitarity_defect(result.matrix)
        if defect > RESULT_UNITARITY_TOL:
            raise InternalConsistencyError(
                f"star of unitary inputs has unitarity defect {defect:.3e}"
            )
    return result


def _star_direct(s2: ScatteringMatrix, s1: ScatteringMatrix) -> ScatteringMatrix:
    loop = loop_matrix(s2, s1)
    if loop.shape[0] == 0:
        return _assemble(s2, s1, loop)
    # One SVD serves the singularity check, the decoupling verification,
    # and the pseudo-inverse.
    u, sing, v = svd(loop)
    if sing[-1] < KERNEL_SV_TOL:
        kmat = v[:, sing < KERNEL_SV_TOL]
        report = KernelDecouplingReport(
            kmat.shape[1], _kernel_residuals(kmat, s2, s1)
        )
        if not report.ok:
            raise InternalConsistencyError(
                "loop matrix is singular but kernel modes couple to the "
                f"output ports (residual {report.max_residual:.3e}); "
                "inputs are not unitary"
            )
    cutoff = DEFAULT_REL_TOL * sing[0]
    inv_sing = np.where(sing > cutoff, 1.0 / np.where(sing > cutoff, sing, 1.0), 0.0)
    linv = (v * inv_sing) @ u.conj().T
    return _assemble(s2, s1, linv)


def star_via_series(
    s2: ScatteringMatrix,
    s1: ScatteringMatrix,
    wiring: Wiring | None = None,
    max_terms: int = 1000,
    tol: float = 1e-14,
) -> ScatteringMatrix:
    """Star product with the loop inverse resummed as a geometric series.

    Independent of the pseudo-inverse path; serves as its oracle on the
    contractive domain.
    """
    _validate_pair(s2, s1)
    if wiring is not None:
        s2 = _apply_wiring(s2, s1, wiring)
    hop = s2.block("L", "L") @ s1.block("R", "R")
    if hop.shape[0] != hop.shape[1]:
        raise InvalidInputError(f"loop matrix is not square: {hop.shape}")
    if hop.shape[0] and operator_norm(hop) >= 1.0:
        raise SeriesDivergentError(
            "geometric series diverges: ||S2^{L,L} S1^{R,R}|| >= 1"
        )
    linv = np.eye(hop.shape[0], dtype=complex)
    term = np.eye(hop.shape[0], dtype=complex)
    for _ in range(max_terms):
        term = term @ hop
        if max_abs(term) < tol:
            break
        linv = linv + term
    return _assemble(s2, s1, linv)

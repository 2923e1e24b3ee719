"""Scattering- and transfer-matrix types with block access and conversion.

Slot ordering convention (fixed repo-wide): left-group slots first, then
right-group slots; each slot is a contiguous block of ``dim`` internal
amplitudes.  In-slots index columns, out-slots index rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConversionUnavailableError, InvalidInputError, NonUnitaryError
from .numerics import as_matrix, matrix_from_json, matrix_to_json, max_abs

UNITARITY_TOL = 1e-8
CONDITION_CUTOFF = 1e8


@dataclass(frozen=True)
class PortSpec:
    """Port partition of a scatterer: slot counts per group and the
    internal dimension carried by every slot."""

    left_in: int
    left_out: int
    right_in: int
    right_out: int
    dim: int = 1

    def __post_init__(self):
        counts = (self.left_in, self.left_out, self.right_in, self.right_out)
        if any(c < 0 for c in counts):
            raise InvalidInputError(f"negative slot count in {self}")
        if self.dim < 1:
            raise InvalidInputError(f"internal dimension must be >= 1, got {self.dim}")
        if self.left_in + self.right_in != self.left_out + self.right_out:
            raise InvalidInputError(
                f"total in-slots ({self.left_in + self.right_in}) must equal "
                f"total out-slots ({self.left_out + self.right_out})"
            )

    @property
    def total_in(self) -> int:
        return self.left_in + self.right_in

    @property
    def total_out(self) -> int:
        return self.left_out + self.right_out

    @property
    def in_dim(self) -> int:
        return self.total_in * self.dim

    @property
    def out_dim(self) -> int:
        return self.total_out * self.dim

    @property
    def homogeneous(self) -> bool:
        return self.left_in == self.left_out == self.right_in == self.right_out

    def to_json(self) -> dict:
        return {
            "left_in": self.left_in,
            "left_out": self.left_out,
            "right_in": self.right_in,
            "right_out": self.right_out,
            "dim": self.dim,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PortSpec":
        try:
            return cls(
                int(obj["left_in"]),
                int(obj["left_out"]),
                int(obj["right_in"]),
                int(obj["right_out"]),
                int(obj.get("dim", 1)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed port spec: {exc}") from exc


def unitarity_defect(matrix: np.ndarray) -> float:
    """Entrywise max-norm of S^dag S - 1 (square matrices only)."""
    m = np.asarray(matrix)
    return max_abs(m.conj().T @ m - np.eye(m.shape[1]))


class ScatteringMatrix:
    """A scattering matrix together with its port partition.

    Immutable after construction; the underlying array is write-locked.
    """

    def __init__(self, matrix, spec: PortSpec, check: bool = True):
        m = as_matrix(matrix).copy()
        if m.shape != (spec.out_dim, spec.in_dim):
            raise InvalidInputError(
                f"matrix shape {m.shape} does not match spec "
                f"({spec.out_dim}, {spec.in_dim})"
            )
        if check and m.shape[0] == m.shape[1]:
            defect = unitarity_defect(m)
            if defect > UNITARITY_TOL:
                raise NonUnitaryError(
                    f"max |S^dag S - 1| = {defect:.3e} exceeds {UNITARITY_TOL:.0e}"
                )
        m.flags.writeable = False
        self.matrix = m
        self.spec = spec

    def block(self, out_group: str, in_group: str) -> np.ndarray:
        """The rectangular sub-block mapping ``in_group`` to ``out_group``,
        groups named 'L' or 'R'."""
        d = self.spec.dim
        if out_group == "L":
            rows = slice(0, self.spec.left_out * d)
        elif out_group == "R":
            rows = slice(self.spec.left_out * d, self.spec.out_dim)
        else:
            raise InvalidInputError(f"unknown out group {out_group!r}")
        if in_group == "L":
            cols = slice(0, self.spec.left_in * d)
        elif in_group == "R":
            cols = slice(self.spec.left_in * d, self.spec.in_dim)
        else:
            raise InvalidInputError(f"unknown in group {in_group!r}")
        return self.matrix[rows, cols]

    def slot_block(self, out_slot: int, in_slot: int) -> np.ndarray:
        """The dim x dim sub-block for a single (out-slot, in-slot) pair,
        slots indexed flat across left-then-right groups."""
        d = self.spec.dim
        if not (0 <= out_slot < self.spec.total_out and 0 <= in_slot < self.spec.total_in):
            raise InvalidInputError(f"slot pair ({out_slot}, {in_slot}) out of range")
        return self.matrix[out_slot * d:(out_slot + 1) * d, in_slot * d:(in_slot + 1) * d]

    @classmethod
    def _trusted(cls, matrix: np.ndarray, spec: PortSpec) -> "ScatteringMatrix":
        """Wrap an internally produced complex array without re-validation."""
        obj = object.__new__(cls)
        matrix.flags.writeable = False
        obj.matrix = matrix
        obj.spec = spec
        return obj

    def permuted(self, in_slots, out_slots) -> "ScatteringMatrix":
        """Reorder slots; ``in_slots``/``out_slots`` are flat permutations."""
        d = self.spec.dim
        if sorted(in_slots) != list(range(self.spec.total_in)):
            raise InvalidInputError("in_slots is not a permutation")
        if sorted(out_slots) != list(range(self.spec.total_out)):
            raise InvalidInputError("out_slots is not a permutation")
        rows = np.concatenate([np.arange(s * d, (s + 1) * d) for s in out_slots])
        cols = np.concatenate([np.arange(s * d, (s + 1) * d) for s in in_slots])
        return ScatteringMatrix._trusted(self.matrix[np.ix_(rows, cols)], self.spec)

    def with_spec(self, spec: PortSpec) -> "ScatteringMatrix":
        """Reinterpret the same matrix under a different port partition."""
        if (spec.out_dim, spec.in_dim) != self.matrix.shape:
            raise InvalidInputError(
                f"matrix shape {self.matrix.shape} does not match spec "
                f"({spec.out_dim}, {spec.in_dim})"
            )
        obj = object.__new__(ScatteringMatrix)
        obj.matrix = self.matrix
        obj.spec = spec
        return obj

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "matrix": matrix_to_json(self.matrix)}

    @classmethod
    def from_json(cls, obj: dict, check: bool = True) -> "ScatteringMatrix":
        try:
            spec = PortSpec.from_json(obj["spec"])
            matrix = matrix_from_json(obj["matrix"])
        except KeyError as exc:
            raise InvalidInputError(f"malformed scattering matrix: {exc}") from exc
        return cls(matrix, spec, check=check)

    def __repr__(self):
        return f"ScatteringMatrix(spec={self.spec})"


def new_scattering(matrix, spec: PortSpec, check: bool = True) -> ScatteringMatrix:
    """Validating constructor; with ``check`` set unitarity is enforced."""
    return ScatteringMatrix(matrix, spec, check=check)


@dataclass(frozen=True)
class TransferMatrix:
    """Left<->right amplitude map equivalent to a homogeneous S-matrix.

    Maps (A_left, B_left) to (B_right, A_right); ``half`` is the k*d size
    of each of the four blocks.
    """

    matrix: np.ndarray
    half: int
    dim: int = 1

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (2 * self.half, 2 * self.half):
            raise InvalidInputError(
                f"transfer matrix shape {m.shape} does not match half-size {self.half}"
            )
        object.__setattr__(self, "matrix", m)

    def block(self, name: str) -> np.ndarray:
        h = self.half
        blocks = {
            "BA": self.matrix[:h, :h],
            "BB": self.matrix[:h, h:],
            "AA": self.matrix[h:, :h],
            "AB": self.matrix[h:, h:],
        }
        try:
            return blocks[name]
        except KeyError:
            raise InvalidInputError(f"unknown transfer block {name!r}") from None

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        if self.half != other.half or self.dim != other.dim:
            raise InvalidInputError("transfer matrices of different size")
        return TransferMatrix(self.matrix @ other.matrix, self.half, self.dim)


def _checked_inverse(block: np.ndarray, what: str) -> np.ndarray:
    if block.size == 0:
        raise ConversionUnavailableError(f"{what} is empty")
    s = np.linalg.svd(block, compute_uv=False)
    if s[0] == 0.0 or s[0] / max(s[-1], np.finfo(float).tiny) >= CONDITION_CUTOFF:
        raise ConversionUnavailableError(
            f"{what} is singular or ill-conditioned (cond >= {CONDITION_CUTOFF:.0e})"
        )
    return np.linalg.inv(block)


def s_to_t(s: ScatteringMatrix) -> TransferMatrix:
    """Convert a homogeneous scattering matrix to its transfer matrix."""
    if not s.spec.homogeneous:
        raise InvalidInputError("s_to_t needs equal left/right port groups")
    s_ll, s_lr = s.block("L", "L"), s.block("L", "R")
    s_rl, s_rr = s.block("R", "L"), s.block("R", "R")
    inv_lr = _checked_inverse(s_lr, "S^{L,R}")
    h = s_ll.shape[0]
    t = np.empty((2 * h, 2 * h), dtype=complex)
    t[:h, :h] = s_rl - s_rr @ inv_lr @ s_ll
    t[:h, h:] = s_rr @ inv_lr
    t[h:, :h] = -inv_lr @ s_ll
    t[h:, h:] = inv_lr
    return TransferMatrix(t, h, s.spec.dim)


def t_to_s(t: TransferMatrix) -> ScatteringMatrix:
    """Inverse of :func:`s_to_t`."""
    inv_ab = _checked_inverse(t.block("AB"), "T^{A,B}")
    t_aa, t_ba, t_bb = t.block("AA"), t.block("BA"), t.block("BB")
    h = t.half
    s = np.empty((2 * h, 2 * h), dtype=complex)
    s[:h, :h] = -inv_ab @ t_aa
    s[:h, h:] = inv_ab
    s[h:, :h] = t_ba - t_bb @ inv_ab @ t_aa
    s[h:, h:] = t_bb @ inv_ab
    k = h // t.dim
    return ScatteringMatrix(s, PortSpec(k, k, k, k, t.dim), check=False)

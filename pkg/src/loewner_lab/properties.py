"""Loewner properties and the matrix each one requires to be PSD."""

from __future__ import annotations

import enum

import numpy as np

from .exceptions import InputError
from .powers import PowerMap, apply_power


class LoewnerProperty(str, enum.Enum):
    POSITIVITY = "positivity"
    MONOTONICITY = "monotonicity"
    CONVEXITY = "convexity"
    SUPER_ADDITIVITY = "super-additivity"
    SUB_ADDITIVITY = "sub-additivity"

    @classmethod
    def parse(cls, text) -> "LoewnerProperty":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-").replace(" ", "-")
        aliases = {
            "pos": "positivity",
            "positive": "positivity",
            "mono": "monotonicity",
            "monotone": "monotonicity",
            "conv": "convexity",
            "convex": "convexity",
            "super": "super-additivity",
            "superadditivity": "super-additivity",
            "sub": "sub-additivity",
            "subadditivity": "sub-additivity",
        }
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise InputError(f"unknown property {text!r}; expected one of {names}") from None

    @property
    def needs_pair(self) -> bool:
        return self is not LoewnerProperty.POSITIVITY

    @property
    def ordered_pair(self) -> bool:
        """Whether the definition requires ``A >= B``."""
        return self in (LoewnerProperty.MONOTONICITY, LoewnerProperty.CONVEXITY)


def defect_matrix(prop, p: PowerMap, A, B=None, lam: float = 0.5) -> np.ndarray:
    """The matrix that is PSD exactly when ``(A, B)`` does not violate ``prop``.

    ========================  ============================================
    positivity                ``f[A]``
    monotonicity              ``f[A] - f[B]``
    convexity                 ``lam f[A] + (1-lam) f[B] - f[lam A + (1-lam) B]``
    super-additivity          ``f[A+B] - f[A] - f[B]``
    sub-additivity            ``f[A] + f[B] - f[A+B]``
    ========================  ============================================

    Accepts stacks of matrices.
    """
    prop = LoewnerProperty.parse(prop)
    A = np.asarray(A, dtype=float)
    if prop is LoewnerProperty.POSITIVITY:
        return apply_power(p, A)
    if B is None:
        raise InputError(f"{prop.value} needs a pair of matrices")
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise InputError(f"dimension mismatch: {A.shape} vs {B.shape}")
    if prop is LoewnerProperty.MONOTONICITY:
        return apply_power(p, A) - apply_power(p, B)
    if prop is LoewnerProperty.CONVEXITY:
        if not 0.0 < lam < 1.0:
            raise InputError("convexity mixes need 0 < lambda < 1")
        return lam * apply_power(p, A) + (1 - lam) * apply_power(p, B) - apply_power(
            p, lam * A + (1 - lam) * B
        )
    fa, fb, fab = apply_power(p, A), apply_power(p, B), apply_power(p, A + B)
    if prop is LoewnerProperty.SUPER_ADDITIVITY:
        return fab - fa - fb
    return fa + fb - fab

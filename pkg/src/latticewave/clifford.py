"""Complexified Clifford algebra with split metric signature.

For a dimension parameter ``n`` the algebra has ``2n`` generators.  The first
block ``e_1 .. e_n`` squares to ``-1``, the second block ``e_{n+1} .. e_{2n}``
squares to ``+1``, and distinct generators anticommute:

    e_j e_k + e_k e_j = -2 delta_jk          (j, k <= n)
    e_j e_{n+k} + e_{n+k} e_j = 0
    e_{n+j} e_{n+k} + e_{n+k} e_{n+j} = +2 delta_jk

A basis blade is encoded as a bit mask over the generators (bit ``j - 1`` set
means ``e_j`` is a factor; factors are kept in increasing index order), so a
multivector is a dense vector of ``4**n`` complex coefficients indexed by
mask.  Mask ``0`` is the scalar unit.  Products of blades are resolved with a
precomputed sign table: the sign counts the transpositions needed to merge the
two sorted index lists plus one metric flip for every repeated generator from
the ``-1`` block.

The ``dagger`` conjugation is the conjugate-linear anti-automorphism fixed by
``e_j^† = -e_j`` for ``j <= n`` and ``e_{n+j}^† = +e_{n+j}``.  On a blade it
reduces to a sign (reversal plus one flip per minus-block factor), which makes
``norm_squared`` (the scalar part of ``a^† a``) equal to the plain two-norm
squared of the coefficient vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "MAX_DIMENSION",
    "Signature",
    "Multivector",
    "geometric_product",
    "dagger",
    "pseudoscalar",
    "norm_squared",
    "mul_arrays",
    "dagger_arrays",
    "blade_mask",
    "blade_indices",
]

#: hard cap on the dimension parameter; 4**5 = 1024 blades is the desk-scale
#: limit for the dense representation used here.
MAX_DIMENSION = 5


@dataclass(frozen=True)
class Signature:
    """Dimension parameter ``n``: 2n generators, 4**n basis blades."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or not (1 <= self.n <= MAX_DIMENSION):
            raise ValueError(f"dimension n must be an integer in 1..{MAX_DIMENSION}, got {self.n!r}")

    @property
    def generators(self) -> int:
        return 2 * self.n

    @property
    def blades(self) -> int:
        return 1 << (2 * self.n)


@lru_cache(maxsize=None)
def _tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign tables for dimension n: (product sign [B,B], dagger sign [B])."""
    nbits = 2 * n
    size = 1 << nbits
    masks = np.arange(size)

    pop = np.zeros(size, dtype=np.int64)
    for k in range(nbits):
        pop += (masks >> k) & 1

    # Transpositions needed to merge the sorted factor lists of the two
    # blades: pairs (index in left blade) > (index in right blade).
    swaps = np.zeros((size, size), dtype=np.int64)
    for k in range(1, nbits):
        swaps += pop[(masks[:, None] >> k) & masks[None, :]]

    # Repeated generators contract through the metric; only the e_1..e_n
    # block contributes a sign flip.
    minus_block = (1 << n) - 1
    common = masks[:, None] & masks[None, :]
    flips = swaps + pop[common & minus_block]
    sign = np.where((flips & 1).astype(bool), -1, 1).astype(np.int8)

    grades = pop
    rev = (grades * (grades - 1)) // 2 + pop[masks & minus_block]
    dsign = np.where((rev & 1).astype(bool), -1, 1).astype(np.int8)

    sign.setflags(write=False)
    dsign.setflags(write=False)
    return sign, dsign


def mul_arrays(n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pointwise geometric product of blade-coefficient arrays.

    Both arrays must have last-axis length ``4**n``; leading axes broadcast.
    The first argument multiplies from the left (the product does not
    commute).
    """
    sign, _ = _tables(n)
    size = 1 << (2 * n)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-1] != size or b.shape[-1] != size:
        raise ValueError(f"coefficient arrays must have last axis {size}")
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    blades = np.arange(size)
    for i in range(size):
        ai = a[..., i]
        if not np.any(ai):
            continue
        # blade i times blade j lands on blade i ^ j; i ^ blades is a
        # permutation, so fancy-index accumulation is safe here.
        out[..., blades ^ i] += ai[..., None] * (sign[i] * b)
    return out


def dagger_arrays(n: int, arr: np.ndarray) -> np.ndarray:
    """Apply the dagger conjugation to a blade-coefficient array."""
    _, dsign = _tables(n)
    arr = np.asarray(arr, dtype=complex)
    if arr.shape[-1] != (1 << (2 * n)):
        raise ValueError("coefficient array has wrong blade count")
    return np.conj(arr) * dsign


def blade_mask(sig: Signature, indices: Iterable[int]) -> int:
    """Bit mask of a canonical blade given distinct generator indices (1-based)."""
    mask = 0
    for j in indices:
        if not (1 <= j <= sig.generators):
            raise ValueError(f"generator index {j} outside 1..{sig.generators}")
        bit = 1 << (j - 1)
        if mask & bit:
            raise ValueError(f"repeated generator index {j}")
        mask |= bit
    return mask


def blade_indices(mask: int) -> tuple[int, ...]:
    """Sorted 1-based generator indices of a blade mask."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


@dataclass(frozen=True)
class Multivector:
    """Dense multivector: a (4**n,) complex coefficient vector indexed by blade mask."""

    sig: Signature
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (self.sig.blades,):
            raise ValueError(f"expected coefficient shape ({self.sig.blades},), got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, sig: Signature) -> "Multivector":
        return cls(sig, np.zeros(sig.blades, dtype=complex))

    @classmethod
    def scalar(cls, sig: Signature, value: complex) -> "Multivector":
        c = np.zeros(sig.blades, dtype=complex)
        c[0] = value
        return cls(sig, c)

    @classmethod
    def generator(cls, sig: Signature, j: int) -> "Multivector":
        """Generator e_j, 1-based; j <= n squares to -1, j > n to +1."""
        if not (1 <= j <= sig.generators):
            raise ValueError(f"generator index {j} outside 1..{sig.generators}")
        c = np.zeros(sig.blades, dtype=complex)
        c[1 << (j - 1)] = 1.0
        return cls(sig, c)

    @classmethod
    def blade(cls, sig: Signature, indices: Iterable[int], coeff: complex = 1.0) -> "Multivector":
        c = np.zeros(sig.blades, dtype=complex)
        c[blade_mask(sig, indices)] = coeff
        return cls(sig, c)

    # -- algebra ------------------------------------------------------------

    def _check(self, other: "Multivector") -> None:
        if self.sig != other.sig:
            raise ValueError("signature mismatch between operands")

    def __add__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.sig, self.coeffs + other.coeffs)
        return Multivector(self.sig, self.coeffs + Multivector.scalar(self.sig, other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other if not isinstance(other, Multivector) else self + other.__neg__()

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(self.sig, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.sig, mul_arrays(self.sig.n, self.coeffs, other.coeffs))
        return Multivector(self.sig, self.coeffs * complex(other))

    def __rmul__(self, other):
        # scalars commute; anything else must go through __mul__
        return Multivector(self.sig, self.coeffs * complex(other))

    def __truediv__(self, other):
        return Multivector(self.sig, self.coeffs / complex(other))

    def dagger(self) -> "Multivector":
        return Multivector(self.sig, dagger_arrays(self.sig.n, self.coeffs))

    @property
    def scalar_part(self) -> complex:
        return complex(self.coeffs[0])

    def norm_squared(self) -> float:
        # scalar part of a^† a; equals the coefficient two-norm squared
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared()))

    def allclose(self, other: "Multivector", tol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.all(np.abs(self.coeffs - other.coeffs) <= tol))

    def __repr__(self) -> str:
        parts = []
        for mask in range(self.sig.blades):
            c = self.coeffs[mask]
            if c == 0:
                continue
            name = "*".join(f"e{j}" for j in blade_indices(mask)) or "1"
            parts.append(f"({c:.6g})*{name}")
        body = " + ".join(parts) if parts else "0"
        return f"Multivector[n={self.sig.n}]({body})"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    """Geometric product a b (associative, noncommutative)."""
    return a * b


def dagger(a: Multivector) -> Multivector:
    """Conjugate-linear anti-automorphism: (ab)^† = b^† a^†, e_j^† = -e_j for j <= n."""
    return a.dagger()


def norm_squared(a: Multivector) -> float:
    """Scalar part of a^† a; real and nonnegative, zero only for a = 0."""
    return a.norm_squared()


def pseudoscalar(sig: Signature) -> Multivector:
    """Oriented unit pseudoscalar: product e_{n+1} e_1 e_{n+2} e_2 ... e_{2n} e_n.

    Squares to +1 and anticommutes with every generator, which makes it the
    mass-coupling element used by the Dirac factorization.
    """
    out = Multivector.scalar(sig, 1.0)
    for j in range(1, sig.n + 1):
        out = out * Multivector.generator(sig, sig.n + j) * Multivector.generator(sig, j)
    return out

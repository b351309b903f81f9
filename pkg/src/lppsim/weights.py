"""Deterministic Exp(1) site-weight field over the integer lattice.

Every weight is a pure function of (seed, site), so the same realization can
be re-read in any order, by any engine, with bit-identical results.  This is
what makes restricted and unrestricted passage times couplings of the *same*
randomness rather than independent runs.

Bit-exact construction (external contract, do not change without bumping the
result format version):

    site_key(x, y) = mix64( (x * 0x9E3779B97F4A7C15) XOR rot64(y, 32) )
    bits(seed, x, y) = mix64( seed XOR site_key(x, y) )

where all arithmetic is modulo 2**64, coordinates are taken as two's
complement 64-bit integers, and ``mix64`` is the avalanche finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

The uniform takes the top 53 bits, u = (bits >> 11) * 2**-53 in [0, 1), and
the weight is -log(1 - u) with 1 - u = (2**53 - (bits >> 11)) * 2**-53
computed exactly.  The single bit pattern mapping to weight 0.0 is remapped
to the smallest positive double so weights are strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticePoint

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_MUL_1 = 0xBF58476D1CE4E5B9
_MIX_MUL_2 = 0x94D049BB133111EB

# 2**-53 and the exclusive top of the 53-bit range, both exact in float64.
_INV_2_53 = 2.0 ** -53
_TWO_53 = np.uint64(1) << np.uint64(53)

#: Weight substituted for the single all-zero top-53-bit pattern.
_MIN_POSITIVE = 5e-324

_COORD_LIMIT = 1 << 31


def mix64(z: int) -> int:
    """Scalar 64-bit avalanche finalizer (exact Python-int version)."""
    z &= _MASK64
    z ^= z >> 30
    z = (z * _MIX_MUL_1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX_MUL_2) & _MASK64
    z ^= z >> 31
    return z


def _mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized finalizer on a uint64 array (wrapping semantics)."""
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX_MUL_1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX_MUL_2)
    z = z ^ (z >> np.uint64(31))
    return z


def derive_seed(seed: int, *salts: int) -> int:
    """Child seed for an independent substream (replica index, s-index, ...).

    Folding each salt through the finalizer keeps substreams statistically
    independent of each other and of the parent stream.
    """
    s = seed & _MASK64
    for salt in salts:
        s = mix64(s ^ mix64((salt + 1) * _GOLDEN))
    return s


def replica_seeds(seed: int, k0: int, k1: int) -> np.ndarray:
    """Vector of derive_seed(seed, k) for k in [k0, k1), as uint64."""
    ks = np.arange(k0, k1, dtype=np.uint64)
    inner = _mix64_array((ks + np.uint64(1)) * np.uint64(_GOLDEN))
    return _mix64_array(np.uint64(seed & _MASK64) ^ inner)


def site_keys(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Seed-independent per-site hash, uint64 array."""
    xu = np.asarray(xs, dtype=np.int64).astype(np.uint64)
    yu = np.asarray(ys, dtype=np.int64).astype(np.uint64)
    yrot = (yu << np.uint64(32)) | (yu >> np.uint64(32))
    return _mix64_array((xu * np.uint64(_GOLDEN)) ^ yrot)


def bits_from_keys(seeds: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Final 64-bit patterns; broadcasts (R,1) seeds against (W,) keys."""
    return _mix64_array(np.asarray(seeds, dtype=np.uint64) ^ keys)


def weights_from_bits(bits: np.ndarray) -> np.ndarray:
    """Map 64-bit patterns to strictly positive Exp(1) variates.

    (2**53 - top53) is in [1, 2**53], exactly representable in float64, so
    1 - u is computed without rounding and the log sees an exact argument.
    """
    top = bits >> np.uint64(11)
    one_minus_u = (_TWO_53 - top).astype(np.float64) * _INV_2_53
    w = -np.log(one_minus_u)
    # log(1.0) == 0.0 exactly; keep the field strictly positive.
    if np.any(w == 0.0):
        w = np.where(w == 0.0, _MIN_POSITIVE, w)
    return w


def exp_inverse_cdf(u: float) -> float:
    """Quantile function of Exp(1): u -> -log(1 - u) for u in [0, 1)."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must be in [0, 1), got {u!r}")
    return float(-np.log1p(-u))


def _check_coords(xs: np.ndarray, ys: np.ndarray) -> None:
    for a in (xs, ys):
        if a.size and (np.abs(a) >= _COORD_LIMIT).any():
            raise ValueError("lattice coordinate magnitude must be < 2**31")


@dataclass(frozen=True)
class WeightField:
    """Seeded i.i.d. Exp(1) weight field; weights are recomputed on demand."""

    seed: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _MASK64:
            object.__setattr__(self, "seed", self.seed & _MASK64)

    def weights_at_sites(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Weights for arbitrary coordinate arrays (same shape in/out)."""
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        _check_coords(xs, ys)
        bits = bits_from_keys(np.uint64(self.seed), site_keys(xs, ys))
        return weights_from_bits(bits)

    def weight_at(self, p: LatticePoint) -> float:
        """Single-site weight; bit-identical to the bulk path."""
        return float(self.weights_at_sites(np.array([p.x]), np.array([p.y]))[0])

    def diagonal_weights(self, r: int, psi_lo: int, psi_hi: int) -> np.ndarray:
        """Weights on the anti-diagonal x+y=r for psi in [psi_lo, psi_hi].

        Endpoints are snapped inward to the parity of r; sites come back in
        increasing psi order.  Empty ranges yield an empty vector.
        """
        lo = psi_lo + ((psi_lo ^ r) & 1)
        hi = psi_hi - ((psi_hi ^ r) & 1)
        if lo > hi:
            return np.empty(0, dtype=np.float64)
        psis = np.arange(lo, hi + 1, 2, dtype=np.int64)
        xs = (r + psis) // 2
        ys = (r - psis) // 2
        return self.weights_at_sites(xs, ys)

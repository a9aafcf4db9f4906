"""Deterministic, cross-language-reproducible random numbers.

A counter-based generator: output i of stream (seed) is
splitmix64(seed, i), the standard 64-bit finalizer-based generator
(Steele, Lea & Flood 2014).  Standard normals come from the Box-Muller
transform applied to consecutive pairs of uniforms.  Both algorithms
are fully specified here so any implementation in any language can
reproduce the byte-exact stream:

    z   = (seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64
    z   = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  mod 2^64
    z   = (z ^ (z >> 27)) * 0x94D049BB133111EB  mod 2^64
    out =  z ^ (z >> 31)

    uniform(i)  = (out >> 11) * 2^-53            (in [0, 1))
    normals 2k, 2k+1: r = sqrt(-2 ln(1 - u_{2k})),
        (r cos(2 pi u_{2k+1}), r sin(2 pi u_{2k+1}))

numpy's own generators are deliberately not used for initial data so
that configs pin the exact stream independent of the numpy version.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def splitmix64(seed: int, index: int | np.ndarray) -> np.ndarray:
    """Output word(s) at the given counter position(s) of stream `seed`."""
    if seed < 0 or seed > _MASK:
        raise ValueError("seed must be an unsigned 64-bit integer")
    idx = np.asarray(index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + (idx + np.uint64(1)) * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return z


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """count uniforms in [0, 1) from counter positions start.."""
    words = splitmix64(seed, np.arange(start, start + count))
    return (words >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def normals(seed: int, count: int, start: int = 0) -> np.ndarray:
    """count standard normals via Box-Muller on uniform pairs.

    Pair k consumes counter positions start+2k and start+2k+1, so
    streams are reproducible regardless of how many values are read.
    """
    pairs = (count + 1) // 2
    u = uniforms(seed, start, 2 * pairs)
    u1, u2 = u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]

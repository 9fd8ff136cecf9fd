"""Seedable Rayleigh channel generation for the symmetric topology.

Each link (i, j) gets its own counter-based Philox stream keyed by
(seed, i, j), so any single realization is reproducible in O(1) without
generating earlier ones, and campaigns can draw instances in parallel.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .model import ChannelSet, SystemConfig

__all__ = ["generate_channels", "dump_channels", "load_channels"]


def _link_rng(seed: int, i: int, j: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=[int(seed), i, j])
    return np.random.Generator(np.random.Philox(ss))


def generate_channels(config: SystemConfig, seed: int) -> ChannelSet:
    """Draw one channel realization.

    Entry (i, j) is a length-K vector of i.i.d. circularly-symmetric
    complex Gaussians with variance ``direct_variance`` on direct links
    and ``direct_variance / delta`` on cross links (variance split
    equally between real and imaginary parts).  Identical (config, seed)
    pairs produce bit-identical output.
    """
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    K = config.n_users
    h = np.empty((K, K, K), dtype=complex)
    cross_var = config.direct_variance / config.delta
    for i in range(K):
        for j in range(K):
            var = config.direct_variance if i == j else cross_var
            rng = _link_rng(seed, i, j)
            parts = rng.standard_normal((2, K))
            h[i, j] = np.sqrt(var / 2.0) * (parts[0] + 1j * parts[1])
    return ChannelSet(h=h, seed=int(seed))


def dump_channels(channels: ChannelSet, path) -> None:
    """Write a ChannelSet in the documented text format.

    Header line ``K <K> seed <seed>``, then one line ``re im`` per
    complex entry in (i, j, antenna) order.
    """
    K = channels.n_users
    lines = [f"K {K} seed {channels.seed}"]
    flat = channels.h.reshape(-1)
    for val in flat:
        lines.append(f"{val.real:.17g} {val.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_channels(path) -> ChannelSet:
    """Inverse of :func:`dump_channels`."""
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split()
    if len(header) != 4 or header[0] != "K" or header[2] != "seed":
        raise ValueError("malformed channel dump header")
    K, seed = int(header[1]), int(header[3])
    expected = K * K * K
    if len(text) - 1 != expected:
        raise ValueError(f"expected {expected} entries, found {len(text) - 1}")
    flat = np.empty(expected, dtype=complex)
    for k, line in enumerate(text[1:]):
        re_s, im_s = line.split()
        flat[k] = complex(float(re_s), float(im_s))
    return ChannelSet(h=flat.reshape(K, K, K), seed=seed)

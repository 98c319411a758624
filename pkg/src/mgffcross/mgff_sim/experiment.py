"""Monte-Carlo estimation of crossing-pattern frequencies on a rectangle.

Each trial samples the lattice field (harmonic part plus zero-boundary
Gaussian free field), opens every same-sign edge independently with the
one-excursion bridge probability 1 - exp(-2ab), and reads off which
same-sign boundary arcs ended up wired together.  The pair of arc
partitions is mapped to its boundary link pattern through the planar
cluster dictionary; incompatible pairs (which have probability zero in
the continuum) are counted in a separate anomaly bucket.

Reproducibility: trial t of mesh index m uses an independent Philox
stream keyed (seed, m * trials + t), drawing its interior normals first
and its edge uniforms second.  Results are therefore independent of
chunking and thread count, and byte-identical across runs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..combinat import LinkPattern, enumerate_link_patterns
from ..errors import IncompatiblePartitionsError
from ..probability import (
    RectanglePolygon,
    cluster_pattern_table,
    crossing_probability,
    rect_boundary_to_halfplane,
)
from .kernels import mask_to_partition, pair_bit, percolate_batch
from .lattice import (
    LatticeField,
    LatticeSpec,
    build_lattice,
    harmonic_extension,
    interior_noise_to_field,
)

# Boundary amplitude matching the continuum height gap 2*lambda = pi:
# the unit-conductance lattice field carries 1/sqrt(2 pi) of the
# log-covariance normalization, so mu = 2 lambda / sqrt(2 pi) = 2 sqrt(pi/8).
MU_LAT_DEFAULT = 2.0 * math.sqrt(math.pi / 8.0)

Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class SimConfig:
    """Monte-Carlo run parameters."""

    trials: int = 100_000
    seed: int = 1
    mu: float = MU_LAT_DEFAULT
    meshes: tuple[int, ...] = (16, 32, 64)  # intervals per unit height
    kernel: str = "auto"
    threads: int = 0  # 0 = one worker per cpu
    chunk: int = 512


@dataclass(frozen=True)
class ClusterState:
    """Arc connectivity of one percolation trial."""

    pos_mask: int
    neg_mask: int
    pos_blocks: tuple[tuple[int, ...], ...]
    neg_blocks: tuple[tuple[int, ...], ...]


def percolate(
    field: LatticeField, rng: np.random.Generator, kernel: str | None = None
) -> ClusterState:
    """Open edges of one sampled field and collect arc connectivity."""
    spec = field.spec
    uniforms = rng.random(spec.n_edges)
    pos, neg = percolate_batch(
        field.values.reshape(1, -1), uniforms[None, :], spec, kernel
    )
    n = spec.narcs // 2
    return ClusterState(
        int(pos[0]),
        int(neg[0]),
        mask_to_partition(int(pos[0]), n),
        mask_to_partition(int(neg[0]), n),
    )


def extract_pattern(state: ClusterState, n: int) -> LinkPattern:
    """Boundary link pattern of a trial; raises IncompatiblePartitionsError
    for lattice configurations with no planar continuum counterpart."""
    table = cluster_pattern_table(n)
    try:
        return table[(state.pos_blocks, state.neg_blocks)]
    except KeyError:
        raise IncompatiblePartitionsError(
            f"no planar pattern for {state.pos_blocks} / {state.neg_blocks}"
        ) from None


def partition_mask(blocks, n: int) -> int:
    """Set partition -> pairwise-connectivity bitmask (inverse of
    mask_to_partition up to transitive closure)."""
    mask = 0
    for b in blocks:
        for ii, i in enumerate(b):
            for j in b[ii + 1 :]:
                mask |= 1 << pair_bit(i - 1, j - 1, n)
    return mask


def wilson_interval(count: int, total: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if total <= 0:
        return (0.0, 1.0)
    p = count / total
    z2 = Z95 * Z95
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    half = Z95 * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class MeshResult:
    ny: int
    nx: int
    delta: float
    snap_err: float
    counts: tuple[int, ...]
    anomalies: int
    freqs: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentReport:
    rectangle: RectanglePolygon
    config: SimConfig
    patterns: tuple[LinkPattern, ...]
    theory: tuple[float, ...]
    meshes: tuple[MeshResult, ...]

    def to_json_obj(self) -> dict:
        return {
            "L": self.rectangle.L,
            "marks": list(self.rectangle.marks),
            "mu": self.config.mu,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "patterns": [[list(l) for l in p.links] for p in self.patterns],
            "theory": list(self.theory),
            "meshes": [
                {
                    "ny": m.ny,
                    "nx": m.nx,
                    "delta": m.delta,
                    "snap_err": m.snap_err,
                    "counts": list(m.counts),
                    "anomalies": m.anomalies,
                    "freqs": list(m.freqs),
                    "ci_low": list(m.ci_low),
                    "ci_high": list(m.ci_high),
                    "gaps": [abs(f - t) for f, t in zip(m.freqs, self.theory)],
                }
                for m in self.meshes
            ],
        }

    def csv_rows(self) -> list[str]:
        """Data rows in the fixed column order
        mesh,pattern_id,count,freq,ci_low,ci_high,theory,gap."""
        rows = []
        for m in self.meshes:
            for pid in range(len(self.patterns)):
                gap = abs(m.freqs[pid] - self.theory[pid])
                rows.append(
                    ",".join(
                        (
                            _fmt(m.delta),
                            str(pid),
                            str(m.counts[pid]),
                            _fmt(m.freqs[pid]),
                            _fmt(m.ci_low[pid]),
                            _fmt(m.ci_high[pid]),
                            _fmt(self.theory[pid]),
                            _fmt(gap),
                        )
                    )
                )
        return rows


CSV_HEADER = "mesh,pattern_id,count,freq,ci_low,ci_high,theory,gap"


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _trial_stream(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed % 2**64, index % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_mesh(
    R: RectanglePolygon,
    cfg: SimConfig,
    mesh_index: int,
    ny: int,
    table: dict,
    npatterns: int,
) -> tuple[LatticeSpec, np.ndarray]:
    spec = build_lattice(R, ny)
    harm = harmonic_extension(spec, cfg.mu).values
    nE = spec.n_edges
    m, n = spec.interior_shape
    base = mesh_index * cfg.trials

    def do_chunk(bounds: tuple[int, int]) -> np.ndarray:
        t0, t1 = bounds
        B = t1 - t0
        normals = np.empty((B, m, n))
        uniforms = np.empty((B, nE))
        for i, t in enumerate(range(t0, t1)):
            g = _trial_stream(cfg.seed, base + t)
            normals[i] = g.standard_normal((m, n))
            uniforms[i] = g.random(nE)
        fields = np.broadcast_to(harm, (B,) + harm.shape).copy()
        fields[:, 1:-1, 1:-1] += interior_noise_to_field(spec, normals)
        pos, neg = percolate_batch(
            fields.reshape(B, -1), uniforms, spec, cfg.kernel
        )
        c = np.zeros(npatterns + 1, dtype=np.int64)
        for pm, nm in zip(pos.tolist(), neg.tolist()):
            c[table.get((pm, nm), npatterns)] += 1
        return c

    chunks = [
        (t0, min(t0 + cfg.chunk, cfg.trials)) for t0 in range(0, cfg.trials, cfg.chunk)
    ]
    counts = np.zeros(npatterns + 1, dtype=np.int64)
    workers = cfg.threads or os.cpu_count() or 1
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for c in ex.map(do_chunk, chunks):
                counts += c
    else:
        for ch in chunks:
            counts += do_chunk(ch)
    return spec, counts


def run_experiment(R: RectanglePolygon, cfg: SimConfig) -> ExperimentReport:
    """Full sweep over the configured mesh levels at one mu."""
    npts = R.npoints
    n = npts // 2
    patterns = enumerate_link_patterns((2,) * npts)
    ys = rect_boundary_to_halfplane(R)
    theory = tuple(float(crossing_probability(p, ys)) for p in patterns)
    pat_index = {p: i for i, p in enumerate(patterns)}
    table = {
        (partition_mask(pos, n), partition_mask(neg, n)): pat_index[pat]
        for (pos, neg), pat in cluster_pattern_table(n).items()
    }

    results = []
    for mi, ny in enumerate(cfg.meshes):
        spec, counts = _run_mesh(R, cfg, mi, ny, table, len(patterns))
        tot = cfg.trials
        freqs = tuple(int(c) / tot for c in counts[:-1])
        cis = [wilson_interval(int(c), tot) for c in counts[:-1]]
        results.append(
            MeshResult(
                ny=spec.ny,
                nx=spec.nx,
                delta=spec.delta,
                snap_err=spec.snap_err,
                counts=tuple(int(c) for c in counts[:-1]),
                anomalies=int(counts[-1]),
                freqs=freqs,
                ci_low=tuple(lo for lo, _ in cis),
                ci_high=tuple(hi for _, hi in cis),
            )
        )
    return ExperimentReport(R, cfg, patterns, theory, tuple(results))


def sweep_mu(R: RectanglePolygon, cfg: SimConfig, mus) -> list[ExperimentReport]:
    """One report per mu value, sharing trial streams (common random numbers)."""
    return [run_experiment(R, replace(cfg, mu=float(m))) for m in mus]

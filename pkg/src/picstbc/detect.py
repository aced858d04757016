"""ML, ZF, PIC group, PIC-SIC group and symbol-wise SIC detectors.

All decoders take the vectorized received signal y, an EquivalentChannel
and the transmit scaling sqrt(rho/mu), and report the number of squared-norm
evaluations spent (|A|^L for ML, L*|A| for ZF, sum_p |A|^l_p for the group
decoders).  Exhaustive searches enumerate candidate index vectors in
lexicographic order and ties resolve to the first (smallest) vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, nearest_indices
from .equivch import EquivalentChannel
from .linalg import complement_projection, numerical_rank

NORM_EVAL_GUARD = 1 << 26
_BLOCK_LIMIT = 4096


class DecoderError(Exception):
    """Base class for decoder failures."""


class SearchSpaceError(DecoderError):
    """Exhaustive search would exceed the norm-evaluation guard."""


class RankDeficientError(DecoderError):
    """Channel does not have the column rank the decoder requires."""


@dataclass
class DecodeResult:
    symbol_indices: np.ndarray
    norm_evals: int
    per_group_residuals: list[float] | None = None


def ml_norm_evals(c: Constellation, L: int) -> int:
    return c.order**L


def zf_norm_evals(c: Constellation, L: int) -> int:
    return L * c.order


def pic_norm_evals(c: Constellation, group_sizes) -> int:
    return sum(c.order**l for l in group_sizes)


def _check_guard(evals: int) -> None:
    if evals > NORM_EVAL_GUARD:
        raise SearchSpaceError(f"{evals} norm evaluations exceed the guard {NORM_EVAL_GUARD}")


def index_grid(order: int, length: int) -> np.ndarray:
    """(length, order**length) array of candidate index vectors in
    lexicographic order (first coordinate most significant)."""
    k = order**length
    flat = np.arange(k, dtype=np.int64)
    out = np.empty((length, k), dtype=np.int64)
    for pos in range(length):
        out[pos] = (flat // order ** (length - 1 - pos)) % order
    return out


def _block_split(order: int, length: int) -> list[int]:
    """Split a candidate search over `length` symbols into 1-3 blocks small
    enough to tabulate."""
    b_max = 1
    while order ** (b_max + 1) <= _BLOCK_LIMIT:
        b_max += 1
    nb = -(-length // b_max)
    if nb <= 2 and order**length > (1 << 16) and length >= 3:
        nb = 3
    if nb > 3:
        raise AssertionError("search space exceeds what the guard admits")
    base, extra = divmod(length, nb)
    return [base + (1 if i < extra else 0) for i in range(nb)]


def exhaustive_argmin(z: np.ndarray, r_scaled: np.ndarray, c: Constellation):
    """First index vector minimizing ||z - r_scaled @ points[idx]||^2 over
    all |A|^l candidates.

    Returns (index vector, candidate count, best metric).  Large searches
    are evaluated through per-block metric tables; the block decomposition
    reproduces the same quadratic metric up to rounding and keeps the
    lexicographic tie rule.
    """
    n, length = r_scaled.shape
    k_total = c.order**length
    if length == 0:
        return np.zeros(0, dtype=np.int64), 0, float(np.vdot(z, z).real)
    sizes = _block_split(c.order, length)
    zn = float(np.vdot(z, z).real)

    if len(sizes) == 1:
        s = c.points[index_grid(c.order, length)]
        d = z[:, None] - r_scaled @ s
        metrics = np.einsum("ij,ij->j", d.conj(), d).real
        best = int(np.argmin(metrics))
        idx = index_grid(c.order, length)[:, best]
        return idx, k_total, float(metrics[best])

    # per-block candidate images U_i and the quadratic metric's tables
    bounds = np.cumsum([0] + sizes)
    us = []
    for i, sz in enumerate(sizes):
        s = c.points[index_grid(c.order, sz)]
        us.append(r_scaled[:, bounds[i] : bounds[i + 1]] @ s)
    t = [np.einsum("ij,ij->j", u.conj(), u).real - 2.0 * (u.conj().T @ z).real for u in us]
    cross = {(i, j): 2.0 * (us[i].conj().T @ us[j]).real for i in range(len(us)) for j in range(i + 1, len(us))}

    if len(sizes) == 2:
        metrics = t[0][:, None] + t[1][None, :] + cross[(0, 1)]
        flat = int(np.argmin(metrics))
        k2 = us[1].shape[1]
        parts = (flat // k2, flat % k2)
    else:
        # scan one leading-block slice at a time, in ascending order of a
        # per-slice lower bound; slices that cannot beat the incumbent are
        # skipped.  Tie resolution on the global flat index keeps the result
        # identical to the full lexicographic scan.
        k1, k2, k3 = (u.shape[1] for u in us)
        tail = t[1][:, None] + t[2][None, :] + cross[(1, 2)]
        bound = (
            t[0]
            + cross[(0, 1)].min(axis=1)
            + cross[(0, 2)].min(axis=1)
            + float(tail.min())
        )
        best_val, best_flat = np.inf, -1
        for u in np.argsort(bound, kind="stable"):
            if bound[u] > best_val:
                break
            slice_ = tail + cross[(0, 1)][u][:, None] + cross[(0, 2)][u][None, :] + t[0][u]
            local = int(np.argmin(slice_))
            val = float(slice_.reshape(-1)[local])
            flat = int(u) * k2 * k3 + local
            if val < best_val or (val == best_val and flat < best_flat):
                best_val, best_flat = val, flat
        parts = (best_flat // (k2 * k3), (best_flat // k3) % k2, best_flat % k3)
        metrics = None

    idx = np.concatenate(
        [index_grid(c.order, sz)[:, int(part)] for sz, part in zip(sizes, parts)]
    )
    if metrics is not None:
        best_metric = float(metrics.reshape(-1)[int(parts[0]) * us[1].shape[1] + int(parts[1])]) + zn
    else:
        best_metric = best_val + zn
    return idx, k_total, best_metric


def ml_decode(y, chan: EquivalentChannel, c: Constellation, scale: float) -> DecodeResult:
    """Exact joint search over all |A|^L symbol vectors."""
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    evals = ml_norm_evals(c, chan.L)
    _check_guard(evals)
    idx, k, metric = exhaustive_argmin(y, scale * chan.matrix, c)
    return DecodeResult(symbol_indices=idx, norm_evals=k, per_group_residuals=[metric])


def zf_decode(y, chan: EquivalentChannel, c: Constellation, scale: float) -> DecodeResult:
    """Pseudo-inverse equalization followed by per-symbol quantization."""
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    h = chan.matrix
    if numerical_rank(h) < chan.L:
        raise RankDeficientError("equivalent channel is column-rank deficient")
    hh = h.conj().T
    est = np.linalg.solve(hh @ h, hh @ y) / scale
    idx = nearest_indices(est, c)
    return DecodeResult(symbol_indices=idx, norm_evals=zf_norm_evals(c, chan.L))


def group_projectors(chan: EquivalentChannel) -> list[np.ndarray]:
    """Interference-cancellation projectors: Q_p annihilates every group
    but p (falling back to a maximal independent column set when the other
    groups are rank deficient)."""
    return [complement_projection(chan.other_blocks(p)) for p in range(chan.grouping.P)]


def pic_group_decode(y, chan: EquivalentChannel, c: Constellation, scale: float) -> DecodeResult:
    """Per group: project out all other groups, then run the group's exact
    search on the projected observation.  Groups do not exchange decisions.
    """
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    sizes = [len(g) for g in chan.grouping.groups]
    _check_guard(pic_norm_evals(c, sizes))
    out = np.empty(chan.L, dtype=np.int64)
    residuals = []
    total = 0
    for p, members in enumerate(chan.grouping.groups):
        q = complement_projection(chan.other_blocks(p))
        z = q @ y
        r = q @ chan.group_block(p)
        idx, k, metric = exhaustive_argmin(z, scale * r, c)
        out[list(members)] = idx
        residuals.append(metric)
        total += k
    return DecodeResult(symbol_indices=out, norm_evals=total, per_group_residuals=residuals)


def pic_sic_group_decode(
    y,
    chan: EquivalentChannel,
    c: Constellation,
    scale: float,
    order: tuple[int, ...] | None = None,
    require_full_rank: bool = False,
) -> DecodeResult:
    """PIC with successive cancellation: groups are decoded in `order`
    (default 0..P-1); each stage subtracts the already-decoded groups and
    projects out only the not-yet-decoded ones."""
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    grouping = chan.grouping
    if order is None:
        order = tuple(range(grouping.P))
    if sorted(order) != list(range(grouping.P)):
        raise ValueError(f"order {order} is not a permutation of 0..{grouping.P - 1}")
    sizes = [len(grouping.groups[p]) for p in order]
    _check_guard(pic_norm_evals(c, sizes))
    out = np.empty(chan.L, dtype=np.int64)
    residuals = [0.0] * grouping.P
    total = 0
    y_work = y.copy()
    for stage, p in enumerate(order):
        remaining = [i for q in order[stage + 1 :] for i in grouping.groups[q]]
        if remaining:
            q_mat = complement_projection(chan.columns(remaining))
            z = q_mat @ y_work
            r = q_mat @ chan.group_block(p)
        else:
            z = y_work
            r = chan.group_block(p)
        if require_full_rank:
            rest = chan.columns(remaining)
            both = np.concatenate([rest, chan.group_block(p)], axis=1)
            base = numerical_rank(rest) if remaining else 0
            if numerical_rank(both) != base + len(grouping.groups[p]):
                raise RankDeficientError(f"stage {stage} (group {p}) lost column rank after projection")
        idx, k, metric = exhaustive_argmin(z, scale * r, c)
        members = list(grouping.groups[p])
        out[members] = idx
        residuals[p] = metric
        total += k
        y_work = y_work - scale * (chan.group_block(p) @ c.points[idx])
    return DecodeResult(symbol_indices=out, norm_evals=total, per_group_residuals=residuals)


def sic_symbolwise_decode(y, chan: EquivalentChannel, c: Constellation, scale: float) -> DecodeResult:
    """BLAST-style successive cancellation: singleton groups in natural
    order, no ordering optimization; rank loss at any stage is an error."""
    from .codes import singleton_grouping

    singles = EquivalentChannel(matrix=chan.matrix, grouping=singleton_grouping(chan.L))
    return pic_sic_group_decode(y, singles, c, scale, require_full_rank=True)

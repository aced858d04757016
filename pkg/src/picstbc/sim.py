"""Monte Carlo BER engine over i.i.d. Rayleigh block fading.

Per trial: draw bits, encode, Y = sqrt(rho/mu) C H + W, vectorize, decode
with every requested detector on the same (H, W, bits).  Randomness comes
from counter-based Philox substreams keyed by (seed, SNR point, chunk of
trials), so results are bit-identical regardless of execution order or
which decoders run together, and early stopping is evaluated at fixed
chunk boundaries.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import detect
from .codes import CodeSpec, GroupingScheme, dispersion_set, get_code, grouping, singleton_grouping
from .constellation import Constellation, make_qam

CSV_HEADER = "code,decoder,modulation,N,snr_db,trials,bit_errors,ber,norm_evals_total,seed"
DECODER_NAMES = ("ml", "zf", "pic", "pic-sic", "sic")

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    code: str
    n_rx: int
    modulation: str = "4qam"
    decoders: tuple[str, ...] = ("pic",)
    snr_db: tuple[float, ...] = (0.0, 4.0, 8.0, 12.0, 16.0, 20.0)
    min_errors: int = 200
    min_trials: int = 1
    max_trials: int = 1_000_000
    seed: int = 0
    sic_order: tuple[int, ...] | None = None
    chunk_trials: int = 512  # substream granularity; part of the stream definition

    def validate(self) -> None:
        if self.n_rx < 1:
            raise ValueError("need at least one receive antenna")
        if any(d not in DECODER_NAMES for d in self.decoders):
            raise ValueError(f"unknown decoder in {self.decoders}; choose from {DECODER_NAMES}")
        if len(self.decoders) != len(set(self.decoders)):
            raise ValueError("duplicate decoder names")
        if len(self.snr_db) == 0 or any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ValueError("snr grid must be nonempty and strictly increasing")
        if self.min_trials < 1 or self.max_trials < self.min_trials:
            raise ValueError("need 1 <= min_trials <= max_trials")
        if self.min_errors < 1:
            raise ValueError("min_errors must be positive")
        if self.chunk_trials < 1:
            raise ValueError("chunk_trials must be positive")


@dataclass
class BerRecord:
    code: str
    decoder: str
    modulation: str
    n_rx: int
    snr_db: float
    trials: int
    bit_errors: int
    ber: float
    norm_evals_total: int
    seed: int


@dataclass
class RunResult:
    records: list[BerRecord]
    guard_violations: dict[str, str] = field(default_factory=dict)


def parse_modulation(name: str) -> Constellation:
    key = name.strip().lower().replace("-", "")
    if not key.endswith("qam"):
        raise ValueError(f"unknown modulation {name!r}; expected e.g. 4qam/16qam/64qam")
    return make_qam(int(key[:-3]))


def compute_mu(spec: CodeSpec, c: Constellation) -> float:
    """Transmit normalization: mu = E||C(s)||_F^2 / T.

    For a linear code with independent unit-energy zero-mean symbols this is
    exactly sum_l ||A_l||_F^2 / T, no sampling needed.
    """
    if abs(np.mean(np.abs(c.points) ** 2) - 1.0) > 1e-9:
        raise ValueError("constellation is not unit average energy")
    disp = dispersion_set(spec)
    return float(np.sum(np.abs(disp) ** 2) / spec.T)


def rayleigh_channel(M: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """M x N matrix of i.i.d. CN(0,1) gains."""
    return (rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))) * np.sqrt(0.5)


def awgn(T: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """T x N matrix of i.i.d. CN(0,1) noise."""
    return (rng.standard_normal((T, N)) + 1j * rng.standard_normal((T, N))) * np.sqrt(0.5)


def _chunk_rng(seed: int, point_idx: int, chunk_idx: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, ((point_idx << 32) | chunk_idx) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_chunk(cfg: SimConfig, spec: CodeSpec, c: Constellation, point_idx: int, chunk_idx: int):
    """Bits, channels and noise for one chunk; identical for every decoder."""
    rng = _chunk_rng(cfg.seed, point_idx, chunk_idx)
    B = cfg.chunk_trials
    bits = rng.integers(0, 2, size=(B, spec.L * c.bits_per_symbol))
    weights = 1 << np.arange(c.bits_per_symbol - 1, -1, -1)
    sent = (bits.reshape(B, spec.L, c.bits_per_symbol) * weights).sum(axis=2)
    H = (rng.standard_normal((B, spec.M, cfg.n_rx)) + 1j * rng.standard_normal((B, spec.M, cfg.n_rx))) * np.sqrt(0.5)
    W = (rng.standard_normal((B, spec.T, cfg.n_rx)) + 1j * rng.standard_normal((B, spec.T, cfg.n_rx))) * np.sqrt(0.5)
    return sent, H, W


def _equivalent_channels(disp: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Batched TN x L equivalent channels from a (B, M, N) channel stack."""
    prod = np.einsum("ltm,bmn->bltn", disp, H)
    B, L = prod.shape[0], prod.shape[1]
    return np.ascontiguousarray(prod.transpose(0, 3, 2, 1).reshape(B, -1, L))


def _vec_batch(Y: np.ndarray) -> np.ndarray:
    """Column-major vectorization of a (B, T, N) stack."""
    return Y.transpose(0, 2, 1).reshape(Y.shape[0], -1)


def _nearest_batch(est: np.ndarray, c: Constellation) -> np.ndarray:
    return np.argmin(np.abs(est[..., None] - c.points), axis=-1)


def _argmin_candidates_batch(z: np.ndarray, r_scaled: np.ndarray, c: Constellation, length: int) -> np.ndarray:
    """Batched first-argmin of ||z - r_scaled @ points[idx]||^2; (B, length)
    index vectors, candidates in lexicographic order.

    Uses the expanded quadratic s^H (R^H R) s - 2 Re(s^H R^H z), which costs
    O(l^2 K) per trial instead of O(n K)."""
    grid = detect.index_grid(c.order, length)
    S = c.points[grid]
    rh = r_scaled.conj().transpose(0, 2, 1)
    gram = rh @ r_scaled  # (B, l, l)
    w = (rh @ z[:, :, None])[:, :, 0]  # (B, l)
    quad = np.einsum("ik,bik->bk", S.conj(), gram @ S).real
    lin = np.einsum("ik,bi->bk", S.conj(), w).real
    best = np.argmin(quad - 2.0 * lin, axis=1)
    return grid[:, best].T


def _project_out_batch(Gc: np.ndarray, y: np.ndarray, Gp: np.ndarray):
    """Batched residuals of y and Gp after least-squares removal of Gc's
    column span (equals applying the complement projector when Gc has full
    column rank, the almost-sure case for continuous channels)."""
    if Gc.shape[2] == 0:
        return y, Gp
    gch = Gc.conj().transpose(0, 2, 1)
    gram = gch @ Gc
    rhs = np.concatenate([gch @ y[:, :, None], gch @ Gp], axis=2)
    try:
        sol = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        # singular interference block: fall back to the rank-reducing
        # projector, trial by trial
        z = np.empty_like(y)
        r = np.empty_like(Gp)
        from .linalg import complement_projection

        for b in range(Gc.shape[0]):
            q = complement_projection(Gc[b])
            z[b] = q @ y[b]
            r[b] = q @ Gp[b]
        return z, r
    z = y - (Gc @ sol[:, :, :1])[:, :, 0]
    r = Gp - Gc @ sol[:, :, 1:]
    return z, r


def _decode_chunk(
    decoder: str,
    y: np.ndarray,
    heq: np.ndarray,
    g: GroupingScheme,
    c: Constellation,
    scale: float,
    sic_order: tuple[int, ...] | None,
) -> np.ndarray:
    B, n, L = heq.shape
    if decoder == "zf":
        hh = heq.conj().transpose(0, 2, 1)
        est = np.linalg.solve(hh @ heq, hh @ y[:, :, None])[:, :, 0] / scale
        return _nearest_batch(est, c)

    if decoder == "ml":
        half = L - L // 2
        if c.order**half <= 1024:
            return _ml_pair_batch(y, heq, c, scale, half)
        out = np.empty((B, L), dtype=np.int64)
        for b in range(B):
            idx, _, _ = detect.exhaustive_argmin(y[b], scale * heq[b], c)
            out[b] = idx
        return out

    if decoder == "pic":
        out = np.empty((B, L), dtype=np.int64)
        for p, members in enumerate(g.groups):
            others = [i for q, grp in enumerate(g.groups) if q != p for i in grp]
            z, r = _project_out_batch(heq[:, :, others], y, heq[:, :, list(members)])
            out[:, list(members)] = _argmin_candidates_batch(z, scale * r, c, len(members))
        return out

    # pic-sic and symbol-wise sic share the staged loop
    if decoder == "sic":
        g = singleton_grouping(L)
        order = tuple(range(L))
    else:
        order = sic_order if sic_order is not None else tuple(range(g.P))
    out = np.empty((B, L), dtype=np.int64)
    y_work = y.copy()
    for stage, p in enumerate(order):
        members = list(g.groups[p])
        remaining = [i for q in order[stage + 1 :] for i in g.groups[q]]
        z, r = _project_out_batch(heq[:, :, remaining], y_work, heq[:, :, members])
        idx = _argmin_candidates_batch(z, scale * r, c, len(members))
        out[:, members] = idx
        y_work = y_work - scale * np.einsum("bnl,bl->bn", heq[:, :, members], c.points[idx])
    return out


def _ml_pair_batch(y: np.ndarray, heq: np.ndarray, c: Constellation, scale: float, half: int) -> np.ndarray:
    B, n, L = heq.shape
    g1 = detect.index_grid(c.order, half)
    g2 = detect.index_grid(c.order, L - half)
    s1, s2 = c.points[g1], c.points[g2]
    k1, k2 = s1.shape[1], s2.shape[1]
    out = np.empty((B, L), dtype=np.int64)
    sub = max(1, (8 << 20) // (k1 * k2))
    s1h = s1.conj().T
    for start in range(0, B, sub):
        sl = slice(start, min(start + sub, B))
        h1 = scale * heq[sl, :, :half]
        h2 = scale * heq[sl, :, half:]
        h1h = h1.conj().transpose(0, 2, 1)
        h2h = h2.conj().transpose(0, 2, 1)
        w1 = (h1h @ y[sl, :, None])[:, :, 0]
        w2 = (h2h @ y[sl, :, None])[:, :, 0]
        t1 = np.einsum("ik,bik->bk", s1.conj(), (h1h @ h1) @ s1).real - 2.0 * np.einsum("ik,bi->bk", s1.conj(), w1).real
        t2 = np.einsum("ik,bik->bk", s2.conj(), (h2h @ h2) @ s2).real - 2.0 * np.einsum("ik,bi->bk", s2.conj(), w2).real
        cross = s1h @ ((h1h @ h2) @ s2)  # (B, k1, k2) through two thin GEMMs
        metric = t1[:, :, None] + t2[:, None, :] + 2.0 * cross.real
        flat = np.argmin(metric.reshape(metric.shape[0], -1), axis=1)
        out[sl, :half] = g1[:, flat // k2].T
        out[sl, half:] = g2[:, flat % k2].T
    return out


def _per_decode_evals(decoder: str, c: Constellation, g: GroupingScheme) -> int:
    if decoder == "ml":
        return detect.ml_norm_evals(c, g.L)
    if decoder in ("zf", "sic"):
        return detect.zf_norm_evals(c, g.L)
    return detect.pic_norm_evals(c, [len(x) for x in g.groups])


def run_ber(cfg: SimConfig) -> RunResult:
    """Run the sweep; one BerRecord per (decoder, SNR point).

    Per point and decoder, chunks of cfg.chunk_trials trials accumulate
    until (>= min_errors and >= min_trials) or max_trials.  Decoders whose
    exhaustive search would exceed the norm-evaluation guard are skipped and
    reported in guard_violations; the rest run.
    """
    cfg.validate()
    spec = get_code(cfg.code)
    c = parse_modulation(cfg.modulation)
    g = grouping(spec)
    if cfg.sic_order is not None and sorted(cfg.sic_order) != list(range(spec.P)):
        raise ValueError(f"sic order {cfg.sic_order} is not a permutation of 0..{spec.P - 1}")
    disp = dispersion_set(spec)
    mu = compute_mu(spec, c)

    violations: dict[str, str] = {}
    active: list[str] = []
    for d in cfg.decoders:
        evals = _per_decode_evals(d, c, g)
        if evals > detect.NORM_EVAL_GUARD:
            violations[d] = f"{evals} norm evaluations per decode exceed guard {detect.NORM_EVAL_GUARD}"
        else:
            active.append(d)

    records: list[BerRecord] = []
    bits_per_trial = spec.L * c.bits_per_symbol
    for point_idx, snr in enumerate(cfg.snr_db):
        rho = 10.0 ** (snr / 10.0)
        scale = float(np.sqrt(rho / mu))
        for d in active:
            errors = 0
            trials = 0
            chunk_idx = 0
            while True:
                sent, H, W = _draw_chunk(cfg, spec, c, point_idx, chunk_idx)
                cw = np.einsum("ltm,bl->btm", disp, c.points[sent])
                Y = scale * cw @ H + W
                y = _vec_batch(Y)
                heq = _equivalent_channels(disp, H)
                decided = _decode_chunk(d, y, heq, g, c, scale, cfg.sic_order)
                errors += int(c._bit_diff[sent, decided].sum())
                trials += cfg.chunk_trials
                chunk_idx += 1
                if (errors >= cfg.min_errors and trials >= cfg.min_trials) or trials >= cfg.max_trials:
                    break
            per_decode = _per_decode_evals(d, c, g)
            records.append(
                BerRecord(
                    code=spec.name,
                    decoder=d,
                    modulation=c.name.lower(),
                    n_rx=cfg.n_rx,
                    snr_db=float(snr),
                    trials=trials,
                    bit_errors=errors,
                    ber=errors / (trials * bits_per_trial),
                    norm_evals_total=per_decode * trials,
                    seed=cfg.seed,
                )
            )
    records.sort(key=lambda r: (r.code, r.decoder, r.snr_db))
    return RunResult(records=records, guard_violations=violations)


def estimate_diversity_slope(records: list[BerRecord], tail: int | None = None) -> float:
    """Least-squares slope of log10(BER) against log10(SNR) = snr_db/10 over
    the points with nonzero BER (the `tail` highest-SNR ones when given);
    returns the negated slope, the diversity-order estimate."""
    pts = sorted(((r.snr_db, r.ber) for r in records if r.ber > 0), key=lambda t: t[0])
    if tail is not None:
        pts = pts[-tail:]
    if len(pts) < 2:
        raise ValueError("need at least two SNR points with nonzero BER")
    x = np.array([p[0] / 10.0 for p in pts])
    y = np.log10([p[1] for p in pts])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def format_record(r: BerRecord) -> str:
    return (
        f"{r.code},{r.decoder},{r.modulation},{r.n_rx},{r.snr_db:g},"
        f"{r.trials},{r.bit_errors},{r.ber:.12g},{r.norm_evals_total},{r.seed}"
    )


def write_csv(records: list[BerRecord], out: io.TextIOBase) -> None:
    out.write(CSV_HEADER + "\n")
    for r in records:
        out.write(format_record(r) + "\n")

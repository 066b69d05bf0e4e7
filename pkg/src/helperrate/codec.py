"""Finite-blocklength Monte Carlo demonstrations of the coding ingredients.

Two primitives and their composition:

* channel synthesis - a rate-limited codebook of i.i.d. codewords plus a
  likelihood encoder approximates a memoryless channel's output statistics;
* random binning    - source sequences are hashed into bins and decoded by
  maximum conditional probability within the announced bin, against side
  information;
* helper pipeline   - the decoder first synthesises the helper's local
  channel output from the helper's codeword index, then runs binning
  decoding against the synthesised side information.

Randomness is counter-based: the codebook, the bin assignment and each trial
draw from generators seeded by (seed, purpose, index), so results are
bit-reproducible and independent of scheduling.  The synthesis stage here
shares no randomness between helper and decoder beyond the fixed codebook;
finite-n resource accounting for common randomness is out of scope and the
estimates are reported per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import BadDims, CapExceeded, InsufficientTrials
from .entropy import as_distribution, check_joint
from .regions import TestChannel
from .sources import ClassicalJoint


def _codeword_count(n: int, rate: float) -> int:
    """2^ceil(n * rate), robust to float noise in the product."""
    return 2 ** max(0, math.ceil(n * rate - 1e-9))


def _channel_matrix(channel) -> np.ndarray:
    if isinstance(channel, TestChannel):
        return channel.p_u_given_y
    return TestChannel(np.asarray(channel, dtype=float)).p_u_given_y


@dataclass(frozen=True)
class SynthesisCodebook:
    """I.i.d. codebook for channel-output synthesis."""

    n: int
    rate: float
    codewords: np.ndarray  # (count, n) symbol indices
    seed: int
    num_u: int

    @property
    def count(self) -> int:
        return self.codewords.shape[0]


def build_synthesis_codebook(p_u, n: int, rate: float, seed: int) -> SynthesisCodebook:
    """Draw 2^ceil(n*rate) codewords i.i.d. from the marginal ``p_u``."""
    probs = as_distribution(p_u)
    if n < 1:
        raise BadDims(f"blocklength must be >= 1, got {n}")
    count = _codeword_count(n, rate)
    if count * n > TOL.enum_cap:
        raise CapExceeded(f"codebook of {count} x {n} exceeds cap {TOL.enum_cap}")
    rng = np.random.default_rng([seed, 0])
    words = rng.choice(probs.size, size=(count, n), p=probs)
    return SynthesisCodebook(n, float(rate), words, seed, probs.size)


def _enumerate_sequences(alphabet: int, n: int) -> np.ndarray:
    seqs = np.indices((alphabet,) * n).reshape(n, -1).T
    return np.ascontiguousarray(seqs)


def _log_safe(a: np.ndarray) -> np.ndarray:
    out = np.full(a.shape, -1e30)
    np.log(a, out=out, where=a > 0)
    return out


def _encoder_weights(log_lik: np.ndarray) -> np.ndarray:
    """Normalised likelihood-encoder probabilities; uniform if all vanish."""
    top = log_lik.max()
    if top <= -1e29:
        return np.full(log_lik.shape, 1.0 / log_lik.size)
    w = np.exp(log_lik - top)
    return w / w.sum()


def synthesize_channel(p_y, channel, n: int, rate: float, seed: int,
                       mode: str = "exact", trials: int = 0) -> float:
    """Total variation of codebook-synthesised channel output statistics.

    The helper observes ``y^n`` and announces a codeword index drawn with
    probability proportional to the codeword's channel likelihood for
    ``y^n``; the decoder outputs that codeword.  Returns the total variation
    between the synthesised (y^n, u^n) law and the i.i.d. target: exact in
    ``exact`` mode, an empirical plug-in estimate over ``trials`` samples in
    ``montecarlo`` mode.
    """
    probs_y = as_distribution(p_y)
    w = _channel_matrix(channel)
    if w.shape[1] != probs_y.size:
        raise BadDims(f"channel expects {w.shape[1]} inputs, marginal has {probs_y.size}")
    num_u, num_y = w.shape
    p_u = w @ probs_y
    book = build_synthesis_codebook(p_u, n, rate, seed)

    # P(y|u) for the likelihood encoder
    joint_uy = w * probs_y[None, :]
    cond_yu = np.divide(joint_uy, p_u[:, None], out=np.zeros_like(joint_uy), where=p_u[:, None] > 0)
    log_cond_yu = _log_safe(cond_yu)
    log_w = _log_safe(w)

    uniq, inverse = np.unique(book.codewords, axis=0, return_inverse=True)

    if mode == "exact":
        if float(num_y) ** n * float(num_u) ** n > TOL.synthesis_exact_cap:
            raise CapExceeded(
                f"|Y|^n * |U|^n = {float(num_y)**n * float(num_u)**n:.3g} exceeds "
                f"cap {TOL.synthesis_exact_cap}")
        ys = _enumerate_sequences(num_y, n)
        log_py = _log_safe(probs_y)
        tv = 0.0
        for y_seq in ys:
            p_yn = math.exp(float(log_py[y_seq].sum())) if np.all(probs_y[y_seq] > 0) else 0.0
            if p_yn == 0.0:
                continue
            log_lik = log_cond_yu[book.codewords, y_seq[None, :]].sum(axis=1)
            enc = _encoder_weights(log_lik)
            q_u = np.bincount(inverse, weights=enc, minlength=uniq.shape[0])
            t_log = log_w[uniq, y_seq[None, :]].sum(axis=1)
            t_u = np.exp(np.clip(t_log, -700, 50))
            t_u[t_log <= -1e29] = 0.0
            tv += p_yn * (np.abs(q_u - t_u).sum() + max(1.0 - t_u.sum(), 0.0))
        return 0.5 * tv

    if mode != "montecarlo":
        raise BadDims(f"mode must be 'exact' or 'montecarlo', got {mode!r}")
    if trials < 1000:
        raise InsufficientTrials(f"montecarlo mode needs trials >= 1000, got {trials}")

    counts: dict[tuple[bytes, bytes], int] = {}
    targets: dict[tuple[bytes, bytes], float] = {}
    for t in range(trials):
        rng = np.random.default_rng([seed, 2, t])
        y_seq = rng.choice(num_y, size=n, p=probs_y)
        log_lik = log_cond_yu[book.codewords, y_seq[None, :]].sum(axis=1)
        m = rng.choice(book.count, p=_encoder_weights(log_lik))
        u_seq = book.codewords[m]
        key = (y_seq.tobytes(), u_seq.tobytes())
        counts[key] = counts.get(key, 0) + 1
        if key not in targets:
            joint_log = float(_log_safe(probs_y)[y_seq].sum() + log_w[u_seq, y_seq].sum())
            targets[key] = math.exp(joint_log) if joint_log > -1e29 else 0.0
    observed_target = sum(targets.values())
    tv = sum(abs(c / trials - targets[k]) for k, c in counts.items())
    return 0.5 * (tv + max(1.0 - observed_target, 0.0))


@dataclass(frozen=True)
class BinningCode:
    """Random (or injective) bin assignment for all source sequences."""

    n: int
    rate: float
    num_bins: int
    bins: np.ndarray  # bin index per sequence, length |X|^n
    seed: int
    injective: bool


def build_binning_code(num_symbols: int, n: int, rate: float, seed: int,
                       injective: bool = False) -> BinningCode:
    if num_symbols < 1 or n < 1:
        raise BadDims(f"num_symbols={num_symbols}, n={n} must be >= 1")
    total = num_symbols ** n
    if total > TOL.binning_cap:
        raise CapExceeded(f"|X|^n = {total} exceeds cap {TOL.binning_cap}")
    num_bins = _codeword_count(n, rate)
    if injective:
        if num_bins < total:
            raise BadDims(f"injective binning needs 2^ceil(nR) >= |X|^n ({num_bins} < {total})")
        bins = np.arange(total, dtype=np.int64)
    else:
        rng = np.random.default_rng([seed, 1])
        bins = rng.integers(0, num_bins, size=total, dtype=np.int64)
    return BinningCode(n, float(rate), num_bins, bins, seed, injective)


class _BinDecoder:
    """MAP-within-bin decoding against side information (ties: lexicographic)."""

    def __init__(self, code: BinningCode, p_xu: np.ndarray, num_symbols: int):
        self.code = code
        self.num_symbols = num_symbols
        order = np.argsort(code.bins, kind="stable")
        self.order = order
        sorted_bins = code.bins[order]
        self.starts = np.searchsorted(sorted_bins, np.arange(code.num_bins), side="left")
        self.ends = np.searchsorted(sorted_bins, np.arange(code.num_bins), side="right")
        p_u = p_xu.sum(axis=0)
        cond_xu = np.divide(p_xu, p_u[None, :], out=np.zeros_like(p_xu), where=p_u[None, :] > 0)
        self.log_cond = _log_safe(cond_xu)
        self.powers = num_symbols ** np.arange(code.n - 1, -1, -1, dtype=np.int64)

    def sequence_index(self, symbols: np.ndarray) -> int:
        return int(symbols @ self.powers)

    def decode(self, bin_index: int, u_seq: np.ndarray) -> int:
        members = self.order[self.starts[bin_index]:self.ends[bin_index]]
        if members.size == 0:
            return 0
        digits = (members[:, None] // self.powers[None, :]) % self.num_symbols
        scores = self.log_cond[digits, u_seq[None, :]].sum(axis=1)
        return int(members[int(np.argmax(scores))])


def sw_random_binning(p_xu, n: int, r1: float, trials: int, seed: int,
                      injective: bool = False) -> float:
    """Empirical error rate of random binning decoded with side information.

    Samples (x^n, u^n) i.i.d. from the joint, announces the bin of ``x^n``,
    and decodes by maximum product conditional probability within the bin.
    """
    joint = p_xu.p_xy if isinstance(p_xu, ClassicalJoint) else check_joint(p_xu)
    if trials < 1:
        raise BadDims(f"trials must be >= 1, got {trials}")
    num_x, num_u = joint.shape
    code = build_binning_code(num_x, n, r1, seed, injective)
    decoder = _BinDecoder(code, joint, num_x)
    flat = joint.ravel() / joint.sum()
    errors = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, 2, t])
        pairs = rng.choice(num_x * num_u, size=n, p=flat)
        x_seq = pairs // num_u
        u_seq = pairs % num_u
        x_index = decoder.sequence_index(x_seq)
        x_hat = decoder.decode(int(code.bins[x_index]), u_seq)
        if x_hat != x_index:
            errors += 1
    return errors / trials


def helper_pipeline(joint, channel, n: int, r1: float, r2_rate: float,
                    trials: int, seed: int) -> float:
    """End-to-end error of synthesis-assisted binning.

    The helper likelihood-encodes ``y^n`` into a codeword index at rate
    ``r2_rate``; the decoder reconstructs the codeword as side information
    and decodes the announced bin of ``x^n`` at rate ``r1``.
    """
    src = joint if isinstance(joint, ClassicalJoint) else ClassicalJoint(np.asarray(joint, float))
    if trials < 1:
        raise BadDims(f"trials must be >= 1, got {trials}")
    w = _channel_matrix(channel)
    if w.shape[1] != src.num_y:
        raise BadDims(f"channel expects {w.shape[1]} inputs, joint has {src.num_y}")
    num_u = w.shape[0]
    p_u = w @ src.p_y
    book = build_synthesis_codebook(p_u, n, r2_rate, seed)

    joint_uy = w * src.p_y[None, :]
    cond_yu = np.divide(joint_uy, p_u[:, None], out=np.zeros_like(joint_uy), where=p_u[:, None] > 0)
    log_cond_yu = _log_safe(cond_yu)

    p_xu = src.p_xy @ w.T
    code = build_binning_code(src.num_x, n, r1, seed)
    decoder = _BinDecoder(code, p_xu, src.num_x)

    flat = src.p_xy.ravel() / src.p_xy.sum()
    errors = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, 2, t])
        pairs = rng.choice(src.num_x * src.num_y, size=n, p=flat)
        x_seq = pairs // src.num_y
        y_seq = pairs % src.num_y
        log_lik = log_cond_yu[book.codewords, y_seq[None, :]].sum(axis=1)
        m = rng.choice(book.count, p=_encoder_weights(log_lik))
        u_seq = book.codewords[m]
        x_index = decoder.sequence_index(x_seq)
        x_hat = decoder.decode(int(code.bins[x_index]), u_seq)
        if x_hat != x_index:
            errors += 1
    return errors / trials

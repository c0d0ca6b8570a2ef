"""Random cost tensors with i.i.d. Exp(1) entries and memoryless refresh.

A tensor keeps two flat arrays: ``pristine`` (the original draw, never
mutated) and ``values`` (the working copy that refreshes rewrite).  Every
refresh with threshold w resamples entries whose current value is <= w and
shifts the rest down by w; the shift is accumulated in a ledger so that

    pristine[v] <= values[v] + ledger.W

holds for every cell at all times.  Solvers that select cells under
refreshed values can therefore bound the genuine objective from the
selection-time values plus the ledger offset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1

# hard cap on addressable entries, see generate()
MAX_ENTRIES = 2**31


@dataclass
class RefreshLedger:
    """Cumulative refresh bookkeeping: W is the sum of all thresholds used."""

    W: float = 0.0
    epoch: int = 0
    revealed_threshold_history: list = field(default_factory=list)


class CostTensor:
    """n^d array of nonnegative costs, regenerable bit-exactly from its seed."""

    def __init__(self, n: int, d: int, seed: int, values: np.ndarray,
                 pristine: np.ndarray, ledger: RefreshLedger):
        self.n = n
        self.d = d
        self.seed = seed
        self.values = values
        self.pristine = pristine
        self.ledger = ledger

    @property
    def shape(self):
        return (self.n,) * self.d

    def cube(self) -> np.ndarray:
        """The working values as an (n, ..., n) view (no copy)."""
        return self.values.reshape(self.shape)

    def pristine_cube(self) -> np.ndarray:
        return self.pristine.reshape(self.shape)

    def __repr__(self):
        return (f"CostTensor(n={self.n}, d={self.d}, seed={self.seed}, "
                f"epoch={self.ledger.epoch}, W={self.ledger.W:.6g})")


def _stream(seed: int, epoch: int) -> np.random.Generator:
    # Counter-based generator keyed on (seed, epoch): entry v's draw in
    # epoch e is the v-th double of stream (seed, e), independent of which
    # entries any particular refresh actually touches.
    key = np.array([seed & _MASK64, epoch & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def exp_stream(seed: int, epoch: int, count: int) -> np.ndarray:
    """`count` Exp(1) draws from stream (seed, epoch) via inverse transform."""
    u = _stream(seed, epoch).random(count)
    return -np.log1p(-u)


def generate(n: int, d: int, seed: int) -> CostTensor:
    """Draw a fresh n^d tensor of i.i.d. Exp(1) costs, deterministic in seed.

    Entries use the inverse transform x = -ln(1-u) with u uniform on [0,1),
    so u = 0 maps to cost 0 and u = 1 never occurs.
    """
    if n < 1:
        raise ValueError(f"side length must be positive, got n={n}")
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got d={d}")
    if n**d > MAX_ENTRIES:
        raise ValueError(f"instance too large: n^d = {n}^{d} exceeds {MAX_ENTRIES} entries")
    pristine = exp_stream(seed, 0, n**d)
    return CostTensor(n, d, seed, pristine.copy(), pristine, RefreshLedger())


def refresh(t: CostTensor, w_prev: float) -> None:
    """Re-randomize in place: resample entries <= w_prev, shift the rest down.

    After the call the working values are again i.i.d. Exp(1) in
    distribution, and the ledger absorbs w_prev so the per-cell inequality
    pristine <= values + W keeps holding.
    """
    if w_prev < 0:
        raise ValueError(f"refresh threshold must be nonnegative, got {w_prev}")
    revealed = t.values <= w_prev
    if revealed.any():
        fresh = exp_stream(t.seed, t.ledger.epoch + 1, t.values.size)
        t.values = np.where(revealed, fresh, t.values - w_prev)
    else:
        t.values -= w_prev
    t.ledger.W += w_prev
    t.ledger.epoch += 1
    t.ledger.revealed_threshold_history.append(w_prev)


def true_cost(t: CostTensor, triples) -> float:
    """Sum of pristine costs over the given index tuples (the real objective)."""
    triples = list(triples)
    if not triples:
        return 0.0
    idx = np.asarray(triples, dtype=np.int64)
    if idx.ndim != 2 or idx.shape[1] != t.d:
        raise ValueError(f"expected {t.d}-tuples, got shape {idx.shape}")
    if (idx < 0).any() or (idx >= t.n).any():
        raise ValueError("index tuple out of bounds")
    flat = np.ravel_multi_index(tuple(idx.T), t.shape)
    return float(t.pristine[flat].sum())

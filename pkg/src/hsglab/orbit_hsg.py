"""Hitting sets from a low-degree polynomial walked along matrix-power
orbits, and the curve-based learning reconstruction.

Generator side: from a polynomial P: F_p^m -> F_p (a truth table) and a
generator matrix A, build for each stride j < m the p-ary map

    x -> (P(A^(p^j * 1) x), P(A^(p^j * 2) x), ..., P(A^(p^j * M) x)),

then fold each output element against a binary seed r by inner products.
The hitting set enumerates all strides, seeds x and masks r, so it has
exactly m * p^(m+1) entries of M bits.

Reconstruction side: any D that avoids the set yields a next-element
predictor per stride (bit prediction with random fill, then Hadamard
decoding).  Evaluation tables of P along curves are then learned in an
interleaved walk over two planted curves whose matrix shifts share enough
reference points, giving a circuit for i -> P(A^i v) with v = C1(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from . import gfnum
from .algebra import Curve, MatrixFp, TruthTable, UniPoly, curve_apply_matrix, interpolate_vals
from .decoding import hadamard_list_decode, minimal_agreement, sudan_list_decode
from .field import FieldParams


class ReconFailure(Exception):
    """A learning step failed; the reconstruction cannot proceed."""


class CurveSamplingError(Exception):
    """No good curve pair found within the retry budget."""


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass
class SuParams:
    """Parameters of one generator/reconstruction instance.

    The defaults follow the general recipe (r and rho are only fixed up to
    constants by the construction); toy runs override them, which flips
    `paper_regime` off and turns guarantees into measured statistics.
    """

    params: FieldParams
    m: int
    m_bits: int            # output length M
    delta: int             # total-degree bound of P
    r: int | None = None
    rho_inv: int | None = None
    predictor_reps: int | None = None
    predictor_gamma: float | None = None
    curve_retries: int = 64
    list_len: int | None = None  # predictor list length, default rho_inv^2

    def __post_init__(self):
        logp = max(1, self.params.k)
        if self.r is None:
            self.r = 2 * self.m * logp
        if self.rho_inv is None:
            self.rho_inv = 8 * self.m_bits ** 2 * self.m * logp
        if self.predictor_reps is None:
            self.predictor_reps = 4 * self.m * logp
        if self.predictor_gamma is None:
            self.predictor_gamma = 1.0 / (2 * self.m_bits ** 2)
        if self.list_len is None:
            self.list_len = self.rho_inv ** 2

    @property
    def p(self) -> int:
        return self.params.order

    @property
    def v(self) -> int:
        """Curve degree: one less than the interpolation freedom needed for
        m + 1 reference-point constraints of size r."""
        return (self.m + 1) * self.r - 1

    @property
    def paper_regime(self) -> bool:
        return self.p > self.delta ** 2 * self.m ** 7 * self.m_bits ** 9

    @property
    def eps_lnc(self) -> float:
        """Diagnostic failure-probability estimate for one learning step
        with random curves (constants taken as 1)."""
        rho = 1.0 / self.rho_inv
        t1 = (self.v / (rho * self.p)) ** (self.v / 2)
        t2 = 8 * self.rho_inv ** 3 * (self.v * self.delta / self.p) ** self.r
        return float(t1 + t2)

    def describe(self) -> dict:
        return {
            "p": self.p, "m": self.m, "M": self.m_bits, "delta": self.delta,
            "r": self.r, "v": self.v, "rho_inv": self.rho_inv,
            "list_len": self.list_len, "paper_regime": self.paper_regime,
            "eps_lnc": self.eps_lnc,
        }


# ---------------------------------------------------------------------------
# hitting sets
# ---------------------------------------------------------------------------

class HittingSet:
    """A lazily indexable, exactly counted family of M-bit strings."""

    def __init__(self, count: int, m_bits: int, fn: Callable[[int], int], label: str = ""):
        self.count = count
        self.m_bits = m_bits
        self._fn = fn
        self.label = label

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.count:
            raise IndexError(i)
        return self._fn(i)

    def __iter__(self):
        return (self._fn(i) for i in range(self.count))

    def materialize(self, cap: int = 1 << 22) -> np.ndarray:
        if self.count > cap:
            raise ValueError(f"{self.count} entries exceed the materialization cap {cap}")
        return np.fromiter((self._fn(i) for i in range(self.count)),
                           dtype=np.int64, count=self.count)

    def to_set(self, cap: int = 1 << 22) -> set[int]:
        return set(self.materialize(cap).tolist())

    def stream_hex(self, fh) -> None:
        width = (self.m_bits + 3) // 4
        for v in self:
            fh.write(format(v, f"0{width}x") + "\n")


def p_ary_prg(table: TruthTable, a_mat: MatrixFp, j: int, x_vals: Sequence[int],
              m_bits: int) -> list[int]:
    """The stride-j p-ary output (P(A^(p^j k) x))_{k=1..M} as values."""
    if not 0 <= j < table.m:
        raise ValueError("stride out of range")
    step = a_mat.pow(table.p ** j)
    w = np.asarray(x_vals, dtype=np.int64)
    out = []
    for _ in range(m_bits):
        w = step.vec(w)
        out.append(table.eval_vals(tuple(int(c) for c in w)))
    return out


def hsu_generate(table: TruthTable, a_mat: MatrixFp, su: SuParams) -> HittingSet:
    """The full orbit hitting set; index order is (stride, seed, mask) with
    the mask innermost."""
    p = su.p
    m = su.m
    pm = p ** m
    count = m * pm * p
    params = su.params
    steps = [a_mat.pow(p ** j) for j in range(m)]
    cache: dict[tuple[int, int], list[int]] = {}

    def seed_vec(x_idx: int) -> np.ndarray:
        mask = p - 1
        return np.array([(x_idx >> (jj * params.k)) & mask for jj in range(m)],
                        dtype=np.int64)

    def orbit_vals(j: int, x_idx: int) -> list[int]:
        key = (j, x_idx)
        if key not in cache:
            w = seed_vec(x_idx)
            vals = []
            for _ in range(su.m_bits):
                w = steps[j].vec(w)
                vals.append(table.eval_vals(tuple(int(c) for c in w)))
            if len(cache) < (1 << 18):
                cache[key] = vals
            else:
                return vals
        return cache[key]

    def entry(i: int) -> int:
        j, rest = divmod(i, pm * p)
        x_idx, r = divmod(rest, p)
        vals = orbit_vals(j, x_idx)
        out = 0
        for k, v in enumerate(vals):
            out |= ((v & r).bit_count() & 1) << k
        return out

    return HittingSet(count, su.m_bits, entry, label="orbit")


# ---------------------------------------------------------------------------
# predictors
# ---------------------------------------------------------------------------

class PerfectPredictor:
    """Test fixture: the candidate list is exactly [P(x)] for the true point,
    which learning steps pass in alongside the chain values."""

    def __init__(self, oracle: Callable[[tuple[int, ...]], int]):
        self.oracle = oracle

    def candidates(self, u_values: tuple[int, ...], point: tuple[int, ...] | None) -> list[int]:
        if point is None:
            raise ValueError("perfect predictor needs the query point")
        return [int(self.oracle(tuple(int(c) for c in point)))]


class HybridPredictor:
    """Next-element predictor built from a distinguisher.

    Internal randomness (positions, fill bits, tie-break coins) is drawn
    once at construction, so calls are deterministic.  Each repetition
    predicts the string bit at a sampled position from the chain-derived
    prefix, with fresh random bits above; the per-mask predictions are then
    decoded as a noisy Hadamard codeword in both orientations and candidate
    field elements are tallied across repetitions.  The output list always
    has exactly `list_len` entries (zero-padded).
    """

    def __init__(self, d_oracle, j: int, su: SuParams, rng: np.random.Generator):
        self.d = d_oracle
        self.j = j
        self.su = su
        m_bits = su.m_bits
        p = su.p
        reps = su.predictor_reps
        self.positions = [int(v) for v in rng.integers(1, m_bits + 1, size=reps)]
        self.fills = rng.integers(0, 1 << m_bits, size=(reps, p)).astype(np.int64)
        self.coins = rng.integers(0, 2, size=(reps, p)).astype(np.uint8)

    def candidates(self, u_values: tuple[int, ...], point=None) -> list[int]:
        su = self.su
        p = su.p
        m_bits = su.m_bits
        logp = su.params.k
        rs = np.arange(p, dtype=np.uint64)
        tally: dict[int, int] = {}
        for rep, i in enumerate(self.positions):
            # prefix bits k < i: <u_(i-k), r>; u_values = (u_(M-1), ..., u_1)
            prefix = np.zeros(p, dtype=np.int64)
            for k in range(1, i):
                u = np.uint64(u_values[m_bits - 1 - (i - k)])
                bit = (np.bitwise_count(u & rs) & np.uint64(1)).astype(np.int64)
                prefix |= bit << (k - 1)
            fill_mask = ((1 << m_bits) - 1) ^ ((1 << i) - 1)
            fill = self.fills[rep] & fill_mask
            s0 = prefix | fill
            s1 = s0 | (1 << (i - 1))
            d0 = self._query(s0)
            d1 = self._query(s1)
            h = np.where(d0 == d1, self.coins[rep], np.where(d0 == 0, 0, 1)).astype(np.uint8)
            for hv in (h, 1 - h):
                for z in hadamard_list_decode(hv, su.predictor_gamma, logp):
                    tally[z] = tally.get(z, 0) + 1
        ranked = sorted(tally.items(), key=lambda kv: (-kv[1], kv[0]))
        out = [z for z, _ in ranked[: su.list_len]]
        while len(out) < su.list_len:
            out.append(0)
        return out

    def _query(self, arr: np.ndarray) -> np.ndarray:
        batch = getattr(self.d, "batch", None)
        if batch is not None:
            return np.asarray(batch(arr), dtype=np.int64)
        return np.array([int(self.d(int(v))) for v in arr], dtype=np.int64)


def next_element_predictor(d_oracle, j: int, su: SuParams,
                           rng: np.random.Generator) -> HybridPredictor:
    """Fixed-randomness predictor for stride j backed by the distinguisher."""
    return HybridPredictor(d_oracle, j, su, rng)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

@dataclass
class CurvePair:
    """Two curves whose matrix shifts share reference points.

    By linearity the intersection parameter sets [A^(i+p^j) C1 cap A^i C2]
    do not depend on i, so goodness reduces to the m+1 planted sets; the
    audited accessors still compute the general definition honestly.
    """

    c1: Curve
    c2: Curve
    a_mat: MatrixFp
    su: SuParams
    _cache: dict = dc_field(default_factory=dict)

    def intersection(self, i: int, j: int) -> list[int]:
        """[A^(i+p^j) C1 cap A^i C2] as parameter values t."""
        key = ("shift", i, j)
        if key not in self._cache:
            lhs = curve_apply_matrix(self.a_mat.pow(i + self.su.p ** j), self.c1).eval_table()
            rhs = curve_apply_matrix(self.a_mat.pow(i), self.c2).eval_table()
            self._cache[key] = [t for t in range(self.su.p)
                                if bool(np.all(lhs[t] == rhs[t]))]
        return self._cache[key]

    def intersection_same(self, i: int) -> list[int]:
        """[A^i C1 cap A^i C2]."""
        key = ("same", i)
        if key not in self._cache:
            lhs = curve_apply_matrix(self.a_mat.pow(i), self.c1).eval_table()
            rhs = curve_apply_matrix(self.a_mat.pow(i), self.c2).eval_table()
            self._cache[key] = [t for t in range(self.su.p)
                                if bool(np.all(lhs[t] == rhs[t]))]
        return self._cache[key]

    def c1_at_one(self) -> np.ndarray:
        return np.array(self.c1.eval_val(1), dtype=np.int64)

    def audit(self, rng: np.random.Generator, samples: int = 8) -> bool:
        """Checkable goodness: C1(1) != 0 and sampled intersection sizes."""
        if not np.any(self.c1_at_one()):
            return False
        pm = self.su.p ** self.su.m
        for _ in range(samples):
            i = int(rng.integers(1, pm))
            j = int(rng.integers(0, self.su.m))
            if len(self.intersection(i, j)) < self.su.r:
                return False
            if len(self.intersection_same(i)) < self.su.r:
                return False
        return True


def sample_good_curves(a_mat: MatrixFp, su: SuParams, rng: np.random.Generator) -> CurvePair:
    """Sample C1 at random and interpolate C2 through reference constraints:
    r parameters where C2 = C1 and, per stride j, r parameters where
    C2 = A^(p^j) C1.  Retries until the checkable conditions hold."""
    p, m, r, v = su.p, su.m, su.r, su.v
    if (m + 1) * r > p:
        raise CurveSamplingError(
            f"need (m+1)*r = {(m + 1) * r} distinct parameters but p = {p}")
    params = su.params
    for _ in range(su.curve_retries):
        comps = [UniPoly(rng.integers(0, p, size=v + 1), params) for _ in range(m)]
        c1 = Curve(comps)
        if not any(c1.eval_val(1)):
            continue
        ts = rng.permutation(p)[: (m + 1) * r]
        groups = [sorted(int(t) for t in ts[g * r:(g + 1) * r]) for g in range(m + 1)]
        xs, targets = [], []
        for t in groups[0]:
            xs.append(t)
            targets.append(np.array(c1.eval_val(t), dtype=np.int64))
        for j in range(m):
            shift = a_mat.pow(p ** j)
            for t in groups[j + 1]:
                xs.append(t)
                targets.append(shift.vec(np.array(c1.eval_val(t), dtype=np.int64)))
        tmat = np.stack(targets, axis=0)
        c2 = Curve([interpolate_vals(params, xs, tmat[:, comp].tolist())
                    for comp in range(m)])
        pair = CurvePair(c1, c2, a_mat, su)
        if not np.any(pair.c1_at_one()):
            continue
        if len(pair.intersection_same(0)) < r:
            continue
        if any(len(pair.intersection(0, j)) < r for j in range(m)):
            continue
        return pair
    raise CurveSamplingError(f"no good curve pair within {su.curve_retries} retries")


# ---------------------------------------------------------------------------
# learning
# ---------------------------------------------------------------------------

EvalTable = np.ndarray  # length-p value vector, index t -> P(C(t))


def learn_next_curve(next_curve: Curve, ref_values: dict[int, int], stride: int,
                     input_tables: Sequence[EvalTable], predictor, su: SuParams) -> EvalTable | None:
    """One learning step: candidate values per parameter from the predictor,
    list decoding across the whole curve, then the unique candidate matching
    every reference value (or None).

    `input_tables[k-1]` holds the evaluation table of P(A^(-k p^stride) C)
    for k = 1..M-1; `ref_values` maps parameter t to P(C(t)).
    """
    p = su.p
    m_bits = su.m_bits
    if len(input_tables) != m_bits - 1:
        raise ValueError("need M-1 input evaluation tables")
    if len(ref_values) < su.r:
        return None
    pairs = set()
    for t in range(p):
        u_values = tuple(int(input_tables[k - 1][t]) for k in range(m_bits - 1, 0, -1))
        point = next_curve.eval_val(t)
        for e in predictor.candidates(u_values, point):
            pairs.add((t, int(e)))
    d_dec = su.delta * next_curve.degree
    b = len(pairs)
    if d_dec <= 0:
        d_dec = 1
    a = minimal_agreement(b, d_dec)
    if a > p:  # no polynomial can agree with more than one pair per parameter
        return None
    cands = sudan_list_decode(sorted(pairs), d_dec, a, su.params)
    survivors = [q for q in cands
                 if all(q.eval_val(t) == val for t, val in ref_values.items())]
    if len(survivors) != 1:
        return None
    return survivors[0].eval_many(np.arange(p))


def interleaved_learning_step(pair: CurvePair, i: int, stride: int,
                              tables: dict[tuple[int, int], EvalTable],
                              predictors, su: SuParams) -> tuple[EvalTable, EvalTable]:
    """Learn the tables of P(A^i C1) then P(A^i C2) at the given stride.

    `tables` is keyed by (curve number, exponent); the step reads the M-1
    predecessors of each curve and the shared reference parameters, and
    raises ReconFailure if either learning step returns None.
    """
    p = su.p
    pj = p ** stride
    pred = predictors[stride] if isinstance(predictors, (list, tuple)) else predictors
    try:
        prev2 = tables[(2, i - pj)]
        in1 = [tables[(1, i - k * pj)] for k in range(1, su.m_bits)]
        in2 = [tables[(2, i - k * pj)] for k in range(1, su.m_bits)]
    except KeyError as exc:
        raise ReconFailure(f"missing predecessor table {exc} at exponent {i}") from exc
    refs1_t = pair.intersection(i - pj, stride)
    ref_values1 = {t: int(prev2[t]) for t in refs1_t}
    shifted1 = curve_apply_matrix(pair.a_mat.pow(i), pair.c1)
    tab1 = learn_next_curve(shifted1, ref_values1, stride, in1, pred, su)
    if tab1 is None:
        raise ReconFailure(f"learning step failed for curve 1 at exponent {i}")
    shifted2 = curve_apply_matrix(pair.a_mat.pow(i), pair.c2)
    refs2_t = pair.intersection_same(i)
    ref_values2 = {t: int(tab1[t]) for t in refs2_t}
    tab2 = learn_next_curve(shifted2, ref_values2, stride, in2, pred, su)
    if tab2 is None:
        raise ReconFailure(f"learning step failed for curve 2 at exponent {i}")
    return tab1, tab2


class _NormView:
    """Read-only table view that resolves exponents modulo the group order."""

    def __init__(self, circuit: "ReconCircuit"):
        self.circuit = circuit

    def __getitem__(self, key):
        c, e = key
        return self.circuit.tables[(c, self.circuit._norm(e))]


class ReconCircuit:
    """Evaluator for i -> P(A^i v) driven by learned curve tables.

    Advice: the curve pair, the hardwired initial tables (exponents
    0..M-1 for both curves, queried from P during reconstruction), and the
    predictors' fixed randomness.  Learned tables are memoized across
    queries; the walk is deterministic, so caching does not change values.
    """

    def __init__(self, a_mat: MatrixFp, pair: CurvePair, predictors, su: SuParams,
                 tables: dict[tuple[int, int], EvalTable]):
        self.a_mat = a_mat
        self.pair = pair
        self.predictors = predictors
        self.su = su
        self.tables = tables
        self.group_order = su.p ** su.m - 1

    def _norm(self, e: int) -> int:
        if e <= 0:
            raise ReconFailure(f"invalid exponent {e}")
        return (e - 1) % self.group_order + 1

    def _ensure(self, e_raw: int, stride: int) -> None:
        e = self._norm(e_raw)
        if (1, e) in self.tables:
            return
        tab1, tab2 = interleaved_learning_step(
            self.pair, e, stride, _NormView(self), self.predictors, self.su)
        self.tables[(1, e)] = tab1
        self.tables[(2, e)] = tab2

    def eval(self, i: int) -> int:
        """P(A^i v) for 1 <= i <= p^m - 1."""
        su = self.su
        p = su.p
        if not 1 <= i <= self.group_order:
            raise ValueError(f"index {i} outside [1, p^m - 1]")
        digits = []
        tmp = i
        for _ in range(su.m):
            digits.append(tmp % p)
            tmp //= p
        prefix = 0
        for level in range(su.m):
            k_max = su.m_bits * p - 1 if level < su.m - 1 else p - 1
            for k in range(su.m_bits, k_max + 1):
                e = k * p ** level + prefix
                if e > self.group_order and level == su.m - 1:
                    break
                self._ensure(e, level)
            prefix += digits[level] * p ** level
        tab = self.tables.get((1, self._norm(i)))
        if tab is None:
            raise ReconFailure(f"walk did not produce the table for exponent {i}")
        return int(tab[1])

    def __call__(self, i: int) -> int:
        return self.eval(i)


def rsu_reconstruct(p_oracle: Callable[[tuple[int, ...]], int], d_oracle,
                    a_mat: MatrixFp, su: SuParams, rng: np.random.Generator,
                    predictor_factory=None):
    """Build (v, circuit) such that circuit(i) = P(A^i v) when the learning
    machinery succeeds; returns None when curve sampling fails.

    `predictor_factory(stride)` overrides the distinguisher-driven
    predictors (the perfect-predictor fixture plugs in here).
    """
    try:
        pair = sample_good_curves(a_mat, su, rng)
    except CurveSamplingError:
        return None
    if predictor_factory is None:
        predictors = [next_element_predictor(d_oracle, j, su, rng) for j in range(su.m)]
    else:
        predictors = [predictor_factory(j) for j in range(su.m)]
    tables: dict[tuple[int, int], EvalTable] = {}
    p = su.p
    for cnum, curve in ((1, pair.c1), (2, pair.c2)):
        for k in range(su.m_bits):
            shifted = curve_apply_matrix(a_mat.pow(k), curve) if k else curve
            tab = np.array([p_oracle(shifted.eval_val(t)) for t in range(p)],
                           dtype=np.int64)
            tables[(cnum, k)] = tab
    # exponent 0 tables double as the group-order tables (A^0 = A^(p^m - 1))
    order = p ** su.m - 1
    tables[(1, order)] = tables.pop((1, 0))
    tables[(2, order)] = tables.pop((2, 0))
    v = pair.c1_at_one()
    return v, ReconCircuit(a_mat, pair, predictors, su, tables)

"""Layered-polynomial representation of explicit NAND circuits and the
targeted hitting-set generator built on top of it.

A layered circuit of width T' and depth d maps into a ladder of
d' = (2m+1)*d + 1 polynomials F_p^(3m) -> F_p: the input polynomial, then
per layer a chain of partial-sum polynomials ending in the layer-value
polynomial.  Gate indices embed into the grid H^m (H = the first h field
elements) by base-h digits, NAND(a, b) arithmetizes as 1 - a*b, and wiring
enters through a gridwise low-degree extension of the per-layer adjacency
predicate.  Every ladder polynomial has total degree at most
Delta = 5*m*(h-1) and is downward self-reducible to its predecessor with
at most h oracle calls, which is what the reconstruction consumes.

The generator unions the combined hitting set of every ladder polynomial;
the reconstruction climbs the ladder, re-learning each polynomial from a
distinguisher, verifying samples against the downward-self-reducible
evaluator, and re-wrapping in the polynomial self-corrector.  Its output
is the circuit's output string or None, never a silently wrong string.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gfnum
from .algebra import TruthTable, lex_index, lex_point
from .combined_hsg import ModParams, ReconFixtures, modified_generate, modified_reconstruct
from .decoding import pcorr_majority_table
from .field import FieldParams, gf, is_tower_degree
from .genmatrix import CandidateSet, build_candidate_set
from .orbit_hsg import HittingSet, SuParams
from .rand import child_rng


class LadderError(Exception):
    """Structural inconsistency (non-Boolean value where a bit is required)."""


# ---------------------------------------------------------------------------
# explicit layered circuits
# ---------------------------------------------------------------------------

class LayeredCircuit:
    """Width-T' depth-d circuit of 2-input NAND gates.

    Gates are indexed 1..T' per layer; inputs are gates 1..n_in of layer 0,
    outputs are gates 1..n_out of layer d.  `wires[(i, w)] = (u, v)` wires
    gate w of layer i to gates u, v of layer i-1; unwired gates evaluate
    to 0 (so do layer-0 gates beyond the input string).
    """

    def __init__(self, width: int, depth: int, n_in: int, n_out: int,
                 wires: dict[tuple[int, int], tuple[int, int]]):
        if n_in > width or n_out > width:
            raise ValueError("more inputs/outputs than the layer width")
        for (i, w), (u, v) in wires.items():
            if not (1 <= i <= depth and 1 <= w <= width and 1 <= u <= width and 1 <= v <= width):
                raise ValueError(f"wire ({i},{w})<-({u},{v}) out of range")
        self.width = width
        self.depth = depth
        self.n_in = n_in
        self.n_out = n_out
        self.wires = dict(wires)

    def phi(self, i: int, w: int, u: int, v: int) -> bool:
        """The layered adjacency predicate."""
        return self.wires.get((i, w)) == (u, v)

    def layer_wires(self, i: int) -> list[tuple[int, int, int]]:
        return [(w, u, v) for (li, w), (u, v) in sorted(self.wires.items()) if li == i]

    def evaluate(self, input_bits: str) -> list[np.ndarray]:
        """Gate values per layer (arrays indexed by gate-1)."""
        if len(input_bits) != self.n_in:
            raise ValueError("input length mismatch")
        layers = [np.zeros(self.width, dtype=np.int64)]
        for k, c in enumerate(input_bits):
            layers[0][k] = 1 if c == "1" else 0
        for i in range(1, self.depth + 1):
            row = np.zeros(self.width, dtype=np.int64)
            for w, u, v in self.layer_wires(i):
                row[w - 1] = 1 - layers[i - 1][u - 1] * layers[i - 1][v - 1]
            layers.append(row)
        return layers

    def output(self, input_bits: str) -> str:
        top = self.evaluate(input_bits)[-1]
        return "".join("1" if top[k] else "0" for k in range(self.n_out))

    def save(self, fh: io.TextIOBase) -> None:
        fh.write(f"{self.width} {self.depth} {self.n_in} {self.n_out}\n")
        for (i, w), (u, v) in sorted(self.wires.items()):
            fh.write(f"{i} {w} {u} {v}\n")

    @classmethod
    def load(cls, fh: io.TextIOBase) -> "LayeredCircuit":
        width, depth, n_in, n_out = map(int, fh.readline().split())
        wires = {}
        for line in fh:
            if not line.strip():
                continue
            i, w, u, v = map(int, line.split())
            wires[(i, w)] = (u, v)
        return cls(width, depth, n_in, n_out, wires)

    @classmethod
    def random(cls, rng: np.random.Generator, width: int, depth: int,
               n_in: int, n_out: int) -> "LayeredCircuit":
        wires = {}
        for i in range(1, depth + 1):
            for w in range(1, width + 1):
                u, v = (int(x) for x in rng.integers(1, width + 1, size=2))
                wires[(i, w)] = (u, v)
        return cls(width, depth, n_in, n_out, wires)


def constant_circuit(bits: str) -> tuple[LayeredCircuit, str]:
    """A depth-2 circuit whose output is the given constant string when fed
    the canonical input "10"; used to package precomputed search results as
    explicit circuits."""
    n_out = len(bits)
    width = max(2, n_out)
    wires = {(1, 1): (1, 2), (1, 2): (1, 1)}  # gate1 = NAND(1,0)=1, gate2 = NAND(1,1)=0
    for k, c in enumerate(bits, start=1):
        wires[(2, k)] = (2, 2) if c == "1" else (1, 1)
    return LayeredCircuit(width, 2, 2, n_out, wires), "10"


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def smallest_tower_power_at_least(x: int) -> int:
    k = 2
    while (1 << k) < x:
        k *= 3
    return 1 << k


@dataclass
class CtParams:
    """Instance parameters: modeled circuit size/depth bounds (T, d), output
    length M and density exponent rho, plus the arithmetic setting (h, p, m).

    At paper fidelity h is the smallest tower power of 2 at least M,
    p = h^27, and log T <= h < p <= h^27 <= T; any violation is recorded in
    `relaxed` instead of rejected, because desk-scale runs live outside
    that regime by design.
    """

    n: int
    T: int
    d: int
    M: int
    rho: int = 1
    h: int | None = None
    p: int | None = None
    m: int | None = None
    c1: int = 8
    su_overrides: dict = dc_field(default_factory=dict)
    mod_overrides: dict = dc_field(default_factory=dict)
    cap_bytes: int = 1 << 28

    def __post_init__(self):
        if self.h is None:
            self.h = smallest_tower_power_at_least(self.M)
        if self.p is None:
            # smallest supported 2-power field beyond the self-correction bound
            delta_for = lambda hh, mm: 5 * mm * (hh - 1)
            k = 2
            mm = self.m or 1
            while (1 << k) <= 3 * delta_for(self.h, mm) or (1 << k) <= self.h:
                k += 1
            self.p = 1 << k
        if self.m is None:
            m = 1
            while self.h ** m < max(self.n, 2):
                m *= 3
            self.m = m
        self.relaxed: list[str] = []
        logT = max(1, (self.T - 1).bit_length())
        if not logT <= self.h:
            self.relaxed.append(f"log T = {logT} > h = {self.h}")
        if not self.h < self.p:
            self.relaxed.append(f"h = {self.h} >= p = {self.p}")
        if not self.p <= self.h ** 27:
            self.relaxed.append(f"p = {self.p} > h^27")
        if not self.h ** 27 <= self.T:
            self.relaxed.append(f"h^27 > T = {self.T}")

    @property
    def params(self) -> FieldParams:
        return gf(self.p.bit_length() - 1)

    @property
    def delta(self) -> int:
        """Declared total-degree bound of every ladder polynomial."""
        return 5 * self.m * (self.h - 1)

    def su_params(self) -> SuParams:
        kw = dict(self.su_overrides)
        return SuParams(self.params, 3 * self.m, self.M, self.delta, **kw)

    def mod_params(self) -> ModParams:
        return ModParams(self.su_params(), **self.mod_overrides)


# ---------------------------------------------------------------------------
# the polynomial ladder
# ---------------------------------------------------------------------------

class PolyLadder:
    """The d' = (2m+1)*depth + 1 polynomials encoding one circuit run.

    Index 1 is the input polynomial; index >= 2 decomposes as
    (layer, j) with j = 0 the wiring product and j in 1..2m the partial
    sums, j = 2m being the layer-value polynomial.  All polynomials take
    3m variables (trailing dummies) over F_p and respect the declared
    degree bound.
    """

    def __init__(self, circuit: LayeredCircuit, input_bits: str, ct: CtParams):
        if ct.h ** ct.m < circuit.width:
            raise ValueError("grid too small for the circuit width")
        if ct.h > ct.p:
            raise ValueError("H must embed in the field")
        self.circuit = circuit
        self.input_bits = input_bits
        self.ct = ct
        self.params = ct.params
        self.h = ct.h
        self.m = ct.m
        self.p = ct.p
        self.d_prime = (2 * self.m + 1) * circuit.depth + 1
        self.delta = ct.delta
        self._lag = None
        self._tables: dict[int, np.ndarray] = {}
        self._phi_tables: dict[int, np.ndarray] = {}
        self._gate_values = circuit.evaluate(input_bits)

    # -- indexing ------------------------------------------------------------

    def split_index(self, idx: int) -> tuple[int, int]:
        """Ladder index -> (layer, j); index 1 is the input polynomial."""
        if not 2 <= idx <= self.d_prime:
            raise ValueError(f"ladder index {idx} out of range 2..{self.d_prime}")
        q = idx - 2
        return q // (2 * self.m + 1) + 1, q % (2 * self.m + 1)

    def id_point(self, i: int) -> tuple[int, ...]:
        """Canonical injection of indices into H^m: little-endian base-h
        digits of i-1."""
        if i < 1 or i > self.h ** self.m:
            raise ValueError("index outside the grid")
        digits = []
        t = i - 1
        for _ in range(self.m):
            digits.append(t % self.h)
            t //= self.h
        return tuple(digits)

    # -- one-dimensional Lagrange factors -------------------------------------

    def lagrange_rows(self) -> np.ndarray:
        """L[z, x] = prod_{a in H, a != z} (x - a)/(z - a) for z in H."""
        if self._lag is None:
            p, h, params = self.p, self.h, self.params
            rows = np.empty((h, p), dtype=np.int64)
            xs = np.arange(p, dtype=np.int64)
            for z in range(h):
                num = np.ones(p, dtype=np.int64)
                den = 1
                for a in range(h):
                    if a == z:
                        continue
                    num = gfnum.mul(params, num, xs ^ a)
                    den = params.mul(den, z ^ a)
                rows[z] = gfnum.mul(params, num, params.inv(den))
            self._lag = rows
        return self._lag

    def delta_vec(self, grid_point: tuple[int, ...], block_coords: np.ndarray) -> np.ndarray:
        """Kronecker-delta factor of one grid point over one m-coordinate
        block, evaluated at the given coordinate arrays (shape (N, m))."""
        lag = self.lagrange_rows()
        out = lag[grid_point[0]][block_coords[:, 0]]
        for j in range(1, self.m):
            out = gfnum.mul(self.params, out, lag[grid_point[j]][block_coords[:, j]])
        return out

    # -- scalar contract operations -------------------------------------------

    def base_eval(self, w: tuple[int, ...]) -> int:
        """P_1(w): the grid-delta extension of the padded input string."""
        params = self.params
        lag = self.lagrange_rows()
        m_prime = 1
        while self.h ** m_prime < self.circuit.n_in:
            m_prime += 1
        total = 0
        for pos, c in enumerate(self.input_bits):
            if c != "1":
                continue
            z = []
            t = pos
            for _ in range(m_prime):
                z.append(t % self.h)
                t //= self.h
            z += [0] * (self.m - m_prime)
            term = 1
            for j in range(self.m):
                term = params.mul(term, int(lag[z[j]][w[j]]))
            total ^= term
        return total

    def phi_hat(self, layer: int, wuv: tuple[int, ...]) -> int:
        """Low-degree extension of the layer adjacency predicate at a point
        of F_p^(3m): sum of delta products over the actual wires."""
        if not 1 <= layer <= self.circuit.depth:
            raise ValueError("layer out of range")
        params = self.params
        lag = self.lagrange_rows()
        m = self.m
        total = 0
        for w0, u0, v0 in self.circuit.layer_wires(layer):
            term = 1
            for block, gate in enumerate((w0, u0, v0)):
                z = self.id_point(gate)
                for j in range(m):
                    term = params.mul(term, int(lag[z[j]][wuv[block * m + j]]))
                    if term == 0:
                        break
                if term == 0:
                    break
            total ^= term
        return total

    def dsr_eval(self, idx: int, w: tuple[int, ...], prev) -> int:
        """P_idx(w) from an oracle for P_(idx-1(: the wiring product for
        j = 0, otherwise one partial sum over H."""
        layer, j = self.split_index(idx)
        params = self.params
        m = self.m
        zeros2m = (0,) * (2 * m)
        if j == 0:
            sigma1 = tuple(w[m: 2 * m])
            sigma2 = tuple(w[2 * m: 3 * m])
            a = int(prev(sigma1 + zeros2m))
            b = int(prev(sigma2 + zeros2m))
            return params.mul(self.phi_hat(layer, tuple(w)), 1 ^ params.mul(a, b))
        free = 3 * m - j  # real variables of P_idx
        head = tuple(w[:free])
        pad = (0,) * (j - 1)
        total = 0
        for sigma in range(self.h):
            total ^= int(prev(head + (sigma,) + pad))
        return total

    def faithful_output(self, top, i: int) -> int:
        """Output bit i read off the top polynomial at (id(i), 0^(2m))."""
        if not 1 <= i <= self.circuit.n_out:
            raise ValueError("output index out of range")
        val = int(top(self.id_point(i) + (0,) * (2 * self.m)))
        if val not in (0, 1):
            raise LadderError(f"non-Boolean value {val} at output {i}")
        return val

    # -- vectorized table construction ----------------------------------------

    @property
    def domain(self) -> int:
        return self.p ** (3 * self.m)

    def _block_coords(self) -> np.ndarray:
        key = "_coords"
        if not hasattr(self, key):
            n = self.p ** self.m
            coords = np.empty((n, self.m), dtype=np.int64)
            idx = np.arange(n)
            for j in range(self.m):
                coords[:, j] = idx % self.p
                idx = idx // self.p
            setattr(self, key, coords)
        return getattr(self, key)

    def phi_table(self, layer: int) -> np.ndarray:
        """Full-domain table of the adjacency extension for one layer."""
        if layer not in self._phi_tables:
            pm = self.p ** self.m
            coords = self._block_coords()
            acc = np.zeros(pm ** 3, dtype=np.int64)
            for w0, u0, v0 in self.circuit.layer_wires(layer):
                dw = self.delta_vec(self.id_point(w0), coords)
                du = self.delta_vec(self.id_point(u0), coords)
                dv = self.delta_vec(self.id_point(v0), coords)
                outer = gfnum.mul(self.params,
                                  gfnum.mul(self.params, dv[:, None, None], du[None, :, None]),
                                  dw[None, None, :])
                acc ^= outer.reshape(-1)
            self._phi_tables[layer] = acc
        return self._phi_tables[layer]

    def input_table(self) -> np.ndarray:
        """P_1 over the full domain (depends on the first m coordinates)."""
        pm = self.p ** self.m
        coords = self._block_coords()
        acc = np.zeros(pm, dtype=np.int64)
        m_prime = 1
        while self.h ** m_prime < self.circuit.n_in:
            m_prime += 1
        for pos, c in enumerate(self.input_bits):
            if c != "1":
                continue
            z = []
            t = pos
            for _ in range(m_prime):
                z.append(t % self.h)
                t //= self.h
            z += [0] * (self.m - m_prime)
            acc ^= self.delta_vec(tuple(z), coords)
        return np.tile(acc, pm * pm)

    def dsr_table(self, idx: int, prev_table: np.ndarray) -> np.ndarray:
        """Vectorized downward-self-reducibility step: the full-domain table
        of P_idx given the full-domain table standing in for P_(idx-1)."""
        layer, j = self.split_index(idx)
        params = self.params
        pm = self.p ** self.m
        n = self.domain
        if j == 0:
            prev_m = prev_table[:pm]
            idx_all = np.arange(n)
            cu = (idx_all // pm) % pm
            cv = idx_all // (pm * pm)
            nand = 1 ^ gfnum.mul(params, prev_m[cu], prev_m[cv])
            return gfnum.mul(params, self.phi_table(layer), nand)
        free = 3 * self.m - j
        block = self.p ** free
        real = prev_table[: block * self.p].reshape(self.p, block)
        acc = np.zeros(block, dtype=np.int64)
        for sigma in range(self.h):
            acc ^= real[sigma]
        return np.tile(acc, self.p ** j)

    def exact_table(self, idx: int) -> np.ndarray:
        """Ground-truth table of P_idx, built bottom-up (cached)."""
        if idx not in self._tables:
            if idx == 1:
                self._tables[1] = self.input_table()
            else:
                self._tables[idx] = self.dsr_table(idx, self.exact_table(idx - 1))
        return self._tables[idx]

    def truth_table(self, idx: int) -> TruthTable:
        return TruthTable(self.params, 3 * self.m, self.delta, self.exact_table(idx))


# ---------------------------------------------------------------------------
# generator and reconstruction
# ---------------------------------------------------------------------------

def ct_generate(circuit: LayeredCircuit, input_bits: str, ct: CtParams,
                candidates: CandidateSet | None = None) -> HittingSet:
    """Union of the combined hitting set of every ladder polynomial."""
    ladder = PolyLadder(circuit, input_bits, ct)
    table_bytes = ladder.domain * 8
    if table_bytes * ladder.d_prime > ct.cap_bytes:
        raise MemoryError(
            f"ladder tables need ~{table_bytes * ladder.d_prime} bytes, over the cap")
    su = ct.su_params()
    if candidates is None:
        candidates = build_candidate_set(su.params, su.m)
    sets = [modified_generate(ladder.truth_table(idx), su, candidates)
            for idx in range(1, ladder.d_prime + 1)]
    per = len(sets[0])
    count = sum(len(s) for s in sets)

    def entry(i: int) -> int:
        return sets[i // per][i % per]

    return HittingSet(count, ct.M, entry, label="circuit-ladder")


def ct_reconstruct(circuit: LayeredCircuit, input_bits: str, d_oracle,
                   ct: CtParams, rng: np.random.Generator,
                   fixtures: ReconFixtures | None = None,
                   candidates: CandidateSet | None = None) -> str | None:
    """Climb the ladder re-learning every polynomial from the distinguisher.

    Each level: evaluate the downward-self-reducible extension of the
    current approximation over the whole (desk-scale) domain, reconstruct
    it from D, verify c1*m*log2(p) random samples, and re-wrap in the
    batched self-corrector.  Any failure returns None; the output string is
    read off the top table, so a non-None output matches the circuit run
    unless every verification layer was fooled at once.
    """
    ladder = PolyLadder(circuit, input_bits, ct)
    if ladder.domain * 8 > ct.cap_bytes:
        raise MemoryError("domain too large for table-backed reconstruction")
    su = ct.su_params()
    mod = ct.mod_params()
    if candidates is None:
        candidates = build_candidate_set(su.params, su.m)
    votes = ct.c1 * 3 * ct.m * max(1, su.params.k)
    votes += 1 - votes % 2
    samples = max(1, ct.c1 * ct.m * max(1, su.params.k))
    seed = int(rng.integers(1 << 62))
    e_table = ladder.input_table()
    for idx in range(2, ladder.d_prime + 1):
        ptilde = ladder.dsr_table(idx, e_table)
        p_oracle = lambda pt, tab=ptilde: int(tab[lex_index(ladder.params, pt)])
        layer_rng = child_rng(seed, ("layer", idx))
        learned = modified_reconstruct(p_oracle, d_oracle, mod, layer_rng,
                                       candidates=candidates, fixtures=fixtures)
        if learned is None:
            return None
        inner_table = _inner_table(learned, ladder)
        approx = pcorr_majority_table(inner_table, ladder.params, 3 * ct.m,
                                      ladder.delta, layer_rng, mod.pcorr_votes)
        for _ in range(samples):
            q = int(layer_rng.integers(ladder.domain))
            if approx[q] != ptilde[q]:
                return None
        e_table = pcorr_majority_table(approx, ladder.params, 3 * ct.m,
                                       ladder.delta, layer_rng, votes)
    bits = []
    for i in range(1, circuit.n_out + 1):
        val = int(e_table[lex_index(ladder.params, ladder.id_point(i) + (0,) * (2 * ct.m))])
        if val not in (0, 1):
            return None
        bits.append("1" if val else "0")
    return "".join(bits)


def _inner_table(final_circuit, ladder: PolyLadder) -> np.ndarray:
    """Domain table of the assembled candidate circuit (before its wrap);
    the batched self-corrector then replaces per-point wrapped queries."""
    inner = final_circuit.inner
    fast = getattr(inner, "table_backend", None)
    if fast is not None:
        return fast()
    n = ladder.domain
    return np.fromiter(
        (inner(lex_point(ladder.params, 3 * ladder.m, i)) for i in range(n)),
        dtype=np.int64, count=n)

"""Splitting the matching between the two seed clusters.

The core is a number-partition lemma: given weights ``alpha_i`` and ``beta_i``
with ``a/sum(alpha) + b/sum(beta) <= 1``, sort by ``alpha_i/beta_i`` and cut so
that the upper part has alpha-sum above ``a - Delta`` and the lower part has
beta-sum at least ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .decomposition import Decomposition, Family, SwitchedDecomposition
from .errors import InputError, Infeasible, InvariantViolation
from .regularity import Constants, WeightedClusterGraph, _q

__all__ = [
    "PartitionInstance", "partition_numbers", "MatchingPartition", "partition_case1",
    "partition_case2", "split_TB", "regime_failure",
]


def regime_failure(c: Constants, stage: str, inequality: str, **operands):
    """Error for an existence claim that only the proof's constants guarantee.

    Under the proof constants a failure is a bug; under a desk profile it just
    means the instance is too small for the guarantee.
    """
    cls = InvariantViolation if c.proof_regime else Infeasible
    return cls(stage, inequality, **operands)


@dataclass(frozen=True)
class PartitionInstance:
    a: Fraction
    b: Fraction
    delta: Fraction
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __init__(self, a, b, delta, alpha: Sequence, beta: Sequence):
        object.__setattr__(self, "a", _q(a))
        object.__setattr__(self, "b", _q(b))
        object.__setattr__(self, "delta", _q(delta))
        object.__setattr__(self, "alpha", tuple(_q(x) for x in alpha))
        object.__setattr__(self, "beta", tuple(_q(x) for x in beta))
        if len(self.alpha) != len(self.beta):
            raise InputError("alpha and beta must have the same length")
        if min(self.a, self.b, self.delta) < 0:
            raise InputError("a, b and Delta must be nonnegative")
        for x in self.alpha + self.beta:
            if not 0 <= x <= self.delta:
                raise InputError(f"weight {x} outside [0, Delta={self.delta}]")

    @property
    def size(self) -> int:
        return len(self.alpha)

    def load(self) -> Fraction | None:
        """``a/sum(alpha) + b/sum(beta)``, or ``None`` when a positive target meets a zero sum."""
        total = Fraction(0)
        for target, ws in ((self.a, self.alpha), (self.b, self.beta)):
            if target == 0:
                continue
            s = sum(ws, Fraction(0))
            if s == 0:
                return None
            total += target / s
        return total

    def feasible(self) -> bool:
        load = self.load()
        return load is not None and load <= 1

    def valid(self, I_a: Sequence[int], I_b: Sequence[int]) -> bool:
        if sorted(list(I_a) + list(I_b)) != list(range(self.size)):
            return False
        return (sum((self.alpha[i] for i in I_a), Fraction(0)) > self.a - self.delta
                and sum((self.beta[i] for i in I_b), Fraction(0)) >= self.b)


def _ratio_cmp(inst: PartitionInstance):
    # alpha_i/beta_i <= alpha_j/beta_j by cross-multiplication; 0/0 counts as 0, x/0 as +inf
    def key(i):
        al, be = inst.alpha[i], inst.beta[i]
        if be == 0:
            return (0, 0, 1) if al == 0 else (1, 0, 1)
        return (0, al, be)

    def cmp(i, j):
        ti, ai, bi = key(i)
        tj, aj, bj = key(j)
        if ti != tj:
            return ti - tj
        if ti == 0:
            lhs, rhs = ai * bj, aj * bi
            if lhs != rhs:
                return -1 if lhs < rhs else 1
        return i - j

    return cmp


def partition_numbers(inst: PartitionInstance) -> tuple[list[int], list[int]]:
    """Indices ``(I_a, I_b)`` with ``sum alpha(I_a) > a - Delta`` and ``sum beta(I_b) >= b``."""
    if not inst.feasible():
        raise InputError(f"a/sum(alpha) + b/sum(beta) = {inst.load()} exceeds 1")
    n = inst.size
    if inst.b == 0 or n == 0:
        I_a, I_b = list(range(n)), []
    elif inst.a == 0:
        I_a, I_b = [], list(range(n))
    else:
        order = sorted(range(n), key=cmp_to_key(_ratio_cmp(inst)))
        # suffix[t] = sum of alpha over order[t+1:]
        suffix = [Fraction(0)] * n
        for t in range(n - 2, -1, -1):
            suffix[t] = suffix[t + 1] + inst.alpha[order[t + 1]]
        ell = next(t for t in range(n) if inst.a >= suffix[t])
        I_a, I_b = sorted(order[ell + 1:]), sorted(order[:ell + 1])
        cmp = _ratio_cmp(inst)
        if I_a and I_b and cmp(max(I_b, key=cmp_to_key(cmp)), min(I_a, key=cmp_to_key(cmp))) > 0:
            raise InvariantViolation("partition_numbers", "max ratio in I_b <= min ratio in I_a")
    if not inst.valid(I_a, I_b):
        raise InvariantViolation(
            "partition_numbers", "sum alpha(I_a) > a - Delta and sum beta(I_b) >= b",
            a=inst.a, b=inst.b, delta=inst.delta,
            alpha_Ia=sum((inst.alpha[i] for i in I_a), Fraction(0)),
            beta_Ib=sum((inst.beta[i] for i in I_b), Fraction(0)))
    return I_a, I_b


# ---------------------------------------------------------------------------
# applications to the matching


@dataclass(frozen=True)
class MatchingPartition:
    """``side_A``/``side_B`` index into ``edges``; ``side_A`` is M_A (case 1) or M_F (case 2)."""

    case: int
    edges: tuple[tuple[int, int], ...]
    side_A: tuple[int, ...]
    side_B: tuple[int, ...]
    lprime_entries: tuple[int, ...]
    mu_A: Fraction
    mu_B: Fraction
    A: int
    B: int
    lemma_cut: bool = True  # False when a desk profile fell back to another cut of the same order

    @property
    def M_A(self) -> list[tuple[int, int]]:
        return [self.edges[i] for i in self.side_A]

    @property
    def M_B(self) -> list[tuple[int, int]]:
        return [self.edges[i] for i in self.side_B]

    def to_json(self) -> dict:
        return {"case": self.case, "A": self.A, "B": self.B,
                "side_A": [list(self.edges[i]) for i in self.side_A],
                "side_B": [list(self.edges[i]) for i in self.side_B],
                "lprime": list(self.lprime_entries),
                "mu_A": str(self.mu_A), "mu_B": str(self.mu_B), "lemma_cut": self.lemma_cut}


def _edge_deg(H: WeightedClusterGraph, v: int, e: tuple[int, int]) -> Fraction:
    return H.w(v, e[0]) + H.w(v, e[1])


def _deg_into_edges(H, v, edges) -> Fraction:
    return sum((_edge_deg(H, v, e) for e in edges), Fraction(0))


def mu_floor(c: Constants, s: int) -> Fraction:
    """Per-edge slack a desk profile must reserve so that a budgeted edge still has room.

    The proof's hierarchy of constants makes ``mu - 2 eps s`` exceed
    ``(8/p)(alpha s + beta k)``; fixed desk constants do not, so the desk
    profile imposes it.  Zero for the proof constants.
    """
    return Fraction(0) if c.proof_regime else c.space(8, s) + 2 * c.epsilon * s


def _mu(c: Constants, count: int, s: int) -> Fraction:
    if not count:
        return Fraction(0)
    return max(c.slack(c.pi * c.k / 40) / count, mu_floor(c, s))


def _reserve(c: Constants, count: int, s: int, share=None) -> Fraction:
    """Slack demanded on top of the vertex count: the stated term, or ``count`` floored slacks."""
    base = c.slack(c.pi * c.k / 40) if share is None else share
    return max(base, count * mu_floor(c, s))


def _cut(inst: PartitionInstance, c: Constants, ok) -> tuple[list[int], list[int], bool]:
    """The lemma's cut, or under a desk profile the first cut of the same ratio order passing ``ok``.

    The lemma only promises ``a - Delta`` with ``Delta = 2s``; that loss is negligible
    against ``pi*k/40`` in the proof regime but not at desk scale.
    """
    I_a, I_b = partition_numbers(inst)
    if ok(I_a, I_b) or c.proof_regime:
        return I_a, I_b, True
    order = sorted(range(inst.size), key=cmp_to_key(_ratio_cmp(inst)))
    for t in range(inst.size, -1, -1):
        alt_a, alt_b = sorted(order[t:]), sorted(order[:t])
        if ok(alt_a, alt_b):
            return alt_a, alt_b, False
    return I_a, I_b, True


def partition_case1(M: Sequence[tuple[int, int]], H: WeightedClusterGraph, A: int, B: int,
                    d: Decomposition, c: Constants) -> MatchingPartition:
    """Split M into M_A and M_B so that each side's seed cluster has room for its families."""
    edges = tuple(sorted(tuple(sorted(e)) for e in M))
    need = (1 + c.pi / 10) * c.k
    degA, degB = _deg_into_edges(H, A, edges), _deg_into_edges(H, B, edges)
    if degA < need or degB < need:
        raise InputError(f"case 1 needs deg_M(A), deg_M(B) >= {float(need):.6g}; "
                         f"got {float(degA):.6g}, {float(degB):.6g}")
    inst = PartitionInstance(d.V_A + c.slack(c.pi * c.k / 20), d.V_B + c.slack(c.pi * c.k / 20),
                             2 * H.s, [_edge_deg(H, A, e) for e in edges],
                             [_edge_deg(H, B, e) for e in edges])
    s = H.s

    def room(X, I, V):
        # a side with no families to host needs no edges either
        if not I and V == 0:
            return True
        return _deg_into_edges(H, X, [edges[i] for i in I]) > V + _reserve(c, len(I), s)

    def fits_case1(I_a, I_b):
        return room(A, I_a, d.V_A) and room(B, I_b, d.V_B)

    I_a, I_b, lemma = _cut(inst, c, fits_case1)
    mp = MatchingPartition(1, edges, tuple(I_a), tuple(I_b), (), _mu(c, len(I_a), s),
                           _mu(c, len(I_b), s), A, B, lemma)
    got_A, got_B = _deg_into_edges(H, A, mp.M_A), _deg_into_edges(H, B, mp.M_B)
    if not fits_case1(I_a, I_b):
        raise regime_failure(c, "partition_case1", "deg_{M_A}(A) > |V_A| + pi k/40 and deg_{M_B}(B) > |V_B| + pi k/40",
                             deg_MA_A=got_A, V_A=d.V_A, deg_MB_B=got_B, V_B=d.V_B,
                             reserve_A=_reserve(c, len(I_a), s), reserve_B=_reserve(c, len(I_b), s),
                             Delta=2 * H.s)
    return mp


def partition_case2(M: Sequence[tuple[int, int]], Lprime: Sequence[int], H: WeightedClusterGraph,
                    A: int, B: int, sd: SwitchedDecomposition, c: Constants) -> MatchingPartition:
    """Split M into M_F and the B-side edges, with the spare heavy clusters L' all on B's side."""
    edges = tuple(sorted(tuple(sorted(e)) for e in M))
    lp = tuple(sorted(Lprime))
    need = (1 + c.pi / 10) * c.k
    degA = _deg_into_edges(H, A, edges)
    if degA < need:
        raise InputError(f"case 2 needs deg_M(A) >= {float(need):.6g}; got {float(degA):.6g}")
    if sd.Vbar_A < sd.Vbar_B:
        raise InputError("switched decomposition has fewer bar-A than bar-B vertices")
    alpha = [_edge_deg(H, A, e) for e in edges] + [Fraction(0)] * len(lp)
    beta = [_edge_deg(H, B, e) for e in edges] + [H.w(B, C) for C in lp]
    inst = PartitionInstance(sd.V_F + c.slack(c.pi * c.k / 20), sd.Vbar_B + c.slack(c.pi * c.k / 40),
                             2 * H.s, alpha, beta)
    m = len(edges)
    slack = c.slack(c.pi * c.k / 40)
    degL = sum((H.w(B, C) for C in lp), Fraction(0))

    s = H.s

    def fits_case2(I_a, I_b):
        mB = sum(1 for i in I_b if i < m)
        degB = _deg_into_edges(H, B, [edges[i] for i in I_b if i < m])
        # the empty choice of T_B^M must satisfy the split inequality
        empty_ok = degB >= mB * _mu(c, mB + len(lp), s)
        return (_deg_into_edges(H, A, [edges[i] for i in I_a if i < m]) > sd.V_F + slack
                and degB + degL >= sd.Vbar_B + _reserve(c, mB, s) and empty_ok)

    def useful(I_a, I_b):
        # matching edges B has no weight into only inflate m_B; A's side can always take them
        dead = [i for i in I_b if i < m and beta[i] == 0]
        return sorted(list(I_a) + dead), [i for i in I_b if i not in dead]

    I_a, I_b, lemma = _cut(inst, c, lambda I_a, I_b: fits_case2(*useful(I_a, I_b)))
    I_a, I_b = useful(I_a, I_b)
    # zero-alpha L' entries that land above the cut add nothing to A's side; keep them with B
    side_A = tuple(i for i in I_a if i < m)
    side_B = tuple(i for i in I_b if i < m)
    # on B's side the slack is shared between the matching edges and L'
    mp = MatchingPartition(2, edges, side_A, side_B, lp, _mu(c, len(side_A), s),
                           _mu(c, len(side_B) + len(lp), s), A, B, lemma)
    got_A = _deg_into_edges(H, A, mp.M_A)
    got_B = _deg_into_edges(H, B, mp.M_B) + degL
    if not fits_case2(I_a, I_b):
        raise regime_failure(c, "partition_case2",
                             "deg_{M_F}(A) > |V_F| + pi k/40 and deg_{bar M_B u L'}(B) >= |bar V_B| + pi k/40, with deg_{bar M_B}(B) covering its slack",
                             deg_MF_A=got_A, V_F=sd.V_F, deg_B=got_B, Vbar_B=sd.Vbar_B, slack=slack,
                             reserve_B=_reserve(c, len(side_B), s))
    return mp


def _split_rhs(c: Constants, mp: "MatchingPartition") -> Fraction:
    # m_B shares of the B-side slack; equals pi k m_B / (40 (m_B + |L'|)) for the proof constants
    return len(mp.side_B) * mp.mu_B


def split_TB(mp: MatchingPartition, barB: Sequence[Family], H: WeightedClusterGraph, B: int,
             c: Constants) -> tuple[list[Family], list[Family]]:
    """Families embedded through B's matching edges versus through L'.

    First-fit by decreasing size, so the M-side collection is maximal: no
    remaining family can be added without breaking the space inequality.
    """
    mB, nL = len(mp.side_B), len(mp.lprime_entries)
    cap = _deg_into_edges(H, B, mp.M_B)
    rhs = _split_rhs(c, mp)
    on_M: list[Family] = []
    on_L: list[Family] = []
    used = 0
    for f in sorted(barB, key=lambda f: (-len(f), f.seed, min(f.vertices))):
        if cap >= used + len(f) + rhs:
            on_M.append(f)
            used += len(f)
        else:
            on_L.append(f)
    if cap < rhs:
        raise regime_failure(c, "split_TB", "deg_{bar M_B}(B) >= |V_B^M| + pi k m_B / (40 (m_B + |L'|))",
                             deg_MB_B=cap, V_B_M=0, rhs=rhs)
    if on_L:
        degL = sum((H.w(B, C) for C in mp.lprime_entries), Fraction(0))
        VL = sum(len(f) for f in on_L)
        need = c.slack(Fraction(c.pi * c.k * nL, 80 * (mB + nL))) if mB + nL else Fraction(0)
        if degL < VL + need:
            raise regime_failure(c, "split_TB", "deg_{L'}(B) >= |V_B^L| + pi k |L'| / (80 (m_B + |L'|))",
                                 deg_L_B=degL, V_B_L=VL, rhs=need, m_B=mB, L=nL)
    return on_M, on_L

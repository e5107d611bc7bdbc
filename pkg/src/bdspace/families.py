"""Regular families of finite subsets of N: Schreier families and closures.

A family is *regular* when it contains all singletons and is compact,
hereditary (closed under subsets) and spreading (closed under moving
elements to the right).  Four finitely described shapes are supported:

* ``schreier(alpha)`` for ordinals alpha < omega^omega given in Cantor
  normal form.  The recursion we fix (the literature has several
  equivalent conventions at limits) is:

    - S_0       = { {} } union all singletons,
    - S_(a+1)   = { F : F splits into at most min(F) consecutive chunks,
                    each a member of S_a } union { {} },
    - S_lambda  = { F : F in S_(mu + omega^(k-1) * n) for some n <= min F }
                  union { {} },  where lambda = mu + omega^k in CNF, k >= 1.

  With this convention S_1 = { F : |F| <= min F } union { {} }.

* ``singleton_plus_pair(base)``: sets of the form {n} u B1 u B2 with
  B1, B2 in the base family (and the empty set).

* ``explicit(sets)``: the regular closure of a finite list of sets, i.e.
  everything that is a spread of a subset of a listed set, plus all
  singletons.

* ``max_union(families)``: the union of finitely many regular families.

Membership is decided recursively and memoized; all tests are exact.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence


def _cnf(ordinal) -> tuple[tuple[int, int], ...]:
    """Normalize an ordinal below omega^omega to CNF ((exp, coeff), ...).

    Accepts a plain int n (the finite ordinal n) or an iterable of
    (exp, coeff) pairs with strictly decreasing exponents.
    """
    if isinstance(ordinal, int):
        if ordinal < 0:
            raise ValueError("ordinal must be >= 0")
        return ((0, ordinal),) if ordinal else ()
    cnf = tuple((int(k), int(m)) for k, m in ordinal)
    exps = [k for k, _ in cnf]
    if exps != sorted(exps, reverse=True) or len(set(exps)) != len(exps):
        raise ValueError("CNF exponents must be strictly decreasing")
    if any(m <= 0 or k < 0 for k, m in cnf):
        raise ValueError("CNF coefficients must be positive")
    return cnf


class RegularFamily:
    """Immutable descriptor with a memoized membership oracle."""

    __slots__ = ("kind", "payload")

    def __init__(self, kind: str, payload):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "payload", payload)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("RegularFamily is immutable")

    def __eq__(self, other):
        return (isinstance(other, RegularFamily)
                and self.kind == other.kind and self.payload == other.payload)

    def __hash__(self):
        return hash((self.kind, self.payload))

    def __repr__(self):
        return f"RegularFamily({self.kind}, {self.payload!r})"

    def to_json_obj(self) -> dict:
        if self.kind == "schreier":
            return {"kind": "schreier", "cnf": [list(t) for t in self.payload]}
        if self.kind == "pairplus":
            return {"kind": "pairplus", "base": self.payload.to_json_obj()}
        if self.kind == "explicit":
            return {"kind": "explicit", "sets": [sorted(s) for s in self.payload]}
        return {"kind": "union", "parts": [f.to_json_obj() for f in self.payload]}

    @staticmethod
    def from_json_obj(obj: dict) -> "RegularFamily":
        kind = obj["kind"]
        if kind == "schreier":
            return schreier(tuple((k, m) for k, m in obj["cnf"]))
        if kind == "pairplus":
            return singleton_plus_pair(RegularFamily.from_json_obj(obj["base"]))
        if kind == "explicit":
            return explicit([frozenset(s) for s in obj["sets"]])
        return max_union([RegularFamily.from_json_obj(o) for o in obj["parts"]])


def schreier(ordinal) -> RegularFamily:
    return RegularFamily("schreier", _cnf(ordinal))


def singleton_plus_pair(base: RegularFamily) -> RegularFamily:
    return RegularFamily("pairplus", base)


def explicit(sets: Iterable[Iterable[int]]) -> RegularFamily:
    return RegularFamily("explicit",
                         tuple(sorted({frozenset(map(int, s)) for s in sets},
                                      key=lambda s: (len(s), sorted(s)))))


def max_union(fams: Sequence[RegularFamily]) -> RegularFamily:
    return RegularFamily("union", tuple(fams))


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _member(fam: RegularFamily, F: tuple[int, ...]) -> bool:
    if not F:
        return True
    if any(n < 1 for n in F):
        raise ValueError("family members are subsets of {1, 2, ...}")
    if fam.kind == "schreier":
        return _schreier_member(fam.payload, F)
    if fam.kind == "pairplus":
        return _pairplus_member(fam.payload, F)
    if fam.kind == "explicit":
        if len(F) == 1:
            return True
        return any(_dominated(F, A) for A in fam.payload)
    if fam.kind == "union":
        return any(_member(f, F) for f in fam.payload)
    raise ValueError(f"unknown family kind {fam.kind!r}")


def _dominated(F: tuple[int, ...], A: frozenset) -> bool:
    # F (sorted) is a spread of a subset of A iff the k smallest elements
    # of A fit under F elementwise.
    if len(F) > len(A):
        return False
    smallest = sorted(A)[: len(F)]
    return all(a <= f for a, f in zip(smallest, F))


def _schreier_member(cnf: tuple[tuple[int, int], ...], F: tuple[int, ...]) -> bool:
    if not cnf:  # S_0
        return len(F) <= 1
    k, m = cnf[-1]
    if k == 0:  # successor ordinal: peel one from the last coefficient
        pred = cnf[:-1] + (((0, m - 1),) if m > 1 else ())
        return _chunked(pred, F, F[0])
    # limit ordinal: lambda = mu + omega^k, fundamental sequence
    # lambda_n = mu + omega^(k-1) * n
    mu = cnf[:-1] + (((k, m - 1),) if m > 1 else ())
    for n in range(1, F[0] + 1):
        approx = mu + ((k - 1, n),)
        # normalize: mu's last exponent is > k-1 by CNF shape, so approx is CNF
        if _schreier_member(approx, F):
            return True
    return False


def _chunked(pred_cnf, F: tuple[int, ...], budget: int) -> bool:
    """Can F be cut into at most ``budget`` consecutive chunks, each in S_pred?"""

    n = len(F)

    @lru_cache(maxsize=None)
    def best(i: int) -> int:
        # minimal number of chunks covering F[i:], or a large sentinel
        if i == n:
            return 0
        m = n + 1
        for j in range(i + 1, n + 1):
            if _schreier_member(pred_cnf, F[i:j]):
                sub = best(j)
                if 1 + sub < m:
                    m = 1 + sub
        return m

    return best(0) <= budget


def _pairplus_member(base: RegularFamily, F: tuple[int, ...]) -> bool:
    # F = {n} u B1 u B2 with B1, B2 in base.  Try each n in F and each
    # 2-coloring of the rest; hereditary base lets us demand a partition.
    rest_cache: dict[tuple[int, ...], bool] = {}

    def base_member(S: tuple[int, ...]) -> bool:
        r = rest_cache.get(S)
        if r is None:
            r = _member(base, S)
            rest_cache[S] = r
        return r

    for x in F:
        rest = tuple(y for y in F if y != x)
        if base_member(rest):  # B2 empty
            return True
        k = len(rest)
        # fix rest[0] into B2 to skip the symmetric half of the colorings
        for mask in range(1 << k):
            if k and mask & 1:
                continue
            b1 = tuple(rest[i] for i in range(k) if mask >> i & 1)
            b2 = tuple(rest[i] for i in range(k) if not mask >> i & 1)
            if base_member(b1) and base_member(b2):
                return True
    return False


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def is_member(F: Iterable[int], fam: RegularFamily) -> bool:
    """Exact membership test for a finite set of naturals."""
    return _member(fam, tuple(sorted(set(map(int, F)))))


def is_spread(A: Iterable[int], B: Iterable[int]) -> bool:
    """True iff |A| = |B| and B dominates A elementwise after sorting."""
    a, b = sorted(set(A)), sorted(set(B))
    return len(a) == len(b) and all(x <= y for x, y in zip(a, b))


def is_admissible(blocks: Sequence[Iterable[int]], fam: RegularFamily) -> bool:
    """True iff the blocks are successive and their minima form a member.

    Raises ValueError when the blocks are not successive (max of one block
    must be strictly below the min of the next).
    """
    sets = [sorted(set(map(int, b))) for b in blocks]
    if any(not s for s in sets):
        raise ValueError("blocks must be nonempty")
    for s, t in zip(sets, sets[1:]):
        if s[-1] >= t[0]:
            raise ValueError(f"blocks not successive: {s} !< {t}")
    return is_member([s[0] for s in sets], fam)


def chain_compactness_probe(members: Sequence[Iterable[int]], bound: int) -> bool:
    """Necessary-condition witness for compactness at finite scale.

    Returns False iff some listed set is a proper initial segment of another
    listed set, both contained in [1, bound].  (An infinite strictly
    increasing chain would produce such a pair at every finite scale.)
    """
    sets = [tuple(sorted(set(m))) for m in members]
    sets = [s for s in sets if not s or s[-1] <= bound]
    pool = set(sets)
    for s in pool:
        for t in pool:
            if s != t and len(s) < len(t) and t[: len(s)] == s:
                return False
    return True

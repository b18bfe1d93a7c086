"""Valuation oracles (additive, XOS, subadditive), validation, capping and the
frugal XOS-to-additive reduction.

Every valuation knows its owner and is graphical: only edges incident to the
owner can carry value.  Set-function forms (tables and the bundle-containment
rule) are bound to the owner's incident set ``E_i`` when an
:class:`~graphmms.model.Instance` is built, so ``evaluate`` can intersect first.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .model import (
    DPartition,
    Instance,
    InstanceError,
    Multigraph,
    format_rational,
    parse_rational,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def _freeze_weights(w: Mapping) -> dict[int, Fraction]:
    out = {}
    for k, x in w.items():
        q = Fraction(x)
        if q < 0:
            raise InstanceError(f"negative weight {q} on edge {k}")
        out[int(k)] = q
    return out


@dataclass(frozen=True, eq=False)
class AdditiveValuation:
    owner: int
    weights: dict

    kind = "additive"

    def __post_init__(self):
        object.__setattr__(self, "weights", _freeze_weights(self.weights))

    def _key(self):
        return (self.owner, tuple(sorted(self.weights.items())))

    def __eq__(self, other):
        return isinstance(other, AdditiveValuation) and self._key() == other._key()

    def __hash__(self):
        return hash(("add",) + self._key())

    def evaluate(self, s: Iterable[int]) -> Fraction:
        w = self.weights
        return sum((w[e] for e in s if e in w), ZERO)

    def weight(self, e: int) -> Fraction:
        return self.weights.get(e, ZERO)

    def support(self) -> frozenset[int]:
        return frozenset(self.weights)

    def bind(self, incident: frozenset[int]) -> "AdditiveValuation":
        bad = set(self.weights) - incident
        if bad:
            raise InstanceError(
                f"relevance violation: agent {self.owner} values non-incident edges {sorted(bad)}")
        return self


@dataclass(frozen=True, eq=False)
class XOSValuation:
    owner: int
    clauses: tuple

    kind = "xos"

    def __post_init__(self):
        cl = tuple(_freeze_weights(c) for c in self.clauses)
        if not cl:
            raise InstanceError("an XOS valuation needs at least one clause")
        object.__setattr__(self, "clauses", cl)

    def _key(self):
        return (self.owner, tuple(tuple(sorted(c.items())) for c in self.clauses))

    def __eq__(self, other):
        return isinstance(other, XOSValuation) and self._key() == other._key()

    def __hash__(self):
        return hash(("xos",) + self._key())

    def clause_values(self, s: Iterable[int]) -> list[Fraction]:
        s = list(s)
        return [sum((c[e] for e in s if e in c), ZERO) for c in self.clauses]

    def evaluate(self, s: Iterable[int]) -> Fraction:
        return max(self.clause_values(s))

    def best_clause(self, s: Iterable[int]) -> int:
        """Lowest index among clauses attaining v(s)."""
        vals = self.clause_values(s)
        return vals.index(max(vals))

    def support(self) -> frozenset[int]:
        return frozenset().union(*(c.keys() for c in self.clauses))

    def bind(self, incident: frozenset[int]) -> "XOSValuation":
        bad = set(self.support()) - incident
        if bad:
            raise InstanceError(
                f"relevance violation: agent {self.owner} values non-incident edges {sorted(bad)}")
        return self


@dataclass(frozen=True, eq=False)
class SubadditiveValuation:
    """Either an explicit table over subsets of ``ground`` or the
    bundle-containment rule (``inside`` if S contains a bundle, else ``outside``).
    """

    owner: int
    table: dict | None = None
    bundles: tuple | None = None
    inside: Fraction = ONE
    outside: Fraction = Fraction(1, 2)
    ground: frozenset | None = None

    kind = "subadditive"

    def __post_init__(self):
        if (self.table is None) == (self.bundles is None):
            raise InstanceError("subadditive valuation needs exactly one of table or rule")
        if self.table is not None:
            tbl = {}
            for k, x in self.table.items():
                q = Fraction(x)
                if q < 0:
                    raise InstanceError("negative table value")
                tbl[frozenset(k)] = q
            object.__setattr__(self, "table", tbl)
        else:
            object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))
            object.__setattr__(self, "inside", Fraction(self.inside))
            object.__setattr__(self, "outside", Fraction(self.outside))
        if self.ground is not None:
            object.__setattr__(self, "ground", frozenset(self.ground))

    @property
    def is_rule(self) -> bool:
        return self.bundles is not None

    def _key(self):
        if self.is_rule:
            body = ("rule", tuple(sorted(tuple(sorted(b)) for b in self.bundles)),
                    self.inside, self.outside)
        else:
            body = ("table", tuple(sorted((tuple(sorted(k)), x) for k, x in self.table.items())))
        g = None if self.ground is None else tuple(sorted(self.ground))
        return (self.owner, body, g)

    def __eq__(self, other):
        return isinstance(other, SubadditiveValuation) and self._key() == other._key()

    def __hash__(self):
        return hash(("sub",) + self._key())

    def _restrict(self, s: Iterable[int]) -> frozenset[int]:
        s = frozenset(s)
        if self.ground is not None:
            return s & self.ground
        if self.is_rule:
            return s & frozenset().union(*self.bundles)
        return s & frozenset().union(*self.table)

    def evaluate(self, s: Iterable[int]) -> Fraction:
        r = self._restrict(s)
        if self.is_rule:
            if not r:
                return ZERO
            return self.inside if any(b <= r for b in self.bundles) else self.outside
        try:
            return self.table[r]
        except KeyError:
            raise InstanceError(f"table of agent {self.owner} has no entry for {sorted(r)}") from None

    def support(self) -> frozenset[int]:
        if self.ground is not None:
            return self.ground
        if self.is_rule:
            return frozenset().union(*self.bundles)
        return frozenset().union(*self.table)

    def bind(self, incident: frozenset[int]) -> "SubadditiveValuation":
        keys = frozenset().union(*self.bundles) if self.is_rule else frozenset().union(*self.table)
        bad = keys - incident
        if bad:
            raise InstanceError(
                f"relevance violation: agent {self.owner} values non-incident edges {sorted(bad)}")
        if self.ground is not None:
            if not self.ground <= incident:
                raise InstanceError(
                    f"relevance violation: agent {self.owner} ground set leaves E_i")
            return self
        return replace(self, ground=incident)


@dataclass(frozen=True, eq=False)
class CappedValuation:
    """``min(1, v(S)/mu)`` for an XOS (or additive) base valuation.

    The cap is evaluated lazily.  ``supporting_clause`` exhibits, for any S, an
    additive function below the capped valuation everywhere and equal to it on S,
    which is what XOS-representability amounts to.
    """

    base: object
    mu: Fraction

    kind = "capped"

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.mu <= 0:
            raise InstanceError("degenerate MMS, cannot normalize")

    @property
    def owner(self) -> int:
        return self.base.owner

    def __eq__(self, other):
        return isinstance(other, CappedValuation) and (self.base, self.mu) == (other.base, other.mu)

    def __hash__(self):
        return hash(("cap", self.base, self.mu))

    def evaluate(self, s: Iterable[int]) -> Fraction:
        return min(ONE, self.base.evaluate(s) / self.mu)

    def supporting_clause(self, s: Iterable[int]) -> dict[int, Fraction]:
        s = frozenset(s)
        base = as_xos(self.base)
        k = base.best_clause(s)
        a = {e: w / self.mu for e, w in base.clauses[k].items() if e in s and w}
        total = sum(a.values(), ZERO)
        if total <= 1:
            return a
        return {e: w / total for e, w in a.items()}

    def support(self) -> frozenset[int]:
        return self.base.support()

    def bind(self, incident: frozenset[int]) -> "CappedValuation":
        self.base.bind(incident)
        return self


Valuation = AdditiveValuation | XOSValuation | SubadditiveValuation | CappedValuation


def evaluate(v, s: Iterable[int]) -> Fraction:
    return v.evaluate(s)


def as_xos(v) -> XOSValuation:
    if isinstance(v, XOSValuation):
        return v
    if isinstance(v, AdditiveValuation):
        return XOSValuation(v.owner, (dict(v.weights),))
    raise InstanceError(f"agent {v.owner}: {v.kind} valuation is not XOS")


def as_table(v, ground: Iterable[int] | None = None) -> SubadditiveValuation:
    """Materialize any valuation as a subadditive table over ``ground``."""
    g = sorted(ground if ground is not None else v.support())
    tbl = {}
    for r in range(len(g) + 1):
        for c in combinations(g, r):
            tbl[frozenset(c)] = v.evaluate(c)
    return SubadditiveValuation(v.owner, table=tbl, ground=frozenset(g))


# --------------------------------------------------------------------------
# JSON

def _weights_json(w: Mapping[int, Fraction]) -> dict:
    return {str(k): format_rational(x) for k, x in sorted(w.items())}


def valuation_to_json(v) -> dict:
    if isinstance(v, AdditiveValuation):
        return {"type": "additive", "weights": _weights_json(v.weights)}
    if isinstance(v, XOSValuation):
        return {"type": "xos", "clauses": [_weights_json(c) for c in v.clauses]}
    if isinstance(v, SubadditiveValuation):
        if v.is_rule:
            return {"type": "subadditive", "rule": "bundle-containment",
                    "bundles": [sorted(b) for b in v.bundles],
                    "inside": format_rational(v.inside), "outside": format_rational(v.outside)}
        return {"type": "subadditive",
                "table": {",".join(map(str, sorted(k))): format_rational(x)
                          for k, x in v.table.items()}}
    raise InstanceError(f"cannot serialize {type(v).__name__}")


def _parse_weights(d) -> dict:
    if not isinstance(d, dict):
        raise InstanceError("weights must be an object")
    try:
        return {int(k): parse_rational(x) for k, x in d.items()}
    except ValueError as exc:
        raise InstanceError(f"bad edge key in weights: {exc}") from exc


def valuation_from_json(owner: int, data: dict):
    if not isinstance(data, dict):
        raise InstanceError("valuation must be an object")
    t = data.get("type")
    if t == "additive":
        return AdditiveValuation(owner, _parse_weights(data.get("weights", {})))
    if t == "xos":
        clauses = data.get("clauses")
        if not isinstance(clauses, list):
            raise InstanceError("xos valuation needs a clause list")
        return XOSValuation(owner, tuple(_parse_weights(c) for c in clauses))
    if t == "subadditive":
        if "table" in data:
            tbl = {}
            for k, x in data["table"].items():
                key = frozenset(int(p) for p in k.split(",")) if k else frozenset()
                tbl[key] = parse_rational(x)
            return SubadditiveValuation(owner, table=tbl)
        if data.get("rule") == "bundle-containment":
            return SubadditiveValuation(
                owner, bundles=tuple(frozenset(b) for b in data["bundles"]),
                inside=parse_rational(data.get("inside", 1)),
                outside=parse_rational(data.get("outside", "1/2")))
        raise InstanceError(f"unknown subadditive encoding {sorted(data)}")
    raise InstanceError(f"unknown valuation type {t!r}")


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class ValidationReport:
    status: str  # "ok" | "violation" | "unchecked"
    message: str = ""
    witness: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def validate_valuation(v, g: Multigraph, cap: int = 14) -> ValidationReport:
    """Check relevance, normalization, monotonicity and (for set functions)
    subadditivity, reporting the first violation found."""
    inc = g.incident_edges(v.owner)
    try:
        v.bind(inc)
    except InstanceError as exc:
        return ValidationReport("violation", str(exc))
    if isinstance(v, (AdditiveValuation, XOSValuation)):
        # nonnegative clause weights make both classes valid by construction
        return ValidationReport("ok")
    ground = sorted(inc)
    k = len(ground)
    if isinstance(v, SubadditiveValuation) and v.is_rule:
        if v.inside < v.outside or v.outside < 0:
            return ValidationReport("violation", "rule needs 0 <= outside <= inside")
        if v.inside <= 2 * v.outside:
            # any two nonempty sets already sum to at least inside
            return ValidationReport("ok")
    if k > cap:
        return ValidationReport("unchecked", f"unchecked: size ({k} relevant edges > cap {cap})")
    bound = v.bind(inc) if isinstance(v, SubadditiveValuation) else v
    tbl = []
    try:
        for mask in range(1 << k):
            tbl.append(bound.evaluate([ground[j] for j in range(k) if mask >> j & 1]))
    except InstanceError as exc:
        return ValidationReport("violation", str(exc))
    if tbl[0] != 0:
        return ValidationReport("violation", "v(empty) must be 0", ((),))
    names = lambda m: tuple(ground[j] for j in range(k) if m >> j & 1)  # noqa: E731
    for mask in range(1 << k):
        for j in range(k):
            if not mask >> j & 1 and tbl[mask] > tbl[mask | 1 << j]:
                return ValidationReport("violation", "monotonicity",
                                        (names(mask), names(mask | 1 << j)))
    # with monotonicity in hand, disjoint pairs suffice for subadditivity
    full = (1 << k) - 1
    for s in range(1, 1 << k):
        rest = full & ~s
        t = rest
        while t:
            if t > s and tbl[s] + tbl[t] < tbl[s | t]:
                return ValidationReport("violation", "subadditivity", (names(s), names(t)))
            t = (t - 1) & rest
    return ValidationReport("ok")


# --------------------------------------------------------------------------
# normalization and the frugal reduction

def normalize_capped(v, partition: DPartition) -> CappedValuation:
    mu = min(v.evaluate(p) for p in partition.parts) if partition.parts else ZERO
    if mu <= 0:
        raise InstanceError("degenerate MMS, cannot normalize")
    if isinstance(v, CappedValuation):
        v = v.base if v.mu == 1 else v
    return CappedValuation(v, mu)


@dataclass(frozen=True)
class FrugalReduction:
    instance: Instance  # additive, every positive-MMS agent values each part at 1
    canon: tuple  # tuple[DPartition, ...]
    clause: dict = field(default_factory=dict)  # (i, t) -> chosen clause index
    mu: tuple = ()  # original mu_i^d


def frugal_reduce(inst: Instance, d: int, canon: Sequence[DPartition] | None = None
                  ) -> FrugalReduction:
    """Additive instance whose value for an edge in part t is the maximizing
    clause of that part, rescaled so the part is worth exactly 1.

    Rescaling per part is the supporting clause of the capped valuation
    ``min(1, v/mu)``, so inputs need not be normalized beforehand.  Agents with
    ``mu = 0`` get the zero valuation.
    """
    from .oracle import compute_mms

    if canon is None:
        canon = tuple(compute_mms(inst, i, d).canonical for i in range(1, inst.n + 1))
    canon = tuple(canon)
    vals, choice, mus = [], {}, []
    for i in range(1, inst.n + 1):
        v = inst.valuation(i)
        if isinstance(v, CappedValuation):
            v = v.base
        x = as_xos(v)
        part = canon[i - 1]
        mu = min(x.evaluate(p) for p in part.parts)
        mus.append(mu)
        w: dict[int, Fraction] = {}
        if mu > 0:
            for t, p in enumerate(part.parts):
                k = x.best_clause(p)
                choice[(i, t)] = k
                c = x.clauses[k]
                tot = sum((c.get(e, ZERO) for e in p), ZERO)
                for e in sorted(p):
                    if c.get(e, ZERO):
                        w[e] = c[e] / tot
        vals.append(AdditiveValuation(i, w))
    red = Instance(inst.graph, tuple(vals), dict(inst.meta))
    return FrugalReduction(red, canon, choice, tuple(mus))


def xos_from_additive_bundles(inst: Instance, canon: Sequence[DPartition]) -> Instance:
    vals = []
    for i in range(1, inst.n + 1):
        v = inst.valuation(i)
        if not isinstance(v, AdditiveValuation):
            raise InstanceError(f"agent {i} is not additive")
        clauses = tuple({e: v.weight(e) for e in sorted(p) if v.weight(e)}
                        for p in canon[i - 1].parts) or ({},)
        vals.append(XOSValuation(i, clauses))
    return Instance(inst.graph, tuple(vals), dict(inst.meta))

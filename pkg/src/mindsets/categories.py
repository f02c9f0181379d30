"""Finite time category, intelligence objects, and functors between them.

Objects of the time category are step indices 0..n with exactly one arrow
i -> j when i <= j. A trace induces a functor into intelligence objects:
each step yields the triple of role carriers evaluated at that snapshot,
and each arrow yields the map that follows tuples which stay in scope the
whole way (tuples that leave scope drop out of the map's domain). Mimicry
functors relate two such intelligence categories through per-role tuple
maps; validation demands totality on the source carriers and commutation
with time evolution. All law checking is extensional, so every report can
name the object or triple that broke.
"""

from __future__ import annotations

from dataclasses import dataclass

from .evolution import Trace
from .universe import ConstructionError, ElementId, StructureRelation, carrier_at

__all__ = [
    "FUNCTOR_ROLES",
    "TimeMorphism",
    "TimeCategoryDescriptor",
    "time_category",
    "IntelligenceObject",
    "IntelligenceMorphism",
    "identity_morphism",
    "compose_morphisms",
    "TimeFunctor",
    "functor_from_trace",
    "IntelligenceCategory",
    "intelligence_category",
    "MimicryError",
    "MimicryFunctor",
    "mimicry_functor",
    "identity_functor",
    "compose_functors",
    "LawFailure",
    "LawReport",
    "check_functor_laws",
]

FUNCTOR_ROLES = ("input", "processing", "output")

Tuple_ = tuple[ElementId, ...]
Carrier = frozenset[Tuple_]
MapPairs = tuple[tuple[Tuple_, Tuple_], ...]


@dataclass(frozen=True, eq=True)
class TimeMorphism:
    """The unique arrow from step `source` to step `target`, source <= target."""

    source: int
    target: int


@dataclass(frozen=True, eq=True)
class TimeCategoryDescriptor:
    """Steps 0..n with hom(i, j) a singleton iff i <= j, empty otherwise."""

    n: int

    def objects(self) -> range:
        return range(self.n + 1)

    def _check(self, i: int) -> None:
        if not (0 <= i <= self.n):
            raise ConstructionError(f"object {i} outside 0..{self.n}")

    def hom(self, i: int, j: int) -> tuple[TimeMorphism, ...]:
        self._check(i)
        self._check(j)
        if i <= j:
            return (TimeMorphism(i, j),)
        return ()

    def identity(self, i: int) -> TimeMorphism:
        self._check(i)
        return TimeMorphism(i, i)

    def compose(self, first: TimeMorphism, second: TimeMorphism) -> TimeMorphism:
        """Arrow for `first` followed by `second`; endpoints must chain."""
        self._check(first.source)
        self._check(second.target)
        if first.target != second.source:
            raise ConstructionError(
                f"arrows do not chain: {first.source}->{first.target} "
                f"then {second.source}->{second.target}"
            )
        return TimeMorphism(first.source, second.target)


def time_category(n: int) -> TimeCategoryDescriptor:
    if n < 0:
        raise ConstructionError("object count bound must be >= 0")
    return TimeCategoryDescriptor(n=n)


@dataclass(frozen=True, eq=True)
class IntelligenceObject:
    """Role carriers frozen at one step: the (input, processing, output) triple."""

    step: int
    input_carrier: Carrier
    processing_carrier: Carrier
    output_carrier: Carrier

    def carrier(self, role: str) -> Carrier:
        if role == "input":
            return self.input_carrier
        if role == "processing":
            return self.processing_carrier
        if role == "output":
            return self.output_carrier
        raise ConstructionError(f"unknown role {role!r}")


@dataclass(frozen=True, eq=True)
class IntelligenceMorphism:
    """Extensional per-role tuple maps between two intelligence objects.

    Map domains may be proper subsets of the source carriers: a tuple with
    no surviving image is simply absent. Pairs are kept sorted so equality
    is extensional.
    """

    source: IntelligenceObject
    target: IntelligenceObject
    input_map: MapPairs
    processing_map: MapPairs
    output_map: MapPairs

    def component(self, role: str) -> dict[Tuple_, Tuple_]:
        if role == "input":
            return dict(self.input_map)
        if role == "processing":
            return dict(self.processing_map)
        if role == "output":
            return dict(self.output_map)
        raise ConstructionError(f"unknown role {role!r}")


def _pack(mapping: dict[Tuple_, Tuple_]) -> MapPairs:
    return tuple(sorted(mapping.items()))


def _make_morphism(
    source: IntelligenceObject,
    target: IntelligenceObject,
    maps: dict[str, dict[Tuple_, Tuple_]],
) -> IntelligenceMorphism:
    for role in FUNCTOR_ROLES:
        src, dst = source.carrier(role), target.carrier(role)
        for x, y in maps[role].items():
            if x not in src or y not in dst:
                raise ConstructionError(
                    f"{role} map pair {x} -> {y} leaves the carriers"
                )
    return IntelligenceMorphism(
        source=source,
        target=target,
        input_map=_pack(maps["input"]),
        processing_map=_pack(maps["processing"]),
        output_map=_pack(maps["output"]),
    )


def identity_morphism(obj: IntelligenceObject) -> IntelligenceMorphism:
    return _make_morphism(
        obj, obj, {role: {x: x for x in obj.carrier(role)} for role in FUNCTOR_ROLES}
    )


def compose_morphisms(
    first: IntelligenceMorphism, second: IntelligenceMorphism
) -> IntelligenceMorphism:
    """`first` followed by `second`; composition of partial maps."""
    if first.target != second.source:
        raise ConstructionError("morphisms do not chain")
    maps: dict[str, dict[Tuple_, Tuple_]] = {}
    for role in FUNCTOR_ROLES:
        f, g = first.component(role), second.component(role)
        maps[role] = {x: g[y] for x, y in f.items() if y in g}
    return _make_morphism(first.source, second.target, maps)


@dataclass(frozen=True, eq=True)
class TimeFunctor:
    """Tables sending step i to an object and arrow (i, j) to a morphism."""

    n: int
    objects: tuple[IntelligenceObject, ...]
    morphism_table: tuple[tuple[tuple[int, int], IntelligenceMorphism], ...]

    def table(self) -> dict[tuple[int, int], IntelligenceMorphism]:
        return dict(self.morphism_table)

    def object_at(self, i: int) -> IntelligenceObject:
        return self.objects[i]

    def morphism(self, i: int, j: int) -> IntelligenceMorphism:
        for key, m in self.morphism_table:
            if key == (i, j):
                return m
        raise KeyError((i, j))


def _role_declarations(t: Trace) -> dict[str, StructureRelation]:
    by_role = t.declarations_by_role()
    picked: dict[str, StructureRelation] = {}
    for role in FUNCTOR_ROLES:
        found = by_role.get(role, [])
        if len(found) != 1:
            raise ConstructionError(
                f"trace must declare exactly one {role} structure, found {len(found)}"
            )
        picked[role] = found[0]
    return picked


def functor_from_trace(t: Trace) -> TimeFunctor:
    """Build the step-indexed functor a trace induces.

    Morphisms follow tuples that stay in scope through every intermediate
    snapshot; everything else drops out of the domain, and the table is
    closed under composition by construction.
    """
    decls = _role_declarations(t)
    n = t.n_steps
    objects = tuple(
        IntelligenceObject(
            step=i,
            input_carrier=carrier_at(decls["input"], t.snapshots[i]),
            processing_carrier=carrier_at(decls["processing"], t.snapshots[i]),
            output_carrier=carrier_at(decls["output"], t.snapshots[i]),
        )
        for i in range(n + 1)
    )

    table: dict[tuple[int, int], IntelligenceMorphism] = {}
    for i in range(n + 1):
        table[(i, i)] = identity_morphism(objects[i])
    steps = [
        _make_morphism(
            objects[j],
            objects[j + 1],
            {
                role: {
                    x: x
                    for x in objects[j].carrier(role)
                    if x in objects[j + 1].carrier(role)
                }
                for role in FUNCTOR_ROLES
            },
        )
        for j in range(n)
    ]
    for span in range(1, n + 1):
        for i in range(n + 1 - span):
            j = i + span
            table[(i, j)] = compose_morphisms(table[(i, j - 1)], steps[j - 1])

    return TimeFunctor(
        n=n, objects=objects, morphism_table=tuple(sorted(table.items()))
    )


@dataclass(frozen=True, eq=True)
class IntelligenceCategory:
    """The finite category a time functor carves out: its objects and arrows."""

    objects: tuple[IntelligenceObject, ...]
    morphism_table: tuple[tuple[tuple[int, int], IntelligenceMorphism], ...]

    def table(self) -> dict[tuple[int, int], IntelligenceMorphism]:
        return dict(self.morphism_table)


def intelligence_category(f: TimeFunctor) -> IntelligenceCategory:
    return IntelligenceCategory(objects=f.objects, morphism_table=f.morphism_table)


class MimicryError(ConstructionError):
    """A mimicry candidate fails validation; carries the breaking case."""

    def __init__(self, message: str, counterexample: tuple | None = None):
        if counterexample is not None:
            message = f"{message} (counterexample: {counterexample})"
        super().__init__(message)
        self.counterexample = counterexample


@dataclass(frozen=True, eq=True)
class MimicryFunctor:
    """Structure-preserving map from one intelligence category into another.

    ``object_map[i]`` names the target object imitating source object i; the
    three component tables translate carrier tuples role by role. Arrows map
    to the target's own arrows between the mapped endpoints.
    """

    source: IntelligenceCategory
    target: IntelligenceCategory
    object_map: tuple[int, ...]
    input_component: MapPairs
    processing_component: MapPairs
    output_component: MapPairs

    def component(self, role: str) -> dict[Tuple_, Tuple_]:
        if role == "input":
            return dict(self.input_component)
        if role == "processing":
            return dict(self.processing_component)
        if role == "output":
            return dict(self.output_component)
        raise ConstructionError(f"unknown role {role!r}")

    def morphism_for(self, i: int, j: int) -> IntelligenceMorphism:
        key = (self.object_map[i], self.object_map[j])
        return self.target.table()[key]


def mimicry_functor(
    source: IntelligenceCategory,
    target: IntelligenceCategory,
    object_map: tuple[int, ...] | list[int],
    components: dict[str, dict[Tuple_, Tuple_]],
) -> MimicryFunctor:
    """Validate and build a mimicry functor.

    Checks, in order: all three component maps present; object map total,
    in range, and monotone; components total on every source carrier and
    landing in the mapped object's carrier of the same role; commutation
    with time evolution (a tuple that survives from i to j in the source
    must have an image surviving from o(i) to o(j) in the target, and the
    two paths around the square must agree).
    """
    for role in FUNCTOR_ROLES:
        if role not in components:
            raise MimicryError(f"missing component map for role {role!r}")

    o = tuple(object_map)
    if len(o) != len(source.objects):
        raise MimicryError(
            f"object map covers {len(o)} objects, source has {len(source.objects)}"
        )
    for i, oi in enumerate(o):
        if not (0 <= oi < len(target.objects)):
            raise MimicryError(
                "object map leaves the target", counterexample=(i, oi)
            )
    for i in range(len(o) - 1):
        if o[i] > o[i + 1]:
            raise MimicryError(
                "object map is not monotone", counterexample=(i, i + 1)
            )

    for i, obj in enumerate(source.objects):
        for role in FUNCTOR_ROLES:
            comp = components[role]
            target_carrier = target.objects[o[i]].carrier(role)
            for x in sorted(obj.carrier(role)):
                if x not in comp:
                    raise MimicryError(
                        f"{role} component undefined on a source tuple",
                        counterexample=(i, role, x),
                    )
                if comp[x] not in target_carrier:
                    raise MimicryError(
                        f"image tuple outside target {role} carrier",
                        counterexample=(i, role, x, comp[x]),
                    )

    src_table = source.table()
    tgt_table = target.table()
    for (i, j), src_m in sorted(src_table.items()):
        key = (o[i], o[j])
        if key not in tgt_table:
            raise MimicryError(
                "target category lacks the mapped arrow", counterexample=(i, j)
            )
        tgt_m = tgt_table[key]
        for role in FUNCTOR_ROLES:
            comp = components[role]
            tgt_map = tgt_m.component(role)
            for x, y in sorted(src_m.component(role).items()):
                if comp[x] not in tgt_map:
                    raise MimicryError(
                        f"{role} image does not survive in the target",
                        counterexample=(i, j, role, x),
                    )
                if tgt_map[comp[x]] != comp[y]:
                    raise MimicryError(
                        f"{role} square does not commute",
                        counterexample=(i, j, role, x),
                    )

    return MimicryFunctor(
        source=source,
        target=target,
        object_map=o,
        input_component=_pack(components["input"]),
        processing_component=_pack(components["processing"]),
        output_component=_pack(components["output"]),
    )


def identity_functor(cat: IntelligenceCategory) -> MimicryFunctor:
    components = {
        role: {x: x for obj in cat.objects for x in obj.carrier(role)}
        for role in FUNCTOR_ROLES
    }
    return mimicry_functor(cat, cat, tuple(range(len(cat.objects))), components)


def compose_functors(first, second):
    """Diagrammatic composition: apply `first`, then `second`.

    A time functor composed with a mimicry functor yields a time functor
    into the mimicry's target; two mimicry functors compose into one. The
    categories must actually meet in the middle; nothing is reordered.
    """
    if isinstance(first, TimeFunctor) and isinstance(second, MimicryFunctor):
        if intelligence_category(first) != second.source:
            raise ConstructionError(
                "functor composition mismatch: first functor's image is not "
                "the second functor's source category"
            )
        o = second.object_map
        objects = tuple(second.target.objects[o[i]] for i in range(first.n + 1))
        tgt_table = second.target.table()
        table = {
            (i, j): tgt_table[(o[i], o[j])]
            for i in range(first.n + 1)
            for j in range(i, first.n + 1)
        }
        return TimeFunctor(
            n=first.n, objects=objects, morphism_table=tuple(sorted(table.items()))
        )
    if isinstance(first, MimicryFunctor) and isinstance(second, MimicryFunctor):
        if first.target != second.source:
            raise ConstructionError(
                "functor composition mismatch: first functor's target is not "
                "the second functor's source category"
            )
        o = tuple(second.object_map[i] for i in first.object_map)
        components = {}
        for role in FUNCTOR_ROLES:
            f, g = first.component(role), second.component(role)
            components[role] = {x: g[y] for x, y in f.items() if y in g}
        return mimicry_functor(first.source, second.target, o, components)
    raise ConstructionError(
        "cannot compose: expected time-then-mimicry or mimicry-then-mimicry"
    )


@dataclass(frozen=True, eq=True)
class LawFailure:
    law: str  # "identity", "composition", or "gap"
    at: tuple[int, ...]
    detail: str


@dataclass(frozen=True, eq=True)
class LawReport:
    objects_checked: int
    triples_checked: int
    failures: tuple[LawFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _check_time_functor_laws(f: TimeFunctor) -> LawReport:
    table = f.table()
    failures: list[LawFailure] = []
    n = f.n

    for i in range(n + 1):
        key = (i, i)
        if key not in table:
            failures.append(LawFailure("gap", key, "missing identity entry"))
            continue
        if table[key] != identity_morphism(f.objects[i]):
            failures.append(
                LawFailure("identity", (i,), f"table entry at {key} is not the identity")
            )

    triples = 0
    for i in range(n + 1):
        for j in range(i, n + 1):
            if (i, j) not in table:
                failures.append(LawFailure("gap", (i, j), "missing morphism entry"))
                continue
            m = table[(i, j)]
            if m.source != f.objects[i] or m.target != f.objects[j]:
                failures.append(
                    LawFailure("gap", (i, j), "table entry has wrong endpoints")
                )
    for i in range(n + 1):
        for j in range(i, n + 1):
            if (i, j) not in table:
                continue
            for k in range(j, n + 1):
                if (j, k) not in table or (i, k) not in table:
                    continue
                triples += 1
                expected = compose_morphisms(table[(i, j)], table[(j, k)])
                if expected != table[(i, k)]:
                    failures.append(
                        LawFailure(
                            "composition",
                            (i, j, k),
                            "composite of the two legs differs from the table entry",
                        )
                    )
    return LawReport(
        objects_checked=n + 1, triples_checked=triples, failures=tuple(failures)
    )


def _check_mimicry_laws(g: MimicryFunctor) -> LawReport:
    src_table = g.source.table()
    tgt_table = g.target.table()
    o = g.object_map
    failures: list[LawFailure] = []

    for i in range(len(g.source.objects)):
        key = (o[i], o[i])
        if key not in tgt_table:
            failures.append(LawFailure("gap", (i,), "target lacks mapped identity"))
            continue
        if tgt_table[key] != identity_morphism(g.target.objects[o[i]]):
            failures.append(
                LawFailure("identity", (i,), "mapped identity is not an identity")
            )

    triples = 0
    indices = range(len(g.source.objects))
    for i in indices:
        for j in range(i, len(g.source.objects)):
            if (i, j) not in src_table:
                failures.append(LawFailure("gap", (i, j), "missing source morphism"))
    for i in indices:
        for j in range(i, len(g.source.objects)):
            for k in range(j, len(g.source.objects)):
                keys = [(o[i], o[j]), (o[j], o[k]), (o[i], o[k])]
                if any(key not in tgt_table for key in keys):
                    failures.append(
                        LawFailure("gap", (i, j, k), "target table gap on mapped triple")
                    )
                    continue
                triples += 1
                expected = compose_morphisms(tgt_table[keys[0]], tgt_table[keys[1]])
                if expected != tgt_table[keys[2]]:
                    failures.append(
                        LawFailure(
                            "composition",
                            (i, j, k),
                            "mapped composite differs from mapped arrow",
                        )
                    )
    return LawReport(
        objects_checked=len(g.source.objects),
        triples_checked=triples,
        failures=tuple(failures),
    )


def check_functor_laws(f) -> LawReport:
    """Extensional identity and composition sweep; gaps are failures too."""
    if isinstance(f, TimeFunctor):
        return _check_time_functor_laws(f)
    if isinstance(f, MimicryFunctor):
        return _check_mimicry_laws(f)
    raise ConstructionError("law check expects a time or mimicry functor")

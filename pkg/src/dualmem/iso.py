"""The definable-isomorphism construction and its certificates.

``build_witness`` realizes the witness predicate constructively: the unique
candidate map on the membership closure below x matches each element to the
e2 element whose members are exactly the images of its members, bottom-up.
``global_isomorphism`` runs the same matching across the whole domain,
ordinals and levels first, and returns either a re-checkable bijection or a
structured account of which elements have no partner.

The collapse oracle (hf module) is consulted only for diagnostics and
cross-checks, never by the construction itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import hf
from .errors import CycleError, DualMemError, LevelExtensionError, NonExtensionalError
from .structure import DualStructure, MembershipRelation


def transitive_closure(rel: MembershipRelation, x: int, include_self: bool = False) -> frozenset[int]:
    """Least set containing x's members (and x itself when asked) closed under members."""
    if not (0 <= x < rel.domain_size):
        raise DualMemError(f"element {x} outside domain of size {rel.domain_size}")
    seen: set[int] = set()
    queue = list(rel.members(x))
    while queue:
        t = queue.pop()
        if t not in seen:
            seen.add(t)
            queue.extend(rel.members(t))
    if include_self:
        seen.add(x)
    return frozenset(seen)


def reachable_postorder(rel: MembershipRelation, x: int, tag: int | None = None) -> list[int]:
    """Members-first order of the part reachable from (and including) x.

    Raises CycleError when that part has a membership cycle; cycles elsewhere
    in the relation are not consulted.
    """
    ms = rel.member_sets()
    state: dict[int, int] = {x: 1}
    path = [x]
    order: list[int] = []
    stack: list[tuple[int, list[int]]] = [(x, sorted(ms[x]))]
    while stack:
        node, rest = stack[-1]
        if rest:
            child = rest.pop(0)
            if state.get(child) == 1:
                i = path.index(child)
                raise CycleError(tuple(path[i:] + [child]), tag)
            if child not in state:
                state[child] = 1
                path.append(child)
                stack.append((child, sorted(ms[child])))
        else:
            order.append(node)
            state[node] = 2
            path.pop()
            stack.pop()
    return order


def check_acyclic_below(rel: MembershipRelation, x: int, tag: int | None = None):
    """Raise CycleError when the part reachable from x has a membership cycle."""
    reachable_postorder(rel, x, tag)


@dataclass(frozen=True)
class MatchWitness:
    """The witness map for a matched pair.

    Its domain is exactly the e1 closure below-and-including x, it maps onto
    the e2 closure below-and-including y, it preserves membership in both
    directions, and it sends x to y. Each condition is independently
    checkable via witness_conditions.
    """

    x: int
    y: int
    pairs: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __call__(self, t: int) -> int:
        return self.as_dict()[t]


def _candidate_map(s: DualStructure, x: int) -> dict[int, int] | None:
    """The unique possible witness map below x, or None when matching fails.

    Matching fails when some required image set is not the member-set of
    exactly one e2 element, or when the map comes out non-injective (which on
    an extensional e1 cannot happen).
    """
    key = ("witness-map", x)
    if key in s._derived:
        return s._derived[key]
    ms1 = s.e1.member_sets()
    index2 = s.e2.extension_index()
    f: dict[int, int] = {}
    result: dict[int, int] | None = {}
    for t in reachable_postorder(s.e1, x, tag=1):
        hits = index2.get(frozenset(f[m] for m in ms1[t]))
        if hits is None or len(hits) != 1:
            result = None
            break
        f[t] = hits[0]
    if result is not None:
        result = f if len(set(f.values())) == len(f) else None
    s._derived[key] = result
    return result


def build_witness(s: DualStructure, x: int, y: int) -> MatchWitness | None:
    """The unique witness for (x, y) when one exists; None when matching fails.

    Cycles below x (in e1) or below y (in e2) are errors, distinct from
    absence: the witness predicate presupposes well-founded closures.
    """
    check_acyclic_below(s.e2, y, tag=2)
    f = _candidate_map(s, x)
    if f is None or f[x] != y:
        return None
    return MatchWitness(x, y, tuple(sorted(f.items())))


def matches(s: DualStructure, x: int, y: int) -> bool:
    """The matched-pair relation: some witness exists for (x, y)."""
    return build_witness(s, x, y) is not None


def witness_conditions(s: DualStructure, x: int, y: int, f: dict[int, int]) -> dict[str, bool]:
    """Check each witness condition for an arbitrary candidate map.

    This is the brute-force side of the uniqueness property: it never calls
    the construction.
    """
    tc1 = transitive_closure(s.e1, x, include_self=True)
    tc2 = transitive_closure(s.e2, y, include_self=True)
    domain_ok = set(f) == set(tc1)
    into = domain_ok and all(f[t] in tc2 for t in tc1)
    onto = domain_ok and {f[t] for t in tc1} == set(tc2)
    preserves = domain_ok and all(
        s.contains(1, t, w) == s.contains(2, f[t], f[w]) for t in tc1 for w in tc1
    )
    return {
        "domain": domain_ok,
        "into-closure": into,
        "onto-closure": onto,
        "preserves-membership": preserves,
        "maps-top": domain_ok and f.get(x) == y,
    }


def is_witness(s: DualStructure, x: int, y: int, f: dict[int, int]) -> bool:
    return all(witness_conditions(s, x, y, f).values())


# -- ordinals and levels ---------------------------------------------------------

def _is_transitive_set(rel: MembershipRelation, x: int) -> bool:
    ms = rel.member_sets()
    return all(ms[t] <= ms[x] for t in ms[x])


def is_ordinal(rel: MembershipRelation, x: int) -> bool:
    """A transitive element all of whose members are transitive."""
    ms = rel.member_sets()
    return _is_transitive_set(rel, x) and all(_is_transitive_set(rel, t) for t in ms[x])


def ordinals(rel: MembershipRelation) -> tuple[int, ...]:
    """All ordinal elements, by position (member count), ids breaking ties."""
    ms = rel.member_sets()
    found = [x for x in range(rel.domain_size) if is_ordinal(rel, x)]
    return tuple(sorted(found, key=lambda x: (len(ms[x]), x)))


@dataclass(frozen=True)
class InternalLevel:
    """The cumulative level indexed by an ordinal element, inside one relation."""

    tag: int
    ordinal: int
    element: int | None
    extension: frozenset[int]


def internal_level(s: DualStructure, tag: int, alpha: int) -> InternalLevel:
    """Iterate the internal power set along alpha's position.

    The extension is always computed; the element realizing it may be absent.
    """
    rel = s.relation(tag)
    if not is_ordinal(rel, alpha):
        raise DualMemError(f"element {alpha} is not an ordinal of e{tag}")
    ms = rel.member_sets()
    extension: frozenset[int] = frozenset()
    for _ in range(len(ms[alpha])):
        extension = frozenset(x for x in range(rel.domain_size) if ms[x] <= extension)
    element = rel.realizer(extension)
    return InternalLevel(tag, alpha, element, extension)


def extend_to_level(s: DualStructure, w: MatchWitness) -> MatchWitness:
    """Extend an ordinal-pair witness to the witness for the matching level pair.

    Mirrors the successor construction: each element of the level maps to the
    e2 element collecting exactly the images of its members. Raises
    LevelExtensionError naming the ordinal whose level is missing, the element
    whose image set is unrealized, or a top-level mismatch; the caller checks
    containment against the original witness.
    """
    if not is_ordinal(s.e1, w.x):
        raise DualMemError(f"element {w.x} is not an ordinal of e1")
    if not is_ordinal(s.e2, w.y):
        raise DualMemError(f"element {w.y} is not an ordinal of e2")
    lev1 = internal_level(s, 1, w.x)
    if lev1.element is None:
        raise LevelExtensionError("missing-level", w.x, 1)
    lev2 = internal_level(s, 2, w.y)
    if lev2.element is None:
        raise LevelExtensionError("missing-level", w.y, 2)
    ms1 = s.e1.member_sets()
    index2 = s.e2.extension_index()
    extended: dict[int, int] = {}
    for u in reachable_postorder(s.e1, lev1.element, tag=1):
        image = frozenset(extended[m] for m in ms1[u])
        hits = index2.get(image)
        if hits is None or len(hits) != 1:
            raise LevelExtensionError("unrealized-image", u, 2)
        extended[u] = hits[0]
    if extended[lev1.element] != lev2.element:
        raise LevelExtensionError("level-mismatch", lev1.element, 2)
    return MatchWitness(lev1.element, lev2.element, tuple(sorted(extended.items())))


def restriction_agrees(w: MatchWitness, wider: MatchWitness) -> bool:
    """Containment of the ordinal witness in the level witness, below its top.

    The top point itself outranks the level for positions >= 3 (its rank
    equals the level index), so literal containment is checked only where the
    domains can overlap.
    """
    extended = wider.as_dict()
    for t, ft in w.pairs:
        if t == w.x and t not in extended:
            continue
        if extended.get(t) != ft:
            return False
    return True


# -- the global map ----------------------------------------------------------------

@dataclass(frozen=True)
class IsoCertificate:
    """A total bijection h with a e1 b iff h(a) e2 h(b), plus match provenance."""

    mapping: tuple[int, ...]
    provenance: tuple[int, ...]  # rank at which each pair was added

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def as_permutation_images(self) -> tuple[int, ...]:
        return self.mapping


@dataclass(frozen=True)
class FailureDiagnostic:
    """Which side(s) of the matched-pair relation fail to cover the domain."""

    case: str  # both-directions-fail | e1-element-unmatched | e2-element-unmatched
    unmatched_e1: tuple[tuple[int, str], ...]  # (element, collapse rendering)
    unmatched_e2: tuple[tuple[int, str], ...]


def global_isomorphism(s: DualStructure) -> IsoCertificate | FailureDiagnostic:
    """Match ordinals, extend along levels, then read the map off the whole domain.

    Requires both relations acyclic and extensional (typed errors otherwise).
    Returns a certificate exactly when the matching is total and onto;
    otherwise a diagnostic whose witnesses are re-checkable and carry their
    collapse renderings.
    """
    for tag in (1, 2):
        rel = s.relation(tag)
        cycle = rel.find_cycle()
        if cycle is not None:
            raise CycleError(cycle, tag)
        dupes = rel.duplicate_extensions()
        if dupes:
            raise NonExtensionalError((dupes[0][0], dupes[0][1]), tag)

    # Ordinal pairs first, then their levels: the faithful construction order.
    on1, on2 = ordinals(s.e1), ordinals(s.e2)
    for alpha, y in zip(on1, on2):
        w = build_witness(s, alpha, y)
        if w is None:
            break
        lev1 = internal_level(s, 1, alpha)
        lev2 = internal_level(s, 2, y)
        if lev1.element is not None and lev2.element is not None:
            try:
                extend_to_level(s, w)
            except LevelExtensionError:
                break

    ms1 = s.e1.member_sets()
    index2 = s.e2.extension_index()
    partner: list[int | None] = [None] * s.domain_size
    for x in s.e1.toposort():
        if all(partner[m] is not None for m in ms1[x]):
            hits = index2.get(frozenset(partner[m] for m in ms1[x]))
            if hits is not None and len(hits) == 1:
                partner[x] = hits[0]

    matched2 = {y for y in partner if y is not None}
    unmatched1 = [x for x in range(s.domain_size) if partner[x] is None]
    unmatched2 = [y for y in range(s.domain_size) if y not in matched2]
    if not unmatched1 and not unmatched2:
        return IsoCertificate(tuple(partner), s.e1.ranks())

    if unmatched1 and unmatched2:
        case = "both-directions-fail"
    elif unmatched2:
        case = "e2-element-unmatched"
    else:
        case = "e1-element-unmatched"
    ranks1, ranks2 = s.e1.ranks(), s.e2.ranks()
    witness1 = tuple(
        (x, hf.render_hf(hf.collapse(s.e1, x, tag=1)))
        for x in sorted(unmatched1, key=lambda x: (ranks1[x], x))
    )
    witness2 = tuple(
        (y, hf.render_hf(hf.collapse(s.e2, y, tag=2)))
        for y in sorted(unmatched2, key=lambda y: (ranks2[y], y))
    )
    return FailureDiagnostic(case, witness1, witness2)


def verify_certificate(s: DualStructure, cert: IsoCertificate) -> bool:
    """Re-check a certificate from the definitions only.

    h must be a bijection on the domain with the image of every member-set
    under h equal to the member-set of the image; on a bijection this is
    equivalent to edge preservation over all pairs.
    """
    h = cert.mapping
    n = s.domain_size
    if len(h) != n or sorted(h) != list(range(n)):
        return False
    ms1 = s.e1.member_sets()
    ms2 = s.e2.member_sets()
    return all(frozenset(h[a] for a in ms1[b]) == ms2[h[b]] for b in range(n))


# -- text formats ------------------------------------------------------------------

def render_certificate(cert: IsoCertificate) -> str:
    lines = [f"iso {len(cert.mapping)}"]
    lines.extend(f"map {x} {y}" for x, y in enumerate(cert.mapping))
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> IsoCertificate:
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or not lines[0].startswith("iso "):
        raise DualMemError("certificate must start with an 'iso <N>' header")
    n = int(lines[0].split()[1])
    mapping: list[int | None] = [None] * n
    for line in lines[1:]:
        tok = line.split()
        if len(tok) != 3 or tok[0] != "map":
            raise DualMemError(f"bad certificate line: {line!r}")
        mapping[int(tok[1])] = int(tok[2])
    if any(v is None for v in mapping):
        raise DualMemError("certificate does not cover the domain")
    return IsoCertificate(tuple(mapping), tuple(0 for _ in mapping))


def render_diagnostic(diag: FailureDiagnostic) -> str:
    lines = [f"fail {diag.case}"]
    lines.extend(f"unmatched e1 {x} collapse {r}" for x, r in diag.unmatched_e1)
    lines.extend(f"unmatched e2 {y} collapse {r}" for y, r in diag.unmatched_e2)
    return "\n".join(lines) + "\n"

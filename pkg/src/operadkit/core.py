"""Free colored non-symmetric operads on explicit tree monomials.

Basis elements are planar rooted trees whose internal vertices carry named
generators and whose edges carry colors; composition is grafting, subject to
the color-matching rule (a graft with mismatched colors is zero, not an
error).  Everything is exact over the rationals and immutable, and grafting
of monomials always has coefficient +1: Koszul signs live entirely in the
derivation calculus and in evaluation on chain complexes.

A tree with zero vertices (a bare strand) is the operadic identity 1_c of
its color; it is a legitimate monomial and shows up, for instance, as the
constant term of differentials like d(f_1) = g_0 f_0 - 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product


class UnboundedEnumerationError(ValueError):
    """The requested basis component is infinite without a vertex cutoff."""


@dataclass(frozen=True)
class Signature:
    """Output color plus the ordered input colors of an operation."""

    output: str
    inputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if len(self.inputs) < 1:
            raise ValueError("arity must be >= 1")

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def __str__(self):
        return f"({self.output}; {','.join(self.inputs)})"


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    signature: Signature
    degree: int


class GeneratorSet:
    """A declared color set together with named generators."""

    def __init__(self, colors, generators):
        self.colors = tuple(colors)
        self._specs = {}
        self._by_output = {c: [] for c in self.colors}
        for g in generators:
            if g.name in self._specs:
                raise ValueError(f"duplicate generator name {g.name!r}")
            if g.signature.output not in self._by_output:
                raise ValueError(f"undeclared color {g.signature.output!r} in {g.name}")
            for c in g.signature.inputs:
                if c not in self._by_output:
                    raise ValueError(f"undeclared color {c!r} in {g.name}")
            self._specs[g.name] = g
            self._by_output[g.signature.output].append(g)

    @property
    def generators(self):
        return list(self._specs.values())

    def names(self):
        return list(self._specs)

    def spec(self, name: str) -> GeneratorSpec:
        try:
            return self._specs[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def __contains__(self, name):
        return name in self._specs

    def by_output(self, color):
        return self._by_output.get(color, [])

    def restricted(self, keep) -> "GeneratorSet":
        keep = set(keep)
        return GeneratorSet(self.colors, [g for g in self.generators if g.name in keep])

    def extended(self, extra) -> "GeneratorSet":
        return GeneratorSet(self.colors, self.generators + list(extra))


# A tree shape is a nested structure: a leaf is its color (a str), an
# internal vertex is a tuple (generator_name, child, ..., child).


def _shape_walk(shape, path=()):
    """Yield (path, generator_name, children) for vertices in planar preorder."""
    if isinstance(shape, str):
        return
    name = shape[0]
    children = shape[1:]
    yield path, name, children
    for i, child in enumerate(children):
        yield from _shape_walk(child, path + (i,))


def _plug_leaves(shape, pieces, counter):
    """Replace the leaves of `shape` (planar order) by the given subshapes."""
    if isinstance(shape, str):
        piece = pieces[counter[0]]
        counter[0] += 1
        return piece
    return (shape[0],) + tuple(_plug_leaves(c, pieces, counter) for c in shape[1:])


def _replace_at(shape, path, new_subshape):
    if not path:
        return new_subshape
    i = path[0]
    children = list(shape[1:])
    children[i] = _replace_at(children[i], path[1:], new_subshape)
    return (shape[0],) + tuple(children)


class TreeMonomial:
    """A planar rooted tree with generator-labeled vertices and colored edges.

    Construction validates the color rule (each child subtree's output color
    equals the matching input color of its parent's generator) and caches
    signature, degree and vertex count.
    """

    __slots__ = ("gens", "shape", "signature", "degree", "nvertices", "_key")

    def __init__(self, gens: GeneratorSet, shape):
        out, leaves, degree, nvert = _validate_shape(gens, shape)
        self.gens = gens
        self.shape = shape
        self.signature = Signature(out, tuple(leaves))
        self.degree = degree
        self.nvertices = nvert
        self._key = None

    @classmethod
    def identity(cls, gens: GeneratorSet, color: str) -> "TreeMonomial":
        return cls(gens, color)

    @classmethod
    def generator(cls, gens: GeneratorSet, name: str) -> "TreeMonomial":
        spec = gens.spec(name)
        return cls(gens, (name,) + tuple(spec.signature.inputs))

    @property
    def arity(self) -> int:
        return self.signature.arity

    def is_identity(self) -> bool:
        return isinstance(self.shape, str)

    def vertices(self):
        return _shape_walk(self.shape)

    def vertex_names(self):
        return [name for _, name, _ in _shape_walk(self.shape)]

    @property
    def sort_key(self):
        if self._key is None:
            self._key = (self.nvertices, _render(self.shape, [1], leaf_mark="~"))
        return self._key

    def canonical(self) -> str:
        """Unique text form: `gen(child,...)` with leaves as `@i:Color`."""
        return _render(self.shape, [1], leaf_mark="@")

    def compact(self) -> str:
        return _render_compact(self.shape, [1])

    def __eq__(self, other):
        if not isinstance(other, TreeMonomial):
            return NotImplemented
        return self.shape == other.shape and self.signature == other.signature

    def __hash__(self):
        return hash((self.shape, self.signature))

    def __repr__(self):
        return f"TreeMonomial({self.canonical()})"

    def replace_leaf(self, slot: int, inner: "TreeMonomial") -> "TreeMonomial":
        """Graft `inner` into 1-based leaf position `slot` (colors unchecked here)."""
        pieces = {slot - 1: inner.shape}
        shape = _graft_shape(self.shape, pieces, [0])
        return TreeMonomial(self.gens, shape)


def _graft_shape(shape, pieces, counter):
    if isinstance(shape, str):
        i = counter[0]
        counter[0] += 1
        return pieces.get(i, shape)
    return (shape[0],) + tuple(_graft_shape(c, pieces, counter) for c in shape[1:])


def _validate_shape(gens, shape):
    if isinstance(shape, str):
        if shape not in gens.colors:
            raise ValueError(f"undeclared color {shape!r}")
        return shape, [shape], 0, 0
    name = shape[0]
    spec = gens.spec(name)
    children = shape[1:]
    if len(children) != spec.signature.arity:
        raise ValueError(f"{name} has arity {spec.signature.arity}, got {len(children)} children")
    leaves = []
    degree = spec.degree
    nvert = 1
    for child, want in zip(children, spec.signature.inputs):
        out, sub_leaves, d, v = _validate_shape(gens, child)
        if out != want:
            raise ValueError(f"color mismatch under {name}: {out} into a {want} slot")
        leaves.extend(sub_leaves)
        degree += d
        nvert += v
    return spec.signature.output, leaves, degree, nvert


def shape_degree(gens, shape) -> int:
    if isinstance(shape, str):
        return 0
    return gens.spec(shape[0]).degree + sum(shape_degree(gens, c) for c in shape[1:])


def leaf_suffix_degrees(gens, shape):
    """For each leaf (planar order), the total degree of the vertices that
    come after it in the preorder of `shape`.

    These are the orientation weights: moving a graded block past those
    vertices to restore preorder costs the corresponding Koszul sign.
    """
    events = []

    def walk(s):
        if isinstance(s, str):
            events.append((True, 0))
            return
        events.append((False, gens.spec(s[0]).degree))
        for c in s[1:]:
            walk(c)

    walk(shape)
    suffix = 0
    out = []
    for is_leaf, d in reversed(events):
        if is_leaf:
            out.append(suffix)
        else:
            suffix += d
    out.reverse()
    return out


def graft_oriented(outer: TreeMonomial, slot: int, inner: TreeMonomial) -> OperadElement:
    """Koszul-oriented grafting: (-1)^(|inner| * suffix_outer(slot)) * graft.

    This is the composition of the underlying graded operad read in the
    preorder orientation of the planar basis; the plain graft differs from
    it by the orientation sign.
    """
    suffixes = leaf_suffix_degrees(outer.gens, outer.shape)
    sign = -1 if (inner.degree * suffixes[slot - 1]) % 2 else 1
    return graft(outer, slot, inner).scale(sign)


def compose_oriented(outer: TreeMonomial, inner_monos) -> OperadElement:
    """Simultaneous Koszul-oriented composition with one monomial per slot."""
    inner_monos = list(inner_monos)
    suffixes = leaf_suffix_degrees(outer.gens, outer.shape)
    reorder = sum(m.degree * s for m, s in zip(inner_monos, suffixes))
    sign = -1 if reorder % 2 else 1
    return compose_full(outer, [OperadElement.monomial(m) for m in inner_monos]).scale(sign)


def _render(shape, counter, leaf_mark):
    if isinstance(shape, str):
        s = f"{leaf_mark}{counter[0]}:{shape}"
        counter[0] += 1
        return s
    parts = [_render(c, counter, leaf_mark) for c in shape[1:]]
    return f"{shape[0]}({','.join(parts)})"


def _render_compact(shape, counter):
    if isinstance(shape, str):
        s = f"@{counter[0]}:{shape}"
        counter[0] += 1
        return s
    if all(isinstance(c, str) for c in shape[1:]):
        counter[0] += len(shape) - 1
        return shape[0]
    parts = [_render_compact(c, counter) for c in shape[1:]]
    return f"{shape[0]}({', '.join(parts)})"


class OperadElement:
    """A finite rational linear combination of tree monomials.

    Homogeneous: every stored monomial shares the element's signature and
    degree.  Zero coefficients are never stored, and two elements are equal
    iff their term maps are equal (every zero element equals every other).
    """

    __slots__ = ("gens", "signature", "degree", "terms")

    def __init__(self, gens, terms, signature=None, degree=None):
        self.gens = gens
        clean = {}
        for mono, coeff in terms.items():
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if signature is None:
                signature = mono.signature
                degree = mono.degree
            elif mono.signature != signature or mono.degree != degree:
                raise ValueError(
                    f"inhomogeneous element: {mono.canonical()} is not in "
                    f"component {signature}, degree {degree}"
                )
            clean[mono] = clean.get(mono, Fraction(0)) + coeff
        self.terms = {m: c for m, c in clean.items() if c != 0}
        self.signature = signature
        self.degree = degree

    @classmethod
    def zero(cls, gens, signature=None, degree=None):
        return cls(gens, {}, signature=signature, degree=degree)

    @classmethod
    def monomial(cls, mono: TreeMonomial, coeff=1):
        return cls(mono.gens, {mono: Fraction(coeff)})

    @classmethod
    def from_generator(cls, gens, name, coeff=1):
        return cls.monomial(TreeMonomial.generator(gens, name), coeff)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        """Term pairs in the fixed display order (largest trees first)."""
        return sorted(self.terms.items(), key=lambda mc: (-mc[0].nvertices, mc[0].sort_key[1]))

    def coeff(self, mono) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def __add__(self, other):
        if not isinstance(other, OperadElement):
            return NotImplemented
        sig, deg = self._merged_component(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return OperadElement(self.gens, terms, signature=sig, degree=deg)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "OperadElement":
        c = Fraction(c)
        return OperadElement(
            self.gens,
            {m: c * v for m, v in self.terms.items()},
            signature=self.signature,
            degree=self.degree,
        )

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, OperadElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"OperadElement({self.text()})"

    def text(self, compact=False) -> str:
        """Render as `coeff * monomial +- ...` in display order."""
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.items():
            body = mono.compact() if compact else mono.canonical()
            if not parts:
                parts.append(f"{coeff} * {body}")
            elif coeff > 0:
                parts.append(f"+ {coeff} * {body}")
            else:
                parts.append(f"- {-coeff} * {body}")
        return " ".join(parts)

    def _merged_component(self, other):
        if self.signature is None or (self.is_zero() and not other.is_zero()):
            return other.signature, other.degree
        if other.signature is None or (other.is_zero() and not self.is_zero()):
            return self.signature, self.degree
        if (self.signature, self.degree) != (other.signature, other.degree):
            if self.is_zero() and other.is_zero():
                return self.signature, self.degree
            raise ValueError("cannot add elements from different components")
        return self.signature, self.degree

    def map_terms(self, f) -> "OperadElement":
        """Linear extension of a monomial map f: TreeMonomial -> OperadElement."""
        out = OperadElement.zero(self.gens)
        for m, c in self.terms.items():
            out = out + f(m).scale(c)
        return out


def graft(outer: TreeMonomial, slot: int, inner: TreeMonomial) -> OperadElement:
    """Graft `inner` into leaf `slot` of `outer` (1-based planar position).

    Color mismatch gives the zero element, matching the colored-composition
    convention; an out-of-range slot is an error.
    """
    if not 1 <= slot <= outer.arity:
        raise ValueError(f"slot {slot} out of range 1..{outer.arity}")
    slot_color = outer.signature.inputs[slot - 1]
    sig = Signature(
        outer.signature.output,
        outer.signature.inputs[: slot - 1] + inner.signature.inputs + outer.signature.inputs[slot:],
    )
    if inner.signature.output != slot_color:
        return OperadElement.zero(outer.gens, sig, outer.degree + inner.degree)
    return OperadElement.monomial(outer.replace_leaf(slot, inner))


def graft_elements(a: OperadElement, slot: int, b: OperadElement) -> OperadElement:
    """Bilinear extension of graft to elements."""
    out = OperadElement.zero(a.gens)
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            out = out + graft(ma, slot, mb).scale(ca * cb)
    return out


def compose_full(outer: TreeMonomial, inners) -> OperadElement:
    """Multilinear simultaneous grafting into all slots of `outer`.

    `inners` holds one homogeneous OperadElement per slot; identity-strand
    monomials act as units (grafting one leaves the slot untouched).  Equals
    iterated graft in any order; no Koszul signs at the monomial level.
    """
    inners = list(inners)
    if len(inners) != outer.arity:
        raise ValueError(f"expected {outer.arity} arguments, got {len(inners)}")
    inputs = []
    mismatch = False
    degree = outer.degree
    for slot_color, elem in zip(outer.signature.inputs, inners):
        if elem.signature is None:
            inputs.append(slot_color)
            continue
        inputs.extend(elem.signature.inputs)
        degree += elem.degree
        if elem.signature.output != slot_color:
            mismatch = True
    sig = Signature(outer.signature.output, tuple(inputs))
    if mismatch:
        return OperadElement.zero(outer.gens, sig, degree)
    terms = {}
    for combo in product(*(list(e.terms.items()) for e in inners)):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        shape = _plug_leaves(outer.shape, [m.shape for m, _ in combo], [0])
        mono = TreeMonomial(outer.gens, shape)
        terms[mono] = terms.get(mono, Fraction(0)) + coeff
    if any(e.is_zero() for e in inners):
        return OperadElement.zero(outer.gens, sig if all(e.signature for e in inners) else None)
    return OperadElement(outer.gens, terms, signature=sig, degree=degree)


def generator_element(gens, name, args=None) -> OperadElement:
    """Convenience: the generator as an element, optionally fully composed."""
    g = TreeMonomial.generator(gens, name)
    if args is None:
        return OperadElement.monomial(g)
    return compose_full(g, args)


# ---------------------------------------------------------------------------
# Basis enumeration


def _needs_cutoff(gens: GeneratorSet) -> bool:
    if any(g.degree < 0 for g in gens.generators):
        return True
    # Directed cycle search in the unary degree-0 color graph.
    edges = {}
    for g in gens.generators:
        if g.degree == 0 and g.signature.arity == 1:
            edges.setdefault(g.signature.inputs[0], set()).add(g.signature.output)
    state = {}
    def visit(c):
        state[c] = 1
        for nxt in edges.get(c, ()):
            if state.get(nxt) == 1:
                return True
            if state.get(nxt) is None and visit(nxt):
                return True
        state[c] = 2
        return False
    return any(state.get(c) is None and visit(c) for c in list(edges))


def enumerate_basis(gens: GeneratorSet, signature: Signature, degree: int, max_vertices=None):
    """All tree monomials in one (signature, degree) component, in canonical order.

    The order is (vertex count, serialization) ascending and is stable across
    runs.  When the component is infinite (degree-0 unary loops, as in the
    iso resolution), a vertex cutoff is required.
    """
    if max_vertices is None:
        if _needs_cutoff(gens):
            raise UnboundedEnumerationError("enumeration requires vertex cutoff")
        shapes = _enum_by_degree(gens, signature.output, tuple(signature.inputs), degree, {})
    else:
        memo = {}
        shapes = [
            s
            for s, d, _ in _enum_by_budget(gens, signature.output, tuple(signature.inputs), max_vertices, memo)
            if d == degree
        ]
    monos = [TreeMonomial(gens, s) for s in set(shapes)]
    monos.sort(key=lambda t: t.sort_key)
    return monos


def _enum_by_degree(gens, color, leaves, degree, memo):
    """Shapes with given output color, leaf colors and degree (no cutoff).

    Only valid when all generator degrees are >= 0 and degree-0 unary
    generators form an acyclic color graph.
    """
    key = (color, leaves, degree)
    if key in memo:
        return memo[key]
    memo[key] = out = []
    if len(leaves) == 1 and leaves[0] == color and degree == 0:
        out.append(color)
    for g in gens.by_output(color):
        if g.degree > degree:
            continue
        k = g.signature.arity
        if k > len(leaves):
            continue
        rem = degree - g.degree
        for blocks in _splits(leaves, k):
            for combo in _child_combos_deg(gens, g.signature.inputs, blocks, rem, memo):
                out.append((g.name,) + combo)
    return out


def _child_combos_deg(gens, in_colors, blocks, rem, memo):
    if not blocks:
        if rem == 0:
            yield ()
        return
    c0, b0 = in_colors[0], blocks[0]
    for d0 in range(rem + 1):
        heads = _enum_by_degree(gens, c0, b0, d0, memo)
        if not heads:
            continue
        for tail in _child_combos_deg(gens, in_colors[1:], blocks[1:], rem - d0, memo):
            for h in heads:
                yield (h,) + tail


def _enum_by_budget(gens, color, leaves, vmax, memo):
    """All (shape, degree, nvertices) with <= vmax vertices."""
    key = (color, leaves, vmax)
    if key in memo:
        return memo[key]
    out = []
    if len(leaves) == 1 and leaves[0] == color:
        out.append((color, 0, 0))
    if vmax > 0:
        for g in gens.by_output(color):
            k = g.signature.arity
            if k > len(leaves):
                continue
            for blocks in _splits(leaves, k):
                for combo, d, v in _child_combos_budget(gens, g.signature.inputs, blocks, vmax - 1, memo):
                    out.append(((g.name,) + combo, d + g.degree, v + 1))
    memo[key] = out
    return out


def _child_combos_budget(gens, in_colors, blocks, budget, memo):
    if not blocks:
        yield (), 0, 0
        return
    for head, hd, hv in _enum_by_budget(gens, in_colors[0], blocks[0], budget, memo):
        for tail, td, tv in _child_combos_budget(gens, in_colors[1:], blocks[1:], budget - hv, memo):
            yield (head,) + tail, hd + td, hv + tv


def _splits(seq, k):
    """Partitions of seq into k consecutive nonempty blocks."""
    n = len(seq)
    if k == 1:
        yield (tuple(seq),)
        return
    for first in range(1, n - k + 2):
        head = tuple(seq[:first])
        for rest in _splits(seq[first:], k - 1):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# The B->W rewriting system (f a_B -> a_W f^{(x)n})


@dataclass(frozen=True)
class BwRelations:
    """Naming data for the relation `f a_B = a_W f^{(x)arity}`.

    `w_of_b` maps each base generator's B-copy name to its W-copy name and
    `f_name` is the unary B->W generator.
    """

    f_name: str
    w_of_b: dict

    @classmethod
    def associative_names(cls, max_arity: int) -> "BwRelations":
        # The mu/nu/f_1 naming used by the associative morphism model.
        return cls("f_1", {f"mu_{k}": f"nu_{k}" for k in range(2, max_arity + 1)})


def normalize_bw(elem: OperadElement, relations: BwRelations) -> OperadElement:
    """Normal form under the confluent rewrite f∘a_B -> a_W∘f^{(x)n}.

    Rewrites until no f sits directly above a B-copy vertex; in the normal
    form every f hangs directly above a leaf.  Coefficients are untouched
    (f has degree 0, so the rewrite carries no sign).
    """
    f, w_of_b = relations.f_name, relations.w_of_b

    def nf(shape):
        if isinstance(shape, str):
            return shape
        children = tuple(nf(c) for c in shape[1:])
        name = shape[0]
        if name == f and not isinstance(children[0], str) and children[0][0] in w_of_b:
            inner = children[0]
            return (w_of_b[inner[0]],) + tuple(nf((f, gc)) for gc in inner[1:])
        return (name,) + children

    out = {}
    for mono, coeff in elem.terms.items():
        new = TreeMonomial(elem.gens, nf(mono.shape))
        out[new] = out.get(new, Fraction(0)) + coeff
    return OperadElement(elem.gens, out, signature=elem.signature, degree=elem.degree)


# ---------------------------------------------------------------------------
# Text and JSON round-trip forms

_LEAF_RE = re.compile(r"@(\d+):([A-Za-z_][A-Za-z0-9_]*)")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def parse_tree(text: str, gens: GeneratorSet) -> TreeMonomial:
    shape, pos = _parse_shape(text.strip(), 0)
    if pos != len(text.strip()):
        raise ValueError(f"trailing input in tree text at {pos}: {text!r}")
    return TreeMonomial(gens, shape)


def _parse_shape(s, pos):
    m = _LEAF_RE.match(s, pos)
    if m:
        return m.group(2), m.end()
    m = _NAME_RE.match(s, pos)
    if not m:
        raise ValueError(f"expected generator or leaf at {pos} in {s!r}")
    name = m.group(0)
    pos = m.end()
    if pos >= len(s) or s[pos] != "(":
        raise ValueError(f"expected '(' after {name} at {pos}")
    pos += 1
    children = []
    while True:
        child, pos = _parse_shape(s, pos)
        children.append(child)
        if pos < len(s) and s[pos] == ",":
            pos += 1
            continue
        if pos < len(s) and s[pos] == ")":
            return (name,) + tuple(children), pos + 1
        raise ValueError(f"expected ',' or ')' at {pos} in {s!r}")


def parse_element(text: str, gens: GeneratorSet, signature=None, degree=None) -> OperadElement:
    text = text.strip()
    if text == "0":
        return OperadElement.zero(gens, signature, degree)
    terms = {}
    for sign, coeff_s, mono_s in _split_terms(text):
        coeff = Fraction(coeff_s) * sign
        mono = parse_tree(mono_s, gens)
        terms[mono] = terms.get(mono, Fraction(0)) + coeff
    return OperadElement(gens, terms, signature=signature, degree=degree)


def _split_terms(text):
    # Terms look like `c * tree` joined by ` + ` / ` - `.
    chunks = re.split(r"\s([+-])\s", text)
    signs = [1]
    for s in chunks[1::2]:
        signs.append(1 if s == "+" else -1)
    for sign, chunk in zip(signs, chunks[::2]):
        coeff_s, _, mono_s = chunk.partition("*")
        yield sign, coeff_s.strip(), mono_s.strip()


def tree_to_json(mono: TreeMonomial):
    counter = [1]

    def enc(shape):
        if isinstance(shape, str):
            i = counter[0]
            counter[0] += 1
            return {"leaf": i, "color": shape}
        return {"gen": shape[0], "children": [enc(c) for c in shape[1:]]}

    return enc(mono.shape)


def tree_from_json(obj, gens: GeneratorSet) -> TreeMonomial:
    def dec(o):
        if "leaf" in o:
            return o["color"]
        return (o["gen"],) + tuple(dec(c) for c in o["children"])

    return TreeMonomial(gens, dec(obj))


def element_to_json(elem: OperadElement):
    return {
        "terms": [
            {"coeff": str(c), "tree": tree_to_json(m)} for m, c in elem.items()
        ],
        "signature": None
        if elem.signature is None
        else {"output": elem.signature.output, "inputs": list(elem.signature.inputs)},
        "degree": elem.degree,
    }


def element_from_json(obj, gens: GeneratorSet) -> OperadElement:
    sig = None
    if obj.get("signature"):
        sig = Signature(obj["signature"]["output"], tuple(obj["signature"]["inputs"]))
    terms = {}
    for t in obj["terms"]:
        mono = tree_from_json(t["tree"], gens)
        terms[mono] = terms.get(mono, Fraction(0)) + Fraction(t["coeff"])
    return OperadElement(gens, terms, signature=sig, degree=obj.get("degree"))

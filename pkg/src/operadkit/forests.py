"""Forest monomials: ordered tensor words of trees, and polarizations.

A forest is a tuple of tree monomials read left to right; its signature
concatenates the component signatures (several outputs, several inputs).
Composition of forests is componentwise grafting times the Koszul
interchange sign: the blocks of the inner forest move left past the later
components of the outer one.  These are the words ⟨h⟩, ⟨f•⟩, ... that the
polarization identities multiply.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import factorial

from .core import GeneratorSet, OperadElement, TreeMonomial, compose_full, leaf_suffix_degrees
from .differentials import DerivationDifferential, extend_derivation
from .reports import Report


class ForestMonomial:
    """An ordered tuple of tree monomials over one generator set."""

    __slots__ = ("gens", "components", "outputs", "inputs", "degree", "nvertices", "_key")

    def __init__(self, gens: GeneratorSet, components):
        self.gens = gens
        self.components = tuple(components)
        if not self.components:
            raise ValueError("forest needs at least one component")
        self.outputs = tuple(t.signature.output for t in self.components)
        inputs = []
        for t in self.components:
            inputs.extend(t.signature.inputs)
        self.inputs = tuple(inputs)
        self.degree = sum(t.degree for t in self.components)
        self.nvertices = sum(t.nvertices for t in self.components)
        self._key = None

    @property
    def width(self) -> int:
        return len(self.components)

    @property
    def sort_key(self):
        if self._key is None:
            self._key = (self.nvertices, tuple(t.sort_key[1] for t in self.components))
        return self._key

    def text(self, compact=True) -> str:
        return " (x) ".join(t.compact() if compact else t.canonical() for t in self.components)

    def __eq__(self, other):
        if not isinstance(other, ForestMonomial):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"ForestMonomial({self.text()})"


class ForestElement:
    """Rational combination of forest monomials, homogeneous per component shape."""

    __slots__ = ("gens", "terms", "outputs", "inputs", "degree")

    def __init__(self, gens, terms, outputs=None, inputs=None, degree=None):
        self.gens = gens
        clean = {}
        for mono, coeff in terms.items():
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if outputs is None:
                outputs, inputs, degree = mono.outputs, mono.inputs, mono.degree
            elif (mono.outputs, mono.inputs, mono.degree) != (outputs, inputs, degree):
                raise ValueError(f"inhomogeneous forest term {mono.text()}")
            clean[mono] = clean.get(mono, Fraction(0)) + coeff
        self.terms = {m: c for m, c in clean.items() if c != 0}
        self.outputs = outputs
        self.inputs = inputs
        self.degree = degree

    @classmethod
    def zero(cls, gens, outputs=None, inputs=None, degree=None):
        return cls(gens, {}, outputs, inputs, degree)

    @classmethod
    def monomial(cls, mono: ForestMonomial, coeff=1):
        return cls(mono.gens, {mono: Fraction(coeff)})

    @classmethod
    def word(cls, gens, trees, coeff=1):
        return cls.monomial(ForestMonomial(gens, trees), coeff)

    @classmethod
    def identity(cls, gens, colors):
        return cls.word(gens, [TreeMonomial.identity(gens, c) for c in colors])

    def is_zero(self):
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key)

    def __add__(self, other):
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        out_meta = self if self.terms or other.outputs is None else other
        return ForestElement(self.gens, terms, out_meta.outputs, out_meta.inputs, out_meta.degree)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return ForestElement(
            self.gens, {m: c * v for m, v in self.terms.items()}, self.outputs, self.inputs, self.degree
        )

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ForestElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.items():
            piece = f"{coeff} * {mono.text()}"
            parts.append(piece if not parts else (f"+ {piece}" if coeff > 0 else f"- {-coeff} * {mono.text()}"))
        return " ".join(parts)

    def __repr__(self):
        return f"ForestElement({self.text()})"


def tensor_forests(a: ForestElement, b: ForestElement) -> ForestElement:
    """Juxtaposition a (x) b; bilinear, no sign (plain basis concatenation)."""
    terms = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            m = ForestMonomial(a.gens, ma.components + mb.components)
            terms[m] = terms.get(m, Fraction(0)) + ca * cb
    return ForestElement(a.gens, terms)


def _compose_monomials(outer: ForestMonomial, inner: ForestMonomial):
    """Oriented composition of two forest monomials; None on color mismatch."""
    blocks = []
    pos = 0
    for t in outer.components:
        k = t.arity
        blocks.append(inner.components[pos : pos + k])
        pos += k
    if pos != inner.width:
        raise ValueError(f"width mismatch: outer wants {pos} inner components, got {inner.width}")
    # Interchange: inner block i moves left past outer components after i.
    sign = 0
    outer_deg_after = 0
    for i in range(outer.width - 1, -1, -1):
        block_deg = sum(t.degree for t in blocks[i])
        sign += block_deg * outer_deg_after
        outer_deg_after += outer.components[i].degree
    new_components = []
    coeff = Fraction(-1 if sign % 2 else 1)
    for t, block in zip(outer.components, blocks):
        for leaf_color, b in zip(t.signature.inputs, block):
            if b.signature.output != leaf_color:
                return None
        suffixes = leaf_suffix_degrees(t.gens, t.shape)
        reorder = sum(b.degree * s for b, s in zip(block, suffixes))
        if reorder % 2:
            coeff = -coeff
        composed = compose_full(t, [OperadElement.monomial(b) for b in block])
        ((mono, c),) = composed.terms.items()
        coeff *= c
        new_components.append(mono)
    return ForestMonomial(outer.gens, new_components), coeff


def compose_forests(outer: ForestElement, inner: ForestElement) -> ForestElement:
    """Bilinear oriented composition; color mismatches contribute zero."""
    terms = {}
    for mo, co in outer.terms.items():
        for mi, ci in inner.terms.items():
            res = _compose_monomials(mo, mi)
            if res is None:
                continue
            mono, extra = res
            terms[mono] = terms.get(mono, Fraction(0)) + co * ci * extra
    return ForestElement(outer.gens, terms)


def forest_differential(diff: DerivationDifferential, elem: ForestElement) -> ForestElement:
    """Componentwise derivation with the component-prefix Koszul signs."""
    out_terms = {}
    for mono, coeff in elem.terms.items():
        prefix = 0
        for i, t in enumerate(mono.components):
            dt = extend_derivation(diff, OperadElement.monomial(t))
            sign = -1 if prefix % 2 else 1
            for new_tree, c in dt.terms.items():
                comps = list(mono.components)
                comps[i] = new_tree
                m = ForestMonomial(mono.gens, comps)
                out_terms[m] = out_terms.get(m, Fraction(0)) + coeff * c * sign
            prefix += t.degree
    deg = None if elem.degree is None else elem.degree - 1
    return ForestElement(elem.gens, out_terms, elem.outputs, elem.inputs, deg)


def conjugate_forest(elem: ForestElement, perm) -> ForestElement:
    """Permute inputs and outputs simultaneously: component i moves to slot perm[i].

    Carries the Koszul sign of reordering the graded components, e.g.
    (a (x) b) -> (-1)^(|a||b|) (b (x) a) for the transposition.
    """
    terms = {}
    for mono, coeff in elem.terms.items():
        degs = [t.degree for t in mono.components]
        new = [None] * mono.width
        for i, t in enumerate(mono.components):
            new[perm[i]] = t
        sign = 0
        for i in range(mono.width):
            for j in range(i + 1, mono.width):
                if perm[i] > perm[j]:
                    sign += degs[i] * degs[j]
        m = ForestMonomial(mono.gens, new)
        terms[m] = terms.get(m, Fraction(0)) + coeff * (-1 if sign % 2 else 1)
    return ForestElement(elem.gens, terms)


def symmetrize_forest(elem: ForestElement) -> ForestElement:
    """Average over all simultaneous slot permutations (rational coefficients)."""
    if elem.is_zero():
        return elem
    width = next(iter(elem.terms)).width
    total = ForestElement.zero(elem.gens)
    for perm in permutations(range(width)):
        total = total + conjugate_forest(elem, perm)
    return total.scale(Fraction(1, factorial(width)))


# ---------------------------------------------------------------------------
# Polarizations


def build_dull_operad() -> DerivationDifferential:
    """Two parallel maps with a homotopy: p, q (degree 0) and h (degree 1), d(h) = p - q."""
    from .core import GeneratorSpec, Signature

    gens = GeneratorSet(
        ("B", "W"),
        [
            GeneratorSpec("p", Signature("W", ("B",)), 0),
            GeneratorSpec("q", Signature("W", ("B",)), 0),
            GeneratorSpec("h", Signature("W", ("B",)), 1),
        ],
    )
    p = OperadElement.from_generator(gens, "p")
    q = OperadElement.from_generator(gens, "q")
    return DerivationDifferential(gens, {"h": p - q})


def polarization_ns(gens: GeneratorSet, m: int, p="p", q="q", h="h") -> ForestElement:
    """The staircase word h(x)q..q + p(x)h(x)q..q + ... + p..p(x)h."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pt = TreeMonomial.generator(gens, p)
    qt = TreeMonomial.generator(gens, q)
    ht = TreeMonomial.generator(gens, h)
    out = ForestElement.zero(gens)
    for s in range(m):
        word = [pt] * s + [ht] + [qt] * (m - 1 - s)
        out = out + ForestElement.word(gens, word)
    return out


def polarization_sym(gens: GeneratorSet, m: int, p="p", q="q", h="h") -> ForestElement:
    """Symmetrization of the staircase word over simultaneous slot permutations."""
    return symmetrize_forest(polarization_ns(gens, m, p, q, h))


def power_word(gens: GeneratorSet, name: str, m: int) -> ForestElement:
    t = TreeMonomial.generator(gens, name)
    return ForestElement.word(gens, [t] * m)


def _iso_chain(gens, top_family, length, degrees):
    """Unary word of `length` letters alternating f/g families from the top,
    with the given even indices (top to bottom)."""
    fam = top_family
    names = []
    for d in degrees:
        names.append(f"{fam}_{d}")
        fam = "g" if fam == "f" else "f"
    shape = gens.spec(names[-1]).signature.inputs[0]
    for name in reversed(names):
        shape = (name, shape)
    return TreeMonomial(gens, shape)


def _even_tuples(length, max_total):
    """All tuples of even nonnegative integers of given length, sum <= max_total."""
    if length == 0:
        yield ()
        return
    for first in range(0, max_total + 1, 2):
        for rest in _even_tuples(length - 1, max_total - first):
            yield (first,) + rest


def polarization_iso_m2(iso: DerivationDifferential, max_degree: int) -> dict:
    """The width-2 integral polarization of the iso resolution, degree by degree.

    Returns {"f": {deg: ForestElement}, "g": ..., "h": ..., "l": ...}:
      <f> = sum_i f.(g.f.)^i (x) f_{2i}         <g> mirrored,
      <h> = h. (x) 1 + sum_{i>=1} (g.f.)^i (x) f_{2i-1}     <l> mirrored,
    truncated to total degree <= max_degree.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    gens = iso.base if isinstance(iso, DerivationDifferential) else iso
    fams = {k: {} for k in ("f", "g", "h", "l")}

    def put(kind, deg, forest):
        table = fams[kind]
        table[deg] = table.get(deg, ForestElement.zero(gens)) + forest

    max_index = max(
        (int(g.name.split("_")[1]) for g in gens.generators if g.name.startswith(("f_", "g_"))),
        default=-1,
    )
    if max_index < max_degree:
        raise ValueError(
            f"iso resolution truncated at index {max_index}, below requested degree {max_degree}"
        )

    for kind, top, second in (("f", "f", "f"), ("g", "g", "g")):
        other = "g" if top == "f" else "f"
        i = 0
        while 2 * i <= max_degree:
            length = 2 * i + 1
            for degs in _even_tuples(length, max_degree - 2 * i):
                names_ok = all(d <= max_index for d in degs) and 2 * i <= max_index
                if not names_ok:
                    continue
                chain = _iso_chain(gens, top, length, degs)
                pair = TreeMonomial.generator(gens, f"{second}_{2 * i}")
                total = sum(degs) + 2 * i
                put(kind, total, ForestElement.word(gens, [chain, pair]))
            i += 1

    for kind, fam, other in (("h", "f", "g"), ("l", "g", "f")):
        home = "B" if kind == "h" else "W"
        # leading term: odd-index letters tensor the identity strand
        for k in range(1, max_degree + 1, 2):
            if k <= max_index:
                letter = TreeMonomial.generator(gens, f"{fam}_{k}")
                unit = TreeMonomial.identity(gens, home)
                put(kind, k, ForestElement.word(gens, [letter, unit]))
        i = 1
        while 2 * i - 1 <= max_degree:
            length = 2 * i
            for degs in _even_tuples(length, max_degree - (2 * i - 1)):
                if any(d > max_index for d in degs) or 2 * i - 1 > max_index:
                    continue
                chain = _iso_chain(gens, other, length, degs)
                pair = TreeMonomial.generator(gens, f"{fam}_{2 * i - 1}")
                total = sum(degs) + 2 * i - 1
                put(kind, total, ForestElement.word(gens, [chain, pair]))
            i += 1
    return fams


def _component(fam_table, deg, gens):
    return fam_table.get(deg, ForestElement.zero(gens))


def verify_polarization(fams: dict, max_degree: int, iso: DerivationDifferential) -> Report:
    """Check the four coupled differential equations and the degree-0 condition.

    The equations are checked degree by degree: the d of the (t+1)-component
    against the degree-t part of the quadratic right-hand side, for t up to
    max_degree - 1 (the d side needs one degree of headroom).
    """
    gens = iso.base
    report = Report(f"polarization identities through degree {max_degree}")

    f0 = TreeMonomial.generator(gens, "f_0")
    g0 = TreeMonomial.generator(gens, "g_0")
    cond_f = _component(fams["f"], 0, gens) == ForestElement.word(gens, [f0, f0])
    cond_g = _component(fams["g"], 0, gens) == ForestElement.word(gens, [g0, g0])
    report.add("degree-0 parts are f_0^(x)2 and g_0^(x)2", cond_f and cond_g)

    unit_b = ForestElement.identity(gens, ("B", "B"))
    unit_w = ForestElement.identity(gens, ("W", "W"))
    rhs_specs = {
        "f": (("f", "h", 1), ("l", "f", -1), None),
        "h": (("g", "f", 1), ("h", "h", -1), unit_b),
        "g": (("g", "l", 1), ("h", "g", -1), None),
        "l": (("f", "g", 1), ("l", "l", -1), unit_w),
    }
    for kind, (term1, term2, unit) in rhs_specs.items():
        for t in range(0, max_degree):
            lhs = forest_differential(iso, _component(fams[kind], t + 1, gens))
            rhs = ForestElement.zero(gens)
            for a in range(0, t + 1):
                b = t - a
                for left, right, sgn in (term1, term2):
                    prod = compose_forests(
                        _component(fams[left], a, gens), _component(fams[right], b, gens)
                    )
                    rhs = rhs + prod.scale(sgn)
            if unit is not None and t == 0:
                rhs = rhs - unit
            residual = lhs - rhs
            ok = residual.is_zero()
            report.add(
                f"d<{kind}.> equation, degree {t}",
                ok,
                "" if ok else f"residual {residual.text()}",
            )
    return report

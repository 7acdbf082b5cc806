"""Derivation differentials on free colored operads, and the concrete models.

A differential is recorded on generators only and extended to tree monomials
by the signed Leibniz rule: when the derivation acts on a vertex it picks up
(-1)^(sum of the degrees of the generators preceding that vertex in planar
preorder).  This single convention is the only sign locus on the symbolic
side, and squares to zero on every model built here, which is the working
consistency certificate for it.

Model builders cover the associahedron-type operad (structure maps mu_n with
the classical quadratic differential), its two-colored morphism version
(mu, nu, f families), the homotopy-through-homomorphisms operad (p, q, h
families), and the resolution of the two-mutually-inverse-maps operad
(unary f_k, g_k with alternating colors).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import (
    GeneratorSet,
    GeneratorSpec,
    OperadElement,
    Signature,
    TreeMonomial,
    _plug_leaves,
    _replace_at,
    compose_full,
    graft,
    leaf_suffix_degrees,
    shape_degree,
)
from .reports import Report

B, W = "B", "W"


class DerivationDifferential:
    """A degree -1 derivation, given by its generator images."""

    def __init__(self, base: GeneratorSet, images: dict):
        self.base = base
        self.images = {}
        for g in base.generators:
            img = images.get(g.name)
            if img is None or img.is_zero():
                img = OperadElement.zero(base, g.signature, g.degree - 1)
            else:
                if img.signature != g.signature:
                    raise ValueError(f"D({g.name}) lives in {img.signature}, expected {g.signature}")
                if img.degree != g.degree - 1:
                    raise ValueError(f"D({g.name}) has degree {img.degree}, expected {g.degree - 1}")
            self.images[g.name] = img

    def of(self, name: str) -> OperadElement:
        try:
            return self.images[name]
        except KeyError:
            raise KeyError(f"no differential image for generator {name!r}") from None

    def __call__(self, elem: OperadElement) -> OperadElement:
        return extend_derivation(self, elem)

    def generator_names(self):
        return list(self.images)


def extend_derivation(diff: DerivationDifferential, elem: OperadElement) -> OperadElement:
    """Leibniz extension of the generator images to a whole element.

    The derivation visits vertices in planar preorder; hitting vertex v
    costs the sign (-1)^(total degree of the vertices before v).  Splicing
    an image monomial u in place of v carries the additional orientation
    sign prod_i (-1)^(|c_i| * suffix_u(i)), where c_i is the i-th child
    subtree of v and suffix_u(i) is the total degree of u's vertices that
    follow u's i-th leaf in preorder: the child blocks have to move past
    those vertices to restore preorder.  Without this factor no sign
    convention at all makes the quadratic differentials square to zero
    (two root-replacement terms with a pair of odd generators would always
    survive), so D^2 = 0 across the models pins the convention.
    """
    sig = elem.signature
    deg = None if elem.degree is None else elem.degree - 1
    terms = {}
    suffix_cache = {}
    for mono, coeff in elem.terms.items():
        sign = 1
        for path, name, children in mono.vertices():
            spec = diff.base.spec(name)
            image = diff.of(name)
            if not image.is_zero():
                child_degrees = [shape_degree(diff.base, c) for c in children]
                for im_mono, im_coeff in image.terms.items():
                    if im_mono.shape not in suffix_cache:
                        suffix_cache[im_mono.shape] = leaf_suffix_degrees(diff.base, im_mono.shape)
                    suffixes = suffix_cache[im_mono.shape]
                    reorder = sum(d * s for d, s in zip(child_degrees, suffixes))
                    new_sub = _plug_leaves(im_mono.shape, list(children), [0])
                    new_shape = _replace_at(mono.shape, path, new_sub)
                    new_mono = TreeMonomial(diff.base, new_shape)
                    c = coeff * im_coeff * sign * (-1 if reorder % 2 else 1)
                    terms[new_mono] = terms.get(new_mono, Fraction(0)) + c
            if spec.degree % 2:
                sign = -sign
    return OperadElement(diff.base, terms, signature=sig, degree=deg)


@dataclass(frozen=True)
class ModelKind:
    """Which model to build, with its truncation bounds."""

    tag: str  # A_INF | A_INF_BW | HOMOTOPY_BW | ISO_RESOLUTION
    max_arity: int | None = None
    max_index: int | None = None

    TAGS = ("A_INF", "A_INF_BW", "HOMOTOPY_BW", "ISO_RESOLUTION")

    def build(self) -> DerivationDifferential:
        if self.tag == "A_INF":
            return build_ainf(self.max_arity)
        if self.tag == "A_INF_BW":
            return build_ainf_morphism(self.max_arity)
        if self.tag == "HOMOTOPY_BW":
            return build_homotopy_model(self.max_arity)
        if self.tag == "ISO_RESOLUTION":
            return build_iso_resolution(self.max_index)
        raise ValueError(f"unknown model tag {self.tag!r}")


def compositions(n: int, k: int):
    """Ordered tuples of k positive integers summing to n."""
    for cuts in combinations(range(1, n), k - 1):
        prev = 0
        parts = []
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(n - prev)
        yield tuple(parts)


def _gen_elem(gens, name):
    return OperadElement.monomial(TreeMonomial.generator(gens, name))


def _quadratic_sum(gens, family, m: int) -> OperadElement:
    """Sum over i+j = m+1 of (-1)^(i+s(j+1)) family_i(1^s (x) family_j (x) 1^(i-s-1))."""
    out = OperadElement.zero(gens)
    for i in range(2, m):
        j = m + 1 - i
        gi = TreeMonomial.generator(gens, f"{family}_{i}")
        gj = TreeMonomial.generator(gens, f"{family}_{j}")
        for s in range(0, m - j + 1):
            sign = -1 if (i + s * (j + 1)) % 2 else 1
            out = out + graft(gi, s + 1, gj).scale(sign)
    return out


def build_ainf(max_arity: int) -> DerivationDifferential:
    """The minimal structure-map model: generators mu_2..mu_n of degree n-2."""
    if max_arity < 2:
        raise ValueError("max_arity must be >= 2")
    gens = GeneratorSet(
        (B,),
        [GeneratorSpec(f"mu_{k}", Signature(B, (B,) * k), k - 2) for k in range(2, max_arity + 1)],
    )
    images = {f"mu_{m}": _quadratic_sum(gens, "mu", m) for m in range(2, max_arity + 1)}
    return DerivationDifferential(gens, images)


def _morphism_image(gens, m, f_family, mu_family, nu_family) -> OperadElement:
    """The two-colored morphism differential at arity m.

    D(f_m) = - sum_k sum_{r1+..+rk=m} (-1)^(sum_{i<j} r_i (r_j+1)) nu_k(f_{r_1},..,f_{r_k})
             - sum_{i+j=m+1, i>=1, j>=2} (-1)^(i+s(j+1)) f_i(1^s (x) mu_j (x) 1^(i-s-1)).
    """
    out = OperadElement.zero(gens)
    for k in range(2, m + 1):
        nu_k = TreeMonomial.generator(gens, f"{nu_family}_{k}")
        for r in compositions(m, k):
            e = sum(r[i] * (r[j] + 1) for i in range(k) for j in range(i + 1, k))
            word = [_gen_elem(gens, f"{f_family}_{ri}") for ri in r]
            sign = -1 if e % 2 == 0 else 1
            out = out + compose_full(nu_k, word).scale(sign)
    for i in range(1, m):
        j = m + 1 - i
        if j < 2:
            continue
        fi = TreeMonomial.generator(gens, f"{f_family}_{i}")
        gj = TreeMonomial.generator(gens, f"{mu_family}_{j}")
        for s in range(0, m - j + 1):
            sign = -1 if (i + s * (j + 1)) % 2 == 0 else 1
            out = out + graft(fi, s + 1, gj).scale(sign)
    return out


def build_ainf_morphism(max_arity: int) -> DerivationDifferential:
    """Minimal model of the morphism operad: mu_k, nu_k (deg k-2), f_k (deg k-1)."""
    if max_arity < 1:
        raise ValueError("max_arity must be >= 1")
    specs = []
    for k in range(2, max_arity + 1):
        specs.append(GeneratorSpec(f"mu_{k}", Signature(B, (B,) * k), k - 2))
        specs.append(GeneratorSpec(f"nu_{k}", Signature(W, (W,) * k), k - 2))
    for k in range(1, max_arity + 1):
        specs.append(GeneratorSpec(f"f_{k}", Signature(W, (B,) * k), k - 1))
    gens = GeneratorSet((B, W), specs)
    images = {}
    for m in range(2, max_arity + 1):
        images[f"mu_{m}"] = _quadratic_sum(gens, "mu", m)
        images[f"nu_{m}"] = _quadratic_sum(gens, "nu", m)
    for m in range(1, max_arity + 1):
        images[f"f_{m}"] = _morphism_image(gens, m, "f", "mu", "nu")
    return DerivationDifferential(gens, images)


def _homotopy_image(gens, m) -> OperadElement:
    """D(h_m) = p_m - q_m + the signed nu_k(p..p h q..q) sum + the h_i(mu_j) sum."""
    out = _gen_elem(gens, f"p_{m}") - _gen_elem(gens, f"q_{m}")
    for k in range(2, m + 1):
        nu_k = TreeMonomial.generator(gens, f"nu_{k}")
        for r in compositions(m, k):
            base = sum(r[i] * (r[j] + 1) for i in range(k) for j in range(i + 1, k))
            for s in range(0, k):
                # s leading p's, then h at slot s+1, then q's
                eps = base + sum(r[:s]) + k + s
                word = [_gen_elem(gens, f"p_{ri}") for ri in r[:s]]
                word.append(_gen_elem(gens, f"h_{r[s]}"))
                word.extend(_gen_elem(gens, f"q_{ri}") for ri in r[s + 1 :])
                out = out + compose_full(nu_k, word).scale(-1 if eps % 2 else 1)
    for i in range(1, m):
        j = m + 1 - i
        if j < 2:
            continue
        hi = TreeMonomial.generator(gens, f"h_{i}")
        gj = TreeMonomial.generator(gens, f"mu_{j}")
        for s in range(0, m - j + 1):
            out = out + graft(hi, s + 1, gj).scale(-1 if (i + s * (j + 1)) % 2 else 1)
    return out


def build_homotopy_model(max_arity: int) -> DerivationDifferential:
    """The homotopy-through-homomorphisms operad, written on p, q, h families.

    p_k, q_k: B^k -> W of degree k-1 carry the morphism differential; h_k of
    degree k interpolates between them.
    """
    if max_arity < 1:
        raise ValueError("max_arity must be >= 1")
    specs = []
    for k in range(2, max_arity + 1):
        specs.append(GeneratorSpec(f"mu_{k}", Signature(B, (B,) * k), k - 2))
        specs.append(GeneratorSpec(f"nu_{k}", Signature(W, (W,) * k), k - 2))
    for k in range(1, max_arity + 1):
        specs.append(GeneratorSpec(f"p_{k}", Signature(W, (B,) * k), k - 1))
        specs.append(GeneratorSpec(f"q_{k}", Signature(W, (B,) * k), k - 1))
        specs.append(GeneratorSpec(f"h_{k}", Signature(W, (B,) * k), k))
    gens = GeneratorSet((B, W), specs)
    images = {}
    for m in range(2, max_arity + 1):
        images[f"mu_{m}"] = _quadratic_sum(gens, "mu", m)
        images[f"nu_{m}"] = _quadratic_sum(gens, "nu", m)
    for m in range(1, max_arity + 1):
        images[f"p_{m}"] = _morphism_image(gens, m, "p", "mu", "nu")
        images[f"q_{m}"] = _morphism_image(gens, m, "q", "mu", "nu")
        images[f"h_{m}"] = _homotopy_image(gens, m)
    return DerivationDifferential(gens, images)


def iso_generator_specs(max_index: int):
    """f_k: B->W (k even) or B->B (k odd); g_k: W->B (k even) or W->W (k odd)."""
    specs = []
    for k in range(0, max_index + 1):
        f_sig = Signature(W if k % 2 == 0 else B, (B,))
        g_sig = Signature(B if k % 2 == 0 else W, (W,))
        specs.append(GeneratorSpec(f"f_{k}", f_sig, k))
        specs.append(GeneratorSpec(f"g_{k}", g_sig, k))
    return specs


def build_iso_resolution(max_index: int) -> DerivationDifferential:
    """Resolution of the two-mutually-inverse-maps operad, indices 0..max_index."""
    if max_index < 0:
        raise ValueError("max_index must be >= 0")
    gens = GeneratorSet((B, W), iso_generator_specs(max_index))

    def comp(a, b):
        # a after b: the unary word a(b(-)).
        return graft(TreeMonomial.generator(gens, a), 1, TreeMonomial.generator(gens, b))

    def unit(color):
        return OperadElement.monomial(TreeMonomial.identity(gens, color))

    images = {}
    for fam, other, home in (("f", "g", B), ("g", "f", W)):
        images[f"{fam}_0"] = OperadElement.zero(gens)
        if max_index >= 1:
            images[f"{fam}_1"] = comp(f"{other}_0", f"{fam}_0") - unit(home)
        for k in range(2, max_index + 1):
            if k % 2 == 0:
                m = k // 2
                img = OperadElement.zero(gens)
                for i in range(0, m):
                    img = img + comp(f"{fam}_{2 * i}", f"{fam}_{2 * (m - i) - 1}")
                    img = img - comp(f"{other}_{2 * (m - i) - 1}", f"{fam}_{2 * i}")
            else:
                m = (k - 1) // 2
                img = OperadElement.zero(gens)
                for j in range(0, m + 1):
                    img = img + comp(f"{other}_{2 * j}", f"{fam}_{2 * (m - j)}")
                for j in range(0, m):
                    img = img - comp(f"{fam}_{2 * j + 1}", f"{fam}_{2 * (m - j) - 1}")
            images[f"{fam}_{k}"] = img
    return DerivationDifferential(gens, images)


# ---------------------------------------------------------------------------
# Verification


def verify_d_squared(diff: DerivationDifferential, max_arity: int | None = None, max_vertices=None) -> Report:
    """Compute D(D(g)) for every generator (of arity <= max_arity) exactly.

    With max_vertices set, generators whose image monomials exceed the bound
    are skipped and reported as such.
    """
    report = Report("D^2 = 0")
    for g in diff.base.generators:
        if max_arity is not None and g.signature.arity > max_arity:
            continue
        image = diff.of(g.name)
        if max_vertices is not None and any(m.nvertices > max_vertices for m in image.terms):
            report.add(g.name, True, "image exceeds vertex bound", skipped=True)
            continue
        residual = diff(image)
        ok = residual.is_zero()
        report.add(g.name, ok, "" if ok else f"D^2({g.name}) = {residual.text(compact=True)}", residual)
    return report


def verify_minimality(diff: DerivationDifferential) -> Report:
    """Check that every image monomial is decomposable (>= 2 vertices).

    Constant terms (zero vertices, the identity strand) and linear terms
    (a single bare generator) are reported separately.
    """
    report = Report("minimality (decomposable differentials)")
    for g in diff.base.generators:
        bad = []
        for mono, coeff in diff.of(g.name).items():
            if mono.nvertices == 0:
                bad.append(f"constant term {coeff} * {mono.compact()}")
            elif mono.nvertices == 1:
                bad.append(f"linear term {coeff} * {mono.compact()}")
        report.add(g.name, not bad, "; ".join(bad))
    return report


# ---------------------------------------------------------------------------
# Renaming (color copies, theta-substitutions)


def rename_element(elem: OperadElement, target: GeneratorSet, name_map: dict) -> OperadElement:
    """Transport an element along a generator renaming (signatures must agree)."""

    def rename_shape(shape):
        if isinstance(shape, str):
            return shape
        return (name_map.get(shape[0], shape[0]),) + tuple(rename_shape(c) for c in shape[1:])

    terms = {}
    for mono, coeff in elem.terms.items():
        new = TreeMonomial(target, rename_shape(mono.shape))
        terms[new] = terms.get(new, Fraction(0)) + coeff
    return OperadElement(target, terms, signature=elem.signature, degree=elem.degree)


def rename_model(diff: DerivationDifferential, name_map: dict) -> DerivationDifferential:
    specs = [
        GeneratorSpec(name_map.get(g.name, g.name), g.signature, g.degree)
        for g in diff.base.generators
    ]
    gens = GeneratorSet(diff.base.colors, specs)
    images = {
        name_map.get(name, name): rename_element(img, gens, name_map)
        for name, img in diff.images.items()
    }
    return DerivationDifferential(gens, images)

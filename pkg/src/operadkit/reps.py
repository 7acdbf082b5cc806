"""Representations on finite-dimensional rational chain complexes.

A multilinear map is stored as one exact matrix per input multidegree.
Tensor products of maps follow the usual rule
(F (x) G)(x (x) y) = (-1)^(|G||x|) F(x) (x) G(y), the Hom-complex
differential is d(F) = d o F - (-1)^{|F|} F o d_(x), and trees evaluate
bottom-up through these signed compositions.  The conventions interlock
with the symbolic side: evaluating a derivation image equals the
Hom-differential of the evaluated generator whenever the representation
satisfies the generator axioms, and that statement is what the checkers
test, generator by generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import OperadElement, Signature
from .differentials import DerivationDifferential
from .linalg import RationalMatrix, kron_all
from .reports import Report


class ChainComplex:
    """Graded rational vector space with a square-zero degree -1 differential."""

    def __init__(self, dims: dict, d: dict | None = None, color: str | None = None):
        self.color = color
        self.dims = {int(k): int(n) for k, n in dims.items() if n}
        self.d = {}
        for k, mat in (d or {}).items():
            k = int(k)
            if not isinstance(mat, RationalMatrix):
                mat = RationalMatrix(mat)
            expected = (self.dim(k - 1), self.dim(k))
            if (mat.rows, mat.cols) != expected:
                raise ValueError(f"d_{k} has shape {(mat.rows, mat.cols)}, expected {expected}")
            if not mat.is_zero():
                self.d[k] = mat
        for k in self.d:
            if k - 1 in self.d and not self.d[k - 1].mul(self.d[k]).is_zero():
                raise ValueError(f"differential does not square to zero at degree {k}")

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def degrees(self):
        return sorted(self.dims)

    def differential(self, k: int) -> RationalMatrix:
        return self.d.get(k, RationalMatrix.zero(self.dim(k - 1), self.dim(k)))

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def __repr__(self):
        return f"ChainComplex(dims={self.dims}, color={self.color!r})"


class MultilinearMap:
    """Degree-homogeneous map C_1 (x) ... (x) C_n -> T, blocks per multidegree."""

    __slots__ = ("sources", "target", "degree", "blocks")

    def __init__(self, sources, target, degree, blocks=None):
        self.sources = tuple(sources)
        self.target = target
        self.degree = int(degree)
        self.blocks = {}
        for key, mat in (blocks or {}).items():
            key = tuple(int(k) for k in key)
            if not isinstance(mat, RationalMatrix):
                mat = RationalMatrix(mat)
            rows, cols = self.block_shape(key)
            if (mat.rows, mat.cols) != (rows, cols):
                raise ValueError(f"block {key} has shape {(mat.rows, mat.cols)}, expected {(rows, cols)}")
            if rows and cols and not mat.is_zero():
                self.blocks[key] = mat

    @property
    def arity(self):
        return len(self.sources)

    def block_shape(self, key):
        cols = 1
        for c, k in zip(self.sources, key):
            cols *= c.dim(k)
        rows = self.target.dim(sum(key) + self.degree)
        return rows, cols

    def block(self, key) -> RationalMatrix:
        key = tuple(key)
        if key in self.blocks:
            return self.blocks[key]
        rows, cols = self.block_shape(key)
        return RationalMatrix.zero(rows, cols)

    def multidegrees(self):
        """All input multidegrees with nonzero domain and codomain."""
        for key in product(*(c.degrees() for c in self.sources)):
            rows, cols = self.block_shape(key)
            if rows and cols:
                yield key

    def is_zero(self):
        return not self.blocks

    def add(self, other):
        self._check_compatible(other)
        keys = set(self.blocks) | set(other.blocks)
        return MultilinearMap(
            self.sources, self.target, self.degree,
            {k: self.block(k).add(other.block(k)) for k in keys},
        )

    def sub(self, other):
        return self.add(other.scale(-1))

    def scale(self, c):
        return MultilinearMap(
            self.sources, self.target, self.degree,
            {k: m.scale(c) for k, m in self.blocks.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, MultilinearMap):
            return NotImplemented
        return (
            self.degree == other.degree
            and len(self.sources) == len(other.sources)
            and self.blocks == other.blocks
        )

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.blocks))))

    def __repr__(self):
        nz = {k: "..." for k in sorted(self.blocks)}
        return f"MultilinearMap(arity={self.arity}, degree={self.degree}, blocks={nz})"

    def _check_compatible(self, other):
        if self.degree != other.degree or len(self.sources) != len(other.sources):
            raise ValueError("incompatible multilinear maps")


def zero_map(sources, target, degree) -> MultilinearMap:
    return MultilinearMap(sources, target, degree, {})


def identity_map(c: ChainComplex) -> MultilinearMap:
    return MultilinearMap(
        (c,), c, 0, {(k,): RationalMatrix.identity(c.dim(k)) for k in c.degrees()}
    )


def compose_maps(outer: MultilinearMap, inners) -> MultilinearMap:
    """outer o (T_1 (x) ... (x) T_n) with the Koszul interchange signs.

    Applying the tensor of the T_i to homogeneous inputs costs
    (-1)^(sum_{i<j} |T_j| * deg(block_i)); the sign is constant per block.
    """
    inners = list(inners)
    if len(inners) != outer.arity:
        raise ValueError(f"expected {outer.arity} inner maps, got {len(inners)}")
    sources = tuple(c for t in inners for c in t.sources)
    degree = outer.degree + sum(t.degree for t in inners)
    result = MultilinearMap(sources, outer.target, degree, {})
    blocks = {}
    deg_after = []
    acc = 0
    for t in reversed(inners):
        deg_after.append(acc)
        acc += t.degree
    deg_after.reverse()  # deg_after[i] = sum of |T_j| for j > i

    for key in product(*(c.degrees() for c in sources)):
        rows_cols = []
        pos = 0
        mats = []
        mids = []
        sign = 0
        skip = False
        for i, t in enumerate(inners):
            chunk = key[pos : pos + t.arity]
            pos += t.arity
            block = t.blocks.get(tuple(chunk))
            if block is None:
                rows, cols = t.block_shape(chunk)
                if cols == 0:
                    skip = True
                    break
                block = RationalMatrix.zero(rows, cols)
            mats.append(block)
            mids.append(sum(chunk) + t.degree)
            sign += sum(chunk) * deg_after[i]
        if skip:
            continue
        fblock = outer.blocks.get(tuple(mids))
        if fblock is None:
            continue
        if any(m.is_zero() for m in mats):
            continue
        mat = fblock.mul(kron_all(mats))
        if not mat.is_zero():
            mat = mat.scale(-1 if sign % 2 else 1)
            blocks[key] = mat
    return MultilinearMap(sources, outer.target, degree, blocks)


def compose_at(outer: MultilinearMap, slot: int, inner: MultilinearMap) -> MultilinearMap:
    """Partial composition: identity maps in every slot except `slot` (1-based)."""
    inners = []
    for i, c in enumerate(outer.sources, start=1):
        inners.append(inner if i == slot else identity_map(c))
    return compose_maps(outer, inners)


def hom_differential(f: MultilinearMap) -> MultilinearMap:
    """d(F) = d_target o F - (-1)^{|F|} F o (sum_i 1...d_i...1), degree -1."""
    out = MultilinearMap(f.sources, f.target, f.degree - 1, {})
    blocks = {}

    def bump(key, mat):
        if key in blocks:
            blocks[key] = blocks[key].add(mat)
        else:
            blocks[key] = mat

    for key, mat in f.blocks.items():
        m = sum(key) + f.degree
        left = f.target.differential(m)
        if not left.is_zero():
            bump(key, left.mul(mat))
    keys = set()
    for c_degrees in product(*(c.degrees() for c in f.sources)):
        keys.add(c_degrees)
    sign_f = -1 if f.degree % 2 else 1
    for key in keys:
        prefix = 0
        for i, c in enumerate(f.sources):
            ki = key[i]
            d_i = c.differential(ki)
            if not d_i.is_zero():
                shifted = tuple(k - 1 if j == i else k for j, k in enumerate(key))
                fblock = f.blocks.get(shifted)
                if fblock is not None:
                    factors = []
                    for j, cj in enumerate(f.sources):
                        if j == i:
                            factors.append(d_i)
                        else:
                            factors.append(RationalMatrix.identity(cj.dim(key[j])))
                    mat = fblock.mul(kron_all(factors))
                    s = sign_f * (-1 if prefix % 2 else 1)
                    bump(key, mat.scale(-s))
            prefix += key[i]
    clean = {k: m for k, m in blocks.items() if not m.is_zero()}
    return MultilinearMap(f.sources, f.target, f.degree - 1, clean)


@dataclass
class Representation:
    """Generator images for a model, over one chain complex per color."""

    model: DerivationDifferential
    complexes: dict
    images: dict

    def __post_init__(self):
        self.images = dict(self.images)
        for g in self.model.base.generators:
            img = self.images.get(g.name)
            if img is None:
                sources = tuple(self.complexes[c] for c in g.signature.inputs)
                self.images[g.name] = zero_map(sources, self.complexes[g.signature.output], g.degree)
                continue
            if img.degree != g.degree or img.arity != g.signature.arity:
                raise ValueError(f"image of {g.name} has wrong degree or arity")
            for src, color in zip(img.sources, g.signature.inputs):
                if src.color is not None and src.color != color:
                    raise ValueError(f"image of {g.name}: source colored {src.color}, expected {color}")
            if img.target.color is not None and img.target.color != g.signature.output:
                raise ValueError(f"image of {g.name}: target colored {img.target.color}")

    def image(self, name):
        return self.images[name]

    def sources_for(self, signature: Signature):
        return tuple(self.complexes[c] for c in signature.inputs)


def evaluate_element(rep: Representation, elem: OperadElement) -> MultilinearMap:
    """Evaluate a symbolic element to a multilinear map (bottom-up, signed)."""
    if elem.signature is None:
        raise ValueError("cannot evaluate a zero element with no declared signature")
    sources = rep.sources_for(elem.signature)
    target = rep.complexes[elem.signature.output]
    total = zero_map(sources, target, 0 if elem.degree is None else elem.degree)

    def eval_shape(shape) -> MultilinearMap:
        if isinstance(shape, str):
            return identity_map(rep.complexes[shape])
        outer = rep.image(shape[0])
        return compose_maps(outer, [eval_shape(c) for c in shape[1:]])

    for mono, coeff in elem.terms.items():
        total = total.add(eval_shape(mono.shape).scale(coeff))
    return total


def check_representation(rep: Representation) -> Report:
    """Per generator: Hom-differential of the image equals the evaluated image of D."""
    report = Report("representation axioms")
    for g in rep.model.base.generators:
        lhs = hom_differential(rep.image(g.name))
        rhs_elem = rep.model.of(g.name)
        if rhs_elem.is_zero():
            sources = rep.sources_for(g.signature)
            rhs = zero_map(sources, rep.complexes[g.signature.output], g.degree - 1)
        else:
            rhs = evaluate_element(rep, rhs_elem)
        residual = lhs.sub(rhs)
        ok = residual.is_zero()
        report.add(g.name, ok, "" if ok else f"residual on blocks {sorted(residual.blocks)}")
    return report


def _first_failure(report: Report, classify):
    worst = None
    for e in report.entries:
        if e.ok:
            continue
        key = classify(e.name)
        if key is not None and (worst is None or key < worst[0]):
            worst = (key, e.name)
    return worst


def check_sh_morphism(rep: Representation) -> Report:
    """Axiom check over the two-colored morphism model, ordered by arity.

    The report's `first_failure` names the lowest-arity failing level and
    whether it sits in the source algebra (mu), target algebra (nu) or the
    morphism family (f).
    """
    base = check_representation(rep)
    report = Report("sh-morphism axioms")
    report.entries = sorted(base.entries, key=lambda e: _morphism_sort_key(e.name))
    report.first_failure = None
    worst = _first_failure(report, _morphism_classify)
    if worst is not None:
        (arity, kind), name = worst
        labels = {0: "source algebra", 1: "target algebra", 2: "morphism"}
        report.first_failure = (labels[kind], arity, name)
    return report


def _morphism_classify(name):
    fam, _, idx = name.partition("_")
    try:
        k = int(idx)
    except ValueError:
        return None
    order = {"mu": 0, "nu": 1, "f": 2}
    if fam not in order:
        return None
    return (k, order[fam])


def _morphism_sort_key(name):
    key = _morphism_classify(name)
    return key if key is not None else (10**9, 9)


def restrict_homotopy_to_morphism(rep: Representation, letter: str) -> Representation:
    """The p- or q-side of a homotopy representation, as a morphism representation."""
    from .differentials import build_ainf_morphism

    max_arity = max(g.signature.arity for g in rep.model.base.generators)
    model = build_ainf_morphism(max_arity)
    images = {}
    for g in model.base.generators:
        fam, _, idx = g.name.partition("_")
        source_name = {"mu": f"mu_{idx}", "nu": f"nu_{idx}", "f": f"{letter}_{idx}"}[fam]
        images[g.name] = rep.images[source_name]
    return Representation(model, rep.complexes, images)


def check_homotopy(rep: Representation) -> Report:
    """Full axiom check for a homotopy-through-morphisms representation.

    Requires both endpoint morphisms to pass on their own; the report then
    isolates the lowest failing arity of the h family.
    """
    report = Report("homotopy axioms")
    for letter in ("p", "q"):
        side = check_sh_morphism(restrict_homotopy_to_morphism(rep, letter))
        report.add(f"{letter}-side morphism", side.ok, "" if side.ok else str(side.first_failure))
    full = check_representation(rep)
    report.entries.extend(sorted(full.entries, key=lambda e: _homotopy_sort_key(e.name)))
    report.first_failure = None
    for e in report.entries:
        if not e.ok and "_" in e.name:
            report.first_failure = e.name
            break
    return report


def _homotopy_sort_key(name):
    fam, _, idx = name.partition("_")
    try:
        k = int(idx)
    except ValueError:
        return (10**9, 9, name)
    order = {"mu": 0, "nu": 1, "p": 2, "q": 3, "h": 4}
    return (k, order.get(fam, 8), name)


def check_sh_equivalence(rep: Representation, a_images=None, b_images=None) -> Report:
    """Axioms for an iso-resolution representation, plus the two restrictions.

    `a_images` / `b_images`, when given, are the generator images of the two
    underlying algebras; the representation must restrict to them on the B-
    and W-copies.
    """
    report = Report("sh-equivalence axioms")
    for e in check_representation(rep).entries:
        report.entries.append(e)
    for label, wanted, suffix in (("A", a_images, "_B"), ("B", b_images, "_W")):
        if wanted is None:
            continue
        for base_name, image in sorted(wanted.items()):
            copy = f"{base_name}{suffix}"
            ok = copy in rep.images and rep.images[copy] == image
            report.add(f"restriction {label}: {copy}", ok)
    return report


def random_matrix(rng, rows, cols, lo=-3, hi=3):
    return RationalMatrix([[Fraction(rng.randint(lo, hi)) for _ in range(cols)] for _ in range(rows)])


def random_map(rng, sources, target, degree, lo=-3, hi=3) -> MultilinearMap:
    out = MultilinearMap(sources, target, degree, {})
    blocks = {}
    for key in out.multidegrees():
        rows, cols = out.block_shape(key)
        blocks[key] = random_matrix(rng, rows, cols, lo, hi)
    return MultilinearMap(sources, target, degree, blocks)

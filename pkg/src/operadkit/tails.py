"""Solving for differential tails by exact linear algebra over tree bases.

Each colored model built here has differentials of the form

    D(generator) = principal part + tail,

where the principal part is written down explicitly and the tail is an
unknown element of a prescribed ideal, constrained by D^2 = 0.  That
constraint is linear: the obstruction phi := -D(principal) must equal
D(tail).  We enumerate the candidate monomials containing at least one
ideal generator, express D on that basis, and solve the resulting exact
rational system with free variables pinned to zero, so tails come out
deterministic even where they are far from unique.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    GeneratorSet,
    GeneratorSpec,
    OperadElement,
    Signature,
    TreeMonomial,
    UnboundedEnumerationError,
    compose_full,
    enumerate_basis,
    graft,
)
from .differentials import (
    DerivationDifferential,
    extend_derivation,
    rename_element,
    verify_d_squared,
)
from .forests import ForestElement, polarization_iso_m2, polarization_ns, polarization_sym
from .linalg import RationalMatrix, solve_linear
from .reports import Report

B, W = "B", "W"


class TailError(RuntimeError):
    pass


class ObstructionNotCycleError(TailError):
    """The right-hand side is not D-closed; no tail can exist."""


class TailNotFoundError(TailError):
    def __init__(self, message, cutoff_limited: bool):
        super().__init__(message)
        self.cutoff_limited = cutoff_limited


@dataclass
class TailProblem:
    """One tail equation D(omega) = rhs, with omega in a generator ideal."""

    ambient: GeneratorSet
    partial: DerivationDifferential
    target: str
    ideal_generators: list
    rhs: OperadElement

    def target_spec(self) -> GeneratorSpec:
        return self.ambient.spec(self.target)


def solve_tail(problem: TailProblem, max_vertices=None) -> OperadElement:
    """One exact tail, or raise; deterministic for a fixed basis order."""
    spec = problem.target_spec()
    rhs = problem.rhs
    if not rhs.is_zero():
        if rhs.signature != spec.signature or rhs.degree != spec.degree - 2:
            raise ValueError(
                f"rhs lives in {rhs.signature} degree {rhs.degree}, "
                f"expected {spec.signature} degree {spec.degree - 2}"
            )
    if not extend_derivation(problem.partial, rhs).is_zero():
        raise ObstructionNotCycleError("obstruction not a cycle")

    ideal = set(problem.ideal_generators)
    cutoff_limited = False
    try:
        basis = enumerate_basis(problem.ambient, spec.signature, spec.degree - 1)
    except UnboundedEnumerationError:
        if max_vertices is None:
            raise
        cutoff_limited = True
        basis = enumerate_basis(problem.ambient, spec.signature, spec.degree - 1, max_vertices)
    candidates = [m for m in basis if ideal.intersection(m.vertex_names())]

    if rhs.is_zero():
        return OperadElement.zero(problem.ambient, spec.signature, spec.degree - 1)

    images = [extend_derivation(problem.partial, OperadElement.monomial(m)) for m in candidates]
    support = set(rhs.terms)
    for img in images:
        support.update(img.terms)
    support = sorted(support, key=lambda m: m.sort_key)
    index = {m: i for i, m in enumerate(support)}

    a = RationalMatrix.zero(len(support), len(candidates))
    for j, img in enumerate(images):
        for mono, coeff in img.terms.items():
            a.entries[index[mono]][j] = coeff
    b = [Fraction(0)] * len(support)
    for mono, coeff in rhs.terms.items():
        b[index[mono]] = coeff

    x = solve_linear(a, b)
    if x is None:
        if cutoff_limited:
            raise TailNotFoundError(
                f"tail not found within cutoff (max_vertices={max_vertices})", True
            )
        raise TailNotFoundError("no tail exists in this (finite) component", False)

    omega = OperadElement.zero(problem.ambient, spec.signature, spec.degree - 1)
    for coeff, mono in zip(x, candidates):
        if coeff:
            omega = omega + OperadElement.monomial(mono, coeff)
    # Exact post-check: the solver's arithmetic is not trusted silently.
    if extend_derivation(problem.partial, omega) != rhs:
        raise AssertionError("internal error: solved tail fails D(omega) = rhs")
    return omega


# ---------------------------------------------------------------------------
# The two-colored morphism model over an arbitrary minimal base


def principal_part_btow(gens: GeneratorSet, b_name: str, w_name: str, f_name: str) -> OperadElement:
    """f o x_B  -  x_W o f^(tensor arity); the leading terms of D(bar x)."""
    b_spec = gens.spec(b_name)
    n = b_spec.signature.arity
    if n < 2:
        raise ValueError("principal parts are defined for arity >= 2")
    f_elem = OperadElement.from_generator(gens, f_name)
    head = graft(TreeMonomial.generator(gens, f_name), 1, TreeMonomial.generator(gens, b_name))
    tail = compose_full(TreeMonomial.generator(gens, w_name), [f_elem] * n)
    return head - tail


def _check_base(base: DerivationDifferential):
    for g in base.base.generators:
        if g.signature.arity < 2:
            raise ValueError("base model must have no generators of arity 1")
    if len(base.base.colors) != 1:
        raise ValueError("base model must be single-colored")
    rep = verify_d_squared(base)
    if not rep.ok:
        raise ValueError("base differential does not square to zero")


def _copy_image(base: DerivationDifferential, gens, x_name: str, suffix: str, color_map):
    name_map = {g.name: f"{g.name}_{suffix}" for g in base.base.generators}
    img = base.of(x_name)
    recolored = _recolor_element(img, gens, name_map, color_map)
    return recolored


def _recolor_element(elem, target_gens, name_map, color_map):
    from .core import OperadElement as OE

    def conv(shape):
        if isinstance(shape, str):
            return color_map[shape]
        return (name_map[shape[0]],) + tuple(conv(c) for c in shape[1:])

    terms = {}
    for mono, coeff in elem.terms.items():
        new = TreeMonomial(target_gens, conv(mono.shape))
        terms[new] = terms.get(new, Fraction(0)) + coeff
    return OE(target_gens, terms)


class BtoWModel(DerivationDifferential):
    """The morphism model over a minimal base: B/W copies, f, and bar generators."""

    def __init__(self, gens, images, base, order, tails):
        super().__init__(gens, images)
        self.base_model = base
        self.generator_order = order  # base generator names by arity
        self.tails = tails  # bar name -> solved tail
        self.f_name = "f"

    def copy_names(self, x_name):
        return f"{x_name}_B", f"{x_name}_W", f"{x_name}_bar"


def build_model_btow(base: DerivationDifferential, max_arity: int, max_vertices=None) -> BtoWModel:
    """Arity-by-arity construction of the morphism model with solved tails."""
    _check_base(base)
    base_color = base.base.colors[0]
    picked = [g for g in base.base.generators if g.signature.arity <= max_arity]
    picked.sort(key=lambda g: (g.signature.arity, g.name))

    specs = [GeneratorSpec("f", Signature(W, (B,)), 0)]
    for g in picked:
        n = g.signature.arity
        specs.append(GeneratorSpec(f"{g.name}_B", Signature(B, (B,) * n), g.degree))
        specs.append(GeneratorSpec(f"{g.name}_W", Signature(W, (W,) * n), g.degree))
        specs.append(GeneratorSpec(f"{g.name}_bar", Signature(W, (B,) * n), g.degree + 1))
    gens = GeneratorSet((B, W), specs)

    images = {"f": OperadElement.zero(gens, Signature(W, (B,)), -1)}
    for g in picked:
        images[f"{g.name}_B"] = _copy_image(base, gens, g.name, "B", {base_color: B})
        images[f"{g.name}_W"] = _copy_image(base, gens, g.name, "W", {base_color: W})

    tails = {}
    for g in picked:
        bar = f"{g.name}_bar"
        principal = principal_part_btow(gens, f"{g.name}_B", f"{g.name}_W", "f")
        partial = DerivationDifferential(gens, images)
        phi = extend_derivation(partial, principal).scale(-1)
        ideal = [
            f"{h.name}_bar" for h in picked if h.signature.arity < g.signature.arity
        ]
        problem = TailProblem(gens, partial, bar, ideal, phi)
        omega = solve_tail(problem, max_vertices)
        tails[bar] = omega
        images[bar] = principal + omega

    return BtoWModel(gens, images, base, [g.name for g in picked], tails)


# ---------------------------------------------------------------------------
# The homotopy model over the same base, via the two substitutions


def theta_substitution(bw: BtoWModel, elem: OperadElement, target_gens, letter: str, bar_suffix: str):
    """Rename f -> letter and every bar copy to the given family; copies stay."""
    name_map = {"f": letter}
    for x in bw.generator_order:
        name_map[f"{x}_bar"] = f"{x}_{bar_suffix}"
    return rename_element(elem, target_gens, name_map)


class HomotopyModel(DerivationDifferential):
    def __init__(self, gens, images, bw, order, tails, polarization):
        super().__init__(gens, images)
        self.bw_model = bw
        self.generator_order = order
        self.tails = tails
        self.polarization = polarization


def _staircase_into(gens, w_name: str, n: int, variant: str) -> OperadElement:
    """x_W composed with the width-n staircase word over (p, q, h)."""
    if variant == "ns":
        word = polarization_ns(gens, n, "p", "q", "h")
    elif variant == "sym":
        word = polarization_sym(gens, n, "p", "q", "h")
    else:
        raise ValueError(f"unknown polarization variant {variant!r}")
    outer = TreeMonomial.generator(gens, w_name)
    out = OperadElement.zero(gens)
    for mono, coeff in word.terms.items():
        args = [OperadElement.monomial(t) for t in mono.components]
        out = out + compose_full(outer, args).scale(coeff)
    return out


def build_model_homotopy(bw: BtoWModel, max_arity: int, polarization: str = "ns", max_vertices=None) -> HomotopyModel:
    """The homotopy-through-homomorphisms model over bw's base.

    D(x^p), D(x^q) are the two renamings of D(bar x); D(x^h) has principal
    part x^p - x^q - h x_B + (-1)^{|x|} x_W<h> and a solver tail.
    """
    base = bw.base_model
    base_color = base.base.colors[0]
    picked = [g for g in base.base.generators if g.signature.arity <= max_arity]
    picked.sort(key=lambda g: (g.signature.arity, g.name))
    for g in picked:
        if g.name not in bw.generator_order:
            raise ValueError(f"bw model does not cover generator {g.name}")

    specs = [
        GeneratorSpec("p", Signature(W, (B,)), 0),
        GeneratorSpec("q", Signature(W, (B,)), 0),
        GeneratorSpec("h", Signature(W, (B,)), 1),
    ]
    for g in picked:
        n = g.signature.arity
        specs.append(GeneratorSpec(f"{g.name}_B", Signature(B, (B,) * n), g.degree))
        specs.append(GeneratorSpec(f"{g.name}_W", Signature(W, (W,) * n), g.degree))
        specs.append(GeneratorSpec(f"{g.name}_p", Signature(W, (B,) * n), g.degree + 1))
        specs.append(GeneratorSpec(f"{g.name}_q", Signature(W, (B,) * n), g.degree + 1))
        specs.append(GeneratorSpec(f"{g.name}_h", Signature(W, (B,) * n), g.degree + 2))
    gens = GeneratorSet((B, W), specs)

    p = OperadElement.from_generator(gens, "p")
    q = OperadElement.from_generator(gens, "q")
    images = {
        "p": OperadElement.zero(gens, Signature(W, (B,)), -1),
        "q": OperadElement.zero(gens, Signature(W, (B,)), -1),
        "h": p - q,
    }
    for g in picked:
        images[f"{g.name}_B"] = _copy_image(base, gens, g.name, "B", {base_color: B})
        images[f"{g.name}_W"] = _copy_image(base, gens, g.name, "W", {base_color: W})

    tails = {}
    for g in picked:
        d_bar = bw.of(f"{g.name}_bar")
        images[f"{g.name}_p"] = theta_substitution(bw, d_bar, gens, "p", "p")
        images[f"{g.name}_q"] = theta_substitution(bw, d_bar, gens, "q", "q")

    for g in picked:
        n = g.signature.arity
        principal = (
            OperadElement.from_generator(gens, f"{g.name}_p")
            - OperadElement.from_generator(gens, f"{g.name}_q")
            - graft(TreeMonomial.generator(gens, "h"), 1, TreeMonomial.generator(gens, f"{g.name}_B"))
            + _staircase_into(gens, f"{g.name}_W", n, polarization).scale(
                -1 if g.degree % 2 else 1
            )
        )
        partial = DerivationDifferential(gens, images)
        phi = extend_derivation(partial, principal).scale(-1)
        ideal = []
        for h in picked:
            if h.signature.arity < n:
                ideal.extend([f"{h.name}_p", f"{h.name}_q", f"{h.name}_h"])
        problem = TailProblem(gens, partial, f"{g.name}_h", ideal, phi)
        omega = solve_tail(problem, max_vertices)
        tails[f"{g.name}_h"] = omega
        images[f"{g.name}_h"] = principal + omega

    return HomotopyModel(gens, images, bw, [g.name for g in picked], tails, polarization)


# ---------------------------------------------------------------------------
# The iso-resolution model: principal parts and attempted tails


class IsoPrincipalModel(DerivationDifferential):
    def __init__(self, gens, images, base, order, max_index, tail_report, tails):
        super().__init__(gens, images)
        self.base_model = base
        self.generator_order = order
        self.max_index = max_index
        self.tail_report = tail_report
        self.tails = tails


def _forest_into(gens, outer_name: str, forest: ForestElement) -> OperadElement:
    """Graft each forest word into the slots of a single-generator vertex."""
    outer = TreeMonomial.generator(gens, outer_name)
    out = OperadElement.zero(gens)
    for mono, coeff in forest.terms.items():
        args = [OperadElement.monomial(t) for t in mono.components]
        out = out + compose_full(outer, args).scale(coeff)
    return out


def _letter_over(gens, letter: str, inner_name: str) -> OperadElement:
    return graft(TreeMonomial.generator(gens, letter), 1, TreeMonomial.generator(gens, inner_name))


def build_model_iso_principal(
    base: DerivationDifferential,
    max_arity: int,
    max_index: int,
    max_vertices: int = 8,
) -> IsoPrincipalModel:
    """Principal parts of the iso-resolution model over a minimal base, with
    tails attempted per generator (failures recorded, not fatal).

    Only bases with generators of arity <= 2 are supported: the closed
    polarization formulas used by the principal parts exist in width 2.
    """
    from .differentials import iso_generator_specs

    _check_base(base)
    base_color = base.base.colors[0]
    picked = [g for g in base.base.generators if g.signature.arity <= max_arity]
    picked.sort(key=lambda g: (g.signature.arity, g.name))
    if any(g.signature.arity > 2 for g in picked):
        raise ValueError("iso principal-part model supports arity <= 2 generators only")

    specs = list(iso_generator_specs(max_index))
    for g in picked:
        n = g.signature.arity
        d = g.degree
        specs.append(GeneratorSpec(f"{g.name}_B", Signature(B, (B,) * n), d))
        specs.append(GeneratorSpec(f"{g.name}_W", Signature(W, (W,) * n), d))
        for k in range(0, max_index + 1):
            f_out = W if k % 2 == 0 else B
            g_out = B if k % 2 == 0 else W
            specs.append(GeneratorSpec(f"{g.name}_f{k}", Signature(f_out, (B,) * n), d + k + 1))
            specs.append(GeneratorSpec(f"{g.name}_g{k}", Signature(g_out, (W,) * n), d + k + 1))
    gens = GeneratorSet((B, W), specs)

    from .differentials import build_iso_resolution

    iso = build_iso_resolution(max_index)
    images = {}
    for name, img in iso.images.items():
        images[name] = rename_element(img, gens, {})
    for g in picked:
        images[f"{g.name}_B"] = _copy_image(base, gens, g.name, "B", {base_color: B})
        images[f"{g.name}_W"] = _copy_image(base, gens, g.name, "W", {base_color: W})

    fams = polarization_iso_m2(gens, max_index)

    def polar(kind, deg):
        table = fams[kind]
        if deg in table:
            return table[deg]
        return None

    def add_polar_term(total, super_name, kind, deg, sign):
        forest = polar(kind, deg)
        if forest is not None:
            return total + _forest_into(gens, super_name, forest).scale(sign)
        return total

    report = Report("iso model tails")
    tails = {}

    # The displayed differentials of the four super-families, one degree at a
    # time.  `own` is the letter family matching `fam`, `ownh` its odd
    # (homotopy) polarization kind; the third term of the even g-family is
    # written with g (not f) to respect the colors.
    for k in range(0, max_index + 1):
        for g in picked:
            sx = -1 if g.degree % 2 else 1
            for fam in ("f", "g"):
                name = f"{g.name}_{fam}{k}"
                own, other = (("f", "g") if fam == "f" else ("g", "f"))
                ownh = "h" if fam == "f" else "l"
                home = f"{g.name}_B" if fam == "f" else f"{g.name}_W"
                away = f"{g.name}_W" if fam == "f" else f"{g.name}_B"
                otherfam = "g" if fam == "f" else "f"
                total = OperadElement.zero(
                    gens, gens.spec(name).signature, gens.spec(name).degree - 1
                )
                if k % 2 == 0:
                    total = total + _letter_over(gens, f"{own}_{k}", home)
                    total = add_polar_term(total, away, own, k, -1)
                    for a in range(0, k, 2):
                        total = total + _letter_over(gens, f"{own}_{a}", f"{g.name}_{fam}{k - 1 - a}")
                    for j in range(0, k, 2):
                        total = add_polar_term(total, f"{g.name}_{fam}{j}", ownh, k - 1 - j, -sx)
                    for a in range(1, k, 2):
                        total = total - _letter_over(gens, f"{other}_{a}", f"{g.name}_{fam}{k - 1 - a}")
                    for j in range(1, k, 2):
                        total = add_polar_term(total, f"{g.name}_{otherfam}{j}", own, k - 1 - j, -1)
                else:
                    total = add_polar_term(total, home, ownh, k, sx)
                    total = total - _letter_over(gens, f"{own}_{k}", home)
                    for a in range(1, k, 2):
                        total = total - _letter_over(gens, f"{own}_{a}", f"{g.name}_{fam}{k - 1 - a}")
                    for j in range(1, k, 2):
                        total = add_polar_term(total, f"{g.name}_{fam}{j}", ownh, k - 1 - j, sx)
                    for a in range(0, k, 2):
                        total = total + _letter_over(gens, f"{other}_{a}", f"{g.name}_{fam}{k - 1 - a}")
                    for j in range(0, k, 2):
                        total = add_polar_term(total, f"{g.name}_{otherfam}{j}", own, k - 1 - j, 1)
                images[name] = total
        # solve tails for this index level before moving up
        for g in picked:
            for fam in ("f", "g"):
                name = f"{g.name}_{fam}{k}"
                partial = DerivationDifferential(gens, images)
                principal = images[name]
                phi = extend_derivation(partial, principal).scale(-1)
                if phi.is_zero():
                    report.add(name, True, "tail 0")
                    tails[name] = OperadElement.zero(gens)
                    continue
                ideal = []
                for h in picked:
                    if h.signature.arity < g.signature.arity:
                        for kk in range(0, max_index + 1):
                            ideal.extend([f"{h.name}_f{kk}", f"{h.name}_g{kk}"])
                try:
                    problem = TailProblem(gens, partial, name, ideal, phi)
                    omega = solve_tail(problem, max_vertices)
                    tails[name] = omega
                    images[name] = principal + omega
                    report.add(name, True, f"tail with {len(omega.terms)} terms")
                except TailError as exc:
                    report.add(name, False, str(exc))

    return IsoPrincipalModel(
        gens, images, base, [g.name for g in picked], max_index, report, tails
    )

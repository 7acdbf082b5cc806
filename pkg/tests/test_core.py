import json
import random
from fractions import Fraction

import pytest

from operadkit.core import (
    BwRelations,
    GeneratorSet,
    GeneratorSpec,
    OperadElement,
    Signature,
    TreeMonomial,
    UnboundedEnumerationError,
    compose_full,
    element_from_json,
    element_to_json,
    enumerate_basis,
    graft,
    normalize_bw,
    parse_element,
    parse_tree,
)

B, W = "B", "W"


def ainf_gens(n=4):
    return GeneratorSet(
        (B,), [GeneratorSpec(f"mu_{k}", Signature(B, (B,) * k), k - 2) for k in range(2, n + 1)]
    )


def morphism_gens(n=3):
    specs = []
    for k in range(2, n + 1):
        specs.append(GeneratorSpec(f"mu_{k}", Signature(B, (B,) * k), k - 2))
        specs.append(GeneratorSpec(f"nu_{k}", Signature(W, (W,) * k), k - 2))
    specs.append(GeneratorSpec("f", Signature(W, (B,)), 0))
    return GeneratorSet((B, W), specs)


def test_graft_two_binary_generators():
    gens = ainf_gens()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    out = graft(mu2, 1, mu2)
    ((mono, coeff),) = out.terms.items()
    assert coeff == 1
    assert mono.arity == 3
    assert mono.degree == 0


def test_graft_across_colors():
    gens = morphism_gens()
    f = TreeMonomial.generator(gens, "f")
    mu2 = TreeMonomial.generator(gens, "mu_2")
    out = graft(f, 1, mu2)
    ((mono, _),) = out.terms.items()
    assert mono.signature == Signature(W, (B, B))
    assert mono.degree == 0


def test_graft_color_mismatch_is_zero():
    gens = morphism_gens()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    nu2 = TreeMonomial.generator(gens, "nu_2")
    assert graft(mu2, 1, nu2).is_zero()


def test_graft_slot_out_of_range():
    gens = ainf_gens()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    with pytest.raises(ValueError):
        graft(mu2, 3, mu2)


def test_compose_full_units_are_no_ops():
    gens = ainf_gens()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    unit = OperadElement.monomial(TreeMonomial.identity(gens, B))
    assert compose_full(mu2, [unit, unit]) == OperadElement.monomial(mu2)


def test_compose_full_signature():
    gens = morphism_gens()
    nu2 = TreeMonomial.generator(gens, "nu_2")
    f = OperadElement.from_generator(gens, "f")
    out = compose_full(nu2, [f, f])
    ((mono, _),) = out.terms.items()
    assert mono.signature == Signature(W, (B, B))


def test_compose_full_with_zero_is_zero():
    gens = ainf_gens()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    zero = OperadElement.zero(gens, Signature(B, (B, B)), 0)
    assert compose_full(mu2, [OperadElement.monomial(mu2), zero]).is_zero()


def test_compose_full_equals_iterated_graft():
    gens = morphism_gens()
    rng = random.Random(8)
    nu2 = TreeMonomial.generator(gens, "nu_2")
    words = [
        OperadElement.from_generator(gens, "f"),
        graft(TreeMonomial.generator(gens, "f"), 1, TreeMonomial.generator(gens, "mu_2")),
    ]
    for _ in range(50):
        a, b = rng.choice(words), rng.choice(words)
        simultaneous = compose_full(nu2, [a, b])
        right_to_left = _graft_elem(_graft_elem(OperadElement.monomial(nu2), 2, b), 1, a)
        ((bm, _),) = b.terms.items()
        left_to_right = _graft_elem(
            _graft_elem(OperadElement.monomial(nu2), 1, a), 1 + next(iter(a.terms)).arity, b
        )
        assert simultaneous == right_to_left == left_to_right


def test_compose_full_arity_mismatch():
    gens = ainf_gens()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    with pytest.raises(ValueError):
        compose_full(mu2, [OperadElement.monomial(mu2)])


def test_color_rule_validated_on_construction():
    gens = morphism_gens()
    with pytest.raises(ValueError):
        TreeMonomial(gens, ("mu_2", ("nu_2", W, W), B))


def test_degree_additivity_random():
    gens = GeneratorSet(
        (B,),
        [
            GeneratorSpec("a", Signature(B, (B, B)), 1),
            GeneratorSpec("b", Signature(B, (B, B, B)), 2),
            GeneratorSpec("c", Signature(B, (B,)), 3),
        ],
    )
    rng = random.Random(3)
    monos = enumerate_basis(gens, Signature(B, (B,) * 3), 3) + enumerate_basis(
        gens, Signature(B, (B,) * 2), 4
    )
    for _ in range(100):
        a = rng.choice(monos)
        b = rng.choice(monos)
        slot = rng.randint(1, a.arity)
        out = graft(a, slot, b)
        for mono in out.terms:
            assert mono.degree == a.degree + b.degree


def test_grafting_associativity_disjoint_slots():
    gens = ainf_gens()
    rng = random.Random(4)
    basis = enumerate_basis(gens, Signature(B, (B,) * 4), 0) + enumerate_basis(
        gens, Signature(B, (B,) * 4), 1
    )
    checked = 0
    while checked < 200:
        a = rng.choice(basis)
        b = rng.choice(basis)
        c = rng.choice(basis)
        i = rng.randint(1, a.arity)
        j = rng.randint(1, a.arity)
        if i == j:
            continue
        lo, hi = min(i, j), max(i, j)
        # graft at hi first, then lo, and the other way round
        first = _graft_elem(graft(a, hi, b), lo, c)
        second = _graft_elem(graft(a, lo, c), hi + c.arity - 1, b)
        assert first == second
        checked += 1


def _graft_elem(elem, slot, inner):
    from operadkit.core import graft_elements

    if isinstance(inner, TreeMonomial):
        inner = OperadElement.monomial(inner)
    return graft_elements(elem, slot, inner)


def test_nested_graft_orders_agree():
    gens = ainf_gens()
    rng = random.Random(5)
    basis = enumerate_basis(gens, Signature(B, (B,) * 3), 0) + enumerate_basis(
        gens, Signature(B, (B,) * 3), 1
    )
    for _ in range(200):
        a, b, c = (rng.choice(basis) for _ in range(3))
        i = rng.randint(1, a.arity)
        j = rng.randint(1, b.arity)
        # (a o_i b) o_{i+j-1} c  ==  a o_i (b o_j c)
        outer_first = _graft_elem(graft(a, i, b), i + j - 1, c)
        inner_first = _graft_elem(OperadElement.monomial(a), i, graft(b, j, c))
        assert outer_first == inner_first


def test_enumerate_basis_three_leaves_degree_zero():
    gens = ainf_gens()
    out = enumerate_basis(gens, Signature(B, (B, B, B)), 0)
    assert [m.compact() for m in out] == ["mu_2(mu_2, @3:B)", "mu_2(@1:B, mu_2)"]


def test_enumerate_basis_three_leaves_degree_one():
    gens = ainf_gens()
    out = enumerate_basis(gens, Signature(B, (B, B, B)), 1)
    assert [m.compact() for m in out] == ["mu_3"]


def iso_small_gens():
    return GeneratorSet(
        (B, W),
        [
            GeneratorSpec("f_0", Signature(W, (B,)), 0),
            GeneratorSpec("g_0", Signature(B, (W,)), 0),
            GeneratorSpec("f_1", Signature(B, (B,)), 1),
        ],
    )


def test_enumerate_basis_unary_loop_words():
    gens = iso_small_gens()
    out = enumerate_basis(gens, Signature(W, (B,)), 0, max_vertices=5)
    assert [m.compact() for m in out] == [
        "f_0",
        "f_0(g_0(f_0))",
        "f_0(g_0(f_0(g_0(f_0))))",
    ]


def test_enumerate_basis_requires_cutoff_on_loops():
    gens = iso_small_gens()
    with pytest.raises(UnboundedEnumerationError):
        enumerate_basis(gens, Signature(W, (B,)), 0)


def test_enumerate_basis_counts_match_brute_force():
    # independent oracle: count labeled planar trees by (leaves, degree)
    # via a direct recursion over the root generator and compositions.
    gens = ainf_gens(6)

    def count(leaves, degree, memo):
        key = (leaves, degree)
        if key in memo:
            return memo[key]
        total = 1 if (leaves == 1 and degree == 0) else 0
        for k in range(2, min(leaves, 6) + 1):
            gdeg = k - 2
            if gdeg > degree:
                continue
            total += _count_children(k, leaves, degree - gdeg, count, memo)
        memo[key] = total
        return total

    def _count_children(k, leaves, degree, count, memo):
        # distribute leaves and degree over k ordered children
        def rec(i, leaves_left, deg_left):
            if i == k:
                return 1 if (leaves_left == 0 and deg_left == 0) else 0
            total = 0
            for l in range(1, leaves_left - (k - i - 1) + 1):
                for d in range(deg_left + 1):
                    c = count(l, d, memo)
                    if c:
                        total += c * rec(i + 1, leaves_left - l, deg_left - d)
            return total

        return rec(0, leaves, degree)

    memo = {}
    for n in range(1, 7):
        for d in range(0, n):
            got = len(enumerate_basis(gens, Signature(B, (B,) * n), d))
            assert got == count(n, d, memo), (n, d)


def test_identity_strand_in_basis():
    gens = ainf_gens()
    out = enumerate_basis(gens, Signature(B, (B,)), 0)
    assert len(out) == 1 and out[0].is_identity()


# ---------------------------------------------------------------------------
# normalize_bw


def morphism_relations(n=3):
    return BwRelations("f", {f"mu_{k}": f"nu_{k}" for k in range(2, n + 1)})


def test_normalize_single_rewrite():
    gens = morphism_gens()
    rel = morphism_relations()
    f_mu2 = graft(TreeMonomial.generator(gens, "f"), 1, TreeMonomial.generator(gens, "mu_2"))
    out = normalize_bw(f_mu2, rel)
    f = OperadElement.from_generator(gens, "f")
    want = compose_full(TreeMonomial.generator(gens, "nu_2"), [f, f])
    assert out == want


def test_normalize_fixed_point():
    gens = morphism_gens()
    rel = morphism_relations()
    f = OperadElement.from_generator(gens, "f")
    nf = compose_full(TreeMonomial.generator(gens, "nu_2"), [f, f])
    assert normalize_bw(nf, rel) == nf


def test_normalize_two_rewrites():
    gens = morphism_gens()
    rel = morphism_relations()
    mu2 = TreeMonomial.generator(gens, "mu_2")
    inner = graft(mu2, 1, mu2)  # mu_2(mu_2, 1)
    ((inner_mono, _),) = inner.terms.items()
    elem = graft(TreeMonomial.generator(gens, "f"), 1, inner_mono)
    out = normalize_bw(elem, rel)
    f = OperadElement.from_generator(gens, "f")
    nu2 = TreeMonomial.generator(gens, "nu_2")
    inner_nf = compose_full(nu2, [f, f])
    want = compose_full(nu2, [inner_nf, f])
    assert out == want
    # every f in the normal form hangs directly above a leaf
    for mono in out.terms:
        for _, name, children in mono.vertices():
            if name == "f":
                assert isinstance(children[0], str)


def test_normalize_confluence_random_strategies():
    gens = morphism_gens(3)
    rel = morphism_relations(3)
    rng = random.Random(6)

    def random_single_step(shape, rng):
        # rewrite one random redex; None if already normal
        redexes = []

        def walk(s, path):
            if isinstance(s, str):
                return
            if s[0] == "f" and not isinstance(s[1], str) and s[1][0] in rel.w_of_b:
                redexes.append(path)
            for i, c in enumerate(s[1:]):
                walk(c, path + (i,))

        walk(shape, ())
        if not redexes:
            return None
        target = rng.choice(redexes)

        def rewrite(s, path):
            if path == ():
                inner = s[1]
                return (rel.w_of_b[inner[0]],) + tuple(("f", c) for c in inner[1:])
            i = path[0]
            kids = list(s[1:])
            kids[i] = rewrite(kids[i], path[1:])
            return (s[0],) + tuple(kids)

        return rewrite(shape, target)

    pool = []
    for sig_inputs in [(B,), (B, B), (B, B, B), (B, B, B, B), (B, B, B, B, B)]:
        for d in range(0, 3):
            try:
                pool.extend(enumerate_basis(gens, Signature(W, sig_inputs), d))
            except UnboundedEnumerationError:
                pass
    pool = [m for m in pool if any(v == "f" for v in m.vertex_names())]
    assert pool
    for _ in range(1000):
        mono = rng.choice(pool)
        shape = mono.shape
        while True:
            nxt = random_single_step(shape, rng)
            if nxt is None:
                break
            shape = nxt
        via_random = OperadElement.monomial(TreeMonomial(gens, shape))
        via_builtin = normalize_bw(OperadElement.monomial(mono), rel)
        assert via_random == via_builtin


def test_output_b_with_w_inputs_is_empty():
    # color bookkeeping: no monomials with output B touch the f generator
    gens = morphism_gens(3)
    for inputs in [(W,), (B, W), (W, B), (W, W)]:
        assert enumerate_basis(gens, Signature(B, inputs), 0) == []


# ---------------------------------------------------------------------------
# round trips


def test_text_and_json_round_trip():
    gens = morphism_gens(3)
    rng = random.Random(7)
    basis = enumerate_basis(gens, Signature(W, (B, B, B)), 1)
    for _ in range(50):
        terms = {}
        for m in rng.sample(basis, k=min(4, len(basis))):
            terms[m] = Fraction(rng.randint(-5, 5), rng.randint(1, 7))
        elem = OperadElement(gens, terms)
        # canonical text form
        parsed = parse_element(elem.text(), gens)
        assert parsed == elem
        # JSON form, bit-exact through dumps/loads
        blob = json.dumps(element_to_json(elem))
        back = element_from_json(json.loads(blob), gens)
        assert back == elem
        assert json.dumps(element_to_json(back)) == blob


def test_parse_tree_round_trip():
    gens = morphism_gens(3)
    mono = enumerate_basis(gens, Signature(W, (B, B, B)), 1)[0]
    assert parse_tree(mono.canonical(), gens) == mono


def test_zero_element_text():
    gens = ainf_gens()
    assert OperadElement.zero(gens).text() == "0"
    assert parse_element("0", gens).is_zero()

import random
from fractions import Fraction

import pytest

from shtvol.characters import (build_group, character, check_character_identities, class_coefficients, convolve,
                               delta, dual, natural_projection, pairing, phi_tuple)
from shtvol.errors import SchemaError

NAMES = ["z2", "z2xz2", "s3", "s4"]


@pytest.mark.parametrize("name", NAMES)
def test_orthogonality_and_dimensions(name):
    G = build_group(name)
    assert sum(G.dim(r) ** 2 for r in G.rep_names()) == G.order
    for a in G.rep_names():
        for b in G.rep_names():
            assert pairing(character(G, a), dual(character(G, b))) == (1 if a == b else 0)


@pytest.mark.parametrize("name", NAMES)
def test_convolution_associative(name):
    G = build_group(name)
    rng = random.Random(1)
    els = [delta(G, rng.choice(G.elements)).scale(rng.randint(1, 4)) for _ in range(3)]
    a, b, c = els
    assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))


@pytest.mark.parametrize("name", NAMES)
def test_natural_projection_idempotent(name):
    G = build_group(name)
    phi = delta(G, G.elements[-1]) + delta(G, G.identity).scale(3)
    p = natural_projection(phi)
    assert natural_projection(p) == p
    assert class_coefficients(character(G, G.rep_names()[0]))[G.rep_names()[0]] == 1


@pytest.mark.parametrize("name", ["z2", "z2xz2", "s3"])
def test_character_identities(name):
    G = build_group(name)
    rng = random.Random(4)
    for _ in range(20):
        r = rng.randint(1, 4)
        sigma = [rng.choice(G.elements) for _ in range(r)]
        signs = [rng.choice(["sharp", "flat"]) for _ in range(r)]
        for j in (2, 3):
            assert all(check_character_identities(G, sigma, signs, j))


def test_phi_tuple_signs():
    G = build_group("z2")
    phi = phi_tuple(G, [G.identity, G.identity], ["sharp", "flat"], 3)
    assert phi(G.identity) == 0
    phi = phi_tuple(G, [G.identity, G.identity], ["sharp", "flat"], 2)
    assert phi(G.identity) == 2


def test_parse_elements():
    G = build_group("s3")
    assert G.parse_element("e") == G.identity
    assert G.parse_element("102") == (1, 0, 2)
    with pytest.raises(SchemaError):
        G.parse_element("012345")
    with pytest.raises(SchemaError):
        build_group("a5")

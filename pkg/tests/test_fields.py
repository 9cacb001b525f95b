from __future__ import annotations

from math import gcd

import pytest

from devhom.errors import InstitutionError
from devhom.fincat import terminal_objects, validate_category
from devhom.homalg import HomologyGroup, PresentedGroup, direct_sum, homology_of_complex
from devhom.instances.fields import SPEC_Z, build_field_site, field_name, is_prime, units_group
from devhom.simplicial import assemble_chain_complex, assemble_cochain_complex


def _order(x: int, m: int) -> int:
    return m // gcd(x, m) if m else 0


def test_is_prime_against_trial_division():
    brute = [n for n in range(60) if n > 1 and all(n % d for d in range(2, n))]
    assert [n for n in range(60) if is_prime(n)] == brute


def test_units_are_cyclic_of_order_q_minus_one():
    assert units_group(2) == PresentedGroup()
    assert units_group(9) == PresentedGroup(0, (8,))


def test_degree_embeddings_are_injective_onto_the_right_subgroup():
    site = build_field_site((2, 3), 4)
    for p in site.primes:
        T = site.degree_units(p)
        for m in T.base.morphisms:
            a, b = int(m.dom), int(m.cod)
            qa, qb = p**a - 1, p**b - 1
            if qa == 1:
                continue  # F_2^x is trivial
            k = T.map_at(m.id).data[0][0]
            image = sorted({(k * x) % qb for x in range(qa)})
            assert len(image) == qa  # injective
            # the unique subgroup of order p^a - 1 of a cyclic group
            assert image == sorted(y for y in range(qb) if (qa * y) % qb == 0)


def test_spec_z_units_hit_minus_one():
    site = build_field_site((2, 3, 5), 3)
    T = site.units
    assert T.group_at(SPEC_Z) == PresentedGroup(0, (2,))
    for f in site.fields():
        m = site.ambient.hom(f, SPEC_Z)[0]
        q = int(f[1:].split("^")[0]) ** int(f.split("^")[1])
        M = T.map_at(m)
        if q == 2:
            assert M.cols == 1 and M.rows == 0
            continue
        # the image of the generator of Z/2 has order exactly 2 (it is -1)
        assert _order(M.data[0][0], q - 1) == (2 if q % 2 else 1)


def test_ambient_is_a_category_with_spec_z_terminal():
    site = build_field_site((2, 3), 4)
    assert validate_category(site.ambient) == []
    assert terminal_objects(site.ambient) == (SPEC_Z,)
    # F_{p^b} -> F_{p^a} on the affine side exactly when a | b
    assert site.ambient.hom(field_name(2, 4), field_name(2, 2))
    assert not site.ambient.hom(field_name(2, 3), field_name(2, 2))
    assert not site.ambient.hom(field_name(2, 1), field_name(3, 1))
    assert terminal_objects(site.ring_side()) == ()


def test_units_h0_is_the_prime_field_value():
    site = build_field_site((2, 3, 5, 7), 4)
    for p in site.primes:
        s = site.slice_over_spec_z(p)
        assert terminal_objects(s.slice) == (f"({site.terminal_field(p)}, {site.ambient.hom(site.terminal_field(p), SPEC_Z)[0]})",)
        H = homology_of_complex(assemble_chain_complex(s.slice, None, 4))
        assert H[0].is_Z() and all(H[n].is_zero() for n in (1, 2, 3))
        Hu = homology_of_complex(assemble_cochain_complex(s.slice, site.units_on(s), 4))
        assert Hu[0] == HomologyGroup(0, units_group(p).torsion)
        assert all(Hu[n].is_zero() for n in (1, 2, 3))


def test_mixed_site_splits_by_characteristic():
    site = build_field_site((2, 3, 5), 3)
    s = site.slice_over_spec_z()
    H = homology_of_complex(assemble_chain_complex(s.slice, None, 4))
    assert H[0] == HomologyGroup(3)
    Hu = homology_of_complex(assemble_cochain_complex(s.slice, site.units_on(s), 4))
    expected = HomologyGroup()
    for p in site.primes:
        expected = direct_sum(expected, HomologyGroup(0, units_group(p).torsion))
    assert Hu[0] == expected


@pytest.mark.parametrize("primes, bound", [((4,), 2), ((), 2), ((3, 3), 2), ((2,), 0), ((2,), 7)])
def test_invalid_sites(primes, bound):
    with pytest.raises(InstitutionError):
        build_field_site(primes, bound)


def test_unknown_prime_slice():
    with pytest.raises(InstitutionError) as e:
        build_field_site((2,), 2).slice_over_spec_z(3)
    assert e.value.code == "unknown-prime"

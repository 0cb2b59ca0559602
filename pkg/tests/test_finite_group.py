import pytest

from finite_group import (
    CmDatumError,
    GroupSpecError,
    all_subgroups,
    central_involutions,
    coset_space,
    cyclic,
    dihedral,
    direct_product,
    element_order,
    is_action_homomorphism,
    make_group,
    make_subgroup,
    permutation_group,
    subgroup_closure,
    trivial_subgroup,
    validate_cm_datum,
)

D4_GENERATORS = [[1, 2, 3, 0], [0, 3, 2, 1]]


def test_cyclic_table():
    group = cyclic(4)
    assert group.order == 4
    assert group.name == "C4"
    assert group.identity_index == 0
    assert group.inverse == (0, 3, 2, 1)
    assert group.op(3, 2) == 1


def test_direct_product_is_lexicographic():
    group = direct_product([cyclic(2), cyclic(4)])
    assert group.name == "C2xC4"
    assert group.order == 8
    assert group.label(6) == "(1,2)"
    # (1,2) + (1,3) = (0,1)
    assert group.op(6, 7) == 1


def test_permutation_group_is_numbered_breadth_first():
    group = permutation_group(D4_GENERATORS, name="D4")
    assert group.order == 8
    assert group.labels[:5] == ("[0,1,2,3]", "[1,2,3,0]", "[0,3,2,1]", "[2,3,0,1]", "[1,0,3,2]")
    assert [element_order(group, g) for g in group.elements()] == [1, 4, 2, 2, 2, 2, 4, 2]


def test_dihedral_matches_explicit_generators():
    assert dihedral(4) == permutation_group(D4_GENERATORS)
    assert dihedral(4).name == "D4"
    with pytest.raises(GroupSpecError):
        dihedral(2)


def test_make_group_tags():
    assert make_group({"cyclic": 3}) == cyclic(3)
    assert make_group({"dihedral": 4}) == dihedral(4)
    assert make_group({"product": [{"cyclic": 2}, {"cyclic": 2}]}).order == 4
    assert make_group({"table": [[0, 1], [1, 0]]}) == cyclic(2)
    assert make_group({"perms": D4_GENERATORS, "name": "Sq"}).name == "Sq"


@pytest.mark.parametrize("spec, code", [
    ({"table": [[0, 1], [1, 1]]}, "NotLatinSquare"),
    ({"table": [[0, 2], [1, 0]]}, "NotClosed"),
    ({"table": [[0, 1], [1]]}, "NotSquare"),
    ({"table": []}, "EmptyTable"),
    ({"table": [[0, 2, 1], [2, 1, 0], [1, 0, 2]]}, "NoIdentity"),
    ({"table": [[0, 1, 2, 3, 4],
                [1, 0, 3, 4, 2],
                [2, 4, 0, 1, 3],
                [3, 2, 4, 0, 1],
                [4, 3, 1, 2, 0]]}, "NotAssociative"),
    ({"perms": [[0, 0, 1]]}, "NotPermutation"),
    ({"table": [1, 2]}, "BadSpec"),
    ({"table": [[0, True], [1, 0]]}, "BadSpec"),
    ({"perms": [5]}, "BadSpec"),
    ({"perms": [[1, 0.5]]}, "BadSpec"),
    ({"cyclic": 0}, "BadCyclic"),
    ({"cyclic": 2, "dihedral": 3}, "BadSpec"),
    ([0, 1], "BadSpec"),
])
def test_make_group_rejects(spec, code):
    with pytest.raises(GroupSpecError) as err:
        make_group(spec)
    assert err.value.code == code
    assert str(err.value).startswith(code)


def test_order_cap():
    with pytest.raises(GroupSpecError) as err:
        make_group({"cyclic": 10}, order_cap=8)
    assert err.value.code == "CapExceeded"
    with pytest.raises(GroupSpecError):
        make_group({"product": [{"cyclic": 4}, {"cyclic": 4}]}, order_cap=8)
    with pytest.raises(GroupSpecError):
        permutation_group(D4_GENERATORS, order_cap=4)


def test_check_index():
    group = cyclic(4)
    assert group.check_index(3) == 3
    for bad in (4, -1, True, "1"):
        with pytest.raises(GroupSpecError):
            group.check_index(bad)


def test_central_involutions():
    assert central_involutions(cyclic(4)) == [2]
    assert central_involutions(dihedral(4)) == [3]
    assert central_involutions(direct_product([cyclic(2), cyclic(4)])) == [2, 4, 6]
    assert central_involutions(dihedral(3)) == []


@pytest.mark.parametrize("group, count", [
    (cyclic(4), 3),
    (cyclic(12), 6),
    (dihedral(4), 10),
    (direct_product([cyclic(2), cyclic(4)]), 8),
    (direct_product([cyclic(2), cyclic(2), cyclic(2)]), 16),
])
def test_all_subgroups(group, count):
    subgroups = all_subgroups(group)
    assert len(subgroups) == count
    assert subgroups[0] == trivial_subgroup(group)
    assert subgroups[-1].order == group.order
    keys = [(s.order, s.elements) for s in subgroups]
    assert keys == sorted(keys)
    for s in subgroups:
        assert group.order % s.order == 0


def test_make_subgroup():
    group = dihedral(4)
    assert make_subgroup(group, [2, 0]).elements == (0, 2)
    with pytest.raises(GroupSpecError) as err:
        make_subgroup(group, [0, 1])
    assert err.value.code == "NotASubgroup"
    with pytest.raises(GroupSpecError):
        make_subgroup(group, [1, 3])


def test_subgroup_closure():
    group = cyclic(12)
    assert subgroup_closure(group, [8]).elements == (0, 4, 8)
    assert subgroup_closure(group, [4, 6]).elements == (0, 2, 4, 6, 8, 10)
    assert subgroup_closure(group, []).elements == (0,)


def test_coset_space_order_and_action():
    group = dihedral(4)
    space = coset_space(group, make_subgroup(group, [0, 2]))
    assert space.coset_count == 4
    assert space.rep == (0, 1, 3, 5)
    assert space.members(3) == (5, 6)
    assert space.act(3, 0) == 2
    assert is_action_homomorphism(space)
    assert coset_space(group, make_subgroup(group, [0, 2])) is space


def test_validate_cm_datum():
    group = cyclic(4)
    datum = validate_cm_datum(group, trivial_subgroup(group), 2)
    assert datum.g_dim == 2
    assert [datum.conjugate_coset(j) for j in range(4)] == [2, 3, 0, 1]


@pytest.mark.parametrize("group, h, c, code", [
    (cyclic(4), [0], 1, "NotInvolution"),
    (dihedral(4), [0], 2, "NotCentral"),
    (cyclic(4), [0, 2], 2, "ConjugationFixesField"),
])
def test_validate_cm_datum_rejects(group, h, c, code):
    with pytest.raises(CmDatumError) as err:
        validate_cm_datum(group, make_subgroup(group, h), c)
    assert err.value.code == code


def test_validate_cm_datum_index_out_of_range():
    group = cyclic(4)
    with pytest.raises(GroupSpecError):
        validate_cm_datum(group, trivial_subgroup(group), 4)


def test_permutation_spec_and_its_table_agree():
    from_perms = make_group({"perms": D4_GENERATORS})
    from_table = make_group({"table": [list(row) for row in from_perms.mul]})
    assert from_perms == from_table


def test_reflection_subgroup_and_its_cosets():
    group = dihedral(4)
    h = subgroup_closure(group, [2])
    assert h.elements == (0, 2)
    datum = validate_cm_datum(group, h, 3)
    assert datum.g_dim == 2
    for j in range(datum.sigma.coset_count):
        assert datum.conjugate_coset(j) != j
        assert datum.conjugate_coset(datum.conjugate_coset(j)) == j

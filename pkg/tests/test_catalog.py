import pytest

from ppalg import catalog, pimod
from ppalg.catalog import (a2_suite, b2_suite, generalized_simple,
                           leclerc_module, leclerc_suite)
from ppalg.pimod import hom_dim, iso_test


class TestGeneralizedSimples:
    def test_b2_relabeled_convention(self):
        datum = catalog.b2_relabeled_datum()
        E2 = generalized_simple(datum, 2)
        assert E2.dims == {1: 0, 2: 2}
        assert E2.eps[2].power(2).is_zero() and not E2.eps[2].is_zero()
        assert pimod.check_relations(E2) == []
        assert pimod.is_crystal(E2)

    def test_a2_simples_are_one_dimensional(self):
        datum = catalog.a2_datum()
        assert generalized_simple(datum, 1).dim_total() == 1

    def test_unknown_vertex(self):
        with pytest.raises(KeyError):
            generalized_simple(catalog.a2_datum(), 7)


@pytest.fixture(scope="module")
def suite():
    return b2_suite(seed=0)


class TestB2Suite:
    def test_six_certified_entries(self, suite):
        assert [e.label for e in suite.entries] == \
            ["1/1", "2", "1/1/2", "2/1/1", "2/12/1", "1/21/2"]
        for e in suite.entries:
            assert e.locally_free and e.crystal and e.rigid and e.indecomposable

    def test_pairwise_non_isomorphic(self, suite):
        mods = [e.module for e in suite.entries]
        for a in range(len(mods)):
            for b in range(a + 1, len(mods)):
                assert iso_test(mods[a], mods[b]) is False

    def test_rank_vectors(self, suite):
        ranks = [pimod.rank_vector(e.module) for e in suite.entries]
        assert ranks == [(1, 0), (0, 1), (1, 1), (1, 1), (1, 2), (1, 2)]
        assert [pimod.rank_vector(e.module) for e in suite.extras] == [(2, 2), (1, 2)]

    def test_expected_table_shape(self, suite):
        assert len(suite.expected_table) == 36
        labels = {e.label for e in suite.entries} | {e.label for e in suite.extras}
        for cell in suite.expected_table.values():
            assert all(l in labels for l in cell)

    def test_split_cell_expansion(self, suite):
        assert suite.expected_table[("1/1", "1/1")] == ("1/1", "1/1")
        assert suite.expected_table[("1/1", "2")] == ("1/1/2",)


class TestA2Suite:
    def test_expected_products(self):
        suite = a2_suite(seed=0)
        assert suite.expected["(s1*s2)*s1"] == ("1", "1/2")
        assert suite.expected["s1*(s2*s1)"] == ("1", "2/1")


class TestLeclercFamily:
    def test_invariant_dimensions(self):
        A = leclerc_module(1, 0)
        B = leclerc_module(1, 1)
        assert hom_dim(A, A) == 3
        assert hom_dim(A, B) == 2 and hom_dim(B, A) == 2
        assert pimod.ext1_dim(A, B) == 0
        assert pimod.ext1_dim(A, A) == 2
        assert pimod.is_rigid(A) == (False, 1)

    def test_projective_coordinates(self):
        assert iso_test(leclerc_module(1, 1), leclerc_module(2, 2))
        assert iso_test(leclerc_module(1, 2), leclerc_module(3, 6))
        assert iso_test(leclerc_module(1, 1), leclerc_module(1, 2)) is False

    def test_zero_parameters_rejected(self):
        with pytest.raises(ValueError):
            leclerc_module(0, 0)

    def test_suite_flags(self):
        _, entries = leclerc_suite()
        assert len(entries) == 3
        for e in entries:
            assert e.crystal and not e.rigid

    def test_self_extension_has_rigid_middle_only_on_diagonal(self):
        from ppalg import starop
        M = leclerc_module(1, 0)
        N = leclerc_module(0, 1)
        diag = starop.generic_extension(M, M, trials=8, seed=0)
        assert diag.rigid and diag.ext_self == 0
        cross = starop.generic_extension(M, N, trials=8, seed=0)
        assert not cross.rigid


def test_all_entries_unique_labels():
    entries = catalog.all_entries(seed=0)
    labels = [label for label, _ in entries]
    assert len(labels) == len(set(labels))
    assert "b2:1/1/2" in labels and "a2:1" in labels
    assert any(label.startswith("a5:leclerc") for label in labels)

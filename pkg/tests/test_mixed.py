import numpy as np
import pytest

from milnorvf import corpus
from milnorvf.errors import GermError, PreconditionError
from milnorvf.mixed import (
    MixedFunction,
    MslRecipe,
    QQi,
    complex_to_real,
    hermitian,
    identification_residuals,
    msl_check,
    msl_generate,
    pairing_polynomial,
    parse_mixed,
    parse_recipe,
    product_identity_residuals,
    random_holomorphic,
    random_mixed,
    random_recipe,
    real_to_complex,
    realify,
    serialize_mixed,
    wirtinger_frame,
)


def mf(text, names=("z",)):
    return MixedFunction.from_expr(text, list(names))


def test_wirtinger_derivatives_of_z_plus_zbar_sq():
    f = corpus.z_plus_zbar2()
    assert f.d_z(0) == mf("1")
    assert f.d_zbar(0) == mf("2*zb")
    fr = wirtinger_frame(f, [1.0])
    assert fr.dholo[0] == pytest.approx(1.0)
    assert fr.dantiholo[0] == pytest.approx(2.0)
    assert fr.pairing == pytest.approx(2.0)


def test_wirtinger_of_norm_square():
    f = mf("z*zb")
    assert f.d_z(0) == mf("zb") and f.d_zbar(0) == mf("z")
    assert f.conjugate() == f
    assert f.imag_part().is_zero()


def test_conjugate_and_parts():
    f = mf("(1+2*I)*z**2*zb")
    assert f.conjugate() == mf("(1-2*I)*z*zb**2")
    assert f.real_part() + f.imag_part().scale(QQi.of(1j)) == f


def test_hermitian_convention():
    u, v = np.array([1j, 2]), np.array([1, 1j])
    assert hermitian(u, v) == pytest.approx(1j * 1 + 2 * (-1j))


def test_complex_real_round_trip():
    z = np.array([1 + 2j, -3 - 0.5j])
    x = complex_to_real(z)
    assert list(x) == [1, 2, -3, -0.5]
    assert np.allclose(real_to_complex(x), z)


def test_realify_known_example():
    g = realify(corpus.z_plus_zbar2())
    assert g.var_names == ("z_re", "z_im")
    assert g.components[0] == g.components[0].from_expr("z_re + z_re**2 - z_im**2", g.var_names)
    assert g.components[1] == g.components[1].from_expr("z_im - 2*z_re*z_im", g.var_names)


def test_realify_matches_numeric_evaluation():
    rng = np.random.default_rng(5)
    for _ in range(20):
        f = random_mixed(rng, 3)
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        vals = realify(f).values(complex_to_real(z))
        assert vals[0] + 1j * vals[1] == pytest.approx(f(z), rel=1e-12, abs=1e-12)


def test_realify_preserves_degree():
    rng = np.random.default_rng(6)
    for _ in range(20):
        f = random_mixed(rng, 2, max_deg=4)
        g = realify(f)
        nonzero = [c for c in g.components if not c.is_zero()]
        assert max(c.degree() for c in nonzero) == f.degree()


def test_identification_residuals_vanish():
    rng = np.random.default_rng(7)
    for _ in range(30):
        f = random_mixed(rng, 3)
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        ru, rv = identification_residuals(f, z)
        bound = 1e-10 * (1 + np.linalg.norm(z) ** f.degree())
        assert ru <= bound and rv <= bound


def test_wirtinger_dimension_mismatch():
    with pytest.raises(PreconditionError):
        wirtinger_frame(corpus.z_plus_zbar2(), [1.0, 2.0])


def test_msl_z_plus_zbar_sq_fails_with_witness():
    v = msl_check(corpus.z_plus_zbar2())
    assert not v.holds
    assert v.witness == mf("2*z")
    assert v.to_dict()["witness"] == "2*z"


def test_msl4_is_msl_and_matches_generator():
    f = corpus.msl4()
    assert msl_check(f).holds and msl_check(f, "im_only").holds
    assert msl_generate(corpus.msl4_recipe()) == f
    assert parse_recipe(corpus.msl4_recipe_document()) == corpus.msl4_recipe()


def test_pairing_polynomial_of_norm_square():
    # conj(zbar) * conj(z) = z * zbar, real but nonzero: im_only holds, full fails
    f = mf("z*zb")
    assert pairing_polynomial(f) == mf("z*zb")
    assert msl_check(f, "im_only").holds
    assert not msl_check(f, "full").holds


def test_msl_mode_validation():
    with pytest.raises(ValueError):
        msl_check(corpus.msl4(), "half")


def test_random_recipes_generate_msl():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        recipe = random_recipe(rng, n, max_deg=4)
        f = msl_generate(recipe)
        assert not f.is_zero()
        assert msl_check(f, "full").holds


def test_full_implies_im_only():
    rng = np.random.default_rng(8)
    for _ in range(40):
        f = random_mixed(rng, 2)
        if msl_check(f, "full").holds:
            assert msl_check(f, "im_only").holds
    f = msl_generate(random_recipe(rng, 3))
    assert msl_check(f, "im_only").holds


def test_holomorphic_fast_path():
    rng = np.random.default_rng(9)
    for _ in range(20):
        f = random_holomorphic(rng, int(rng.integers(1, 5)))
        assert f.is_holomorphic()
        assert all(f.d_zbar(j).is_zero() for j in range(f.num_cvars))
        v = msl_check(f)
        assert v.holds and v.witness is None


def test_recipe_rejects_wrong_block_piece():
    doc = corpus.msl4_recipe_document()
    doc["h"] = [[{"coef": "-1", "exps": [1, 0, 0, 3]}]]
    with pytest.raises(GermError, match="outside its block"):
        parse_recipe(doc)


def test_recipe_rejects_non_holomorphic_piece():
    r = corpus.msl4_recipe()
    bad = MslRecipe(r.n, r.block, f=(mf("z1*z1b", corpus.MSL4_NAMES),) + r.f[1:], g=r.g, r=r.r, h=r.h)
    with pytest.raises(GermError, match="not holomorphic"):
        bad.validate()


@pytest.mark.parametrize("block", [[], [1, 2, 3, 4], [3, 1], [0, 2]])
def test_recipe_rejects_bad_blocks(block):
    doc = corpus.msl4_recipe_document()
    doc["block"] = block
    with pytest.raises(GermError):
        parse_recipe(doc)


def test_mixed_document_round_trip():
    f = corpus.msl4()
    assert parse_mixed(serialize_mixed(f)) == f
    assert parse_mixed(f.to_document()).cvar_names == tuple(corpus.MSL4_NAMES)


@pytest.mark.parametrize(
    "doc",
    [
        {"kind": "real"},
        {"kind": "mixed", "cvars": ["z"], "terms": []},
        {"kind": "mixed", "cvars": ["z"], "terms": [{"coef": ["1", "0"], "zexp": [0], "zbarexp": [0]}]},
        {"kind": "mixed", "cvars": ["z"], "terms": [{"coef": ["1", "0"], "zexp": [1, 0], "zbarexp": [0]}]},
        {"kind": "mixed", "cvars": ["z"], "terms": [{"coef": ["1"], "zexp": [1], "zbarexp": [0]}]},
    ],
)
def test_parse_mixed_rejects(doc):
    with pytest.raises(GermError):
        parse_mixed(doc)


def test_format_shows_conjugates():
    assert corpus.z_plus_zbar2().format() == "conj(z)^2 + z"


def test_product_identities_for_y_norm_x_sq():
    rng = np.random.default_rng(10)
    f, g = corpus.y_factor(), corpus.norm_x_sq_factor()
    for _ in range(20):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        res = product_identity_residuals(f, g, z)
        assert res.within(1e-10)


def test_product_identities_block_mismatch():
    with pytest.raises(PreconditionError):
        product_identity_residuals(corpus.y_factor(), corpus.norm_x_sq_factor(), [1.0])


def test_separable_product_layout():
    F = corpus.y_norm_x_sq()
    assert F.cvar_names == ("y", "x")
    assert F == MixedFunction.from_expr("y*x*xb", ["y", "x"])

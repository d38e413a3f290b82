"""Named germs used by the CLI data files, the test-suite and the acceptance run."""

from __future__ import annotations

from .germ import PolyMapGerm
from .mixed import MixedFunction, MslRecipe, separable_product


def xy_xz() -> PolyMapGerm:
    return PolyMapGerm.from_exprs(["x*y", "x*z"], ["x", "y", "z"])


def linear_xy() -> PolyMapGerm:
    return PolyMapGerm.from_exprs(["x", "y"], ["x", "y", "z"])


def lmap8() -> PolyMapGerm:
    """An 8-variable real pair with orthogonal gradients of equal norm."""
    names = ["x", "y", "z", "w", "a", "b", "c", "d"]
    g1 = "-w**2*x**2 + w**2*y**2 + 4*w*x*y*z + x**2*z**2 - y**2*z**2 + a*c + b*d"
    g2 = "-2*w**2*x*y - 2*w*x**2*z + 2*w*y**2*z + 2*x*y*z**2 - a*d + b*c"
    return PolyMapGerm.from_exprs([g1, g2], names)


MSL4_NAMES = ["z1", "z2", "z3", "z4"]


def msl4() -> MixedFunction:
    return MixedFunction.from_expr("z1**2*z2b**2 + z3*z4b + z1**4 - z3 - z2b*z4b**3", MSL4_NAMES)


def msl4_recipe() -> MslRecipe:
    """Block {z1, z3} against {z2, z4}; the conjugated piece carries the minus sign."""

    def hol(text):
        return MixedFunction.from_expr(text, MSL4_NAMES)

    return MslRecipe(
        n=4,
        block=(0, 2),
        f=(hol("z1**2"), hol("z3")),
        g=(hol("z2**2"), hol("z4")),
        r=(hol("z1**4 - z3"),),
        h=(hol("-z2*z4**3"),),
    )


def msl4_recipe_document() -> dict:
    return {
        "n": 4,
        "block": [1, 3],
        "cvars": MSL4_NAMES,
        "f": [[{"coef": "1", "exps": [2, 0]}], [{"coef": "1", "exps": [0, 1]}]],
        "g": [[{"coef": "1", "exps": [2, 0]}], [{"coef": "1", "exps": [0, 1]}]],
        "r": [[{"coef": "1", "exps": [4, 0]}, {"coef": "-1", "exps": [0, 1]}]],
        "h": [[{"coef": "-1", "exps": [1, 3]}]],
    }


def z_plus_zbar2() -> MixedFunction:
    return MixedFunction.from_expr("z + zb**2", ["z"])


def y_factor() -> MixedFunction:
    return MixedFunction.from_expr("y", ["y"])


def norm_x_sq_factor() -> MixedFunction:
    return MixedFunction.from_expr("x*xb", ["x"])


def y_norm_x_sq() -> MixedFunction:
    """F(y, x) = y * |x|^2 as the separable product of f(y) = y and g(x) = x * conj(x)."""
    return separable_product(y_factor(), norm_x_sq_factor())

"""Curated example manifolds as graphs of groups.

Each builder returns a fresh, validated :class:`GraphOfGroups`.  The
hyperbolic pieces are matrix groups over quadratic rings; their
faithfulness and the maximality of the cusp subgroups are assumptions
documented in ``NOTES`` and checked only through their consequences
(relations hold, cusp bases are parabolic, commute and are independent).
"""

from __future__ import annotations

from functools import lru_cache

from .backends.kleinian import Kleinian
from .backends.seifert import CircleBundle, ConeSFS
from .graph import EdgeSpec, GraphOfGroups, build_gog, validate_jsj
from .quadint import EISENSTEIN, GAUSSIAN

SWAP = ((0, 1), (1, 0))
ONE = (1, 0)
ZERO = (0, 0)


class UnknownPreset(KeyError):
    pass


def letters(s: str) -> list[tuple[str, int]]:
    """``"bAB"`` -> ``[("b", 1), ("a", -1), ("b", -1)]``: capitals are inverses."""
    return [(c.lower(), 1 if c.islower() else -1) for c in s]


def figure_eight_group(budget: int = 8) -> Kleinian:
    # a = [[1,1],[0,1]], b = [[1,0],[-tau,1]] with tau^2 + tau + 1 = 0.
    # With W = a^-1 b a b^-1 the one relation reads W a W^-1 = b.
    return Kleinian(
        EISENSTEIN,
        {"a": ((ONE, ONE), (ZERO, ONE)), "b": ((ONE, ZERO), ((0, -1), ONE))},
        relators=[letters("AbaB" + "a" + "bABa" + "B")],
        cusps=[(letters("a"), letters("bABaaBAb"), ((ONE, ZERO), (ZERO, ONE)))],
        budget=budget,
        name="fig8",
    )


def whitehead_group(budget: int = 8) -> Kleinian:
    # Two-bridge link 8/3 over the Gaussian integers: a = [[1,1],[0,1]],
    # b = [[1,0],[-1+i,1]], relation [a, w] = 1 with w = b a^-1 b^-1 a^-1 b a b.
    w = "baBABab"
    return Kleinian(
        GAUSSIAN,
        {"a": ((ONE, ONE), (ZERO, ONE)), "b": ((ONE, ZERO), ((-1, 1), ONE))},
        relators=[letters("a" + w + "A" + "BAbabAB")],
        cusps=[
            (letters("a"), letters(w), ((ONE, ZERO), (ZERO, ONE))),
            (letters("b"), letters("abABAba"), ((ZERO, ONE), ((-1, 0), ZERO))),
        ],
        budget=budget,
        name="whitehead",
    )


def trefoil_group() -> ConeSFS:
    return ConeSFS((2, 3), (1, 1))


def _trefoil() -> GraphOfGroups:
    return build_gog({"K": trefoil_group()}, name="trefoil")


def _fig8() -> GraphOfGroups:
    return build_gog({"F": figure_eight_group()}, name="fig8")


def _whitehead() -> GraphOfGroups:
    return build_gog({"W": whitehead_group()}, name="whitehead")


def _graph_manifold() -> GraphOfGroups:
    return build_gog(
        {"A": CircleBundle(2), "B": CircleBundle(2)},
        [EdgeSpec("e", "A", 0, "B", 0, SWAP)],
        name="graph_manifold",
    )


def _hnn_bundle() -> GraphOfGroups:
    return build_gog(
        {"A": CircleBundle(2)},
        [EdgeSpec("t", "A", 0, "A", 1, SWAP)],
        name="hnn_bundle",
    )


def _mixed() -> GraphOfGroups:
    return build_gog(
        {"K": trefoil_group(), "W": whitehead_group()},
        [EdgeSpec("e", "K", 0, "W", 0, SWAP)],
        name="mixed",
    )


BUILDERS = {
    "trefoil": _trefoil,
    "fig8": _fig8,
    "whitehead": _whitehead,
    "graph_manifold": _graph_manifold,
    "hnn_bundle": _hnn_bundle,
    "mixed": _mixed,
}

NOTES = {
    "trefoil": "Trefoil knot exterior: Seifert fibered over a disk with cone points of orders 2 and 3.",
    "fig8": (
        "Figure-eight knot exterior, the arithmetic two-generator representation into "
        "PSL(2, Z[omega]), omega a primitive cube root of unity (Riley's representation). "
        "Faithfulness and discreteness are classical and assumed here."
    ),
    "whitehead": (
        "Whitehead link exterior as the two-bridge link 8/3, represented over the Gaussian "
        "integers. Faithfulness and maximality of both cusp subgroups are assumed."
    ),
    "graph_manifold": "Two copies of (pair of pants) x S^1 glued along one torus, swapping fiber and section.",
    "hnn_bundle": "(pair of pants) x S^1 with two boundary tori glued to each other, swapping fiber and section.",
    "mixed": (
        "Trefoil exterior glued to one cusp of the Whitehead link exterior, swapping the "
        "trefoil fiber and boundary curve with the cusp meridian and longitude. The second "
        "cusp stays a free boundary torus of the hyperbolic piece."
    ),
}


def preset_names() -> list[str]:
    return list(BUILDERS)


@lru_cache(maxsize=None)
def load_preset(name: str) -> GraphOfGroups:
    """Validated preset; instances are cached and must be treated as read only."""
    if name not in BUILDERS:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(BUILDERS)}")
    gog = BUILDERS[name]()
    report = validate_jsj(gog)
    if not report.ok:
        raise AssertionError(f"preset {name} fails validation: {report.issues}")
    return gog

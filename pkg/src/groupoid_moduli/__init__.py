"""Finite groupoid gauge theory on surfaces and numerical Lie algebroid checks."""
from .errors import (
    AxiomError,
    GroupoidModuliError,
    InputError,
    NotASubgroupoid,
    SizeLimitError,
    StructuralError,
    VerificationError,
)
from .fingroupoid import (
    FiniteGroupoid,
    Subgroupoid,
    action_groupoid,
    base_subgroupoid,
    bisections,
    conjugate_isotropy,
    disjoint_union,
    double_coset,
    full_subgroupoid,
    generated_subgroupoid,
    group_as_groupoid,
    isotropy_group,
    leaves,
    pair_groupoid,
    subgroupoid,
    validate,
)
from .lattice import LatticeMorphism, enumerate_flat, gauge_orbits, holonomy
from .moduli import compare_lattice_vs_holonomy, count_morphisms, moduli_closed, moduli_interval, moduli_open
from .surface import bordered_cw, genus_g_cw, sphere_cw, spanning_tree, torus_grid

__version__ = "0.1.0"

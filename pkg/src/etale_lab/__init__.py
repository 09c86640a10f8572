"""Exact symbolic workbench for etale groupoids presented by inverse
semigroup actions and germ-witness systems."""

__version__ = "0.1.0"

from .topology import (  # noqa: F401
    Atom,
    ConstructibleSet,
    OpenSet,
    Space,
    UPPoint,
    atoms,
    closure,
    contains_point,
    has_empty_interior,
    interior,
    is_meagre,
    is_nowhere_dense,
    sample_point,
    set_algebra,
)
from .maps import FixRegion, PartialMap, agreement_region, compose, local_agreement  # noqa: F401
from .semigroups import (  # noqa: F401
    CapExceeded,
    InverseSemigroup,
    SemigroupAxiomError,
    generate_closure,
    meet_witnesses,
    validate,
    witness_domain,
)
from .germs import Arrow, GermSystem, Slice, GermAxiomError, UndefinedProductError  # noqa: F401
from .freeness import (  # noqa: F401
    FreenessReport,
    NotFoundUpTo,
    Unstable,
    Verdict,
    Witness,
    fix_sets,
    freeness_report,
    invariant,
    is_minimal,
    pure_infiniteness_witness,
    saturate,
)
from .scalars import Scalar  # noqa: F401
from .sections import NormalForm, PointFunction, Section, delta, unit_section  # noqa: F401
from .orbits import (  # noqa: F401
    NonConvergenceError,
    NormProbe,
    OrbitBasis,
    OrbitMatrix,
    lambda_matrix,
    operator_norm,
    orbit_basis,
    orbit_points,
    orbit_sum_matrix,
    reduced_norm_probe,
)
from .scenario import Scenario, ScenarioError, load, loads, parse_section  # noqa: F401

"""rotorb: a computational laboratory for plane and space rotation groups."""

from rotorb.geometry import (
    Angle,
    AngleClass,
    DirectedIsometry,
    Line3,
    Point2,
    apply_point,
    classify_angle,
    compose,
    conform_rationally,
    inverse,
    line_relation,
    make_rotation,
    transform_axis,
)
from rotorb.words import (
    GeneratorSet,
    Letter,
    format_word,
    frame_distance,
    make_generators,
    parse_word,
    peripatetic_eval,
    random_reduced_word,
    reduce,
    stationary_eval,
    transport_isomorphism,
)
from rotorb.orbit import (
    OrbitCloud,
    SamplerBudget,
    bfs_orbit,
    circle_gap_stats,
    coverage,
    discreteness_report,
    ladder_orbit,
    make_density_report,
    mesh_estimate,
    sphere_confinement_check,
)
from rotorb.tetra import (
    Tetrahedron,
    edge_rotations,
    dihedral_angle,
    hexagon_report,
    regular_tetrahedron,
    tumble,
)

__version__ = "0.1.0"

__all__ = [
    "Angle",
    "AngleClass",
    "DirectedIsometry",
    "GeneratorSet",
    "Letter",
    "Line3",
    "OrbitCloud",
    "Point2",
    "SamplerBudget",
    "Tetrahedron",
    "apply_point",
    "bfs_orbit",
    "circle_gap_stats",
    "classify_angle",
    "compose",
    "conform_rationally",
    "coverage",
    "dihedral_angle",
    "discreteness_report",
    "edge_rotations",
    "format_word",
    "frame_distance",
    "hexagon_report",
    "inverse",
    "ladder_orbit",
    "line_relation",
    "make_density_report",
    "make_generators",
    "make_rotation",
    "mesh_estimate",
    "parse_word",
    "peripatetic_eval",
    "random_reduced_word",
    "reduce",
    "regular_tetrahedron",
    "sphere_confinement_check",
    "stationary_eval",
    "transform_axis",
    "transport_isomorphism",
    "tumble",
    "__version__",
]

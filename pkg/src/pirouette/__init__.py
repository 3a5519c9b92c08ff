"""Area-preserving planar maps from generating functions: solvers,
winding and rotation numbers, discrete action, periodic-orbit search."""

from .backend import BACKEND
from .errors import (Aliased, ConfigInvalid, ConvergedToPuncture, DomainError,
                     EmptySample, FixedPointOnCurve, HypothesisViolated,
                     IllConditioned, InvariantBreach, NonConvergence,
                     NormalFormViolated, NotCritical, NotIrreducible,
                     NotIsolated, NumericalError, OrbitEscaped, OutOfWindow,
                     PirouetteError, PunctureHit, SeedDisagreement,
                     VanishingField)
from .action import (ActionChain, CriticalReport, action_gradient,
                     action_hessian, action_value, find_critical_point,
                     morse_data)
from .catalog import (CatalogEntry, catalog_names, get_map,
                      load_definition, resolve_map, save_definition)
from .genfun import (GeneratedMap, GeneratingFunction, MapFactorization,
                     Window, compose, eigenvector_transport_check)
from .prospector import (OrbitRecord, OrbitSearch, ProbeReport,
                         PropertyPReport, degenerate_extremum_probe,
                         find_pq_orbit, orbit_measure_stats,
                         property_p_experiment, seed_rings_for,
                         twist_profile)
from .rotation import (BlowupRotation, FareyInterval, RotationSample,
                       RotationSetEstimate, blowup_rotation_number,
                       farey_interval, local_rotation_scan,
                       local_rotation_set, orbit_rotation_number,
                       rigid_rotation_terms)
from .winding import (Circle, IndexReport, LiftedPath, Polyline,
                      brouwer_degree, isotopy_index, lefschetz_index)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Window", "GeneratingFunction", "GeneratedMap",
    "MapFactorization", "compose", "eigenvector_transport_check",
    "Circle", "Polyline", "LiftedPath", "IndexReport", "brouwer_degree",
    "lefschetz_index", "isotopy_index",
    "BlowupRotation", "RotationSample", "RotationSetEstimate",
    "FareyInterval", "blowup_rotation_number", "orbit_rotation_number",
    "local_rotation_set", "local_rotation_scan", "farey_interval",
    "rigid_rotation_terms",
    "ActionChain", "CriticalReport", "action_value", "action_gradient",
    "action_hessian", "morse_data", "find_critical_point",
    "OrbitRecord", "OrbitSearch", "PropertyPReport", "ProbeReport",
    "find_pq_orbit", "orbit_measure_stats", "property_p_experiment",
    "degenerate_extremum_probe", "seed_rings_for", "twist_profile",
    "CatalogEntry", "get_map", "catalog_names", "resolve_map",
    "save_definition", "load_definition",
    "PirouetteError", "ConfigInvalid", "HypothesisViolated",
    "NumericalError", "NonConvergence", "Aliased", "SeedDisagreement",
    "OrbitEscaped", "PunctureHit", "DomainError", "OutOfWindow",
    "NotCritical", "NormalFormViolated", "VanishingField",
    "FixedPointOnCurve", "NotIsolated", "NotIrreducible",
    "ConvergedToPuncture", "EmptySample", "InvariantBreach",
    "IllConditioned",
    "__version__",
]

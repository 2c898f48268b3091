"""Pure point diffraction and the homometry problem on finite abelian groups."""

from .abelian import FiniteAbelianGroup, GroupFunction, dft, idft, make_group
from .density import Density, PointMeasure, bragg_spectrum, diffraction, homometric
from .exceptions import DiffraktError, NumericalContractError, ResourceCapError, ValidationError
from .estimators import DiffractionTransformer, PhaseExtractor
from .inverse import density_from_phase, extract_phase_from_density, solve_family
from .phaseforms import ElementaryPhaseForm, make_elementary, same_phase_form
from .process import ProcessModel, build_process
from .relators import canonical_basis, relator_lattice

__all__ = [
    "FiniteAbelianGroup",
    "GroupFunction",
    "dft",
    "idft",
    "make_group",
    "Density",
    "PointMeasure",
    "bragg_spectrum",
    "diffraction",
    "homometric",
    "DiffraktError",
    "NumericalContractError",
    "ResourceCapError",
    "ValidationError",
    "DiffractionTransformer",
    "PhaseExtractor",
    "density_from_phase",
    "extract_phase_from_density",
    "solve_family",
    "ElementaryPhaseForm",
    "make_elementary",
    "same_phase_form",
    "ProcessModel",
    "build_process",
    "canonical_basis",
    "relator_lattice",
]

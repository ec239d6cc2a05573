# sharing/__init__.py

from .access_structures import (
    AccessStructureBasis,
    CompartmentSpec,
    HierarchicalSpec,
    basis_from_predicate,
    compartment_basis,
    hierarchical_basis,
    is_authorized,
    minimize,
    reduce_to_basis,
    threshold_basis,
)
from .errors import SharingError
from .hss import (
    HashSpec,
    PublicControlArea,
    Share,
    recover,
    refresh,
    setup,
    verify_returned_shares,
    verify_share,
)

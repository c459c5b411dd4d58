"""Bounded complexes, the homotopy category ``K^b(proj)`` and functors on it."""

from .core import (
    BlockMap,
    HomKb,
    HomotopyWitness,
    Layout,
    NotNullHomotopic,
    ProjCategory,
    ProjChainMap,
    ProjComplex,
    block_matrix,
    cone,
    cone_map,
    direct_sum,
    hom_kb,
    homotopic,
    is_null_homotopic,
    minimize,
    null_homotopy,
    shift,
)
from .functors import FunctorData, InfiniteGlobalDimension, apply_nu_n, identity_functor, nu_functor, shift_functor
from .modular import (
    ModuleChainMap,
    ModuleComplex,
    YonedaMap,
    is_quasi_iso,
    lift_through_quasi_iso,
    module_cone,
    projective_replacement,
    realize,
    realize_chain_map,
)

BoundedComplex = ProjComplex
ChainMap = ProjChainMap

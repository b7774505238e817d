"""Localised frames, spectral matrix algebras and the rank-four tensor algebra
built from two of them, on finite truncations of Z^d."""

from .algebras import (
    AlgebraSpec,
    AlgMatrix,
    algebra_norm,
    check_solidity,
    jaffard_norm,
    operator_norm,
    opvalued_norm,
    schur_norm,
    sjostrand_norm,
    weighted_lp_induced_norm,
)
from .errors import (
    CapacityError,
    FrameTensorError,
    InvalidArgumentError,
    NotAFrameError,
    OutOfDomainError,
    PreconditionError,
    SingularityError,
)
from .frames import (
    Frame,
    HSFrame,
    analysis,
    canonical_dual,
    elementary_tensor,
    frame_bounds,
    frame_operator,
    gram_matrix,
    gram_tensor4,
    localisation_report,
    synthesis,
    tensor_product_frame,
)
from .lattice import IndexSet, Weight, check_grs_condition, make_box_index_set, weight_eval
from .tensor4 import (
    Tensor4,
    TensorAlgebraSpec,
    adjoint,
    contract,
    flatten,
    inverse_in_algebra,
    kronecker,
    norm_a,
    norm_a1_tilde,
    norm_a2_tilde,
    slice_inner,
    slice_outer,
    unflatten,
)

__version__ = "0.1.0"

"""Transform-domain tensor algebra and high-order multilinear discriminant analysis."""

from .classify import CvReport, fit_model, kfold_cv, nn_classify, stratified_folds
from .discriminant import (
    DiscriminantModel,
    LabeledTensorDataset,
    Method,
    between_class_scatter,
    class_means,
    homlda_fit,
    matrix_lda_fit,
    project,
    within_class_scatter,
)
from .robust import RobustParams, reestimate_eigs, rhomlda_fit, robust_within_scatter
from .synth import SynthSpec, synthesize
from .tensor_core import (
    facewise_product,
    fold,
    frobenius_norm,
    lateral_slice,
    mode_product,
    stack_lateral,
    unfold,
)
from .tl_algebra import (
    TEigFactors,
    SliceConditionReport,
    slice_condition_numbers,
    t_eig,
    tl_identity,
    tl_inverse,
    tl_product,
    tl_transpose,
)
from .transforms import (
    TransformKind,
    TransformSpec,
    from_transform_domain,
    make_spec,
    make_transform,
    pad_for_transform,
    to_transform_domain,
)

__version__ = "0.1.0"

"""scikit-learn style wrappers so the calculators drop into pipelines and grid searches.

Both transformers are stateless in the learning sense: ``fit`` only checks
the hyper-parameters and builds the quadrature grid.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import ALPHA, PhysicsContext
from .integrals import DEFAULT_BOX, DEFAULT_NODES, CutoffPair, RadialModeGrid, total_photon_number, visibility
from .tomography import (
    Config,
    TomographyScenario,
    build_state_and_reduce,
    entropy_from_overlap,
    expect_C_RL,
    field_gram,
)

__all__ = ["PhotonNumberTransformer", "TomographyTransformer"]


class PhotonNumberTransformer(TransformerMixin, BaseEstimator):
    """Map superposition sizes to scalar-photon number and visibility.

    Parameters
    ----------
    q : float
        Charge in units of e, used when ``X`` has a single column.
    k_min, k_max : float
        Cutoffs in 1/r0.
    n_nodes : int
        Quadrature nodes.
    alpha : float
        Fine-structure constant of the natural-unit context.

    ``X`` has one column (``delta_r``) or two (``delta_r, q``). ``transform``
    returns columns ``n, visibility``.
    """

    def __init__(self, q=1.0, k_min=1.0 / DEFAULT_BOX, k_max=1.0, n_nodes=DEFAULT_NODES, alpha=ALPHA):
        self.q = q
        self.k_min = k_min
        self.k_max = k_max
        self.n_nodes = n_nodes
        self.alpha = alpha

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=1)
        if X.shape[1] not in (1, 2):
            raise ValueError(f"expected 1 or 2 columns (delta_r[, q]), got {X.shape[1]}")
        self.n_features_in_ = X.shape[1]
        self.ctx_ = PhysicsContext.natural(self.alpha)
        self.grid_ = RadialModeGrid.for_cutoffs(CutoffPair(self.k_min, self.k_max), self.n_nodes)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        if np.any(X[:, 0] < 0):
            raise ValueError("delta_r must be nonnegative")
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            q = row[1] if X.shape[1] == 2 else self.q
            n = total_photon_number(float(row[0]), float(q), grid=self.grid_, ctx=self.ctx_)
            out[i] = n, visibility(n)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["n", "visibility"], dtype=object)


class TomographyTransformer(TransformerMixin, BaseEstimator):
    """Map L/R arm separations of the symmetric two-charge layout to tomography outputs.

    ``X`` has one column, the arm separation (both charges). ``transform``
    returns ``n, visibility, c_rl, subspace_weight, entropy_bits``.
    """

    def __init__(self, spacing=10.0, q_A=1.0, q_B=1.0, T=0.0, k_min=1.0 / DEFAULT_BOX, k_max=1.0,
                 n_nodes=DEFAULT_NODES, alpha=ALPHA):
        self.spacing = spacing
        self.q_A = q_A
        self.q_B = q_B
        self.T = T
        self.k_min = k_min
        self.k_max = k_max
        self.n_nodes = n_nodes
        self.alpha = alpha

    def fit(self, X, y=None):
        X = check_array(X)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single separation column, got {X.shape[1]}")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        self.n_features_in_ = 1
        self.ctx_ = PhysicsContext.natural(self.alpha)
        self.cutoffs_ = CutoffPair(self.k_min, self.k_max)
        self.grid_ = RadialModeGrid.for_cutoffs(self.cutoffs_, self.n_nodes)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_array(X)
        if X.shape[1] != 1:
            raise ValueError(f"X has {X.shape[1]} features, expected 1")
        out = np.empty((X.shape[0], 5))
        for i, (sep,) in enumerate(X):
            scn = TomographyScenario.symmetric(
                float(sep), self.spacing, self.q_A, self.q_B, T=self.T, cutoffs=self.cutoffs_, grid=self.grid_
            )
            gram = field_gram(scn, self.ctx_)
            n = float(gram.log_distance[Config.AR_BL, Config.AL_BR])
            c_rl, weight = expect_C_RL(build_state_and_reduce(scn, self.ctx_))
            out[i] = n, visibility(n), c_rl, weight, entropy_from_overlap(gram[Config.AL_BL, Config.AR_BL])
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["n", "visibility", "c_rl", "subspace_weight", "entropy_bits"], dtype=object)

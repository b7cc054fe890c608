"""Bidirectional loss functions for label distribution learning (BD-LDL) and
label enhancement (BD-LE), with evaluation metrics and an experiment harness."""
from .errors import BdlossError, NumericalError, ValidationError
from .graph import feature_map_apply, feature_map_fit, knn_neighbors, similarity_graph
from .ldl import LdlHyper, LdlModel, ldl_objective, predict_ldl, train_bd_ldl, train_ud_ldl
from .le import LeHyper, LeModel, binarize, le_gradient, le_objective, recover, train_bd_le, train_ud_le
from .metrics import METRICS, evaluate_all, rank_table
from .optimize import LbfgsConfig, lbfgs_minimize
from .sylvester import SylvesterSystem, kron_oracle_solve, solve_sylvester

__version__ = "0.1.0"

from skinperm.base.base_forward_solver import BaseForwardSolver
from skinperm.base.base_inverse_solver import BaseInverseSolver

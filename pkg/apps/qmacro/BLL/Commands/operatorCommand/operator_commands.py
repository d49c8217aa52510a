"""
Operator Command Classes
Single-particle and collective O_{k,l} matrices with their commuting sets
"""

import numpy as np

from apps.qmacro.BLL.Commands.runCommand.inputs import check_sizes, parse_label, resolve_fiducial
from apps.qmacro.BLL.Core.collective_ops import collective_op, commuting_sets, matrix_elements, single_particle_op
from apps.qmacro.BLL.Core.zd_strings import weight_labels
from backend.exception_formatter import ExceptionFormatter
from utils.base_result import BaseResultWithData
from utils.enums import ExitCode
from utils.log_helpers import OperationLogger


class OpsCommand:
    """Print the O_{k,l} operators of one particle, or their collective sums"""

    @staticmethod
    def Execute(d, N=1, labels=None, collective=False, fiducial=None):
        """
        Args:
            d (int): Prime local dimension
            N (int): Number of particles for the collective sums
            labels (list[str] | None): Restrict to these k,l labels
            collective (bool): Emit sum_i O^(i) on N particles instead of one particle
            fiducial (str | None): Path to a fiducial config

        Returns:
            BaseResultWithData: matrices as [re, im] pairs, Tr(O^2), closed-form
            residuals and the commuting sets
        """
        op = OperationLogger("OpsCommand", d=d, n=N, collective=collective)
        op.start()
        try:
            check_sizes(d, N)
            xi = resolve_fiducial(fiducial, d, N)
            chosen = [parse_label(x, d) for x in labels] if labels else list(weight_labels(d))

            operators = []
            for k, l in chosen:
                single = single_particle_op(k, l, xi, d).matrix
                entry = {
                    "label": f"O{k}{l}",
                    "trace_square": float(np.real(np.trace(single @ single))),
                    "closed_form_residual": float(np.max(np.abs(single - matrix_elements(k, l, xi, d)))),
                }
                if collective:
                    entry["matrix"] = collective_op(k, l, xi, d, N).matrix
                else:
                    entry["matrix"] = single
                operators.append(entry)
                op.step(f"O{k}{l} built")

            data = {
                "d": d,
                "N": N if collective else 1,
                "operators": operators,
                "commuting_sets": [[f"O{k}{l}" for k, l in group] for group in commuting_sets(d)],
            }
            op.success(f"{len(operators)} operators")
            return BaseResultWithData(data=data, exit_code=ExitCode.OK, message=f"{len(operators)} operators for d={d}")
        except Exception as e:
            return ExceptionFormatter.format_error(e, "OpsCommand", with_data=True)

"""
Tomography Command Classes
Full-space and symmetric-subspace reconstructions from exact data or counts
"""

import numpy as np

from apps.qmacro.BLL.Commands.runCommand.inputs import check_sizes, load_counts, parse_state, resolve_fiducial
from apps.qmacro.BLL.Core.macro_space import build_measurement_space, q_tilde
from apps.qmacro.BLL.Core.sym_subspace import (
    collective_frame, redundancy_check, reconstruct_symmetric, sym_basis_indices, to_symmetric,
)
from apps.qmacro.BLL.Core.tomography import (
    MAX_SYMMETRIZE_N, fidelity, pure_fidelity, reconstruct_full, symmetrize,
)
from backend.exception_formatter import ExceptionFormatter
from backend.exceptions import UsageError
from utils.base_result import BaseResultWithData
from utils.enums import ExitCode, ReconstructionMode, SpaceMethod
from utils.log_helpers import OperationLogger


def _max_abs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


class ReconstructCommand:
    """Rebuild a state from its projected Q-function or collective outcome probabilities"""

    @staticmethod
    def Execute(d, N, mode=ReconstructionMode.FULL, state=None, counts=None, fiducial=None):
        """
        Args:
            d (int): Prime local dimension
            N (int): Number of particles
            mode (ReconstructionMode): full (d^N x d^N) or symmetric (Dicke basis)
            state (str | None): Known input state; exact data is computed from it
            counts (str | None): Path to a counts file used instead of a state
            fiducial (str | None): Path to a fiducial config

        Returns:
            BaseResultWithData: reconstructed matrix, fidelity when the input is
            known, and the redundancy report in symmetric mode
        """
        op = OperationLogger("ReconstructCommand", d=d, n=N, mode=str(mode), state=state, counts=counts)
        op.start()
        try:
            check_sizes(d, N)
            mode = ReconstructionMode(mode)
            if (state is None) == (counts is None):
                raise UsageError("give exactly one of --state or --counts")
            xi = resolve_fiducial(fiducial, d, N)
            space = build_measurement_space(d, N, SpaceMethod.EXHAUSTIVE)
            parsed = parse_state(state, d, N, xi) if state else None
            recorded = load_counts(counts, d, N) if counts else None

            with op.phase(f"{mode.value} reconstruction", classes=len(space)):
                if mode is ReconstructionMode.FULL:
                    data = ReconstructCommand._full(parsed, recorded, xi, space)
                else:
                    data = ReconstructCommand._symmetric(parsed, recorded, xi, space)
            data.update({"d": d, "N": N, "mode": mode.value})

            op.success("reconstruction finished")
            return BaseResultWithData(data=data, exit_code=ExitCode.OK, message=f"{mode.value} reconstruction")
        except Exception as e:
            return ExceptionFormatter.format_error(e, "ReconstructCommand", with_data=True)

    @staticmethod
    def _full(parsed, recorded, xi, space):
        d, N = space.d, space.N
        if parsed is not None:
            table = q_tilde(parsed.rho, xi, space)
        else:
            counts, total = recorded
            table = {m: d ** N * n / total for m, n in counts.items()}
        rho_rec = reconstruct_full(table, xi, space)
        data = {"matrix": rho_rec.matrix, "trace": rho_rec.trace()}
        if parsed is not None:
            data["fidelity"] = fidelity(parsed.rho, rho_rec)
            if parsed.is_pure and N <= MAX_SYMMETRIZE_N:
                data["pure_fidelity"] = pure_fidelity(parsed.vector)
            if N <= MAX_SYMMETRIZE_N:
                data["symmetrization_error"] = _max_abs(rho_rec.matrix, symmetrize(parsed.rho).matrix)
        return data

    @staticmethod
    def _symmetric(parsed, recorded, xi, space):
        frame = collective_frame(space, xi)
        if parsed is not None:
            rho_s = to_symmetric(parsed.rho)
            sigma = frame.probabilities(rho_s)
        else:
            counts, total = recorded
            rho_s = None
            sigma = {m: n / total for m, n in counts.items()}
        rec = reconstruct_symmetric(sigma, xi, space)
        report = redundancy_check(sigma, xi, space)
        data = {
            "basis": [b.occupations for b in sym_basis_indices(space.d, space.N)],
            "matrix": rec.matrix,
            "trace": rec.trace(),
            "redundancy": {
                "max_violation": report.max_violation,
                "constraints": report.constraints,
                "parameters": report.parameters,
            },
        }
        if rho_s is not None:
            data["fidelity"] = float(np.real(np.trace(rho_s.matrix @ rec.matrix)))
            data["error"] = _max_abs(rec.matrix, rho_s.matrix)
        return data

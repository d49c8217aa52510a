"""
Q-tilde Command Classes
Projected Q-functions on the measurement space and multiplicity tables
"""

from apps.qmacro.BLL.Commands.runCommand.inputs import check_sizes, parse_label, parse_state, resolve_fiducial
from apps.qmacro.BLL.Core.macro_space import (
    build_measurement_space, count_multiplets, fiducial_q_symbol, ghz_q_symbol, q_tilde,
    q_tilde_analytic, q_tilde_symmetric, r_closed,
)
from apps.qmacro.BLL.Core.zd_strings import label_names
from backend.exception_formatter import ExceptionFormatter
from backend.exceptions import UsageError
from utils.base_result import BaseResultWithData
from utils.enums import ExitCode, QTildeMethod, SpaceMethod, StateKind
from utils.log_helpers import OperationLogger


class QTildeCommand:
    """Tabulate Q-tilde(m) = sum over the class of Q_rho"""

    @staticmethod
    def Execute(d, N, state="ghz", method=QTildeMethod.FULL, project=None, fiducial=None):
        """
        Compute the projected Q-function of a state.

        Args:
            d (int): Prime local dimension
            N (int): Number of particles
            state (str): ghz | fiducial | dicke:<p> | file:<path>
            method (QTildeMethod): full (dense state), symmetric (class representatives)
                or analytic (closed forms for ghz and fiducial)
            project (list[str] | None): Axis labels to keep in a marginal
            fiducial (str | None): Path to a fiducial config

        Returns:
            BaseResultWithData: columns, rows in lexicographic m order, total and
            the optional marginal
        """
        op = OperationLogger("QTildeCommand", d=d, n=N, state=state, method=str(method))
        op.start()
        try:
            check_sizes(d, N)
            method = QTildeMethod(method)
            xi = resolve_fiducial(fiducial, d, N)
            labels = [parse_label(p, d) for p in project] if project else None

            if method is QTildeMethod.FULL:
                space = build_measurement_space(d, N, SpaceMethod.EXHAUSTIVE)
                parsed = parse_state(state, d, N, xi)
                with op.phase("dense Q-tilde", classes=len(space), state=parsed.kind):
                    table = q_tilde(parsed.rho, xi, space)
            else:
                kind = state.strip().lower()
                if kind not in (StateKind.GHZ.value, StateKind.FIDUCIAL.value):
                    raise UsageError(f"method {method.value} supports only the ghz and fiducial states")
                kind = StateKind(kind)
                space = build_measurement_space(d, N, SpaceMethod.ORBITS)
                if method is QTildeMethod.ANALYTIC:
                    table = q_tilde_analytic(kind, d, N, space=space, xi=xi)
                else:
                    symbol = ghz_q_symbol if kind is StateKind.GHZ else fiducial_q_symbol
                    fid = xi.for_particles(N)
                    table = q_tilde_symmetric(lambda a, b: symbol(fid, a, b), space)

            rows = [list(m.entries) + [r, value] for m, r, value in table.rows()]
            data = {
                "d": d, "N": N, "state": state, "method": method.value,
                "columns": label_names(d) + ["R", "qtilde"],
                "rows": rows,
                "total": table.total(),
            }
            if labels:
                data["project"] = [f"m{k}{l}" for k, l in labels]
                data["marginal"] = [list(key) + [value] for key, value in sorted(table.marginal(labels).items())]

            op.success("Q-tilde tabulated", classes=len(rows), total=data["total"])
            return BaseResultWithData(data=data, exit_code=ExitCode.OK, message=f"Q-tilde over {len(rows)} classes")
        except Exception as e:
            return ExceptionFormatter.format_error(e, "QTildeCommand", with_data=True)


class MultiplicityCommand:
    """Compare enumerated multiplicities with the closed forms"""

    @staticmethod
    def Execute(d, N, method=SpaceMethod.EXHAUSTIVE):
        """
        Args:
            d (int): Prime local dimension
            N (int): Number of particles
            method (SpaceMethod): exhaustive scan or permutation orbits

        Returns:
            BaseResultWithData: rows (m, R_enum, R_closed, match) and totals;
            exit 1 when any row or total disagrees
        """
        op = OperationLogger("MultiplicityCommand", d=d, n=N, method=str(method))
        op.start()
        try:
            check_sizes(d, N)
            space = build_measurement_space(d, N, SpaceMethod(method))
            closed = d in (2, 3)
            rows, mismatches = [], 0
            for m, r in space.items():
                rc = r_closed(d, m) if closed else None
                match = rc == r if closed else None
                mismatches += match is False
                rows.append(list(m.entries) + [r, rc, match])

            total = space.total
            totals = {
                "classes": len(space),
                "expected_classes": count_multiplets(d, N),
                "sum_R": total,
                "expected_sum_R": d ** (2 * N),
            }
            ok = (mismatches == 0 and totals["classes"] == totals["expected_classes"]
                  and total == totals["expected_sum_R"])
            data = {
                "d": d, "N": N, "method": SpaceMethod(method).value,
                "columns": label_names(d) + ["R_enum", "R_closed", "match"],
                "rows": rows,
                "totals": totals,
                "mismatches": mismatches,
            }
            if ok:
                op.success(f"{len(rows)} classes, sum R = {total}")
                return BaseResultWithData(data=data, exit_code=ExitCode.OK, message=f"{len(rows)} classes, all consistent")
            op.fail(f"{mismatches} mismatching rows", exit_code=ExitCode.VERIFICATION_FAILED)
            return BaseResultWithData(data=data, exit_code=ExitCode.VERIFICATION_FAILED,
                                      message=f"{mismatches} rows disagree with the closed form")
        except Exception as e:
            return ExceptionFormatter.format_error(e, "MultiplicityCommand", with_data=True)

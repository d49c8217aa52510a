from backend.exceptions import QMacroError
from utils.base_result import BaseResult, BaseResultWithData
from utils.enums import ExitCode
from utils.log_helpers import OperationLogger


class ExceptionFormatter:
    """
    Turns exceptions raised inside a command into results.
    - Domain errors keep their message and exit code
    - Anything else gets a generic safe message, exit 1 and a logged traceback
    """

    @staticmethod
    def format_error(exc: Exception, command_name: str = "ExceptionFormatter", with_data: bool = False):
        op = OperationLogger(command_name)
        if isinstance(exc, QMacroError):
            exit_code = exc.exit_code
            message = exc.message or type(exc).__name__
            op.fail(f"{type(exc).__name__}: {exc}", exit_code=exit_code)
        else:
            exit_code = ExitCode.VERIFICATION_FAILED
            message = "An unexpected error occurred. See logs/app.log for the traceback."
            op.fail(f"{type(exc).__name__}: {exc}", exc=exc, exit_code=exit_code)

        if with_data:
            return BaseResultWithData(data=None, exit_code=exit_code, message=message)
        return BaseResult(exit_code=exit_code, message=message)

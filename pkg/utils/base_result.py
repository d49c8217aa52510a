import uuid
from dataclasses import dataclass, field
from typing import Any

from utils.enums import ExitCode

FAILED_MESSAGE = "The operation failed; see logs/app.log"


@dataclass
class BaseResult:
    """Outcome of a command class; the exit code becomes the process status."""

    exit_code: ExitCode = ExitCode.VERIFICATION_FAILED
    message: str = FAILED_MESSAGE
    run_id: str = field(default_factory=lambda: str(uuid.uuid4()))

    def __post_init__(self):
        self.exit_code = ExitCode(self.exit_code)

    @property
    def is_success(self) -> bool:
        return self.exit_code is ExitCode.OK

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "exit_code": int(self.exit_code),
            "message": self.message,
            "is_success": self.is_success,
        }


@dataclass
class BaseResultWithData(BaseResult):
    data: Any = None

    def to_dict(self) -> dict:
        return {**super().to_dict(), "data": self.data}

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from apps.qmacro import __version__
from backend.exceptions import UsageError
from utils.serialization_helpers import write_json

# Options that describe where output goes rather than what is computed
NON_REPLAYED = ("manifest", "output_dir", "verbosity", "settings", "pythonpath", "traceback",
                "no_color", "force_color", "skip_checks", "stdout", "stderr")


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None = None
    version: str = __version__
    wall_time: float = 0.0
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    outputs: list[str] = field(default_factory=list)

    @classmethod
    def for_options(cls, command: str, options: dict, seed: int | None = None) -> "RunManifest":
        params = {k: v for k, v in options.items() if k not in NON_REPLAYED}
        return cls(command=command, parameters=params, seed=seed)

    def write(self, directory, stem: str) -> Path:
        return write_json(Path(directory) / f"{stem}.manifest.json", asdict(self))

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            with Path(path).open(encoding="utf-8") as fh:
                payload = json.load(fh)
            return cls(
                command=payload["command"], parameters=dict(payload["parameters"]),
                seed=payload.get("seed"), version=payload.get("version", __version__),
                wall_time=float(payload.get("wall_time", 0.0)), created=payload.get("created", ""),
                outputs=list(payload.get("outputs", [])),
            )
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot replay manifest {path}: {exc}") from exc

    def replay_options(self, command: str) -> dict:
        if self.command != command:
            raise UsageError(f"manifest was written by '{self.command}', not '{command}'")
        return dict(self.parameters)

"""
Shared plumbing for the qmacro management commands: common flags, manifest
replay, result-to-exit-code mapping and file output.
"""

import re
import time
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.qmacro.BLL.Commands.runCommand.run_manifest import RunManifest
from backend.exceptions import UsageError
from utils.enums import ExitCode
from utils.serialization_helpers import write_json


class QmacroCommand(BaseCommand):
    """Subclasses implement add_command_arguments, execute_command and export."""

    command_name = ""
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("--d", type=int, help="prime local dimension")
        parser.add_argument("--n", type=int, default=1, help="number of particles")
        parser.add_argument("--fiducial", default=None, help="fiducial config (JSON)")
        parser.add_argument("--output-dir", default=None, help="directory for CSV/JSON output")
        parser.add_argument("--manifest", default=None, help="replay the parameters of a run manifest")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def execute_command(self, options):
        raise NotImplementedError

    def export(self, data, directory: Path, stem: str) -> list[Path]:
        return [write_json(directory / f"{stem}.json", data)]

    def output_stem(self, options) -> str:
        return f"{self.command_name}_d{options['d']}_n{options['n']}"

    def handle(self, *args, **options):
        if options.get("manifest"):
            try:
                manifest = RunManifest.load(options["manifest"])
                replayed = manifest.replay_options(self.command_name)
            except UsageError as exc:
                raise CommandError(exc.message, returncode=ExitCode.USAGE) from exc
            options.update({k: v for k, v in replayed.items() if k in options})
            self.stdout.write(f"Replaying {options['manifest']} (version {manifest.version})")
        if options.get("d") is None:
            raise CommandError("--d is required", returncode=ExitCode.USAGE)

        started = time.time()
        result = self.execute_command(options)
        if not result.is_success and result.data is None:
            raise CommandError(f"[{int(result.exit_code)}] {result.message}", returncode=int(result.exit_code))

        directory = Path(options.get("output_dir") or settings.QMACRO_OUTPUT_DIR)
        stem = re.sub(r"[^A-Za-z0-9_.-]+", "-", self.output_stem(options))
        paths = self.export(result.data, directory, stem)

        manifest = RunManifest.for_options(self.command_name, options, seed=options.get("seed"))
        manifest.wall_time = round(time.time() - started, 3)
        manifest.outputs = [str(p) for p in paths]
        paths.append(manifest.write(directory, stem))

        for path in paths:
            self.stdout.write(f"  wrote {path}")
        if not result.is_success:
            raise CommandError(f"[{int(result.exit_code)}] {result.message}", returncode=int(result.exit_code))
        self.stdout.write(self.style.SUCCESS(result.message))
        return None

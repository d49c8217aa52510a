from apps.qmacro.BLL.Commands.tomographyCommand.tomography_commands import ReconstructCommand
from apps.qmacro.management.base import QmacroCommand
from utils.enums import ReconstructionMode


class Command(QmacroCommand):
    help = "Reconstruct a state from exact collective data or from recorded counts"
    command_name = "reconstruct"

    def add_command_arguments(self, parser):
        parser.add_argument("--mode", default=ReconstructionMode.FULL.value, choices=[m.value for m in ReconstructionMode])
        parser.add_argument("--state", default=None, help="ghz | fiducial | dicke:<p-list> | file:<path>")
        parser.add_argument("--counts", default=None, help="counts file (JSON) keyed by weight vector")

    def execute_command(self, options):
        return ReconstructCommand.Execute(options["d"], options["n"], mode=options["mode"], state=options["state"],
                                          counts=options["counts"], fiducial=options["fiducial"])

    def output_stem(self, options):
        source = options["state"] or "counts"
        return f"reconstruct_{options['mode']}_d{options['d']}_n{options['n']}_{source}"

    def export(self, data, directory, stem):
        for key in ("fidelity", "pure_fidelity", "symmetrization_error", "error"):
            if key in data:
                self.stdout.write(f"{key}: {data[key]:.12g}")
        if "redundancy" in data:
            self.stdout.write(f"redundancy max violation: {data['redundancy']['max_violation']:.3e}")
        return super().export(data, directory, stem)

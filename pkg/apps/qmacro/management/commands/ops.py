import numpy as np

from apps.qmacro.BLL.Commands.operatorCommand.operator_commands import OpsCommand
from apps.qmacro.management.base import QmacroCommand


class Command(QmacroCommand):
    help = "Print the collective operators O_{k,l} and their commuting sets"
    command_name = "ops"

    def add_command_arguments(self, parser):
        parser.add_argument("--labels", default=None, help="semicolon-separated labels, e.g. 0,1;1,1")
        parser.add_argument("--collective", action="store_true", help="sum over N particles")

    def execute_command(self, options):
        labels = [x for x in options["labels"].split(";") if x.strip()] if options.get("labels") else None
        return OpsCommand.Execute(options["d"], options["n"], labels=labels,
                                  collective=options["collective"], fiducial=options["fiducial"])

    def export(self, data, directory, stem):
        if data["N"] == 1:
            with np.printoptions(precision=6, suppress=True):
                for entry in data["operators"]:
                    self.stdout.write(f"{entry['label']}  Tr(O^2) = {entry['trace_square']:.6f}")
                    self.stdout.write(str(np.round(entry["matrix"], 10)))
        self.stdout.write("Commuting sets: " + "  ".join("{" + ", ".join(g) + "}" for g in data["commuting_sets"]))
        return super().export(data, directory, stem)

from apps.qmacro.BLL.Commands.qtildeCommand.qtilde_commands import QTildeCommand
from apps.qmacro.management.base import QmacroCommand
from utils.enums import QTildeMethod
from utils.serialization_helpers import write_csv, write_json


class Command(QmacroCommand):
    help = "Tabulate the projected Q-function of a state on the measurement space"
    command_name = "qtilde"

    def add_command_arguments(self, parser):
        parser.add_argument("--state", default="ghz", help="ghz | fiducial | dicke:<p-list> | file:<path>")
        parser.add_argument("--method", default=QTildeMethod.FULL.value, choices=[m.value for m in QTildeMethod])
        parser.add_argument("--project", default=None, help="keep only these axes, e.g. 0,1 or m01;m10")

    def execute_command(self, options):
        project = [p for p in options["project"].split(";") if p.strip()] if options.get("project") else None
        return QTildeCommand.Execute(
            options["d"], options["n"], state=options["state"], method=options["method"],
            project=project, fiducial=options["fiducial"],
        )

    def output_stem(self, options):
        return f"qtilde_d{options['d']}_n{options['n']}_{options['state']}_{options['method']}"

    def export(self, data, directory, stem):
        paths = [write_csv(directory / f"{stem}.csv", data["columns"], data["rows"])]
        if "marginal" in data:
            paths.append(write_csv(directory / f"{stem}_marginal.csv", data["project"] + ["qtilde"], data["marginal"]))
        paths.append(write_json(directory / f"{stem}.json", data))
        self.stdout.write(f"{len(data['rows'])} classes, sum Q-tilde = {data['total']:.12g}")
        return paths

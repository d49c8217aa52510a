from apps.qmacro.BLL.Commands.qtildeCommand.qtilde_commands import MultiplicityCommand
from apps.qmacro.management.base import QmacroCommand
from utils.enums import SpaceMethod
from utils.serialization_helpers import write_csv, write_json


class Command(QmacroCommand):
    help = "Enumerate the multiplicities R_m and compare them with the closed forms"
    command_name = "multiplicity"

    def add_command_arguments(self, parser):
        parser.add_argument("--method", default=SpaceMethod.EXHAUSTIVE.value, choices=[m.value for m in SpaceMethod])

    def execute_command(self, options):
        return MultiplicityCommand.Execute(options["d"], options["n"], method=options["method"])

    def export(self, data, directory, stem):
        totals = data["totals"]
        rows = data["rows"] + [["total"] + [""] * (len(data["columns"]) - 4) + [totals["sum_R"], "", ""]]
        paths = [
            write_csv(directory / f"{stem}.csv", data["columns"], rows),
            write_json(directory / f"{stem}.json", data),
        ]
        self.stdout.write(
            f"{totals['classes']} classes (expected {totals['expected_classes']}), "
            f"sum R = {totals['sum_R']} (expected {totals['expected_sum_R']})"
        )
        return paths

from apps.qmacro.BLL.Commands.verifyCommand.verify_commands import VerifyCommand
from apps.qmacro.management.base import QmacroCommand


class Command(QmacroCommand):
    help = "Run invariant suites: sic, kernels, collective, tomography, symmetric or all"
    command_name = "verify"

    def add_command_arguments(self, parser):
        parser.add_argument("--suite", default="all")
        parser.add_argument("--seed", type=int, default=None)

    def execute_command(self, options):
        return VerifyCommand.Execute(options["suite"], options["d"], options["n"],
                                     fiducial=options["fiducial"], seed=options["seed"])

    def output_stem(self, options):
        return f"verify_{options['suite']}_d{options['d']}_n{options['n']}"

    def export(self, data, directory, stem):
        for check in data["checks"]:
            if check["passed"]:
                status = self.style.SUCCESS("PASS")
            elif check.get("informational"):
                status = self.style.WARNING("INFO")
            else:
                status = self.style.ERROR("FAIL")
            self.stdout.write(f"[{status}] {check['suite']:<11} {check['name']}: "
                              f"{check['residual']:.3e} (tol {check['tolerance']:.0e})")
        return super().export(data, directory, stem)

from apps.qmacro.BLL.Commands.benchmarkCommand.benchmark_commands import BenchMseCommand
from apps.qmacro.management.base import QmacroCommand
from utils.enums import Ensemble, Protocol
from utils.serialization_helpers import write_json


class Command(QmacroCommand):
    help = "Monte-Carlo mean squared error of the collective and SIC protocols"
    command_name = "bench_mse"

    def add_command_arguments(self, parser):
        parser.add_argument("--protocol", default=Protocol.COLLECTIVE.value,
                            help="collective, sic, or both comma-separated")
        parser.add_argument("--trials", default="100,1000,10000", help="comma-separated trial counts M")
        parser.add_argument("--ensemble", default=Ensemble.PURE.value, choices=[e.value for e in Ensemble])
        parser.add_argument("--states", type=int, default=None, help="ensemble size")
        parser.add_argument("--seed", type=int, default=None, help="master seed")
        parser.add_argument("--repetitions", type=int, default=1)
        parser.add_argument("--workers", type=int, default=None)

    def execute_command(self, options):
        protocols = tuple(p.strip() for p in options["protocol"].split(",") if p.strip())
        return BenchMseCommand.Execute(
            options["d"], options["n"], protocols=protocols, trials=options["trials"], ensemble=options["ensemble"],
            states=options["states"], seed=options["seed"], repetitions=options["repetitions"],
            fiducial=options["fiducial"], workers=options["workers"],
        )

    def output_stem(self, options):
        return f"bench_mse_d{options['d']}_n{options['n']}_{options['protocol']}_{options['ensemble']}"

    def export(self, data, directory, stem):
        for name, fit in data["fits"].items():
            self.stdout.write(f"{name}: lambda = {fit['lambda']:.6g}, slope = {fit['slope']:.4f}")
        return [write_json(directory / f"{stem}.json", data)]

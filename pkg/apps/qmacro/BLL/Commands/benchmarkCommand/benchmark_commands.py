"""
Benchmark Command Classes
Monte-Carlo MSE of the collective and product-SIC protocols
"""

from django.conf import settings

from apps.qmacro.BLL.Commands.runCommand.inputs import check_sizes, fiducial_payload, parse_int_list, resolve_fiducial
from apps.qmacro.BLL.Core.estimation import ExperimentConfig
from apps.qmacro.tasks import run_benchmark_tasks
from backend.exception_formatter import ExceptionFormatter
from backend.exceptions import UsageError
from utils.base_result import BaseResultWithData
from utils.enums import Ensemble, ExitCode, Protocol
from utils.log_helpers import OperationLogger


class BenchMseCommand:
    """Mean squared Hilbert-Schmidt error against the number of trials"""

    @staticmethod
    def Execute(d, N, protocols=(Protocol.COLLECTIVE,), trials=(100, 1000, 10000), ensemble=Ensemble.PURE,
                states=None, seed=None, repetitions=1, fiducial=None, workers=None):
        """
        Args:
            d (int): Prime local dimension
            N (int): Number of particles
            protocols (tuple): collective and/or sic
            trials (tuple[int] | str): Trial counts M, or a comma-separated list
            ensemble (Ensemble): pure or mixed random symmetric states
            states (int | None): Ensemble size, QMACRO_ENSEMBLE_SIZE by default
            seed (int | None): Master seed, QMACRO_DEFAULT_SEED by default
            repetitions (int): Independent samples per (state, M)
            fiducial (str | None): Path to a fiducial config
            workers (int | None): In-process parallelism for eager runs

        Returns:
            BaseResultWithData: one record per (protocol, M) with the lambda fits
        """
        seed = settings.QMACRO_DEFAULT_SEED if seed is None else int(seed)
        states = settings.QMACRO_ENSEMBLE_SIZE if states is None else int(states)
        op = OperationLogger("BenchMseCommand", d=d, n=N, protocols=protocols, trials=trials, states=states, seed=seed)
        op.start()
        try:
            check_sizes(d, N)
            if isinstance(trials, str):
                trials = parse_int_list(trials, "--trials")
            try:
                protocols = tuple(Protocol(p) for p in protocols)
                ensemble = Ensemble(ensemble)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            config = ExperimentConfig(
                d=d, N=N, trials=tuple(trials), ensemble=ensemble, ensemble_size=states,
                seed=seed, protocols=protocols, repetitions=repetitions,
            )
            xi = resolve_fiducial(fiducial, d, N)
            payload = fiducial_payload(xi) if fiducial or settings.QMACRO_FIDUCIAL else None

            with op.phase("ensemble simulation", states=states, trials=config.trials):
                result = run_benchmark_tasks(config, payload, workers)
            fits = {
                name: {
                    "lambda": fit.lam, "slope": fit.slope,
                    "crb_lambda": result.crb_fits[name].lam, "crb_slope": result.crb_fits[name].slope,
                }
                for name, fit in result.fits.items()
            }
            data = {"config": config.to_dict(), "records": result.to_records(), "fits": fits}
            op.success(f"{len(data['records'])} records")
            return BaseResultWithData(data=data, exit_code=ExitCode.OK,
                                      message=f"{states} states, {len(protocols)} protocol(s)")
        except Exception as e:
            return ExceptionFormatter.format_error(e, "BenchMseCommand", with_data=True)

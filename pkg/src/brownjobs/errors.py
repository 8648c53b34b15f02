"""Exception hierarchy shared across the toolkit.

Two broad families matter for the CLI exit-code contract: DataError
(bad inputs, violated preconditions, undefined statistics) maps to
exit code 2, EnvironmentFailure (network, missing model weights) maps
to exit code 3. Usage errors are raised by the CLI layer itself.
"""


class BrownjobsError(Exception):
    """Base class for all toolkit errors."""


class DataError(BrownjobsError):
    """Bad data or a violated operation precondition (CLI exit 2)."""


class UndefinedStatisticError(DataError):
    """A statistic was requested over an empty population."""


class OverlayError(DataError):
    """Manual-label overlay file is malformed or references unknown jobs.

    ``rows`` lists (row_number, message) pairs for every offending row.
    """

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = list(rows)


class StarvingSplitError(DataError):
    """A stratified split quota cannot be satisfied; names the split."""

    def __init__(self, split_name, message):
        super().__init__(message)
        self.split_name = split_name


class ShotCountError(DataError):
    """A class in the learning set is smaller than the requested shot count."""


class PairGenerationError(DataError):
    """Contrastive pairs cannot be formed (a class has fewer than 2 samples)."""


class TrainingDivergedError(DataError):
    """Fine-tuning produced a non-finite loss; carries the hyperparams."""

    def __init__(self, message, hyperparams=None):
        super().__init__(message)
        self.hyperparams = hyperparams


class MissingMetricsError(DataError):
    """The TF-IDF vote baseline was asked to predict without job metrics."""


class BundleError(DataError):
    """Problems loading or validating a persisted model bundle."""


class CorruptBundleError(BundleError):
    pass


class BundleVersionError(BundleError):
    pass


class BundleInvariantError(BundleError):
    pass


class MccvRepeatError(DataError):
    """One or more cross-validation repeats failed; lists their indices."""

    def __init__(self, message, repeat_indices=()):
        super().__init__(message)
        self.repeat_indices = list(repeat_indices)


class EnvironmentFailure(BrownjobsError):
    """Environment problem: network, auth, missing weights (CLI exit 3)."""


class NetworkFailure(EnvironmentFailure):
    """Request kept failing after bounded retries.

    ``partial`` may carry a progress report (pages/records already stored).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class AuthTokenError(EnvironmentFailure):
    """The CI API rejected the token (HTTP 401/403)."""


class ModelWeightsUnavailableError(EnvironmentFailure):
    """The pretrained embedding provider could not load its weights."""

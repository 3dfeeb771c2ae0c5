import os

from xsentinels import Default

from xsettings import Settings as _Settings, SettingsField
from xsettings.env_settings import EnvVarRetriever


_env_retriever = EnvVarRetriever()


class BunkbedSettings(_Settings):
    """
    Engine limits and defaults.

    Every field can be set via its environmental variable, or directly on the
    `bunkbed_settings` proxy (or a new `BunkbedSettings` activated as a context/decorator,
    since settings are `xinject` dependencies):

    >>> from bunkbed import bunkbed_settings
    >>> bunkbed_settings.exact_cap = 26

    Operations that take `cap`, `workers`, `samples` or `seed` arguments default them to
    `xsentinels.Default`, which is resolved against the current settings at call time.
    """

    exact_cap: int = SettingsField(
        name='BUNKBED_EXACT_CAP', retriever=_env_retriever, default_value=30
    )
    """ Max free edges the exact engine enumerates (`2 ** exact_cap` configurations). """

    partition_cap: int = SettingsField(
        name='BUNKBED_PARTITION_CAP', retriever=_env_retriever, default_value=24
    )
    """ Max free edges in the reduced edge set when enumerating cluster partitions. """

    poly_cap: int = SettingsField(
        name='BUNKBED_POLY_CAP', retriever=_env_retriever, default_value=24
    )
    """ Max free edges when tallying a connection polynomial. """

    search_exact_cap: int = SettingsField(
        name='BUNKBED_SEARCH_EXACT_CAP', retriever=_env_retriever, default_value=20
    )
    """
    Search harness engine selection: instances with at most this many free bunkbed edges
    are checked exactly, larger ones by Monte Carlo (re-verified exactly when flagged and
    still within `exact_cap`).
    """

    max_clusters: int = SettingsField(
        name='BUNKBED_MAX_CLUSTERS', retriever=_env_retriever, default_value=12
    )
    """ Max number of active clusters in the `3 ** n` same-neighbors decomposition sum. """

    automorphism_max_vertices: int = SettingsField(
        name='BUNKBED_AUTOMORPHISM_MAX_VERTICES', retriever=_env_retriever, default_value=12
    )

    exhaustive_max_vertices: int = SettingsField(
        name='BUNKBED_EXHAUSTIVE_MAX_VERTICES', retriever=_env_retriever, default_value=7
    )

    workers: int = SettingsField(
        name='BUNKBED_WORKERS', retriever=_env_retriever, default_value=os.cpu_count() or 1
    )
    """ Enumeration workers; results never depend on this value. """

    chunk_bits: int = SettingsField(
        name='BUNKBED_CHUNK_BITS', retriever=_env_retriever, default_value=16
    )
    """ Exact enumeration hands out configuration ranges of `2 ** chunk_bits` per task. """

    mc_samples: int = SettingsField(
        name='BUNKBED_MC_SAMPLES', retriever=_env_retriever, default_value=100_000
    )

    mc_chunk_size: int = SettingsField(
        name='BUNKBED_MC_CHUNK_SIZE', retriever=_env_retriever, default_value=65536
    )
    """
    Samples per random substream. Part of the reproducibility contract: changing it
    changes which substream draws which sample, so estimates change too.
    """

    seed: int = SettingsField(
        name='BUNKBED_SEED', retriever=_env_retriever, default_value=0
    )

    mc_flag_sigmas: float = SettingsField(
        name='BUNKBED_MC_FLAG_SIGMAS', retriever=_env_retriever, default_value=4.0
    )

    aggregate_tolerance: float = SettingsField(
        name='BUNKBED_AGGREGATE_TOLERANCE', retriever=_env_retriever, default_value=1e-9
    )
    """ Absolute tolerance for float identities summed over partitions. """

    term_tolerance: float = SettingsField(
        name='BUNKBED_TERM_TOLERANCE', retriever=_env_retriever, default_value=1e-12
    )
    """ Tolerance for per-term float identities and for the `d_C >= 0` float checks. """

    max_bisection_depth: int = SettingsField(
        name='BUNKBED_MAX_BISECTION_DEPTH', retriever=_env_retriever, default_value=200
    )

    result_cache_size: int = SettingsField(
        name='BUNKBED_RESULT_CACHE_SIZE', retriever=_env_retriever, default_value=4096
    )


bunkbed_settings = BunkbedSettings.proxy()


def resolve_setting(value, name: str):
    """ Returns `value`, or the current `bunkbed_settings.<name>` if `value` is `Default`. """
    if value is Default:
        return getattr(bunkbed_settings, name)
    return value

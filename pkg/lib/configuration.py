# SPDX-License-Identifier: MIT-0

import logging
import os
import sys

from .errors import ConfigurationError

# Profiles (selected through SPA_TOOLKIT_PROFILE)
DEFAULT = 'Default'
QUICK = 'Quick'

PROFILE_VARIABLE = 'SPA_TOOLKIT_PROFILE'
THREADS_VARIABLE = 'SPA_TOOLKIT_THREADS'

# Search budgets
POSITIVITY_STARTS = 'positivity_starts'
WITNESS_STARTS = 'witness_starts'
GILBERT_MAX_ITER = 'gilbert_max_iter'
GILBERT_ORACLE_STARTS = 'gilbert_oracle_starts'
SCAN_STEP = 'scan_step'
ANALYTIC_SHOT_THRESHOLD = 'analytic_shot_threshold'
BISECTION_TOLERANCE = 'bisection_tolerance'

# Fixed tolerances, identical for every profile
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-9
KRAUS_CUTOFF = 1e-10
VERDICT_MARGIN = 1e-10
WITNESS_TOLERANCE = 1e-6
KERNEL_TOLERANCE = 1e-8
CLOSED_FORM_TOLERANCE = 1e-8

APPLICATION_NAME = 'spa-toolkit'
VERSION = '0.1.0'


def get_local_configuration(profile: str) -> dict:
    """
    Provides the search budgets of a profile, validated for sanity.
    @param profile str: The profile used to retrieve corresponding configuration
    @raises: ConfigurationError: Throws if the requested profile does not exist
    @raises: ConfigurationError: Throws if a budget is not a positive number
    @return: dict:
    """
    local_mapping = {
        DEFAULT: {
            POSITIVITY_STARTS: 64,
            WITNESS_STARTS: 128,
            GILBERT_MAX_ITER: 5000,
            GILBERT_ORACLE_STARTS: 3,
            SCAN_STEP: 1e-3,
            ANALYTIC_SHOT_THRESHOLD: 10 ** 7,
            BISECTION_TOLERANCE: 1e-9,
        },
        # Smaller searches for quick interactive runs; tolerances are untouched.
        QUICK: {
            POSITIVITY_STARTS: 16,
            WITNESS_STARTS: 32,
            GILBERT_MAX_ITER: 500,
            GILBERT_ORACLE_STARTS: 2,
            SCAN_STEP: 1e-3,
            ANALYTIC_SHOT_THRESHOLD: 10 ** 7,
            BISECTION_TOLERANCE: 1e-9,
        },
    }

    if profile not in local_mapping:
        raise ConfigurationError(f'The requested profile: {profile} does not exist in local mappings')

    for key, value in local_mapping[profile].items():
        if not value > 0:
            raise ConfigurationError(f'Configuration value {key} must be positive, got {value}')

    return local_mapping[profile]


def get_active_profile() -> str:
    """Returns the profile named by SPA_TOOLKIT_PROFILE
    @return: str:
    """
    return os.environ.get(PROFILE_VARIABLE, DEFAULT)


def get_setting(key: str):
    """
    Looks up one budget in the active profile.
    @param key str: One of the module-level setting keys
    @raises: ConfigurationError: Throws if the key is unknown
    """
    configuration = get_local_configuration(get_active_profile())
    if key not in configuration:
        raise ConfigurationError(f'Unknown configuration key: {key}')
    return configuration[key]


def get_thread_count() -> int:
    """Returns the parallelism cap from SPA_TOOLKIT_THREADS (default 1)
    @raises: ConfigurationError: Throws if the variable is not a positive integer
    @return: int:
    """
    raw = os.environ.get(THREADS_VARIABLE, '1')
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigurationError(f'{THREADS_VARIABLE} must be an integer, got {raw!r}')
    if threads < 1:
        raise ConfigurationError(f'{THREADS_VARIABLE} must be at least 1, got {threads}')
    return threads


# Function for logger
def load_log_config(level=logging.INFO):
    """
    Configure logging: root logger on stderr, stdout stays reserved for JSON payloads
    @return:
    """
    root = logging.getLogger()
    root.setLevel(level)
    if not any(getattr(handler, '_spa_toolkit', False) for handler in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
        handler._spa_toolkit = True
        root.addHandler(handler)

    return root

#!/usr/bin/env python3
"""Configuration module for the QoS provisioning toolkit.

Contains all constants, default parameters, tolerances and export column orders.
"""

import math


class ChannelDefaults:
    """Default channel parameters used by the figure experiments.

    Note: SNR is always linear inside the library. The dB conversion is only
    offered by the command-line interface.
    """

    GAMMA = 10.0
    KAPPA = 50.0
    THETA = 1.0
    RATE = 3.0
    BLOCK_DURATION = 1.0

    # Exponential gain quantile used to cap the rate search: P(z > Z_HI) = 1e-12
    GAIN_TAIL_PROBABILITY = 1e-12
    Z_HI = -math.log(GAIN_TAIL_PROBABILITY)


class SourceDefaults:
    """Default arrival-source parameters."""

    P_ON = 0.5
    # alpha + beta for the fluid and Poisson sources when only P_ON is given
    TOTAL_RATE = 10.0
    LAMBDA_ON = 1.0


class Tolerances:
    """Numerical tolerances shared across modules."""

    MATCH_BISECTION = 1e-10
    MATCH_RESIDUAL = 1e-8
    BISECTION_MAX_ITER = 200
    GOLDEN_SECTION_XTOL = 1e-9
    THETA_RELATIVE = 1e-8
    DEGENERATE_CAPACITY = 1e-12


class SearchBounds:
    """Brackets for one-dimensional searches."""

    THETA_MIN = 1e-8
    THETA_MAX = 1e4
    LAMBDA_MAX = 1e300
    GRID_POINTS = 256


class SimulationDefaults:
    """Defaults for the Monte Carlo queue simulator."""

    BLOCKS = 100_000
    WARMUP = 1_000
    REPLICAS = 10
    SEED = 20190101
    ESTIMATOR_HORIZON = 200
    ESTIMATOR_REPLICAS = 100_000
    CONFIDENCE_Z = 1.96

    # Tail-fit band: at least this many samples and probability at most TAIL_BAND
    TAIL_MIN_COUNT = 30
    TAIL_BAND = 0.1
    MAX_TAIL_LEVELS = 400

    # Batch means for the estimator standard error; warn below this effective sample share
    ESTIMATOR_BATCHES = 20
    MIN_EFFECTIVE_SAMPLE_FRACTION = 0.01


class SweepDefaults:
    """Default grids for the figure experiments."""

    FIG2_RATE_START = 0.1
    FIG2_RATE_STOP = 8.0
    FIG2_RATE_STEP = 0.05

    FIG3_RATE = 3.0
    FIG3_KAPPA_RANGE = (0.1, 1e4)
    FIG3_KAPPA_POINTS = 60
    FIG3_GAMMAS = (10.0, 100.0)
    FIG3_THETAS = (0.01, 1.0)

    FIG4_GAMMA_DB_RANGE = (0.0, 30.0)
    FIG4_POINTS = 31
    P_ON_VALUES = (0.1, 0.5)

    FIG5_THETA_RANGE = (1e-3, 10.0)
    FIG5_POINTS = 41

    FIG6_POINTS = 25
    FIG6_DELAYS = (0.0, 1.0, 2.0, 5.0, 10.0)
    FIG6_DESIGN_THETA = 0.01
    FIG6_ARRIVAL_RATE = 1.0
    FIG6_P_ON_RANGE = (0.1, 1.0)

    FIG7_CAPACITIES = (0.5, 1.0, 1.5)
    FIG7_P_ON_RANGE = (0.05, 1.0)
    FIG7_POINTS = 20

    FAMILIES = ("dtms", "mfs", "mmps")


class ExitCodes:
    """Process exit codes of the command-line interface."""

    SUCCESS = 0
    USAGE = 2
    NO_SOLUTION = 3
    NUMERICAL_FAILURE = 4


class ExportColumns:
    """Column names for exported tables.

    Units are part of the header so the files are self-describing.
    """

    GAMMA = "gamma_linear"
    GAMMA_DB = "gamma_db"
    RATE = "rate_bits_per_block"
    KAPPA = "kappa_per_block"
    THETA = "theta_per_bit"
    P_ON_CHANNEL = "channel_p_on"
    C_E = "c_e_bits_per_block"
    UPPER_BOUND = "c_e_upper_bound_bits_per_block"
    FAMILY = "family"
    P_ON_SOURCE = "source_p_on"
    LAMBDA_ON_STAR = "lambda_on_star_bits_per_block"
    LAMBDA_AVG_STAR = "lambda_avg_star_bits_per_block"
    RESIDUAL = "match_residual"
    METHOD = "match_method"
    DELAY = "delay_threshold_blocks"
    VIOLATION = "delay_violation_probability"
    OPERATING_THETA = "operating_theta_per_bit"
    ZETA = "zeta"
    PANEL = "panel"
    GRID_INDEX = "grid_index"
    IS_FAMILY_ARGMAX = "is_family_argmax"

    MATCH_ORDER = [
        GRID_INDEX,
        GAMMA,
        RATE,
        KAPPA,
        THETA,
        P_ON_CHANNEL,
        C_E,
        UPPER_BOUND,
        FAMILY,
        P_ON_SOURCE,
        LAMBDA_ON_STAR,
        LAMBDA_AVG_STAR,
        RESIDUAL,
        METHOD,
    ]

    CAPACITY_ORDER = [
        GRID_INDEX,
        GAMMA,
        RATE,
        KAPPA,
        THETA,
        P_ON_CHANNEL,
        C_E,
        UPPER_BOUND,
    ]

    ARRIVAL_ORDER = [
        GRID_INDEX,
        THETA,
        C_E,
        FAMILY,
        P_ON_SOURCE,
        LAMBDA_ON_STAR,
        LAMBDA_AVG_STAR,
        RESIDUAL,
        METHOD,
    ]

    TRADEOFF_ORDER = [
        PANEL,
        GRID_INDEX,
        GAMMA,
        RATE,
        KAPPA,
        THETA,
        OPERATING_THETA,
        C_E,
        FAMILY,
        P_ON_SOURCE,
        LAMBDA_AVG_STAR,
        ZETA,
        DELAY,
        VIOLATION,
    ]

    CSV_FLOAT_FORMAT = "%.12g"

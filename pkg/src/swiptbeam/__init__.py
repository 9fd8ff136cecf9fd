"""Minimum-power beamforming with joint QoS and RF energy-harvesting constraints."""

from .model import (BeamformerWeights, ChannelSet, ConstraintResiduals, LinkGains,
                    Scheme, SolveOutcome, SolveStatus, SystemConfig, dbm_to_mw,
                    db_to_linear, linear_to_db, load_config, mw_to_dbm,
                    received_power, sinr, verify_solution)
from .channels import dump_channels, generate_channels, load_channels
from .beamformers import (DegenerateChannelError, MrtZfCoefficients, link_gains,
                          mrt_weights, mrt_zf_weights, rzf_weights, zf_weights)

__version__ = "0.1.0"

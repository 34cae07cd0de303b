"""Sizing and simulation toolkit for a solar-powered rotary drum composter."""

from .config import PRESETS, ToolConfig, config_from_dict, parse_config
from .drivetrain import (
    DrivetrainDesign,
    DrumSpec,
    GearStage,
    MotorSpec,
    PulleyPair,
    WrapGeometry,
    size_drivetrain,
)
from .energy_budget import DutySchedule, PowerMode
from .pv_model import PvDatasheet, PvModule, SingleDiodeParams, extract_parameters
from .report import build_report
from .system_sim import autonomy_check, simulate

__version__ = "0.1.0"

__all__ = [
    "PRESETS", "ToolConfig", "config_from_dict", "parse_config",
    "DrivetrainDesign", "DrumSpec", "GearStage", "MotorSpec", "PulleyPair",
    "WrapGeometry", "size_drivetrain", "DutySchedule", "PowerMode",
    "PvDatasheet", "PvModule", "SingleDiodeParams", "extract_parameters",
    "build_report", "autonomy_check", "simulate",
]

"""Counting PSL_2(Z[i]) orbit points in sectors about a totally geodesic plane."""

from .counting import (CountResult, GroupConfig, automorphic_sum, ball_count, count_sector, count_sweep,
                       oracle_count, picard_config, sector_orbit)
from .geometry import Point, SectorCoords

__all__ = ["CountResult", "GroupConfig", "Point", "SectorCoords", "automorphic_sum", "ball_count",
           "count_sector", "count_sweep", "oracle_count", "picard_config", "sector_orbit"]

import numpy as np


# Fixed colors, only 3 tiers
COLOR_WINNER    = "#1A7A4A"   # Deep green: tied at the top
COLOR_CONTENDER = "#52B788"   # Light green: at or above the 40th percentile
COLOR_TRAILING  = "#F4C542"   # Yellow: the rest

LABEL_WINNER    = "Winner"
LABEL_CONTENDER = "Contender"
LABEL_TRAILING  = "Trailing"


class ColorMapper:
    """
    Tier colours for outcome bars, calibrated per chart.

    Tiers (computed from the totals shown in one chart):
      Maximum          → Deep Green  (#1A7A4A): Winner
      ≥ 40th pct       → Light Green (#52B788): Contender
      below            → Yellow      (#F4C542): Trailing

    Usage:
        ColorMapper.calibrate(totals, chart_key="tally")
        ColorMapper.get_color(total)
        ColorMapper.get_label(total)
    """

    # chart_key → (top, p40)
    _thresholds: dict = {}
    _active_chart: str = "_default"

    PERCENTILE = 40

    @classmethod
    def calibrate(cls, totals: list, chart_key: str = "_default") -> None:
        if not totals:
            return
        arr = np.array([float(total) for total in totals])
        cls._thresholds[chart_key] = (float(arr.max()), float(np.percentile(arr, cls.PERCENTILE)))
        cls._active_chart = chart_key

    @classmethod
    def set_active_chart(cls, chart_key: str) -> None:
        cls._active_chart = chart_key

    @classmethod
    def _get_thresholds(cls) -> tuple | None:
        return cls._thresholds.get(cls._active_chart)

    @classmethod
    def get_label(cls, total) -> str:
        thresholds = cls._get_thresholds()
        if total is None or thresholds is None:
            return LABEL_TRAILING
        top, p40 = thresholds
        if total >= top:
            return LABEL_WINNER
        elif total >= p40:
            return LABEL_CONTENDER
        return LABEL_TRAILING

    @classmethod
    def get_color(cls, total) -> str:
        return {
            LABEL_WINNER: COLOR_WINNER,
            LABEL_CONTENDER: COLOR_CONTENDER,
            LABEL_TRAILING: COLOR_TRAILING,
        }[cls.get_label(total)]

    @classmethod
    def get_color_and_label(cls, total) -> tuple:
        return cls.get_color(total), cls.get_label(total)

from utils.color_mapper import (
    COLOR_CONTENDER,
    COLOR_WINNER,
    LABEL_CONTENDER,
    LABEL_TRAILING,
    LABEL_WINNER,
    ColorMapper,
)


def test_tiers_follow_chart_totals():
    ColorMapper.calibrate([3, 3, -2], chart_key="test-tally")
    assert ColorMapper.get_label(3) == LABEL_WINNER
    assert ColorMapper.get_label(2) == LABEL_CONTENDER
    assert ColorMapper.get_label(-2) == LABEL_TRAILING
    assert ColorMapper.get_color_and_label(3) == (COLOR_WINNER, LABEL_WINNER)
    assert ColorMapper.get_color(2) == COLOR_CONTENDER


def test_missing_total_is_trailing():
    ColorMapper.calibrate([1, 2], chart_key="test-missing")
    assert ColorMapper.get_label(None) == LABEL_TRAILING


def test_charts_keep_their_own_thresholds():
    ColorMapper.calibrate([10, 0], chart_key="test-wide")
    ColorMapper.calibrate([1, 0], chart_key="test-narrow")
    assert ColorMapper.get_label(1) == LABEL_WINNER
    ColorMapper.set_active_chart("test-wide")
    assert ColorMapper.get_label(1) == LABEL_TRAILING

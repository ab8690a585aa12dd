import pandas as pd

from components.report import Report, build_bar_figure, frame_text
from utils.color_mapper import ColorMapper
from utils.errors import PreconditionError
from utils.mechanics import ElectionCalculator
from utils.models import Election, NoBudget, StrategyProfile


def _outcome_names(election: Election) -> list[str]:
    return [election.outcome_name(outcome) for outcome in range(election.n_outcomes)]


def require_profile(profile: StrategyProfile | None) -> StrategyProfile:
    if profile is None:
        raise PreconditionError("the election file has no profile")
    return profile


def winner_report(election: Election, profile: StrategyProfile) -> Report:
    election.check_profile(profile)
    tally = ElectionCalculator.tally(profile)
    ColorMapper.calibrate(list(tally.totals), chart_key="tally")
    frame = pd.DataFrame(
        {
            "total": tally.totals,
            "probability": [str(p) for p in tally.probabilities],
            "tier": [ColorMapper.get_label(total) for total in tally.totals],
        },
        index=pd.Index(_outcome_names(election), name="outcome"),
    )
    payload = {
        "totals": list(tally.totals),
        "winners": sorted(tally.winners),
        "probabilities": list(tally.probabilities),
    }
    if isinstance(election.config, NoBudget):
        alpha = election.config.alpha
        payload["payments"] = [ElectionCalculator.payment(row, alpha) for row in profile.values]
        if election.n_agents > 1:
            payload["refunds"] = [ElectionCalculator.refund(profile, agent, alpha) for agent in range(election.n_agents)]
    else:
        payload["credits"] = [ElectionCalculator.cost(row) for row in profile.values]

    winners = ", ".join(election.outcome_name(outcome) for outcome in sorted(tally.winners))
    text = frame_text(frame, f"winners: {winners}")
    figure = build_bar_figure(_outcome_names(election), {"votes": list(tally.totals)}, "Vote totals", "tally")
    return Report(payload=payload, text=text, figure=figure)


def utility_report(
    election: Election,
    profile: StrategyProfile,
    agent: int,
    with_refund: bool = False,
    ballot: tuple[int, ...] | None = None,
) -> Report:
    if ballot is not None:
        profile = profile.replace_row(agent, ballot)
    utility = ElectionCalculator.total_utility(election, profile, agent, include_refund=with_refund)
    tally = ElectionCalculator.tally(profile)
    payload = {
        "agent": agent,
        "ballot": list(profile.row(agent)),
        "utility": utility,
        "winners": sorted(tally.winners),
        "with_refund": with_refund,
    }
    text = (
        f"agent {election.agent_name(agent)} ballot {list(profile.row(agent))}: "
        f"utility {utility}{' (refund included)' if with_refund else ''}"
    )
    return Report(payload=payload, text=text)

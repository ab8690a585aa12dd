import pandas as pd

from components.report import EXIT_NEGATIVE, EXIT_OK, Report, build_bar_figure, frame_text
from utils.criteria import CriteriaChecker, SearchConfig
from utils.errors import InvalidArgumentError
from utils.mechanics import ElectionCalculator
from utils.models import Election, StrategyProfile
from utils.voting_rules import RuleId, VotingRules


def compare_report(election: Election, profile: StrategyProfile | None, rule: RuleId) -> Report:
    """Winners under a classical rule's sincere ballots, next to the QV winners when there is a profile."""
    if rule.kind == RuleId.QV:
        raise InvalidArgumentError("compare needs a classical rule; QV is the reference")
    names = [election.outcome_name(outcome) for outcome in range(election.n_outcomes)]
    ballots = VotingRules.sincere_ballots(rule, election.utilities)
    scores = VotingRules.scores(rule, ballots)
    winners = VotingRules.rule_winner(rule, ballots)
    series = {rule.label: list(scores)}
    payload = {"rule": rule.label, "ballots": ballots.to_lists(), "scores": list(scores), "winners": sorted(winners)}
    if profile is not None:
        tally = ElectionCalculator.tally(profile)
        series["qv"] = list(tally.totals)
        payload["qv_totals"] = list(tally.totals)
        payload["qv_winners"] = sorted(tally.winners)

    frame = pd.DataFrame(series, index=pd.Index(names, name="outcome"))
    title = f"{rule.label} winners: {', '.join(names[outcome] for outcome in sorted(winners))}"
    if profile is not None:
        title += f"; qv winners: {', '.join(names[outcome] for outcome in payload['qv_winners'])}"
    figure = build_bar_figure(names, series, f"{rule.label} vs QV", "compare")
    return Report(payload=payload, text=frame_text(frame, title), figure=figure)


def criteria_report(
    election: Election | None,
    profile: StrategyProfile | None,
    rules: list[RuleId],
    criteria: list[str],
    config: SearchConfig,
    search: bool,
) -> Report:
    results = CriteriaChecker.criteria_matrix(
        rules, criteria,
        election=None if search else election,
        profile=None if search else profile,
        config=config,
    )
    if len(results) == 1:
        result = results[0]
        verdict = "holds" if result.holds else "fails"
        text = f"{result.criterion} {verdict} for {result.rule.label} ({result.trials} cases)"
        if result.note:
            text += f": {result.note}"
        if result.counterexample is not None and not result.holds:
            text += f"\ncounterexample: {result.counterexample}"
        payload = result.to_dict()
    else:
        table = pd.DataFrame(
            [["yes" if result.holds else "no" for result in results[row:row + len(criteria)]]
             for row in range(0, len(results), len(criteria))],
            index=pd.Index([rule.label for rule in rules], name="rule"),
            columns=criteria,
        )
        text = frame_text(table)
        payload = {"results": [result.to_dict() for result in results]}
    exit_code = EXIT_OK if all(result.holds for result in results) else EXIT_NEGATIVE
    return Report(payload=payload, text=text, exit_code=exit_code)

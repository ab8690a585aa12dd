import pandas as pd

from components.report import EXIT_NEGATIVE, EXIT_OK, Report, frame_text
from utils.collusion import Coalition, CollusionCheck, CollusionPlanner
from utils.models import Election, FixedBudget, StrategyProfile


def _budget(election: Election) -> int | None:
    return election.config.budget if isinstance(election.config, FixedBudget) else None


def _payments_frame(election: Election, coalition: Coalition, check: CollusionCheck) -> pd.DataFrame:
    return pd.DataFrame(
        {"before": check.payments_before, "after": check.payments_after},
        index=pd.Index([election.agent_name(member) for member in coalition.ordered()], name="agent"),
    )


def _check_payload(check: CollusionCheck) -> dict:
    return {
        "beneficial": check.beneficial,
        "sums_preserved": check.sums_preserved,
        "no_payment_increase": check.no_payment_increase,
        "some_payment_decrease": check.some_payment_decrease,
        "within_budget": check.within_budget,
        "payments_before": list(check.payments_before),
        "payments_after": list(check.payments_after),
    }


def cancel_report(election: Election, profile: StrategyProfile, outcome: int, members: list[int]) -> Report:
    coalition = Coalition.of(members)
    trace = CollusionPlanner.cancel_opposing_trace(profile, coalition, outcome)
    after = CollusionPlanner.cancel_opposing(profile, coalition, outcome)
    check = CollusionPlanner.verify_collusion(profile, after, coalition, _budget(election))
    payload = {
        "outcome": outcome,
        "coalition": list(coalition.ordered()),
        "column_before": [profile.values[member][outcome] for member in coalition.ordered()],
        "column_after": list(trace.result),
        "d_sequence": list(trace.d_sequence),
        "profile": after.to_lists(),
        "check": _check_payload(check),
    }
    text = "\n".join([
        f"outcome {election.outcome_name(outcome)}: {payload['column_before']} -> {payload['column_after']}",
        f"remaining opposing support per step: {list(trace.d_sequence)}",
        frame_text(_payments_frame(election, coalition, check), "payments"),
        f"beneficial collusion: {check.beneficial}",
    ])
    return Report(payload=payload, text=text)


def cycle_report(election: Election, profile: StrategyProfile) -> Report:
    graph = CollusionPlanner.build_preference_graph(profile)
    cycle = CollusionPlanner.find_beneficial_cycle(graph)
    if cycle is None:
        payload = {"cycle": None, "has_cycle": graph.has_cycle()}
        return Report(payload=payload, text="no cycle with a strictly beneficial edge", exit_code=EXIT_NEGATIVE)

    after = CollusionPlanner.apply_cycle_transfers(profile, cycle)
    coalition = Coalition.of(edge.agent for edge in cycle)
    check = CollusionPlanner.verify_collusion(profile, after, coalition, _budget(election))
    edges = [
        {"from": edge.tail, "to": edge.head, "agent": edge.agent, "strict": edge.strict}
        for edge in cycle
    ]
    payload = {"cycle": edges, "profile": after.to_lists(), "check": _check_payload(check)}
    lines = [
        f"{election.outcome_name(edge.tail)} -> {election.outcome_name(edge.head)} "
        f"by {election.agent_name(edge.agent)}{' (strict)' if edge.strict else ''}"
        for edge in cycle
    ]
    text = "\n".join([
        "cycle:", *("  " + line for line in lines),
        frame_text(_payments_frame(election, coalition, check), "payments"),
        f"beneficial collusion: {check.beneficial}",
    ])
    return Report(payload=payload, text=text, exit_code=EXIT_OK)

import pandas as pd

from components.report import EXIT_NEGATIVE, EXIT_OK, Report, frame_text
from utils.equilibrium import EquilibriumChecker
from utils.mechanics import ElectionCalculator
from utils.models import Election, StrategyProfile
from utils.oracle import BruteForceOracle, OracleBound


def _oracle_bound(max_votes: int | None) -> OracleBound | None:
    return OracleBound(max_votes) if max_votes is not None else None


def deviate_report(
    election: Election,
    profile: StrategyProfile,
    agent: int,
    oracle: bool = False,
    max_votes: int | None = None,
) -> Report:
    current = ElectionCalculator.total_utility(election, profile, agent)
    if oracle:
        bound = _oracle_bound(max_votes) or BruteForceOracle.sufficient_bound(profile, agent)
        deviation = BruteForceOracle.oracle_deviate(election, profile, agent, bound)
    else:
        deviation = EquilibriumChecker.deviate(election, profile, agent)

    payload = {"agent": agent, "current_utility": current, "deviation": None}
    if deviation is None:
        text = f"agent {election.agent_name(agent)} has no beneficial deviation (utility {current})"
        return Report(payload=payload, text=text, exit_code=EXIT_NEGATIVE)

    payload["deviation"] = {
        "strategy": list(deviation.strategy),
        "utility": deviation.utility,
        "gain": deviation.utility - current,
    }
    text = (
        f"agent {election.agent_name(agent)} deviates to {list(deviation.strategy)}: "
        f"utility {deviation.utility} (was {current})"
    )
    return Report(payload=payload, text=text, exit_code=EXIT_OK)


def verify_ne_report(
    election: Election,
    profile: StrategyProfile,
    oracle: bool = False,
    max_votes: int | None = None,
    every_agent: bool = False,
) -> Report:
    if every_agent:
        return _deviation_table_report(election, profile, oracle, max_votes)
    if oracle:
        report = BruteForceOracle.oracle_verify_nash(
            election, profile, _oracle_bound(max_votes) or _widest_bound(profile))
    else:
        report = EquilibriumChecker.verify_nash(election, profile)

    payload = {"is_equilibrium": report.is_equilibrium, "witness": None}
    if report.is_equilibrium:
        return Report(payload=payload, text="the profile is a pure Nash equilibrium", exit_code=EXIT_OK)
    agent, strategy, gain = report.witness
    payload["witness"] = {"agent": agent, "strategy": list(strategy), "gain": gain}
    text = (
        f"not an equilibrium: agent {election.agent_name(agent)} gains {gain} "
        f"by switching to {list(strategy)}"
    )
    return Report(payload=payload, text=text, exit_code=EXIT_NEGATIVE)


def _widest_bound(profile: StrategyProfile) -> OracleBound:
    return max(
        (BruteForceOracle.sufficient_bound(profile, agent) for agent in range(profile.n_agents)),
        key=lambda bound: bound.max_abs_vote,
    )


def _deviation_table_report(election, profile, oracle, max_votes) -> Report:
    rows, entries = [], []
    for agent in range(election.n_agents):
        current = ElectionCalculator.total_utility(election, profile, agent)
        if oracle:
            bound = _oracle_bound(max_votes) or BruteForceOracle.sufficient_bound(profile, agent)
            deviation = BruteForceOracle.oracle_deviate(election, profile, agent, bound)
        else:
            deviation = EquilibriumChecker.deviate(election, profile, agent)
        entry = {"agent": agent, "current_utility": current, "strategy": None, "utility": None, "gain": None}
        if deviation is not None:
            entry.update(strategy=list(deviation.strategy), utility=deviation.utility,
                         gain=deviation.utility - current)
        entries.append(entry)
        rows.append({
            "agent": election.agent_name(agent),
            "current": str(current),
            "best response": "-" if deviation is None else str(list(deviation.strategy)),
            "gain": "-" if deviation is None else str(deviation.utility - current),
        })

    is_equilibrium = all(entry["strategy"] is None for entry in entries)
    payload = {"is_equilibrium": is_equilibrium, "agents": entries}
    verdict = "pure Nash equilibrium" if is_equilibrium else "not an equilibrium"
    text = frame_text(pd.DataFrame(rows).set_index("agent"), verdict)
    return Report(payload=payload, text=text, exit_code=EXIT_OK if is_equilibrium else EXIT_NEGATIVE)

"""
Vote redistribution inside a coalition.

Two constructions lower the coalition's payments while leaving every outcome
total unchanged: cancelling opposing votes on a single outcome, and shifting
one vote along each edge of a cycle in the claimed preference graph.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from utils.errors import InvalidArgumentError, PreconditionError, ShapeError
from utils.mechanics import ElectionCalculator
from utils.models import StrategyProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Coalition:
    members: frozenset[int]

    def __post_init__(self):
        members = frozenset(int(member) for member in self.members)
        if not members:
            raise InvalidArgumentError("a coalition needs at least one member")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Iterable[int]) -> "Coalition":
        return cls(frozenset(members))

    def check(self, profile: StrategyProfile) -> None:
        for member in self.members:
            profile.check_agent(member)

    def ordered(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class CancellationTrace:
    """
    Vote columns of the coalition, in member order, after every iteration of
    the cancellation loop. `d_sequence[k]` is the remaining opposing support
    when member k is reached.
    """

    members: tuple[int, ...]
    columns: tuple[tuple[int, ...], ...]
    d_sequence: tuple[int, ...]
    mirrored: bool

    @property
    def result(self) -> tuple[int, ...]:
        return self.columns[-1]


@dataclass(frozen=True)
class PreferenceEdge:
    """Agent `agent` casts fewer votes for `tail` than for `head`."""

    tail: int
    head: int
    agent: int
    gap: int

    @property
    def strict(self) -> bool:
        return self.gap > 1


@dataclass(frozen=True, eq=False)
class PreferenceGraph:
    graph: nx.MultiDiGraph

    @property
    def edges(self) -> tuple[PreferenceEdge, ...]:
        return tuple(
            data["edge"]
            for _, _, data in sorted(
                self.graph.edges(data=True),
                key=lambda item: (item[2]["edge"].tail, item[2]["edge"].head, item[2]["edge"].agent),
            )
        )

    @property
    def strict_edges(self) -> tuple[PreferenceEdge, ...]:
        return tuple(sorted(
            (edge for edge in self.edges if edge.strict),
            key=lambda edge: (edge.agent, edge.tail, edge.head),
        ))

    def has_cycle(self) -> bool:
        return not nx.is_directed_acyclic_graph(self.graph)

    def widest_edge(self, tail: int, head: int) -> PreferenceEdge:
        """Among parallel edges, the one with the largest vote gap; ties go to the lowest agent."""
        candidates = [data["edge"] for data in self.graph.get_edge_data(tail, head).values()]
        return min(candidates, key=lambda edge: (-edge.gap, edge.agent))

    def successors(self, node: int) -> list[int]:
        """Outcomes reachable in one hop, widest edge first; ties go to the lowest outcome."""
        return sorted(self.graph.successors(node), key=lambda head: (-self.widest_edge(node, head).gap, head))


@dataclass(frozen=True)
class CollusionCheck:
    sums_preserved: bool
    no_payment_increase: bool
    some_payment_decrease: bool
    within_budget: bool
    payments_before: tuple[int, ...]
    payments_after: tuple[int, ...]

    @property
    def beneficial(self) -> bool:
        return self.sums_preserved and self.no_payment_increase and self.some_payment_decrease and self.within_budget


class CollusionPlanner:

    @staticmethod
    def _cancel(column: Sequence[int]) -> tuple[list[list[int]], list[int]]:
        """Run the cancellation loop on a column whose positive support is at least its negative support."""
        votes = list(column)
        D = sum(-vote for vote in votes if vote < 0)
        columns, d_sequence = [], []
        for index, vote in enumerate(votes):
            d_sequence.append(D)
            if vote > 0:
                kept = max(0, vote - D)
                D -= vote - kept
                votes[index] = kept
            else:
                votes[index] = 0
            if D < 0:
                raise PreconditionError(f"opposing support went negative ({D}) at position {index}")
            columns.append(list(votes))
        return columns, d_sequence

    @staticmethod
    def cancel_opposing_trace(profile: StrategyProfile, coalition: Coalition, outcome: int) -> CancellationTrace:
        coalition.check(profile)
        members = coalition.ordered()
        full_column = profile.column(outcome)
        column = [full_column[member] for member in members]
        positive = sum(vote for vote in column if vote > 0)
        negative = sum(-vote for vote in column if vote < 0)
        if positive == 0 or negative == 0:
            raise PreconditionError(
                f"outcome {outcome} needs votes in both directions from the coalition "
                f"(positive {positive}, negative {negative})"
            )
        mirrored = negative > positive
        if mirrored:
            column = [-vote for vote in column]
        columns, d_sequence = CollusionPlanner._cancel(column)
        if mirrored:
            columns = [[-vote for vote in step] for step in columns]
        logger.debug("cancellation on outcome %s: D sequence %s", outcome, d_sequence)
        return CancellationTrace(
            members=members,
            columns=tuple(tuple(step) for step in columns),
            d_sequence=tuple(d_sequence),
            mirrored=mirrored,
        )

    @staticmethod
    def cancel_opposing(profile: StrategyProfile, coalition: Coalition, outcome: int) -> StrategyProfile:
        """Cancel the weaker direction of the coalition's votes on `outcome`."""
        trace = CollusionPlanner.cancel_opposing_trace(profile, coalition, outcome)
        new_column = list(profile.column(outcome))
        for member, vote in zip(trace.members, trace.result):
            new_column[member] = vote
        return profile.replace_column(outcome, new_column)

    @staticmethod
    def build_preference_graph(profile: StrategyProfile) -> PreferenceGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(profile.n_outcomes))
        for agent, ballot in enumerate(profile.values):
            for tail, low in enumerate(ballot):
                for head, high in enumerate(ballot):
                    if low < high:
                        edge = PreferenceEdge(tail=tail, head=head, agent=agent, gap=high - low)
                        graph.add_edge(tail, head, key=agent, edge=edge)
        return PreferenceGraph(graph=graph)

    @staticmethod
    def find_beneficial_cycle(graph: PreferenceGraph) -> list[PreferenceEdge] | None:
        """
        A simple cycle through a strictly beneficial edge.

        Strict edges are tried by (agent, tail, head), skipping those whose
        ends lie in different strongly connected components. The way back
        from head to tail is the first path of a depth-first search with a
        visited set. The search follows successors widest edge first instead
        of lowest index first, and each hop back uses its widest parallel
        edge (lowest agent on ties) instead of the first one found.
        """
        component = {}
        for index, nodes in enumerate(nx.strongly_connected_components(graph.graph)):
            for node in nodes:
                component[node] = index
        for strict in graph.strict_edges:
            if component[strict.tail] != component[strict.head]:
                continue
            path = CollusionPlanner._path_back(graph, strict.head, strict.tail)
            if path is None:
                continue
            cycle = [strict, *(graph.widest_edge(tail, head) for tail, head in zip(path, path[1:]))]
            logger.debug("beneficial cycle through outcomes %s", [strict.tail, *path])
            return cycle
        return None

    @staticmethod
    def _path_back(graph: PreferenceGraph, start: int, target: int) -> list[int] | None:
        """Depth-first search for a simple path; each outcome is entered at most once."""
        path = [start]
        visited = {start}
        branches = [iter(graph.successors(start))]
        while branches:
            head = next(branches[-1], None)
            if head is None:
                branches.pop()
                path.pop()
            elif head == target:
                return [*path, head]
            elif head not in visited:
                visited.add(head)
                path.append(head)
                branches.append(iter(graph.successors(head)))
        return None

    @staticmethod
    def apply_cycle_transfers(profile: StrategyProfile, cycle: Sequence[PreferenceEdge]) -> StrategyProfile:
        """Each edge moves one vote of its agent from the head outcome to the tail outcome."""
        rows = [list(row) for row in profile.values]
        for edge in cycle:
            profile.check_agent(edge.agent)
            if not (0 <= edge.tail < profile.n_outcomes and 0 <= edge.head < profile.n_outcomes):
                raise PreconditionError(f"edge {edge} refers to an unknown outcome")
            rows[edge.agent][edge.tail] += 1
            rows[edge.agent][edge.head] -= 1
        return StrategyProfile.from_rows(rows)

    @staticmethod
    def verify_collusion(
        before: StrategyProfile,
        after: StrategyProfile,
        coalition: Coalition,
        budget: int | None = None,
    ) -> CollusionCheck:
        if before.shape != after.shape:
            raise ShapeError("after", f"shape {after.shape} does not match {before.shape}")
        coalition.check(before)
        for agent in range(before.n_agents):
            if agent not in coalition.members and before.values[agent] != after.values[agent]:
                raise PreconditionError(f"agent {agent} is outside the coalition but changed its ballot")

        members = coalition.ordered()
        paid_before = tuple(ElectionCalculator.cost(before.values[member]) for member in members)
        paid_after = tuple(ElectionCalculator.cost(after.values[member]) for member in members)
        check = CollusionCheck(
            sums_preserved=ElectionCalculator.tally(before).totals == ElectionCalculator.tally(after).totals,
            no_payment_increase=all(new <= old for old, new in zip(paid_before, paid_after)),
            some_payment_decrease=any(new < old for old, new in zip(paid_before, paid_after)),
            within_budget=budget is None or all(ElectionCalculator.validate_budget(after, budget)),
            payments_before=paid_before,
            payments_after=paid_after,
        )
        logger.info("collusion check for %s: beneficial=%s", members, check.beneficial)
        return check

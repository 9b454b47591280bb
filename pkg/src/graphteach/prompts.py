"""Prompt templates for chat-model teachers.

The instruction text and worked examples are a fixed, versioned template:
tests pin the exact bytes, so edit with care. Trial prompts are pure
functions of the stimulus; edges render as ``[(a,b),...]`` and rewards as a
``{node:reward}`` dictionary, both without spaces.
"""

from __future__ import annotations

from .graphs import TaskGraph
from .stimuli import TrialStimulus

TRIAL_KINDS = ("teach", "reward_scaffold", "inference_scaffold")

INSTRUCTION_TEXT = """\
Welcome! In this experiment, you will act as a teacher helping a student choose the best path through a graph to maximize points.

Graph Structure:
- The graph consists of circles connected by lines.
- Each circle represents a point value.

How the Student Navigates:
- The student moves down a graph, gathering points along the way.
- They always start at the top and move down or diagonally down to reach an endpoint.
- Each circle provides a certain number of points.
- The student does not know all possible paths and will choose what they believe to be the best option based on their knowledge.

Here is an example of the student's path:

Example Walkthrough:
- The student navigates through the graph, earning points along the way.
- They take a path they believe is optimal, given what they know.
- In this example, they earn 4 points because they were unaware of a better route.

Learner's transitions: [(0,1),(0,2),(1,5),(2,4),(2,5),(2,6),(5,8),(5,9),(6,9)]
Reward values: {0:0,1:2,2:1,3:0,4:0,5:1,6:0,7:3,8:1,9:0}
Learner's Trajectory: [(0,1),(1,5),(5,8)]

Your Role as a Teacher:
- You can see all possible paths.

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]

- You do not know the student's transitions, but know the Reward values, Learner's Trajectory and you assume they took the best path available to them.
- Your goal is to reveal one new path to the student to improve their score.

Example of Good Advice:
Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:2,2:1,3:0,4:0,5:1,6:0,7:3,8:1,9:0}
Learner's Trajectory: [(0,1),(1,5),(5,8)]
If you reveal the edge (5,7) to the student, the student will navigate again and now earn 6 points instead of 4.

Example of Bad Advice:
Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:2,2:1,3:0,4:0,5:1,6:0,7:3,8:1,9:0}
Learner's Trajectory: [(0,1),(1,5),(5,8)]
If you reveal the edge (5,9) to the student, the student will navigate again and will not increase their points.

Here are 3 examples of good advice:

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:2,2:1,3:0,4:0,5:1,6:0,7:2,8:1,9:0}
Learner's Trajectory: [(0,2),(2,5),(5,8)]
Advice: (5,7) is the best edge to reveal.

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:2,2:1,3:0,4:0,5:1,6:0,7:2,8:1,9:2}
Learner's Trajectory: [(0,2),(2,5),(2,8)]
Advice: Here are 2 good edges to reveal: (5,7) or (5,9).

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:0,2:0,3:1,4:0,5:2,6:1,7:0,8:2,9:0}
Learner's Trajectory: [(0,3),(3,6),(6,8)]
Advice: Here are 2 good edges to reveal: (3,5) or (5,8).

Okay let's get started!
I will give the Teacher's transitions, Reward values, and the Learner's Trajectory. And you have to select only 1 edge from the Teacher's transitions to reveal to the student."""

REWARD_SCAFFOLD_INSTRUCTIONS = """\
We are going to add a new step before teaching. Instead of teaching an edge you will select three edges that are connecting the largest numbers.

Here are 2 examples of good advice:

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:3,2:2,3:3,4:1,5:2,6:0,7:0,8:1,9:3}
Learner's Trajectory: [(0,2),(2,4),(4,6)]
The three best choices are [(4,8),(2,5),(0,3)]
Explanation for (4,8): This edge connects to node 8, which has a higher reward value.
Explanation for (2,5): This edge connects to node 5, which has a higher reward value than the student's current path.
Explanation for (0,3): This edge connects to nodes with high values that could lead to better outcomes."""

INFERENCE_SCAFFOLD_INSTRUCTIONS = """\
We are going to add a new step before teaching. Instead of teaching an edge you will select three edges that you think the student does not know.

Here are 2 examples of good advice:

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:0,2:1,3:3,4:2,5:1,6:0,7:2,8:2,9:1}
Learner's Trajectory: [(0,2),(2,5),(5,9)]
The three best choices are [(5,7),(5,8),(2,4)]
Explanation for (5,7) and (5,8): If the learner had known about (5,7) or (5,8), they would have chosen it. Therefore, we can confidently assume the learner does not know (5,7) or (5,8).
Explanation for (2,4): There's a higher chance that the learner knows (4,7) or (4,8) rather than (2,4) itself.

Teacher's transitions: [(0,1),(0,2),(0,3),(1,4),(1,5),(2,4),(2,5),(2,6),(3,5),(3,6),(4,7),(4,8),(5,7),(5,8),(5,9),(6,8),(6,9)]
Reward values: {0:0,1:3,2:2,3:3,4:1,5:2,6:0,7:0,8:1,9:3}
Learner's Trajectory: [(0,2),(2,4),(4,6)]
The three best choices are [(4,8),(2,5),(0,3)]
Explanation for (4,8): If the learner had known about (4,8), they would have chosen it. Therefore, we can confidently assume the learner does not know (4,8).
Explanation for (2,5): There's a higher chance that the learner knows one of edges connected to the end of (2,5) rather than (2,5) itself.
Explanation for (0,3): This one is a little more complex. We've seen the learner use (4,6). So using the same reasoning as (2,5) we find that (0,3) is most likely not known by the learner."""

TEACH_TRIAL_TEMPLATE = """\
Try to help this student maximize their points.
Teacher's transitions: {edges}
Reward values: {rewards}
Learner's Trajectory: {trajectory}
Please make sure your response ends in the format (x,y)"""

REWARD_SCAFFOLD_TRIAL_TEMPLATE = """\
Select three edges that are connected to the largest value nodes.
Teacher's transitions: {edges}
Reward values: {rewards}
Learner's Trajectory: {trajectory}
Please make sure your response ends in the format [(x,y),(x,y),(x,y)]"""

INFERENCE_SCAFFOLD_TRIAL_TEMPLATE = """\
Select three edges that you think the student does not know.
Teacher's transitions: {edges}
Reward values: {rewards}
Learner's Trajectory: {trajectory}
Please make sure your response ends in the format [(x,y),(x,y),(x,y)]"""


def format_edge_list(pairs) -> str:
    return "[" + ",".join(f"({a},{b})" for a, b in pairs) + "]"


def format_rewards(graph: TaskGraph) -> str:
    return "{" + ",".join(f"{n}:{r}" for n, r in sorted(graph.rewards.items())) + "}"


def build_instruction_prompt(scaffold_kind: str | None = None) -> str:
    """The full task briefing; scaffold conditions append their extra step
    and worked examples."""
    if scaffold_kind in (None, "none"):
        return INSTRUCTION_TEXT
    if scaffold_kind == "reward":
        return INSTRUCTION_TEXT + "\n\n" + REWARD_SCAFFOLD_INSTRUCTIONS
    if scaffold_kind == "inference":
        return INSTRUCTION_TEXT + "\n\n" + INFERENCE_SCAFFOLD_INSTRUCTIONS
    raise ValueError(f"unknown scaffold kind {scaffold_kind!r}")


def build_trial_prompt(stimulus: TrialStimulus, kind: str = "teach") -> str:
    if kind not in TRIAL_KINDS:
        raise ValueError(f"unknown trial prompt kind {kind!r}")
    template = {
        "teach": TEACH_TRIAL_TEMPLATE,
        "reward_scaffold": REWARD_SCAFFOLD_TRIAL_TEMPLATE,
        "inference_scaffold": INFERENCE_SCAFFOLD_TRIAL_TEMPLATE,
    }[kind]
    return template.format(
        edges=format_edge_list(stimulus.graph.edges),
        rewards=format_rewards(stimulus.graph),
        trajectory=format_edge_list(stimulus.trajectory.pairs(stimulus.graph)),
    )

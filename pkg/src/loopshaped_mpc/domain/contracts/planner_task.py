"""Protocol for a planner running alongside the simulation."""

from typing import Protocol


class PlannerTaskProtocol(Protocol):
    """Protocol for a background replanning loop."""

    async def start(self) -> None:
        """Start replanning."""
        ...

    async def stop(self) -> None:
        """Stop replanning and wait for the current solve to finish."""
        ...

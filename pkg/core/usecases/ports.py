"""Port interfaces for graphlim: functionals, graph and document sources, report sinks."""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence

from core.domain.entities import SequenceManifest
from core.domain.graph import Graph
from core.domain.values import NormedValue


class GraphFunctionalPort(ABC):
    """Port for graph functionals with values in a normed space.

    Implementations must be pure: equal graphs give equal values.
    """

    @abstractmethod
    def evaluate(self, g: Graph) -> NormedValue:
        """Evaluate the functional on a graph."""
        pass


class GraphSourcePort(ABC):
    """Port for reading and writing graphs."""

    @abstractmethod
    def read(self, source: str) -> Graph:
        """Load a graph from a location."""
        pass

    @abstractmethod
    def write(self, g: Graph, target: str) -> None:
        """Store a graph at a location."""
        pass


class ReportSinkPort(ABC):
    """Port for experiment report persistence."""

    @abstractmethod
    def write_json(self, name: str, payload: Dict[str, Any]) -> str:
        """Write a JSON document and return its location."""
        pass

    @abstractmethod
    def write_csv(self, name: str, header: Sequence[str], rows: List[Sequence[Any]]) -> str:
        """Write a CSV table and return its location."""
        pass


class DocumentSourcePort(ABC):
    """Port for the JSON and tabular documents an experiment reads besides graphs."""

    @abstractmethod
    def load_manifest(self, source: str) -> SequenceManifest:
        """Load a sequence manifest; member paths come back resolved."""
        pass

    @abstractmethod
    def load_kernel(self, source: str) -> Any:
        """Load a kernel specification."""
        pass

    @abstractmethod
    def load_reals(self, source: str) -> List[float]:
        """Load a sequence a_1, a_2, ... of reals."""
        pass

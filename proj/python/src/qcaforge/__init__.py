"""Python bindings for qcaforge: QCA layouts, clocked simulation, metrics and truth-table verification."""

from ._qcaforge import *  # noqa: F401,F403
from ._qcaforge import Layout, SimConfig, simulate

__version__ = "0.1.0"


def run(layout: Layout, vectors, config: SimConfig | None = None, threads: int = 1):
    """Simulates a list of ``{label: bool}`` vectors; plain ints are accepted as values."""
    normalized = [{k: bool(v) for k, v in vec.items()} for vec in vectors]
    return simulate(layout, normalized, config or SimConfig(), threads)

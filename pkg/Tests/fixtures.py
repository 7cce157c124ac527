"""
Shared quivers, representations and the MCP stand-in for the test suites.
"""

import json
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent))

from exactfield import Field
from quiver import Quiver, make_quiver
from rep import Representation

DATA = Path(__file__).parent / "data"


class MockMCP:
    """Collects the functions registered with @mcp.tool()."""

    def __init__(self):
        self.tools = {}

    def tool(self):
        def decorator(func):
            self.tools[func.__name__] = func
            return func
        return decorator


def data_path(name: str) -> str:
    return str(DATA / name)


def quiver_text(name: str) -> str:
    return (DATA / f"{name}.json").read_text()


def load_quiver(name: str) -> Quiver:
    return Quiver.from_json(quiver_text(name))


def a2() -> Quiver:
    return make_quiver(["1", "2"], [("x", "1", "2")])


def build_rep(q: Quiver, f: Field, dims, maps=None) -> Representation:
    """Representation from a dims list and {arrow id: rows}; missing arrows of size zero are filled in."""
    return Representation.from_json({"dims": list(dims), "maps": maps or {}}, quiver=q, field=f)


def rep_text(m: Representation) -> str:
    return json.dumps(m.to_json())

from mcp.server.fastmcp import FastMCP

# Handle imports for both execution contexts
try:
    # When run as module from parent directory
    from . import exactfield  # exact_linear_algebra
    from . import quiver  # quiver_structure
    from . import rep  # representation_theory
    from . import functors  # reflection_functors
    from . import tubes  # tube_analysis
    from . import canon  # canonical_basis
    from . import hallalg  # hall_algebra
except ImportError:
    # When run directly from the package directory
    import exactfield
    import quiver
    import rep
    import functors
    import tubes
    import canon
    import hallalg

# Initialize FastMCP server
mcp = FastMCP("Affine Quiver Toolkit")

# Register one consolidated tool per module
exactfield.register_tools(mcp)
quiver.register_tools(mcp)
rep.register_tools(mcp)
functors.register_tools(mcp)
tubes.register_tools(mcp)
canon.register_tools(mcp)
hallalg.register_tools(mcp)

if __name__ == "__main__":
    import asyncio
    asyncio.run(mcp.run())

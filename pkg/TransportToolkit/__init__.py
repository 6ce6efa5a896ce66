VERSION = "0.1.0"

# Should be extendable as we add more sub modules.
__all__ = ["Core", "SemiDual", "Solvers", "Utils", "Bench", "Cli"]

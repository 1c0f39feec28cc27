"""Structure learning for quadratic-variance-function DAGs via topological layers."""

__version__ = "0.1.0"

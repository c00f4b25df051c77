"""Random groups in the density model: free-group tools, presentations,
decorated Van Kampen diagrams, explicit bounds and equation lifting."""

__version__ = "0.1.0"

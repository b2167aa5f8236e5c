"""Applied analyses built on the core modules."""

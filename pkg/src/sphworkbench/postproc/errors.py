class EmptySelection(Exception):
    """A selector or spatial window matched no particles."""

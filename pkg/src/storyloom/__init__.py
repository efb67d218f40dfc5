"""Grammar-driven storylet generation over a simplex-noise world.

The pieces fit together like this: ``world`` lays out a 2-D grid of
terrain tags from simplex noise, ``grammar`` expands Tracery-style
grammars into storylets for those tags, ``embeddings`` measures how
similar two storylets read, and ``evolve`` runs a novelty-search
grammatical-evolution loop that collects unusually distinct storylets
into an archive.  ``cli`` ties it all together and ``bundle`` exports a
static web bundle for the browser explorer.
"""

__version__ = "0.1.0"

from .errors import StoryloomError

__all__ = ["StoryloomError", "__version__"]

"""litscout: curate an academic-paper corpus and serve semantic similarity search.

The pipeline stages (filter, scrape, clean, embed, project, export, serve) are
exposed both as library modules and as `litscout <stage>` CLI subcommands.
"""

__version__ = "0.1.0"

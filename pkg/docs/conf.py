# Sphinx configuration for the auxma docs.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import re
from pathlib import Path

project = "auxma"
copyright = "2021, vcokltfre"
author = "vcokltfre"

master_doc = "index"

_init = (Path(__file__).parent.parent / "auxma" / "__init__.py").read_text(encoding="utf-8")
version = re.search(r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]', _init, re.MULTILINE).group(1)  # type: ignore
release = version

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinxcontrib_trio",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "furo"

intersphinx_mapping = {
    "py": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}

# uvloop is an optional extra.
autodoc_mock_imports = ["uvloop"]
autodoc_typehints = "description"
autodoc_member_order = "bysource"

"""procmach: a virtual machine and analysis toolchain for a small
message-passing process language.

Subpackages and modules:

- ``syntax``: abstract syntax, expression evaluation, pretty printing
- ``parser``: concrete grammar
- ``machine``: the abstract machine (configurations, steps, schedulers)
- ``causality``: causal structure of runs and per-output cost measures
- ``behavior``: labelled transition systems and weak bisimilarity
- ``complexity``: bound expressions, cost reports, complexity checking
- ``encoders``: compilers from standard machine models to process programs
- ``cli``: command-line interface
"""

__version__ = "0.1.0"

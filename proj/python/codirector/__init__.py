from ._codirector import *  # noqa: F401,F403

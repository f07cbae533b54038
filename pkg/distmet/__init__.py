# encoding: utf-8

import os

from sdsstools import get_logger, get_package_version
from sdsstools.configuration import read_yaml_file


NAME = "distmet"

__version__ = get_package_version(path=__file__, package_name=NAME)


config = read_yaml_file(os.path.join(os.path.dirname(__file__), "etc/distmet.yaml"))

log = get_logger(NAME)


from .exceptions import *
from .fock import *
from .network import *
from .qfi import *
from .bounds import *
from .protocols import *
from .optimizer import *
from .campaigns import *
from .tools import *

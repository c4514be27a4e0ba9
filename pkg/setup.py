"""
Setup for pident.
"""
# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import setuptools

from pident import __version__

setuptools.setup(version=__version__)

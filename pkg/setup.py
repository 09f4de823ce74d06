# Copyright 2026 The ultrahyperbolic Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or  implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================
"""Install script for setuptools."""

import importlib.util

from setuptools import find_packages
from setuptools import setup


def _load_version():
  """Load ultrahyperbolic version."""
  spec = importlib.util.spec_from_file_location(
      '_version', 'ultrahyperbolic/_version.py'
  )
  version_module = importlib.util.module_from_spec(spec)
  spec.loader.exec_module(version_module)
  return version_module.__version__


setup(
    name='ultrahyperbolic',
    version=_load_version(),
    description=(
        'Graph representation learning on pseudo-hyperboloids with '
        'pseudo-Riemannian gradient descent.'),
    author='The ultrahyperbolic Authors',
    license='Apache License, Version 2.0',
    keywords='pseudo-riemannian hyperbolic graph embedding machine learning',
    packages=find_packages(exclude=['examples']),
    package_data={'ultrahyperbolic': ['data/*.tsv']},
    install_requires=[
        'absl-py',
        'googleapis-common-protos',
        'immutabledict',
        'networkx>=2.5',
        'numpy',
        'protobuf>=3.8',
        'scipy>=1.6',
    ],
    python_requires='>=3.8',
    entry_points={
        'console_scripts': [
            'ultrahyperbolic=ultrahyperbolic.cli:run_main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: POSIX :: Linux',
        'Operating System :: Microsoft :: Windows',
        'Operating System :: MacOS :: MacOS X',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)

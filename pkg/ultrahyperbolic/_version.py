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
"""Package version for ultrahyperbolic.

Kept in a separate file so that setup.py can reference the version without
pulling in all the dependencies in __init__.py.
"""

__version__ = '0.1.0'  # https://www.python.org/dev/peps/pep-0440/

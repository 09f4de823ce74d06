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

"""Provides custom Pythonic errors carrying a google.rpc.Status payload.

Every failure raised by the library is an `UltrahyperbolicError`. The status
code is one of the canonical `google.rpc.Code` values and any structured
context (the offending scalar product, an iteration index, a line number) is
packed into the status details as a `google.protobuf.Struct`.
"""

from typing import Any, Dict, Iterable

from google.protobuf import any_pb2
from google.protobuf import struct_pb2
from google.rpc import code_pb2
from google.rpc import status_pb2


class UltrahyperbolicError(Exception):
  """An ultrahyperbolic custom exception.

  Wraps a google.rpc.Status message as a Python Exception class.
  """

  def __init__(self, status_proto: status_pb2.Status):
    super().__init__()
    self._status_proto = status_proto

  @property
  def code(self) -> int:
    return self._status_proto.code

  @property
  def message(self) -> str:
    return self._status_proto.message

  @property
  def details(self) -> Iterable[any_pb2.Any]:
    return self._status_proto.details

  @property
  def context(self) -> Dict[str, Any]:
    """Structured context attached to the error, merged over all details."""
    result = {}
    for detail in self._status_proto.details:
      if detail.Is(struct_pb2.Struct.DESCRIPTOR):
        struct = struct_pb2.Struct()
        detail.Unpack(struct)
        result.update(
            {key: _from_value(value) for key, value in struct.fields.items()})
    return result

  def __str__(self):
    return str(self._status_proto)

  def __repr__(self):
    return (f'UltrahyperbolicError(code={self.code}, message={self.message})')

  def __reduce__(self):
    return (UltrahyperbolicError, (self._status_proto,))


def _from_value(value: struct_pb2.Value) -> Any:
  kind = value.WhichOneof('kind')
  if kind == 'number_value':
    return value.number_value
  elif kind == 'string_value':
    return value.string_value
  elif kind == 'bool_value':
    return value.bool_value
  elif kind == 'null_value':
    return None
  elif kind == 'list_value':
    return [_from_value(item) for item in value.list_value.values]
  return {key: _from_value(item)
          for key, item in value.struct_value.fields.items()}


def make_error(code: int, message: str, **context) -> UltrahyperbolicError:
  """Builds an `UltrahyperbolicError` with optional structured context.

  Args:
    code: A `google.rpc.code_pb2` status code.
    message: Human readable description of the failure.
    **context: JSON-compatible values (numbers, strings, bools, lists) stored
      in the status details.

  Returns:
    The error, ready to be raised.
  """
  status = status_pb2.Status(code=code, message=message)
  if context:
    struct = struct_pb2.Struct()
    struct.update({key: _to_json(value) for key, value in context.items()})
    status.details.add().Pack(struct)
  return UltrahyperbolicError(status)


def _to_json(value: Any) -> Any:
  # numpy scalars and arrays are not accepted by Struct.update.
  if hasattr(value, 'tolist'):
    return value.tolist()
  return value


def invalid_argument(message: str, **context) -> UltrahyperbolicError:
  return make_error(code_pb2.INVALID_ARGUMENT, message, **context)


def failed_precondition(message: str, **context) -> UltrahyperbolicError:
  return make_error(code_pb2.FAILED_PRECONDITION, message, **context)


def out_of_range(message: str, **context) -> UltrahyperbolicError:
  return make_error(code_pb2.OUT_OF_RANGE, message, **context)


def unimplemented(message: str, **context) -> UltrahyperbolicError:
  return make_error(code_pb2.UNIMPLEMENTED, message, **context)


def aborted(message: str, **context) -> UltrahyperbolicError:
  return make_error(code_pb2.ABORTED, message, **context)

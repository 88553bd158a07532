// Copyright 2026 The mmtqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MMTQA_ERRORS_HPP
#define MMTQA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmtqa {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-domain parameters, malformed operators, unusable grids.
/// The command-line tool maps these to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class GridResolutionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ShiftTooLargeError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class AliasingError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NonHermitianError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidStateError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ZeroDenominatorError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class FitDegenerateError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class StructureError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// An iterative solver ran out of iterations before it could certify a
/// result. Maps to exit code 3.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace mmtqa

#endif  // MMTQA_ERRORS_HPP

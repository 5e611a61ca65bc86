//------------------------------------------------------------------------------
//
//   Copyright 2026 The emoknn Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emoknn {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number.
class ParseError : public Error
{
public:
  ParseError(std::string const &source, std::size_t line, std::string const &what)
    : Error(source + ":" + std::to_string(line) + ": " + what)
    , line_(line)
  {}

  std::size_t line() const noexcept
  {
    return line_;
  }

private:
  std::size_t line_;
};

/// Contract violation on otherwise well-formed values.
class ValidationError : public Error
{
public:
  using Error::Error;
};

/// Missing key (instance id, lexicon, embedding store).
class LookupError : public Error
{
public:
  using Error::Error;
};

/// Input for which the requested quantity is undefined (constant vector, empty pool).
class DegenerateError : public Error
{
public:
  using Error::Error;
};

}  // namespace emoknn

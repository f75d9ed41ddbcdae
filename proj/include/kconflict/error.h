// Copyright 2026 The kconflict Authors
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

#ifndef KCONFLICT_ERROR_H_
#define KCONFLICT_ERROR_H_

#include <stdexcept>
#include <string>

namespace kconflict {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, schema violations and referential problems.
class DatasetError : public Error {
 public:
  using Error::Error;
};

// Invalid substitution plans and passage-selection failures.
class SelectionError : public Error {
 public:
  using Error::Error;
};

// No admissible value left to draw (entity pool, alternative answers).
class SamplingError : public Error {
 public:
  using Error::Error;
};

class MixError : public Error {
 public:
  using Error::Error;
};

// A ratio or statistic whose denominator is zero.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

// External reader or infiller process failures.
class ExternalToolError : public Error {
 public:
  using Error::Error;
};

}  // namespace kconflict

#endif  // KCONFLICT_ERROR_H_

// Copyright 2026 The gosh-cpu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gosh {

// Base for every error raised by the library. The CLI maps subclasses to exit
// codes: input_error (and parse_error) -> 3, config_error -> 2, rest -> 4.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class input_error : public error {
 public:
  using error::error;
};

class parse_error : public input_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : input_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class empty_graph_error : public input_error {
 public:
  empty_graph_error() : input_error("graph has no edges") {}
};

class config_error : public error {
 public:
  using error::error;
};

class split_error : public error {
 public:
  using error::error;
};

class plan_error : public error {
 public:
  using error::error;
};

class sampling_error : public error {
 public:
  using error::error;
};

// Violated internal scheduling contract in the partitioned trainer.
class scheduling_error : public error {
 public:
  using error::error;
};

class dimension_error : public error {
 public:
  using error::error;
};

}  // namespace gosh
